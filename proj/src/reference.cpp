#include "syncount/reference.h"

#include <array>
#include <string_view>

namespace syncount::reference {

namespace {

// Entry (row, column) of the cyclic listing is A_0(x0, x1, x2, x3) with
// row = (x0, x1) and column = (x2, x3).
constexpr std::array<std::string_view, 9> kCyclic437 = {
    "111101111",  // 00
    "111220111",  // 01
    "111101111",  // 02
    "101100101",  // 10
    "000000000",  // 11
    "101000000",  // 12
    "111110111",  // 20
    "111100100",  // 21
    "111100101",  // 22
};

// Row = (x0, x1, x2), column = (x3, x4, x5); each cell lists A_0..A_5.
constexpr std::array<std::array<std::string_view, 8>, 8> kGeneral626 = {{
    {"111111", "111111", "111111", "111111", "111111", "111111", "111111",
     "011000"},
    {"111111", "111111", "111111", "111011", "111011", "111011", "010001",
     "010000"},
    {"111111", "111111", "111111", "101001", "111111", "101001", "011111",
     "001000"},
    {"111111", "111011", "101001", "100000", "100001", "100000", "000001",
     "000000"},
    {"111111", "111111", "111111", "110110", "111111", "110110", "011111",
     "000000"},
    {"111111", "111111", "110110", "110110", "110110", "110110", "010000",
     "000000"},
    {"011111", "110110", "011111", "000000", "011111", "000000", "011111",
     "001000"},
    {"010110", "010110", "000000", "000000", "000010", "000000", "000001",
     "000000"},
}};

}  // namespace

Algorithm cyclic_4_3_7() {
  Params params{.n = 4, .f = 1, .s = 3, .t = 7};
  return Algorithm::from_function(
      params, AlgorithmClass::cyclic, [](int, std::span<const State> u) {
        int row = u[0] * 3 + u[1];
        int col = u[2] * 3 + u[3];
        return static_cast<State>(kCyclic437[row][col] - '0');
      });
}

Algorithm general_6_2_6() {
  Params params{.n = 6, .f = 1, .s = 2, .t = 6};
  return Algorithm::from_function(
      params, AlgorithmClass::general, [](int node, std::span<const State> u) {
        int row = u[0] * 4 + u[1] * 2 + u[2];
        int col = u[3] * 4 + u[4] * 2 + u[5];
        return static_cast<State>(kGeneral626[row][col][node] - '0');
      });
}

Algorithm follow_the_leader(int n) {
  Params params{.n = n, .f = 0, .s = 2, .t = 1};
  return Algorithm::from_function(
      params, AlgorithmClass::general,
      [](int, std::span<const State> u) { return static_cast<State>(1 - u[0]); });
}

Algorithm identity(const Params& params) {
  return Algorithm::from_function(
      params, AlgorithmClass::general,
      [](int node, std::span<const State> u) { return u[node]; });
}

}  // namespace syncount::reference
