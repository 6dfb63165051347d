#include "syncount/core_model.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace syncount {

namespace {

// Tables are indexed by uint64 but must also fit in memory.
constexpr std::uint64_t kMaxTableSize = std::uint64_t{1} << 28;

int parse_int(std::string_view text, std::string_view what) {
  int value = 0;
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw FormatError("bad integer for " + std::string(what) + ": '" +
                      std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::string_view to_string(AlgorithmClass c) {
  return c == AlgorithmClass::cyclic ? "cyclic" : "general";
}

AlgorithmClass parse_algorithm_class(std::string_view text) {
  if (text == "cyclic") return AlgorithmClass::cyclic;
  if (text == "general") return AlgorithmClass::general;
  throw FormatError("unknown algorithm class '" + std::string(text) + "'");
}

std::uint64_t checked_pow(std::uint64_t base, int exp) {
  std::uint64_t result = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && result > std::numeric_limits<std::uint64_t>::max() / base) {
      throw SizeLimitError("integer overflow in power computation");
    }
    result *= base;
  }
  return result;
}

void Params::validate() const {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (f < 0) throw std::invalid_argument("f must be non-negative");
  if (f >= n) throw std::invalid_argument("f must be smaller than n");
  if (s < 2) throw std::invalid_argument("s must be at least 2");
  if (s > 255) throw std::invalid_argument("s must be at most 255");
  if (t < 0) throw std::invalid_argument("t must be non-negative");
  if (t0 && (*t0 < 0 || *t0 > t)) {
    throw std::invalid_argument("t0 must lie in [0, t]");
  }
}

std::uint64_t Params::observed_count() const { return checked_pow(s, n); }

std::uint64_t Params::actual_count(int faulty) const {
  return checked_pow(s, n - faulty);
}

int Params::max_useful_t() const {
  auto count = checked_pow(s, n - f);
  return static_cast<int>(std::min<std::uint64_t>(
             count, std::numeric_limits<int>::max())) - 2;
}

// ---------------------------------------------------------------------------

FaultSet::FaultSet(std::initializer_list<int> members)
    : FaultSet(std::vector<int>(members)) {}

FaultSet::FaultSet(std::vector<int> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
    throw std::invalid_argument("duplicate node in fault set");
  }
  if (!members_.empty() && members_.front() < 0) {
    throw std::invalid_argument("negative node in fault set");
  }
}

bool FaultSet::contains(int node) const {
  return std::binary_search(members_.begin(), members_.end(), node);
}

bool FaultSet::fits(int n) const {
  return members_.empty() || members_.back() < n;
}

FaultSet FaultSet::rotated(int n, int by) const {
  std::vector<int> out;
  out.reserve(members_.size());
  for (int m : members_) out.push_back(((m + by) % n + n) % n);
  return FaultSet(std::move(out));
}

std::string FaultSet::to_string() const {
  std::string out = "{";
  for (std::size_t k = 0; k < members_.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(members_[k]);
  }
  out += '}';
  return out;
}

FaultSet FaultSet::parse(std::string_view text) {
  if (text.size() >= 2 && text.front() == '{' && text.back() == '}') {
    text = text.substr(1, text.size() - 2);
  }
  std::vector<int> members;
  if (!text.empty()) {
    for (auto part : split(text, ',')) {
      members.push_back(parse_int(part, "fault set member"));
    }
  }
  return FaultSet(std::move(members));
}

std::vector<FaultSet> FaultSet::enumerate(int n, int f) {
  std::vector<FaultSet> out;
  for (int size = 0; size <= std::min(f, n); ++size) {
    std::vector<int> pick(size);
    for (int k = 0; k < size; ++k) pick[k] = k;
    while (true) {
      out.emplace_back(pick);
      int k = size - 1;
      while (k >= 0 && pick[k] == n - size + k) --k;
      if (k < 0) break;
      ++pick[k];
      for (int j = k + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string ActualConfig::to_string() const {
  std::string out;
  out.reserve(entries.size());
  for (State v : entries) {
    out += v == star() ? '*' : static_cast<char>('0' + v);
  }
  return out;
}

ActualConfig project(const ObservedConfig& u, const FaultSet& faults,
                     int states) {
  ActualConfig x{u.entries, states};
  for (int m : faults.members()) {
    if (m >= static_cast<int>(x.entries.size())) {
      throw std::out_of_range("fault set member outside configuration");
    }
    x.entries[m] = x.star();
  }
  return x;
}

// ---------------------------------------------------------------------------

ConfigSpace::ConfigSpace(int n, int s) : n_(n), s_(s) {
  if (n < 1 || s < 2) throw std::invalid_argument("bad configuration space");
  powers_.resize(n + 1);
  powers_[0] = 1;
  for (int i = 0; i < n; ++i) {
    if (powers_[i] > kMaxTableSize) {
      throw SizeLimitError("configuration space s^n is too large");
    }
    powers_[i + 1] = powers_[i] * s;
  }
  size_ = powers_[n];
  if (size_ > kMaxTableSize) {
    throw SizeLimitError("configuration space s^n is too large");
  }
}

std::uint64_t ConfigSpace::index_of(std::span<const State> config) const {
  if (static_cast<int>(config.size()) != n_) {
    throw std::invalid_argument("configuration has wrong length");
  }
  std::uint64_t index = 0;
  for (int i = n_ - 1; i >= 0; --i) {
    if (config[i] >= s_) throw std::invalid_argument("state out of range");
    index = index * s_ + config[i];
  }
  return index;
}

std::vector<State> ConfigSpace::config_at(std::uint64_t index) const {
  std::vector<State> out(n_);
  for (int i = 0; i < n_; ++i) {
    out[i] = static_cast<State>(index % s_);
    index /= s_;
  }
  return out;
}

State ConfigSpace::digit(std::uint64_t index, int node) const {
  return static_cast<State>((index / powers_[node]) % s_);
}

std::uint64_t ConfigSpace::with_digit(std::uint64_t index, int node,
                                      State value) const {
  return index - digit(index, node) * powers_[node] + value * powers_[node];
}

std::uint64_t ConfigSpace::rotate(std::uint64_t index, int by) const {
  by = ((by % n_) + n_) % n_;
  if (by == 0) return index;
  // v_j = u_{j+by}: the low `by` digits of u move to the top.
  std::uint64_t low = index % powers_[by];
  std::uint64_t high = index / powers_[by];
  return high + low * powers_[n_ - by];
}

std::uint64_t ConfigSpace::uniform(State c) const {
  std::uint64_t index = 0;
  for (int i = 0; i < n_; ++i) index = index * s_ + c;
  return index;
}

// ---------------------------------------------------------------------------

ActualSpace::ActualSpace(int n, int s, FaultSet faults)
    : n_(n), s_(s), faults_(std::move(faults)), position_(n, -1) {
  if (!faults_.fits(n)) throw std::invalid_argument("fault set outside [n]");
  for (int i = 0; i < n; ++i) {
    if (!faults_.contains(i)) {
      position_[i] = static_cast<int>(correct_.size());
      correct_.push_back(i);
    }
  }
  powers_.resize(correct_.size() + 1);
  powers_[0] = 1;
  for (std::size_t k = 0; k < correct_.size(); ++k) {
    powers_[k + 1] = powers_[k] * s;
    if (powers_[k + 1] > kMaxTableSize) {
      throw SizeLimitError("actual configuration space is too large");
    }
  }
  size_ = powers_.back();
  fillings_ = checked_pow(s, static_cast<int>(faults_.size()));
}

std::uint64_t ActualSpace::index_of(const ActualConfig& x) const {
  if (static_cast<int>(x.size()) != n_ || x.states != s_) {
    throw std::invalid_argument("configuration does not match the space");
  }
  std::uint64_t index = 0;
  for (int i = 0; i < n_; ++i) {
    bool faulty = faults_.contains(i);
    if (faulty != x.is_faulty(i)) {
      throw std::invalid_argument("configuration inconsistent with F");
    }
    if (!faulty) {
      if (x.entries[i] >= s_) throw std::invalid_argument("state out of range");
      index += x.entries[i] * powers_[position_[i]];
    }
  }
  return index;
}

ActualConfig ActualSpace::config_at(std::uint64_t index) const {
  ActualConfig x{std::vector<State>(n_), s_};
  for (int i = 0; i < n_; ++i) x.entries[i] = digit(index, i);
  return x;
}

State ActualSpace::digit(std::uint64_t index, int node) const {
  if (position_[node] < 0) return static_cast<State>(s_);
  return static_cast<State>((index / powers_[position_[node]]) % s_);
}

std::uint64_t ActualSpace::zero() const { return 0; }

std::uint64_t ActualSpace::one() const {
  std::uint64_t index = 0;
  for (std::size_t k = 0; k < correct_.size(); ++k) index += powers_[k];
  return index;
}

std::uint64_t ActualSpace::project_index(const ConfigSpace& observed,
                                         std::uint64_t u) const {
  std::uint64_t index = 0;
  for (std::size_t k = 0; k < correct_.size(); ++k) {
    index += observed.digit(u, correct_[k]) * powers_[k];
  }
  return index;
}

std::uint64_t ActualSpace::fill(const ConfigSpace& observed, std::uint64_t x,
                                std::uint64_t filling) const {
  std::uint64_t u = 0;
  for (std::size_t k = 0; k < correct_.size(); ++k) {
    u += ((x / powers_[k]) % s_) * observed.place(correct_[k]);
  }
  for (int m : faults_.members()) {
    u += (filling % s_) * observed.place(m);
    filling /= s_;
  }
  return u;
}

std::vector<ActualConfig> enumerate_actuals(int n, int s,
                                            const FaultSet& faults) {
  ActualSpace space(n, s, faults);
  std::vector<ActualConfig> out;
  out.reserve(space.size());
  for (std::uint64_t x = 0; x < space.size(); ++x) {
    out.push_back(space.config_at(x));
  }
  return out;
}

// ---------------------------------------------------------------------------

Algorithm::Algorithm(Params params, AlgorithmClass cls,
                     std::vector<std::vector<State>> tables)
    : params_(params),
      class_(cls),
      space_(params.n, params.s),
      tables_(std::move(tables)) {
  params_.validate();
  std::size_t expected = cls == AlgorithmClass::cyclic ? 1 : params_.n;
  if (tables_.size() != expected) {
    throw std::invalid_argument("algorithm has " +
                                std::to_string(tables_.size()) +
                                " tables, expected " +
                                std::to_string(expected));
  }
  for (const auto& table : tables_) {
    if (table.size() != space_.size()) {
      throw std::invalid_argument("transition table has wrong size");
    }
    for (State v : table) {
      if (v >= params_.s) {
        throw std::invalid_argument("transition table entry out of range");
      }
    }
  }
}

Algorithm Algorithm::from_function(Params params, AlgorithmClass cls,
                                   const TransitionFn& fn) {
  params.validate();
  ConfigSpace space(params.n, params.s);
  int count = cls == AlgorithmClass::cyclic ? 1 : params.n;
  std::vector<std::vector<State>> tables(count,
                                         std::vector<State>(space.size()));
  for (int i = 0; i < count; ++i) {
    for (std::uint64_t u = 0; u < space.size(); ++u) {
      auto config = space.config_at(u);
      tables[i][u] = fn(i, config);
    }
  }
  return Algorithm(params, cls, std::move(tables));
}

State Algorithm::transition(int node, const ObservedConfig& u) const {
  if (node < 0 || node >= params_.n) {
    throw std::out_of_range("node index out of range");
  }
  return transition(node, space_.index_of(u.entries));
}

std::vector<State> Algorithm::node_table(int node) const {
  if (node < 0 || node >= params_.n) {
    throw std::out_of_range("node index out of range");
  }
  if (class_ == AlgorithmClass::general) return tables_[node];
  std::vector<State> out(space_.size());
  for (std::uint64_t u = 0; u < space_.size(); ++u) {
    out[u] = transition(node, u);
  }
  return out;
}

Algorithm Algorithm::as_general() const {
  std::vector<std::vector<State>> tables;
  tables.reserve(params_.n);
  for (int i = 0; i < params_.n; ++i) tables.push_back(node_table(i));
  return Algorithm(params_, AlgorithmClass::general, std::move(tables));
}

Algorithm Algorithm::with_params(Params params) const {
  if (params.n != params_.n || params.s != params_.s) {
    throw std::invalid_argument("with_params cannot change n or s");
  }
  return Algorithm(params, class_, tables_);
}

std::string Algorithm::to_text() const {
  std::ostringstream out;
  out << "counting-algorithm v1\n";
  out << "n=" << params_.n << " f=" << params_.f << " s=" << params_.s
      << " t=" << params_.t << " class=" << to_string(class_) << '\n';
  for (const auto& table : tables_) {
    for (std::size_t j = 0; j < table.size(); ++j) {
      if (j) out << ' ';
      out << static_cast<int>(table[j]);
    }
    out << '\n';
  }
  return out.str();
}

Algorithm Algorithm::from_text(std::string_view text) {
  if (text.empty() || text.back() != '\n') {
    throw FormatError("algorithm file must end with a newline");
  }
  auto lines = split(text.substr(0, text.size() - 1), '\n');
  if (lines.size() < 3 || lines[0] != "counting-algorithm v1") {
    throw FormatError("missing 'counting-algorithm v1' header");
  }
  Params params;
  std::optional<AlgorithmClass> cls;
  bool seen[4] = {false, false, false, false};
  for (auto field : split(lines[1], ' ')) {
    auto eq = field.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("bad parameter field '" + std::string(field) + "'");
    }
    auto key = field.substr(0, eq);
    auto value = field.substr(eq + 1);
    if (key == "n") {
      params.n = parse_int(value, "n");
      seen[0] = true;
    } else if (key == "f") {
      params.f = parse_int(value, "f");
      seen[1] = true;
    } else if (key == "s") {
      params.s = parse_int(value, "s");
      seen[2] = true;
    } else if (key == "t") {
      params.t = parse_int(value, "t");
      seen[3] = true;
    } else if (key == "class") {
      cls = parse_algorithm_class(value);
    } else {
      throw FormatError("unknown parameter '" + std::string(key) + "'");
    }
  }
  if (!(seen[0] && seen[1] && seen[2] && seen[3] && cls)) {
    throw FormatError("parameter line must define n, f, s, t and class");
  }
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  std::size_t expected = *cls == AlgorithmClass::cyclic ? 1 : params.n;
  if (lines.size() != expected + 2) {
    throw FormatError("expected " + std::to_string(expected) +
                      " table lines, found " +
                      std::to_string(lines.size() - 2));
  }
  ConfigSpace space(params.n, params.s);
  std::vector<std::vector<State>> tables;
  for (std::size_t k = 0; k < expected; ++k) {
    auto cells = split(lines[k + 2], ' ');
    if (cells.size() != space.size()) {
      throw FormatError("table line " + std::to_string(k) + " has " +
                        std::to_string(cells.size()) + " entries, expected " +
                        std::to_string(space.size()));
    }
    std::vector<State> table;
    table.reserve(cells.size());
    for (auto cell : cells) {
      int v = parse_int(cell, "table entry");
      if (v < 0 || v >= params.s) throw FormatError("table entry out of range");
      table.push_back(static_cast<State>(v));
    }
    tables.push_back(std::move(table));
  }
  return Algorithm(params, *cls, std::move(tables));
}

Algorithm load_algorithm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open algorithm file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return Algorithm::from_text(buffer.str());
}

void save_algorithm(const Algorithm& alg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write algorithm file '" + path + "'");
  out << alg.to_text();
}

}  // namespace syncount
