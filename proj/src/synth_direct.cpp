#include "syncount/synth_direct.h"

#include <algorithm>
#include <sstream>

namespace syncount {

namespace {

int effective_t0(const Params& params, const EncodeOptions& options) {
  if (!options.non_uniform) return params.t;
  return params.t0.value_or(std::min(EncodeOptions::kDefaultT0, params.t));
}

}  // namespace

VarAtlas::VarAtlas(const Params& params, AlgorithmClass cls, std::uint64_t max_vars)
    : params_(params), class_(cls), space_(params.n, params.s),
      fault_sets_(fault_sets_to_check(params.n, params.f, cls)) {
  params_.validate();
  std::uint64_t next = 1;
  next += static_cast<std::uint64_t>(table_count()) * space_.size() * params.s;
  for (const auto& faults : fault_sets_) {
    Block block{ActualSpace(params.n, params.s, faults), std::vector<int>(params.n, -1)};
    int slot = 0;
    for (int node : block.space.correct_nodes()) block.slot[node] = slot++;
    std::uint64_t v = block.space.size();
    auto guard = [&](std::uint64_t count) {
      if (next + count > max_vars) {
        throw SizeLimitError("encoding needs more than " + std::to_string(max_vars) +
                             " variables");
      }
      auto base = static_cast<int>(next);
      next += count;
      return base;
    };
    block.h_base = guard(v * slot * params.s);
    block.e_base = guard(v * v);
    block.b_base = guard(v * (params.t + 1));
    blocks_.push_back(std::move(block));
  }
  if (next - 1 > max_vars) {
    throw SizeLimitError("encoding needs more than " + std::to_string(max_vars) + " variables");
  }
  num_vars_ = static_cast<int>(next - 1);
}

int VarAtlas::a(std::uint64_t u, int node, int c) const {
  int table = node;
  if (class_ == AlgorithmClass::cyclic) {
    u = space_.rotate(u, node);
    table = 0;
  }
  return 1 + static_cast<int>((table * space_.size() + u) * params_.s + c);
}

int VarAtlas::h(std::size_t fi, std::uint64_t x, int node, int c) const {
  const auto& bl = blocks_[fi];
  auto m = bl.space.correct_nodes().size();
  return bl.h_base + static_cast<int>((x * m + bl.slot[node]) * params_.s + c);
}

int VarAtlas::e(std::size_t fi, std::uint64_t x, std::uint64_t y) const {
  const auto& bl = blocks_[fi];
  return bl.e_base + static_cast<int>(x * bl.space.size() + y);
}

int VarAtlas::b(std::size_t fi, std::uint64_t x, int d) const {
  return blocks_[fi].b_base + static_cast<int>(x * (params_.t + 1) + d);
}

std::string VarAtlas::describe(int var) const {
  if (var < 1 || var > num_vars_) return "?";
  std::ostringstream out;
  auto render = [&](const std::vector<State>& u) {
    std::string text;
    for (auto c : u) text += static_cast<char>('0' + c);
    return text;
  };
  auto first_block = blocks_.empty() ? num_vars_ + 1 : blocks_[0].h_base;
  if (var < first_block) {
    auto k = static_cast<std::uint64_t>(var - 1);
    int c = static_cast<int>(k % params_.s);
    k /= params_.s;
    auto u = k % space_.size();
    auto table = k / space_.size();
    out << "a u=" << render(space_.config_at(u)) << " i=" << table << " c=" << c;
    return out.str();
  }
  std::size_t fi = 0;
  while (fi + 1 < blocks_.size() && blocks_[fi + 1].h_base <= var) ++fi;
  const auto& bl = blocks_[fi];
  auto v = bl.space.size();
  auto m = bl.space.correct_nodes().size();
  out << fault_sets_[fi].to_string() << ' ';
  if (var < bl.e_base) {
    auto k = static_cast<std::uint64_t>(var - bl.h_base);
    int c = static_cast<int>(k % params_.s);
    k /= params_.s;
    int node = bl.space.correct_nodes()[k % m];
    out << "h x=" << bl.space.config_at(k / m).to_string() << " i=" << node << " c=" << c;
  } else if (var < bl.b_base) {
    auto k = static_cast<std::uint64_t>(var - bl.e_base);
    out << "e x=" << bl.space.config_at(k / v).to_string()
        << " y=" << bl.space.config_at(k % v).to_string();
  } else {
    auto k = static_cast<std::uint64_t>(var - bl.b_base);
    out << "b x=" << bl.space.config_at(k / (params_.t + 1)).to_string()
        << " d=" << k % (params_.t + 1);
  }
  return "F=" + out.str();
}

std::vector<std::string> VarAtlas::legend() const {
  std::vector<std::string> lines;
  auto n = std::to_string(params_.n);
  lines.push_back("atlas a first=1 count=" +
                  std::to_string(table_count() * space_.size() * params_.s) +
                  " id=1+((i*s^n+u)*s+c) tables=" + std::to_string(table_count()) +
                  " u=sum u_j*s^j");
  for (std::size_t fi = 0; fi < blocks_.size(); ++fi) {
    const auto& bl = blocks_[fi];
    std::ostringstream line;
    line << "atlas F=" << fault_sets_[fi].to_string() << " |V_F|=" << bl.space.size()
         << " h=" << bl.h_base << "+((x*m+slot(i))*s+c) m="
         << bl.space.correct_nodes().size() << " e=" << bl.e_base << "+x*|V_F|+y"
         << " b=" << bl.b_base << "+x*(t+1)+d";
    lines.push_back(line.str());
  }
  return lines;
}

CnfInstance encode(const Params& params, AlgorithmClass cls, const EncodeOptions& options) {
  params.validate();
  Params stored = params;
  stored.t0.reset();
  if (options.non_uniform) stored.t0 = effective_t0(params, options);
  CnfInstance inst{stored, cls, VarAtlas(stored, cls, options.max_vars), {}};
  const auto& atlas = inst.atlas;
  auto& cnf = inst.cnf;
  cnf.num_vars = atlas.num_vars();
  const int s = params.s;
  const auto& space = atlas.space();

  // (1) totality and (2) functionality, once per stored table entry.
  for (int table = 0; table < atlas.table_count(); ++table) {
    for (std::uint64_t u = 0; u < space.size(); ++u) {
      std::vector<int> some;
      for (int c = 0; c < s; ++c) some.push_back(atlas.a(u, table, c));
      cnf.clauses.push_back(some);
      for (int c = 0; c < s; ++c) {
        for (int c2 = c + 1; c2 < s; ++c2) {
          cnf.clauses.push_back({-atlas.a(u, table, c), -atlas.a(u, table, c2)});
        }
      }
    }
  }

  for (std::size_t fi = 0; fi < atlas.fault_sets().size(); ++fi) {
    const auto& vf = atlas.actual_space(fi);
    const auto& correct = vf.correct_nodes();
    const auto size = vf.size();
    const int bound = vf.faults().empty() ? stored.t0.value_or(params.t) : params.t;

    // (3) every observed configuration over x is available to the adversary.
    for (std::uint64_t x = 0; x < size; ++x) {
      for (std::uint64_t fill = 0; fill < vf.filling_count(); ++fill) {
        auto u = vf.fill(space, x, fill);
        for (int node : correct) {
          for (int c = 0; c < s; ++c) {
            cnf.clauses.push_back({-atlas.a(u, node, c), atlas.h(fi, x, node, c)});
          }
        }
      }
    }
    // (4) edges.
    for (std::uint64_t x = 0; x < size; ++x) {
      for (std::uint64_t y = 0; y < size; ++y) {
        std::vector<int> clause;
        for (int node : correct) clause.push_back(-atlas.h(fi, x, node, vf.digit(y, node)));
        clause.push_back(atlas.e(fi, x, y));
        cnf.clauses.push_back(std::move(clause));
      }
    }
    const auto zero = vf.zero();
    const auto one = vf.one();
    // (5) good cycle, (6) nothing else leaves it, (7) no self-loops.
    cnf.clauses.push_back({atlas.e(fi, zero, one)});
    cnf.clauses.push_back({atlas.e(fi, one, zero)});
    for (std::uint64_t x = 0; x < size; ++x) {
      if (x != one) cnf.clauses.push_back({-atlas.e(fi, zero, x)});
      if (x != zero) cnf.clauses.push_back({-atlas.e(fi, one, x)});
    }
    for (std::uint64_t x = 0; x < size; ++x) {
      if (x != zero && x != one) cnf.clauses.push_back({-atlas.e(fi, x, x)});
    }
    // (8, 9) B(0) is everything but the good configurations.
    for (std::uint64_t x = 0; x < size; ++x) {
      cnf.clauses.push_back({vf.is_good(x) ? -atlas.b(fi, x, 0) : atlas.b(fi, x, 0)});
    }
    // (10) bad walks extend backwards along edges.
    for (int d = 0; d < bound; ++d) {
      for (std::uint64_t x = 0; x < size; ++x) {
        for (std::uint64_t y = 0; y < size; ++y) {
          cnf.clauses.push_back(
              {-atlas.e(fi, x, y), -atlas.b(fi, y, d), atlas.b(fi, x, d + 1)});
        }
      }
    }
    // (11) no configuration is bad for `bound` rounds.
    for (std::uint64_t x = 0; x < size; ++x) {
      cnf.clauses.push_back({-atlas.b(fi, x, bound)});
    }
  }
  return inst;
}

Algorithm decode(const Model& model, const CnfInstance& instance) {
  const auto& atlas = instance.atlas;
  const auto& space = atlas.space();
  const int s = instance.params.s;
  std::vector<std::vector<State>> tables(atlas.table_count(),
                                         std::vector<State>(space.size()));
  for (int table = 0; table < atlas.table_count(); ++table) {
    for (std::uint64_t u = 0; u < space.size(); ++u) {
      int chosen = -1;
      for (int c = 0; c < s; ++c) {
        if (!model.value(atlas.a(u, table, c))) continue;
        if (chosen >= 0) {
          throw FormatError("model assigns two successors to " +
                            atlas.describe(atlas.a(u, table, c)));
        }
        chosen = c;
      }
      if (chosen < 0) {
        throw FormatError("model assigns no successor to " + atlas.describe(atlas.a(u, table, 0)));
      }
      tables[table][u] = static_cast<State>(chosen);
    }
  }
  return Algorithm(instance.params, instance.algorithm_class, std::move(tables));
}

std::string emit_dimacs(const CnfInstance& instance) {
  CnfFormula cnf;
  cnf.num_vars = instance.cnf.num_vars;
  const auto& p = instance.params;
  std::string header = "params n=" + std::to_string(p.n) + " f=" + std::to_string(p.f) +
                       " s=" + std::to_string(p.s) + " t=" + std::to_string(p.t) +
                       " class=" + std::string(to_string(instance.algorithm_class));
  if (p.t0) header += " t0=" + std::to_string(*p.t0);
  cnf.comments.push_back(header);
  for (auto& line : instance.atlas.legend()) cnf.comments.push_back(std::move(line));
  // Copying the clause list is cheap next to rendering it.
  cnf.clauses = instance.cnf.clauses;
  return to_dimacs(cnf);
}

InstanceHeader parse_instance_header(std::string_view dimacs) {
  auto cnf_start = dimacs.find("c params ");
  if (cnf_start == std::string_view::npos) {
    throw FormatError("DIMACS file has no 'c params' line");
  }
  auto end = dimacs.find('\n', cnf_start);
  std::istringstream line(std::string(dimacs.substr(cnf_start + 9, end - cnf_start - 9)));
  InstanceHeader header{Params{}, AlgorithmClass::general};
  std::string token;
  int seen = 0;
  while (line >> token) {
    auto eq = token.find('=');
    if (eq == std::string::npos) throw FormatError("bad params token '" + token + "'");
    auto key = token.substr(0, eq);
    auto value = token.substr(eq + 1);
    try {
      if (key == "class") {
        header.algorithm_class = parse_algorithm_class(value);
      } else if (key == "n") {
        header.params.n = std::stoi(value);
      } else if (key == "f") {
        header.params.f = std::stoi(value);
      } else if (key == "s") {
        header.params.s = std::stoi(value);
      } else if (key == "t") {
        header.params.t = std::stoi(value);
      } else if (key == "t0") {
        header.params.t0 = std::stoi(value);
      } else {
        throw FormatError("unknown params key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw FormatError("bad params value '" + token + "'");
    }
    ++seen;
  }
  if (seen < 5) throw FormatError("incomplete 'c params' line");
  header.params.validate();
  return header;
}

bool verify_with_t0(const Algorithm& alg, VerificationReport* out) {
  auto report = check_stabilization(alg, alg.params().t);
  bool ok = report.verdict == Verdict::stabilizes;
  if (ok && alg.params().t0) {
    for (const auto& r : report.per_fault_set) {
      if (r.faults.empty() && (!r.stabilization_time || *r.stabilization_time > *alg.params().t0)) {
        ok = false;
      }
    }
  }
  if (out) *out = std::move(report);
  return ok;
}

SynthResult synthesize(const Params& params, AlgorithmClass cls, const EncodeOptions& options,
                       const BackendConfig& backend, const SolveLimits& limits) {
  auto instance = encode(params, cls, options);
  SynthResult result;
  result.num_vars = instance.cnf.num_vars;
  result.num_clauses = instance.cnf.clauses.size();
  SolveResult solved;
  if (backend.kind == BackendKind::process) {
    auto path = backend.solver_path.empty() ? solver_path_from_env() : backend.solver_path;
    solved = solve_oneshot(instance.cnf, limits, path);
  } else {
    solved = solve_in_process(instance.cnf, limits);
  }
  result.stats = solved.stats;
  result.diagnostic = solved.diagnostic;
  if (solved.status == SolveStatus::unsat) {
    result.outcome = SynthOutcome::unrealizable;
    return result;
  }
  if (solved.status == SolveStatus::unknown) return result;

  auto alg = decode(*solved.model, instance);
  VerificationReport report;
  if (!verify_with_t0(alg, &report)) {
    throw Error("decoded algorithm fails re-verification:\n" + report.to_text());
  }
  result.outcome = SynthOutcome::found;
  result.algorithm = std::move(alg);
  result.report = std::move(report);
  return result;
}

}  // namespace syncount
