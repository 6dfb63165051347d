// syncount: verify, synthesize and transform synchronous 2-counters.
//
// Exit codes: 0 success, 1 negative verdict, 2 usage error, 3 resource limit.

#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "syncount/cegar.h"
#include "syncount/core_model.h"
#include "syncount/simulator.h"
#include "syncount/solver_backend.h"
#include "syncount/synth_direct.h"
#include "syncount/transforms.h"
#include "syncount/verifier.h"

using namespace syncount;
using json = nlohmann::json;

namespace {

enum Exit { kOk = 0, kNegative = 1, kUsage = 2, kLimit = 3 };

struct Globals {
  std::uint64_t seed = 0;
  double time_limit = 600;
  std::uint64_t mem_limit_mb = 4096;
  std::string log_path;
  int jobs = 1;
};

class Log {
 public:
  void open(const std::string& path) {
    if (path.empty()) return;
    out_.open(path, std::ios::app);
    if (!out_) throw std::runtime_error("cannot open log file " + path);
  }
  void emit(std::string_view event, json fields = json::object()) {
    if (!out_.is_open()) return;
    fields["event"] = event;
    fields["elapsed"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    out_ << fields.dump() << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Globals g_opts;
Log g_log;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

SolveLimits solve_limits() {
  SolveLimits limits;
  limits.time = std::chrono::duration<double>(g_opts.time_limit);
  limits.memory_bytes = g_opts.mem_limit_mb << 20;
  limits.seed = static_cast<int>(g_opts.seed);
  return limits;
}

std::string stab_text(const VerificationReport& r) {
  auto t = r.stabilization_time();
  return t ? std::to_string(*t) : "inf";
}

// Re-verification every artifact passes before it is written.
bool verified(const Algorithm& alg) {
  VerificationReport report;
  bool ok = verify_with_t0(alg, &report);
  g_log.emit("reverify", {{"ok", ok}, {"stab_time", stab_text(report)}});
  return ok;
}

// ---------------------------------------------------------------------------

struct ParamArgs {
  std::string cls = "general";
  int n = 4;
  int f = 1;
  int s = 2;
  std::optional<int> t;
  std::optional<int> t0;
  bool non_uniform = false;

  void add(CLI::App* app, bool need_t) {
    app->add_option("--class", cls, "cyclic or general")
        ->check(CLI::IsMember({"cyclic", "general"}));
    app->add_option("--n", n, "nodes")->required()->check(CLI::Range(1, 64));
    app->add_option("--f", f, "Byzantine nodes")->required()->check(CLI::Range(0, 63));
    app->add_option("--s", s, "states per node")->required()->check(CLI::Range(1, 255));
    auto* topt = app->add_option("--t", t, "stabilization bound");
    if (need_t) topt->required();
    app->add_option("--t0", t0, "fault-free bound (implies --non-uniform)");
    app->add_flag("--non-uniform", non_uniform, "encode the fault-free bound as well");
  }

  Params params() const {
    Params p{.n = n, .f = f, .s = s, .t = t.value_or(0)};
    if (t0) p.t0 = *t0;
    p.validate();
    return p;
  }
  EncodeOptions encode_options() const {
    EncodeOptions o;
    o.non_uniform = non_uniform || t0.has_value();
    return o;
  }
};

// The encoder picks the default t0; an explicit --t0 is applied here.
Params with_t0(Params p, const ParamArgs& args) {
  if (!args.t0 && args.encode_options().non_uniform) {
    p.t0 = std::min(EncodeOptions::kDefaultT0, p.t);
  }
  return p;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string alg;
  std::optional<int> t;
};

int cmd_verify(const VerifyArgs& a) {
  auto alg = load_algorithm(a.alg);
  int t = a.t.value_or(alg.params().t);
  auto report = check_stabilization(alg, t);
  bool ok = report.verdict == Verdict::stabilizes;
  std::cout << "verdict=" << (ok ? "stabilizes" : "fails") << " t=" << t
            << " stab_time=" << stab_text(report) << '\n'
            << report.to_text();
  g_log.emit("verify", {{"t", t}, {"ok", ok}, {"stab_time", stab_text(report)}});
  return ok ? kOk : kNegative;
}

struct SynthArgs {
  ParamArgs p;
  std::string out;
  std::string emit_cnf;
  std::string decode_model;
  std::string backend = "in-process";
  std::string solver;
};

BackendConfig backend_config(const std::string& kind, const std::string& solver) {
  BackendConfig cfg;
  cfg.kind = kind == "process" ? BackendKind::process : BackendKind::in_process;
  cfg.solver_path = solver;
  return cfg;
}

int cmd_synth(const SynthArgs& a) {
  auto params = with_t0(a.p.params(), a.p);
  auto cls = parse_algorithm_class(a.p.cls);
  auto backend = backend_config(a.backend, a.solver);
  if (!a.emit_cnf.empty()) {
    write_file(a.emit_cnf, emit_dimacs(encode(params, cls, a.p.encode_options())));
  }
  if (!a.decode_model.empty()) {
    auto instance = encode(params, cls, a.p.encode_options());
    auto model = Model::parse(read_file(a.decode_model), instance.cnf.num_vars);
    for (const auto& clause : instance.cnf.clauses) {
      if (!model.satisfies(clause)) {
        std::cerr << "error: model violates a clause\n";
        return kNegative;
      }
    }
    auto alg = decode(model, instance);
    if (!verified(alg)) {
      std::cerr << "error: decoded algorithm failed re-verification\n";
      return kNegative;
    }
    if (a.out.empty()) {
      std::cout << alg.to_text();
    } else {
      save_algorithm(alg, a.out);
    }
    return kOk;
  }
  g_log.emit("synth_start", {{"n", params.n}, {"f", params.f}, {"s", params.s},
                             {"t", params.t}, {"class", a.p.cls}});
  auto result = synthesize(params, cls, a.p.encode_options(), backend, solve_limits());
  json fields = {{"vars", result.num_vars}, {"clauses", result.num_clauses},
                 {"seconds", result.stats.seconds}, {"conflicts", result.stats.conflicts}};
  switch (result.outcome) {
    case SynthOutcome::found: {
      fields["outcome"] = "sat";
      g_log.emit("synth_done", fields);
      const auto& alg = *result.algorithm;
      if (!verified(alg)) {
        std::cerr << "error: decoded algorithm failed re-verification\n";
        return kNegative;
      }
      std::cout << "sat: algorithm found (vars=" << result.num_vars
                << " clauses=" << result.num_clauses << " time=" << result.stats.seconds
                << "s)\nverified stab_time=" << stab_text(*result.report) << '\n';
      if (!a.out.empty()) {
        save_algorithm(alg, a.out);
      } else {
        std::cout << alg.to_text();
      }
      return kOk;
    }
    case SynthOutcome::unrealizable:
      fields["outcome"] = "unsat";
      g_log.emit("synth_done", fields);
      std::cout << "unsat: no algorithm exists (vars=" << result.num_vars
                << " clauses=" << result.num_clauses << " time=" << result.stats.seconds
                << "s)\n";
      return kNegative;
    case SynthOutcome::unknown:
      break;
  }
  fields["outcome"] = "unknown";
  fields["diagnostic"] = result.diagnostic;
  g_log.emit("synth_done", fields);
  std::cout << "unknown: " << result.diagnostic << '\n';
  return kLimit;
}

struct CegarArgs {
  ParamArgs p;
  std::string variant = "overshoot";
  bool strengthen = false;
  bool no_tighten = false;
  bool generalize = false;
  int walks = 0;
  std::string out;
};

int cmd_cegar(const CegarArgs& a) {
  auto params = a.p.params();
  CegarOptions o;
  o.algorithm_class = parse_algorithm_class(a.p.cls);
  o.variant = parse_cegar_variant(a.variant);
  o.t = a.p.t;
  o.strengthen_observation = a.strengthen;
  o.tighten = !a.no_tighten;
  o.generalize = a.generalize;
  o.verifier_walks = a.walks;
  o.limits = solve_limits();
  o.time_limit = std::chrono::duration<double>(g_opts.time_limit);
  o.on_progress = [](const CegarEvent& e) {
    if (e.kind == "refine" && e.iteration % 1000 != 0) return;
    g_log.emit("cegar_" + e.kind, {{"iteration", e.iteration}, {"k", e.k}, {"t", e.t},
                                   {"clauses", e.clauses}, {"solve_calls", e.solve_calls}});
  };
  o.on_algorithm = [](const Algorithm&, int t) {
    std::cout << "found t=" << t << std::endl;
  };
  if (o.variant != CegarVariant::overshoot && !a.p.t) {
    std::cerr << "error: --t is required for the " << a.variant << " variant\n";
    return kUsage;
  }
  auto r = run_cegar(params, o);
  const auto& st = r.stats;
  std::cout << "outcome=" << to_string(r.outcome);
  if (r.achieved_t) std::cout << " achieved_t=" << *r.achieved_t;
  if (r.unrealizable_bound) std::cout << " unrealizable_t=" << *r.unrealizable_bound;
  std::cout << " iterations=" << st.iterations << " refinements=" << st.refinements
            << " solve_calls=" << st.solve_calls << " clauses=" << st.clauses
            << " seconds=" << st.seconds << '\n';
  g_log.emit("cegar_done", {{"outcome", to_string(r.outcome)},
                            {"achieved_t", r.achieved_t.value_or(-1)},
                            {"iterations", st.iterations},
                            {"seconds", st.seconds}});
  if (r.algorithm) {
    if (!verified(*r.algorithm)) {
      std::cerr << "error: algorithm failed re-verification\n";
      return kNegative;
    }
    if (!a.out.empty()) save_algorithm(*r.algorithm, a.out);
  }
  switch (r.outcome) {
    case CegarOutcome::found: return kOk;
    case CegarOutcome::unrealizable: return kNegative;
    case CegarOutcome::timeout: return r.algorithm ? kOk : kLimit;
  }
  return kLimit;
}

struct ExtendArgs {
  std::string alg;
  int times = 1;
  std::string out;
};

int cmd_extend(const ExtendArgs& a) {
  auto alg = load_algorithm(a.alg);
  for (int i = 0; i < a.times; ++i) alg = extend_node(alg);
  auto report = check_stabilization(alg, alg.params().t);
  bool ok = report.verdict == Verdict::stabilizes;
  std::cout << "n=" << alg.params().n << " t=" << alg.params().t
            << " verdict=" << (ok ? "stabilizes" : "fails")
            << " stab_time=" << stab_text(report) << '\n' << report.to_text();
  if (!ok) return kNegative;
  if (!a.out.empty()) save_algorithm(alg, a.out);
  return kOk;
}

std::vector<int> parse_id_list(const std::string& text) {
  std::vector<int> ids;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) ids.push_back(std::stoi(item));
  }
  return ids;
}

struct TopologyArgs {
  std::string graph;
  int k = 0;
  int m = 0;
  int d = 1;
  std::string core;
  std::string alg;
  std::string out;
  std::string alg_out;
  std::uint64_t max_configs = std::uint64_t{1} << 20;
};

int cmd_topology(const TopologyArgs& a) {
  auto file = parse_topology(read_file(a.graph));
  const auto& g = file.graph;
  std::optional<Algorithm> alg;
  int k = a.k;
  int m = a.m;
  if (!a.alg.empty()) {
    alg = load_algorithm(a.alg);
    k = alg->params().n;
    m = 2 * alg->params().f + 1;
  }
  if (k <= 0 || m <= 0) {
    std::cerr << "error: give --k and --m, or --alg\n";
    return kUsage;
  }
  std::optional<std::vector<int>> core;
  if (!a.core.empty()) {
    core.emplace();
    for (int id : parse_id_list(a.core)) core->push_back(g.index_of(id));
  }
  auto partition = check_topology(g, k, m, a.d, core);
  if (!partition) {
    std::cout << "not-member: no partition for G(" << k << "," << m << "," << a.d << ")\n";
    return kNegative;
  }
  auto text = topology_to_text(g, &*partition);
  std::cout << "member d=" << partition->depth() << '\n';
  if (!a.out.empty()) {
    write_file(a.out, text);
  } else {
    std::cout << text;
  }
  if (!alg) return kOk;
  TopologyAlgorithm ta = generalize_topology(*alg, g, *partition);
  std::cout << "bound=" << ta.bound() << '\n';
  auto size = checked_pow(ta.states(), ta.nodes());
  if (size > a.max_configs) {
    std::cout << "exact check skipped: " << size << " configurations\n";
    return kOk;
  }
  auto general = ta.to_algorithm();
  auto report = check_stabilization(general, ta.bound());
  bool ok = report.verdict == Verdict::stabilizes;
  std::cout << "verdict=" << (ok ? "stabilizes" : "fails") << " stab_time=" << stab_text(report)
            << '\n';
  if (!ok) return kNegative;
  if (!a.alg_out.empty()) save_algorithm(general, a.alg_out);
  return kOk;
}

struct ComposeArgs {
  std::vector<std::string> algs;
  int trials = 50;
  int rounds = 200;
  std::string adversary = "random";
};

int cmd_compose(const ComposeArgs& a) {
  std::vector<Algorithm> layers;
  for (const auto& path : a.algs) layers.push_back(load_algorithm(path));
  auto counter = compose_layers(std::move(layers));
  const int n = counter.nodes();
  const int f = counter.faults();
  int stable = 0;
  int worst = 0;
  for (int trial = 0; trial < a.trials; ++trial) {
    std::mt19937_64 rng(mix_seed(g_opts.seed, trial));
    std::vector<std::vector<State>> init;
    for (const auto& layer : counter.layers) {
      std::vector<State> x(n);
      for (auto& v : x) v = static_cast<State>(rng() % layer.params().s);
      init.push_back(std::move(x));
    }
    std::vector<int> faulty;
    for (int i = 0; i < f; ++i) faulty.push_back((trial + i) % n);
    auto adversary = make_adversary(parse_adversary_kind(a.adversary),
                                    counter.layers[0].params().s, mix_seed(g_opts.seed, trial, 7),
                                    &counter.layers[0]);
    RunOptions ro{.rounds = a.rounds, .window = 2 * static_cast<int>(counter.modulus())};
    auto trace = run(counter, *adversary, FaultSet(faulty), init, ro);
    if (trace.stabilized_at) {
      ++stable;
      worst = std::max(worst, *trace.stabilized_at);
    }
  }
  std::cout << "bits=" << counter.bits() << " period=" << counter.modulus()
            << " stabilized=" << stable << "/" << a.trials << " max_stabilization=" << worst
            << '\n';
  return stable == a.trials ? kOk : kNegative;
}

struct SimulateArgs {
  std::string alg;
  std::string topology;
  bool randomized = false;
  int n = 4;
  int f = 1;
  std::string adversary = "random";
  std::string faults;
  std::string init;
  int rounds = 50;
  int trials = 1;
  int window = 4;
};

std::vector<State> parse_init(const std::string& text, int n, int s, std::mt19937_64& rng) {
  std::vector<State> init(n);
  if (text.empty() || text == "random") {
    for (auto& v : init) v = static_cast<State>(rng() % s);
    return init;
  }
  if (static_cast<int>(text.size()) != n) throw std::invalid_argument("--init needs n digits");
  for (int i = 0; i < n; ++i) {
    int v = text[i] - '0';
    if (v < 0 || v >= s) throw std::invalid_argument("--init digit out of range");
    init[i] = static_cast<State>(v);
  }
  return init;
}

int cmd_simulate(const SimulateArgs& a) {
  auto kind = parse_adversary_kind(a.adversary);
  if (a.randomized) {
    RandomizedCounter rc{a.n, a.f};
    RandomizedOptions o;
    o.trials = a.trials;
    o.round_cap = a.rounds;
    o.window = a.window;
    o.seed = g_opts.seed;
    o.adversary = kind;
    if (!a.faults.empty()) o.faults = FaultSet::parse(a.faults);
    if (!a.init.empty() && a.init != "random") {
      std::mt19937_64 unused;
      o.init = parse_init(a.init, a.n, 2, unused);
    }
    auto stats = run_randomized(rc, o);
    std::cout << stats.to_text();
    g_log.emit("randomized", {{"trials", o.trials}, {"mean", stats.mean},
                              {"censored", stats.censored},
                              {"exclusion_violations", stats.exclusion_violations}});
    return stats.exclusion_violations == 0 && stats.censored == 0 ? kOk : kNegative;
  }
  if (a.alg.empty()) {
    std::cerr << "error: give an algorithm file or --randomized\n";
    return kUsage;
  }
  auto alg = load_algorithm(a.alg);
  std::optional<TopologyAlgorithm> ta;
  if (!a.topology.empty()) {
    auto file = parse_topology(read_file(a.topology));
    auto partition = file.partition;
    if (!partition) {
      partition = check_topology(file.graph, alg.params().n, 2 * alg.params().f + 1,
                                 file.graph.size());
    }
    if (!partition) {
      std::cerr << "error: topology is not in G(n, 2f+1, d)\n";
      return kNegative;
    }
    ta.emplace(generalize_topology(alg, file.graph, *partition));
  }
  const int n = ta ? ta->nodes() : alg.params().n;
  const int s = alg.params().s;
  FaultSet faults = a.faults.empty() ? FaultSet{} : FaultSet::parse(a.faults);
  int stable = 0;
  int worst = 0;
  for (int trial = 0; trial < a.trials; ++trial) {
    std::mt19937_64 rng(mix_seed(g_opts.seed, trial));
    auto init = parse_init(a.init, n, s, rng);
    auto adversary = make_adversary(kind, s, mix_seed(g_opts.seed, trial, 3), ta ? nullptr : &alg);
    RunOptions ro{.rounds = a.rounds, .window = a.window};
    auto trace = ta ? run(*ta, *adversary, faults, init, ro) : run(alg, *adversary, faults, init, ro);
    if (a.trials == 1) std::cout << trace.to_text();
    if (trace.stabilized_at) {
      ++stable;
      worst = std::max(worst, *trace.stabilized_at);
    }
  }
  if (a.trials > 1) {
    std::cout << "trials=" << a.trials << " stabilized=" << stable
              << " max_stabilization=" << worst << '\n';
  }
  return stable == a.trials ? kOk : kNegative;
}

struct ExportCnfArgs {
  ParamArgs p;
  std::string out;
};

int cmd_export_cnf(const ExportCnfArgs& a) {
  auto params = with_t0(a.p.params(), a.p);
  auto instance = encode(params, parse_algorithm_class(a.p.cls), a.p.encode_options());
  auto text = emit_dimacs(instance);
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_file(a.out, text);
    std::cout << "vars=" << instance.cnf.num_vars << " clauses=" << instance.cnf.clauses.size()
              << '\n';
  }
  return kOk;
}

struct DecodeArgs {
  std::string cnf;
  std::string model;
  std::string out;
};

int cmd_decode_model(const DecodeArgs& a) {
  auto dimacs = read_file(a.cnf);
  auto header = parse_instance_header(dimacs);
  EncodeOptions eo;
  eo.non_uniform = header.params.t0.has_value();
  auto instance = encode(header.params, header.algorithm_class, eo);
  auto given = parse_dimacs(dimacs);
  if (given.num_vars != instance.cnf.num_vars ||
      given.clauses.size() != instance.cnf.clauses.size()) {
    std::cerr << "error: CNF does not match its header's encoding\n";
    return kUsage;
  }
  auto model_text = read_file(a.model);
  if (model_text.find("UNSATISFIABLE") != std::string::npos) {
    std::cout << "unsat: no algorithm exists\n";
    return kNegative;
  }
  auto model = Model::parse(model_text, instance.cnf.num_vars);
  for (const auto& clause : given.clauses) {
    if (!model.satisfies(clause)) {
      std::cerr << "error: model violates a clause\n";
      return kNegative;
    }
  }
  auto alg = decode(model, instance);
  if (!verified(alg)) {
    std::cerr << "error: decoded algorithm failed re-verification\n";
    return kNegative;
  }
  if (a.out.empty()) {
    std::cout << alg.to_text();
  } else {
    save_algorithm(alg, a.out);
    std::cout << "verified; written to " << a.out << '\n';
  }
  return kOk;
}

struct DotArgs {
  std::string alg;
  std::string faults = "{}";
  std::string out;
};

int cmd_export_dot(const DotArgs& a) {
  auto alg = load_algorithm(a.alg);
  auto graph = build_projection_graph(alg, FaultSet::parse(a.faults));
  auto dot = export_dot(graph);
  if (a.out.empty()) {
    std::cout << dot;
  } else {
    write_file(a.out, dot);
  }
  return kOk;
}

// ---------------------------------------------------------------------------

void apply_memory_limit() {
  rlimit rl{};
  rl.rlim_cur = rl.rlim_max = static_cast<rlim_t>(g_opts.mem_limit_mb) << 20;
  setrlimit(RLIMIT_AS, &rl);
}

// Portfolio: run the command in `jobs` children with seeds seed, seed+1, ...
// The first child with a definite answer (exit 0 or 1) wins.
int run_portfolio(const std::function<int()>& body, std::string* out_path) {
  std::vector<pid_t> children;
  std::vector<std::string> logs;
  const std::string base_out = out_path ? *out_path : "";
  for (int j = 0; j < g_opts.jobs; ++j) {
    auto log = std::filesystem::temp_directory_path() /
               ("syncount-job-" + std::to_string(getpid()) + "-" + std::to_string(j));
    logs.push_back(log.string());
    pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
      if (!std::freopen(logs.back().c_str(), "w", stdout)) _exit(kLimit);
      g_opts.seed += j;
      if (out_path && !base_out.empty()) *out_path = base_out + ".job" + std::to_string(j);
      int code = kLimit;
      try {
        code = body();
      } catch (...) {
      }
      std::fflush(stdout);
      _exit(code);
    }
    children.push_back(pid);
  }
  int result = kLimit;
  int winner = -1;
  for (std::size_t left = children.size(); left > 0 && winner < 0; --left) {
    int status = 0;
    pid_t pid = wait(&status);
    if (pid < 0) break;
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : kLimit;
    if (code == kOk || code == kNegative) {
      result = code;
      winner = static_cast<int>(std::find(children.begin(), children.end(), pid) -
                                children.begin());
    }
  }
  for (pid_t pid : children) kill(pid, SIGKILL);
  while (wait(nullptr) > 0) {
  }
  if (winner >= 0) {
    std::cout << "job=" << winner << " seed=" << g_opts.seed + winner << '\n'
              << read_file(logs[winner]);
    if (out_path && !base_out.empty()) {
      auto produced = base_out + ".job" + std::to_string(winner);
      if (std::filesystem::exists(produced)) std::filesystem::rename(produced, base_out);
    }
  }
  for (int j = 0; j < g_opts.jobs; ++j) {
    std::filesystem::remove(logs[j]);
    if (!base_out.empty() && j != winner) std::filesystem::remove(base_out + ".job" + std::to_string(j));
  }
  return result;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"syncount: synchronous 2-counting algorithms"};
  app.require_subcommand(1);
  app.add_option("--seed", g_opts.seed, "random seed (solver, adversary, coins)");
  app.add_option("--time-limit", g_opts.time_limit, "seconds")->check(CLI::PositiveNumber);
  app.add_option("--mem-limit", g_opts.mem_limit_mb, "megabytes")->check(CLI::PositiveNumber);
  app.add_option("--log", g_opts.log_path, "JSON-lines progress log");
  app.add_option("--jobs", g_opts.jobs, "parallel seeds for synth and cegar")
      ->check(CLI::Range(1, 256));

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "check stabilization of an algorithm file");
  verify->add_option("alg", verify_args.alg)->required()->check(CLI::ExistingFile);
  verify->add_option("--t", verify_args.t, "bound (default: the file's t)");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "direct SAT synthesis");
  synth_args.p.add(synth, true);
  synth->add_option("-o,--output", synth_args.out, "algorithm file to write");
  synth->add_option("--backend", synth_args.backend)
      ->check(CLI::IsMember({"in-process", "process"}));
  synth->add_option("--solver", synth_args.solver, "DIMACS solver binary (process backend)");
  synth->add_option("--emit-cnf", synth_args.emit_cnf, "also write the CNF");
  synth->add_option("--decode", synth_args.decode_model, "decode this model instead of solving")
      ->check(CLI::ExistingFile);

  CegarArgs cegar_args;
  auto* cegar = app.add_subcommand("cegar", "counter-example guided synthesis");
  cegar_args.p.add(cegar, false);
  cegar->add_option("--variant", cegar_args.variant)
      ->check(CLI::IsMember({"basic", "shortloop", "overshoot"}));
  cegar->add_flag("--unbounded", "no target bound (the default without --t)")
      ->excludes(cegar->get_option("--t"));
  cegar->add_flag("--strengthen", cegar_args.strengthen, "add converse observation clauses");
  cegar->add_flag("--no-tighten", cegar_args.no_tighten, "overshoot: stop at the first algorithm");
  cegar->add_flag("--generalize", cegar_args.generalize,
                  "forbid counterexample walks for every adversary filling");
  cegar->add_option("--walks", cegar_args.walks, "extra verifier walks per candidate")
      ->check(CLI::NonNegativeNumber);
  cegar->add_option("-o,--output", cegar_args.out);

  ExtendArgs extend_args;
  auto* extend = app.add_subcommand("extend", "add a node that predicts the majority");
  extend->add_option("alg", extend_args.alg)->required()->check(CLI::ExistingFile);
  extend->add_option("--times", extend_args.times)->check(CLI::Range(1, 8));
  extend->add_option("-o,--output", extend_args.out);

  TopologyArgs topo_args;
  auto* topology = app.add_subcommand("topology", "membership in G(k,m,d); optional generalization");
  topology->add_option("graph", topo_args.graph)->required()->check(CLI::ExistingFile);
  topology->add_option("--k", topo_args.k);
  topology->add_option("--m", topo_args.m);
  topology->add_option("--d", topo_args.d)->check(CLI::NonNegativeNumber);
  topology->add_option("--core", topo_args.core, "comma-separated vertex ids");
  topology->add_option("--alg", topo_args.alg, "core algorithm (sets k=n, m=2f+1)");
  topology->add_option("-o,--output", topo_args.out, "graph with partition");
  topology->add_option("--alg-out", topo_args.alg_out, "generalized algorithm file");

  ComposeArgs compose_args;
  auto* compose = app.add_subcommand("compose", "stack 2-counters into a 2^b counter and simulate");
  compose->add_option("algs", compose_args.algs)->required()->check(CLI::ExistingFile);
  compose->add_option("--trials", compose_args.trials)->check(CLI::PositiveNumber);
  compose->add_option("--rounds", compose_args.rounds)->check(CLI::PositiveNumber);
  compose->add_option("--adversary", compose_args.adversary)
      ->check(CLI::IsMember({"none", "random", "greedy"}));

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "run executions under an adversary");
  simulate->add_option("alg", sim_args.alg)->check(CLI::ExistingFile);
  simulate->add_option("--topology", sim_args.topology)->check(CLI::ExistingFile);
  simulate->add_flag("--randomized", sim_args.randomized, "the randomized 2-counter");
  simulate->add_option("--n", sim_args.n);
  simulate->add_option("--f", sim_args.f);
  simulate->add_option("--adversary", sim_args.adversary)
      ->check(CLI::IsMember({"none", "random", "greedy"}));
  simulate->add_option("--faults", sim_args.faults, "e.g. {0}");
  simulate->add_option("--init", sim_args.init, "digits per node, or 'random'");
  simulate->add_option("--rounds", sim_args.rounds)->check(CLI::PositiveNumber);
  simulate->add_option("--trials", sim_args.trials)->check(CLI::PositiveNumber);
  simulate->add_option("--window", sim_args.window)->check(CLI::PositiveNumber);

  ExportCnfArgs cnf_args;
  auto* export_cnf = app.add_subcommand("export-cnf", "write the synthesis CNF");
  cnf_args.p.add(export_cnf, true);
  export_cnf->add_option("-o,--output", cnf_args.out);

  DecodeArgs decode_args;
  auto* decode_model = app.add_subcommand("decode-model", "turn a solver model into an algorithm");
  decode_model->add_option("cnf", decode_args.cnf)->required()->check(CLI::ExistingFile);
  decode_model->add_option("model", decode_args.model)->required()->check(CLI::ExistingFile);
  decode_model->add_option("-o,--output", decode_args.out);

  DotArgs dot_args;
  auto* export_dot_cmd = app.add_subcommand("export-dot", "render a projection graph");
  export_dot_cmd->add_option("alg", dot_args.alg)->required()->check(CLI::ExistingFile);
  export_dot_cmd->add_option("--faults", dot_args.faults);
  export_dot_cmd->add_option("-o,--output", dot_args.out);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    g_log.open(g_opts.log_path);
    apply_memory_limit();
    std::map<CLI::App*, std::function<int()>> handlers = {
        {verify, [&] { return cmd_verify(verify_args); }},
        {synth, [&] { return cmd_synth(synth_args); }},
        {cegar, [&] { return cmd_cegar(cegar_args); }},
        {extend, [&] { return cmd_extend(extend_args); }},
        {topology, [&] { return cmd_topology(topo_args); }},
        {compose, [&] { return cmd_compose(compose_args); }},
        {simulate, [&] { return cmd_simulate(sim_args); }},
        {export_cnf, [&] { return cmd_export_cnf(cnf_args); }},
        {decode_model, [&] { return cmd_decode_model(decode_args); }},
        {export_dot_cmd, [&] { return cmd_export_dot(dot_args); }},
    };
    for (auto& [sub, handler] : handlers) {
      if (!sub->parsed()) continue;
      g_log.emit("start", {{"command", sub->get_name()}, {"seed", g_opts.seed}});
      int code;
      if (g_opts.jobs > 1 && (sub == synth || sub == cegar)) {
        code = run_portfolio(handler, sub == synth ? &synth_args.out : &cegar_args.out);
      } else {
        code = handler();
      }
      g_log.emit("exit", {{"code", code}});
      return code;
    }
  } catch (const SizeLimitError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kLimit;
  } catch (const std::bad_alloc&) {
    std::cerr << "resource limit: out of memory\n";
    return kLimit;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const FormatError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
