#include "syncount/solver_backend.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cadical.hpp>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace syncount {

namespace {

using Clock = std::chrono::steady_clock;

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

template <typename Fn>
void for_each_token(std::string_view line, Fn&& fn) {
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    auto end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    if (end > pos) fn(line.substr(pos, end - pos));
    pos = end;
  }
}

long long to_number(std::string_view token) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw FormatError("expected an integer, got '" + std::string(token) + "'");
  }
  return v;
}

class DeadlineTerminator : public CaDiCaL::Terminator {
 public:
  explicit DeadlineTerminator(Clock::time_point deadline) : deadline_(deadline) {}
  bool terminate() override { return Clock::now() >= deadline_; }

 private:
  Clock::time_point deadline_;
};

// Counts learned clauses, one per conflict.
class ConflictCounter : public CaDiCaL::Learner {
 public:
  bool learning(int) override {
    ++count;
    return false;
  }
  void learn(int) override {}
  std::int64_t count = 0;
};

class CadicalSession : public IncrementalSession {
 public:
  CadicalSession(const SolveLimits& limits,
                 const std::vector<std::pair<std::string, int>>& options = {}) {
    set_limits(limits);
    solver_.set("quiet", 1);
    solver_.set("seed", limits.seed);
    for (const auto& [name, value] : options) {
      if (!solver_.set(name.c_str(), value)) {
        throw BackendError("unknown solver option '" + name + "'");
      }
    }
    if (!limits.proof_path.empty()) {
      if (!solver_.trace_proof(limits.proof_path.c_str())) {
        throw BackendError("cannot open proof file '" + limits.proof_path + "'");
      }
      tracing_ = true;
    }
    solver_.connect_learner(&counter_);
  }
  ~CadicalSession() override {
    solver_.disconnect_learner();
    if (tracing_) solver_.close_proof_trace();
  }

 protected:
  void backend_add(std::span<const int> clause) override {
    for (int lit : clause) solver_.add(lit);
    solver_.add(0);
  }

  SolveResult backend_solve(std::span<const int> assumptions) override {
    auto start = Clock::now();
    auto deadline = start + std::chrono::duration_cast<Clock::duration>(limits().time);
    DeadlineTerminator terminator(deadline);
    solver_.connect_terminator(&terminator);
    for (int lit : assumptions) solver_.assume(lit);
    auto before = counter_.count;
    int code = solver_.solve();
    solver_.disconnect_terminator();

    SolveResult result;
    result.stats.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    result.stats.conflicts = counter_.count - before;
    if (code == 10) {
      result.status = SolveStatus::sat;
      int vars = solver_.vars();
      std::vector<std::int8_t> values(vars + 1, 0);
      for (int v = 1; v <= vars; ++v) values[v] = solver_.val(v) > 0 ? 1 : -1;
      result.model = Model(std::move(values));
    } else if (code == 20) {
      result.status = SolveStatus::unsat;
    } else {
      result.status = SolveStatus::unknown;
      result.diagnostic = "time limit exceeded";
    }
    return result;
  }

 private:
  CaDiCaL::Solver solver_;
  ConflictCounter counter_;
  bool tracing_ = false;
};

// Assumptions become unit clauses of the file handed to the external
// solver for that call only.
class ProcessSession : public IncrementalSession {
 public:
  ProcessSession(std::string path, const SolveLimits& limits) : path_(std::move(path)) {
    set_limits(limits);
  }

 protected:
  void backend_add(std::span<const int>) override {}

  SolveResult backend_solve(std::span<const int> assumptions) override {
    CnfFormula cnf;
    cnf.num_vars = max_var();
    for (const auto& clause : stored_clauses()) cnf.clauses.push_back(clause);
    for (int lit : assumptions) {
      cnf.num_vars = std::max(cnf.num_vars, std::abs(lit));
      cnf.clauses.push_back({lit});
    }
    return solve_oneshot(cnf, limits(), path_);
  }

 private:
  std::string path_;
};

}  // namespace

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::sat:
      return "sat";
    case SolveStatus::unsat:
      return "unsat";
    case SolveStatus::unknown:
      break;
  }
  return "unknown";
}

bool Model::satisfies(std::span<const int> clause) const {
  return std::any_of(clause.begin(), clause.end(), [&](int lit) { return value(lit); });
}

Model Model::parse(std::string_view text, int num_vars) {
  std::vector<std::int8_t> values(num_vars + 1, 0);
  for (auto line : lines_of(text)) {
    if (line.empty() || line[0] == 'c' || line[0] == 's') continue;
    if (line[0] == 'v') line.remove_prefix(1);
    for_each_token(line, [&](std::string_view token) {
      auto lit = to_number(token);
      if (lit == 0) return;
      auto var = lit < 0 ? -lit : lit;
      if (var > num_vars) {
        throw FormatError("model literal " + std::to_string(lit) +
                          " exceeds variable count " + std::to_string(num_vars));
      }
      values[var] = lit > 0 ? 1 : -1;
    });
  }
  return Model(std::move(values));
}

std::string Model::to_text() const {
  std::ostringstream out;
  int on_line = 0;
  for (int v = 1; v <= num_vars(); ++v) {
    if (on_line == 0) out << 'v';
    out << ' ' << (value(v) ? v : -v);
    if (++on_line == 16) {
      out << '\n';
      on_line = 0;
    }
  }
  if (on_line == 0) out << 'v';
  out << " 0\n";
  return out.str();
}

void CnfFormula::add(std::vector<int> clause) {
  for (int lit : clause) num_vars = std::max(num_vars, std::abs(lit));
  clauses.push_back(std::move(clause));
}

std::string to_dimacs(const CnfFormula& cnf) {
  std::string out;
  for (const auto& c : cnf.comments) {
    out += "c ";
    out += c;
    out += '\n';
  }
  out += "p cnf " + std::to_string(cnf.num_vars) + ' ' +
         std::to_string(cnf.clauses.size()) + '\n';
  char buffer[16];
  for (const auto& clause : cnf.clauses) {
    for (int lit : clause) {
      auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, lit);
      out.append(buffer, ptr);
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

CnfFormula parse_dimacs(std::string_view text) {
  CnfFormula cnf;
  long long declared_clauses = -1;
  std::vector<int> current;
  for (auto line : lines_of(text)) {
    if (line.empty()) continue;
    if (line[0] == 'c') {
      auto body = line.substr(1);
      if (!body.empty() && body[0] == ' ') body.remove_prefix(1);
      cnf.comments.emplace_back(body);
      continue;
    }
    if (line[0] == 'p') {
      if (declared_clauses >= 0) throw FormatError("duplicate DIMACS header");
      std::vector<std::string_view> tokens;
      for_each_token(line, [&](std::string_view tok) { tokens.push_back(tok); });
      if (tokens.size() != 4 || tokens[0] != "p" || tokens[1] != "cnf") {
        throw FormatError("malformed DIMACS header '" + std::string(line) + "'");
      }
      cnf.num_vars = static_cast<int>(to_number(tokens[2]));
      declared_clauses = to_number(tokens[3]);
      continue;
    }
    if (declared_clauses < 0) throw FormatError("clause before DIMACS header");
    for_each_token(line, [&](std::string_view token) {
      auto lit = to_number(token);
      if (lit == 0) {
        cnf.clauses.push_back(std::move(current));
        current.clear();
        return;
      }
      if (std::llabs(lit) > cnf.num_vars) {
        throw FormatError("literal " + std::to_string(lit) + " exceeds header");
      }
      current.push_back(static_cast<int>(lit));
    });
  }
  if (declared_clauses < 0) throw FormatError("missing DIMACS header");
  if (!current.empty()) throw FormatError("last clause is not 0-terminated");
  if (static_cast<long long>(cnf.clauses.size()) != declared_clauses) {
    throw FormatError("header declares " + std::to_string(declared_clauses) +
                      " clauses, found " + std::to_string(cnf.clauses.size()));
  }
  return cnf;
}

// ---------------------------------------------------------------------------

void IncrementalSession::add_clause(std::span<const int> clause) {
  if (closed_) throw BackendError("session is closed");
  for (int lit : clause) {
    if (lit == 0) throw std::invalid_argument("literal 0 inside a clause");
    max_var_ = std::max(max_var_, std::abs(lit));
  }
  clauses_.emplace_back(clause.begin(), clause.end());
  backend_add(clause);
}

SolveResult IncrementalSession::solve_under(std::span<const int> assumptions) {
  if (closed_) throw BackendError("session is closed");
  ++solve_calls_;
  auto result = backend_solve(assumptions);
  if (result.status == SolveStatus::sat) {
    if (!result.model) throw BackendError("backend reported sat without a model");
    for (const auto& clause : clauses_) {
      if (!result.model->satisfies(clause)) {
        throw BackendError("backend model falsifies a stored clause");
      }
    }
    for (int lit : assumptions) {
      if (!result.model->value(lit)) {
        throw BackendError("backend model violates an assumption");
      }
    }
  } else {
    result.model.reset();
  }
  return result;
}

std::unique_ptr<IncrementalSession> make_session(const BackendConfig& config,
                                                 const SolveLimits& limits) {
  if (config.kind == BackendKind::in_process) {
    return std::make_unique<CadicalSession>(limits, config.options);
  }
  auto path = config.solver_path.empty() ? solver_path_from_env() : config.solver_path;
  if (path.empty()) throw BackendError("no external solver configured");
  return std::make_unique<ProcessSession>(path, limits);
}

std::string solver_path_from_env() {
  if (const char* env = std::getenv("SYNCOUNT_SOLVER"); env && *env) return env;
#ifdef SYNCOUNT_BUNDLED_SOLVER
  return SYNCOUNT_BUNDLED_SOLVER;
#else
  return {};
#endif
}

// ---------------------------------------------------------------------------

SolveResult solve_in_process(const CnfFormula& cnf, const SolveLimits& limits) {
  CadicalSession session(limits);
  for (const auto& clause : cnf.clauses) session.add_clause(clause);
  return session.solve_under({});
}

SolveResult solve_oneshot(const CnfFormula& cnf, const SolveLimits& limits,
                          const std::string& solver_path) {
  SolveResult result;
  if (solver_path.empty() || ::access(solver_path.c_str(), X_OK) != 0) {
    result.diagnostic = "solver binary '" + solver_path + "' is missing or not executable";
    return result;
  }

  const char* tmpdir = std::getenv("TMPDIR");
  std::string pattern = std::string(tmpdir && *tmpdir ? tmpdir : "/tmp") + "/syncount-XXXXXX.cnf";
  std::vector<char> name(pattern.begin(), pattern.end());
  name.push_back('\0');
  int fd = ::mkstemps(name.data(), 4);
  if (fd < 0) {
    result.diagnostic = "cannot create temporary CNF file";
    return result;
  }
  std::string cnf_path(name.data());
  {
    auto text = to_dimacs(cnf);
    std::size_t written = 0;
    while (written < text.size()) {
      auto n = ::write(fd, text.data() + written, text.size() - written);
      if (n <= 0) break;
      written += static_cast<std::size_t>(n);
    }
    ::close(fd);
  }

  int pipe_fds[2];
  if (::pipe(pipe_fds) != 0) {
    ::unlink(cnf_path.c_str());
    result.diagnostic = "cannot create pipe";
    return result;
  }
  auto start = Clock::now();
  pid_t pid = ::fork();
  if (pid == 0) {
    ::dup2(pipe_fds[1], STDOUT_FILENO);
    int devnull = ::open("/dev/null", O_WRONLY);
    if (devnull >= 0) ::dup2(devnull, STDERR_FILENO);
    ::close(pipe_fds[0]);
    ::close(pipe_fds[1]);
    if (limits.memory_bytes > 0) {
      rlimit rl{limits.memory_bytes, limits.memory_bytes};
      ::setrlimit(RLIMIT_AS, &rl);
    }
    std::vector<char*> argv;
    argv.push_back(const_cast<char*>(solver_path.c_str()));
    argv.push_back(cnf_path.data());
    if (!limits.proof_path.empty()) argv.push_back(const_cast<char*>(limits.proof_path.c_str()));
    argv.push_back(nullptr);
    ::execv(solver_path.c_str(), argv.data());
    ::_exit(127);
  }
  ::close(pipe_fds[1]);
  if (pid < 0) {
    ::close(pipe_fds[0]);
    ::unlink(cnf_path.c_str());
    result.diagnostic = "fork failed";
    return result;
  }

  auto deadline = start + std::chrono::duration_cast<Clock::duration>(limits.time);
  std::string output;
  bool timed_out = false;
  char buffer[1 << 14];
  while (true) {
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (remaining.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd pfd{pipe_fds[0], POLLIN, 0};
    int ready = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining.count(), 1000)));
    if (ready < 0 && errno != EINTR) break;
    if (ready <= 0) continue;
    auto n = ::read(pipe_fds[0], buffer, sizeof buffer);
    if (n <= 0) break;
    output.append(buffer, static_cast<std::size_t>(n));
  }
  if (timed_out) ::kill(pid, SIGKILL);
  ::close(pipe_fds[0]);
  int status = 0;
  ::waitpid(pid, &status, 0);
  ::unlink(cnf_path.c_str());
  result.stats.seconds = std::chrono::duration<double>(Clock::now() - start).count();

  if (timed_out) {
    result.diagnostic = "time limit exceeded";
    return result;
  }
  if (!WIFEXITED(status)) {
    result.diagnostic = "solver terminated by signal " +
                        std::to_string(WIFSIGNALED(status) ? WTERMSIG(status) : 0) +
                        " (memory limit?)";
    return result;
  }
  int code = WEXITSTATUS(status);
  if (code == 127) {
    result.diagnostic = "cannot execute solver '" + solver_path + "'";
    return result;
  }

  std::optional<SolveStatus> reported;
  std::string model_text;
  for (auto line : lines_of(output)) {
    if (line.starts_with("s SATISFIABLE")) {
      reported = SolveStatus::sat;
    } else if (line.starts_with("s UNSATISFIABLE")) {
      reported = SolveStatus::unsat;
    } else if (line.starts_with("v")) {
      model_text.append(line);
      model_text += '\n';
    } else if (line.starts_with("c conflicts:") || line.starts_with("c decisions:")) {
      auto rest = line.substr(line.find(':') + 1);
      std::int64_t value = -1;
      for_each_token(rest, [&](std::string_view tok) {
        if (value < 0) {
          try {
            value = to_number(tok);
          } catch (const FormatError&) {
          }
        }
      });
      (line.starts_with("c conflicts:") ? result.stats.conflicts : result.stats.decisions) = value;
    }
  }
  if (code != 10 && code != 20) {
    result.diagnostic = "solver exited with code " + std::to_string(code);
    return result;
  }
  auto by_code = code == 10 ? SolveStatus::sat : SolveStatus::unsat;
  if (reported && *reported != by_code) {
    result.diagnostic = "solver status line disagrees with its exit code";
    return result;
  }
  result.status = by_code;
  if (by_code == SolveStatus::sat) {
    try {
      result.model = Model::parse(model_text, cnf.num_vars);
    } catch (const FormatError& e) {
      result.status = SolveStatus::unknown;
      result.diagnostic = std::string("malformed model: ") + e.what();
      return result;
    }
    for (const auto& clause : cnf.clauses) {
      if (!result.model->satisfies(clause)) {
        throw BackendError("external solver model falsifies a clause");
      }
    }
  }
  return result;
}

}  // namespace syncount
