#include "katzforge/dynamics.hpp"

#include <algorithm>
#include <sstream>

#include "katzforge/errors.hpp"
#include "katzforge/game.hpp"
#include "katzforge/io.hpp"
#include "katzforge/rng.hpp"

namespace katzforge {

std::string Scheduler::describe() const {
  switch (kind_) {
    case Kind::round_robin:
      return "round-robin";
    case Kind::uniform_random:
      return "uniform-random(seed=" + std::to_string(seed_) + ")";
    case Kind::explicit_sequence: {
      std::string s = "explicit(";
      for (std::size_t k = 0; k < sequence_.size(); ++k) {
        if (k) s += ',';
        s += std::to_string(sequence_[k] + 1);
      }
      return s + ")";
    }
  }
  return "unknown";
}

std::optional<int> Scheduler::agent_at(std::size_t step, int n) const {
  switch (kind_) {
    case Kind::round_robin:
      return static_cast<int>(step % static_cast<std::size_t>(n));
    case Kind::uniform_random:
      return static_cast<int>(bounded(counter_draw(seed_, step), static_cast<std::uint64_t>(n)));
    case Kind::explicit_sequence:
      if (step < sequence_.size()) return sequence_[step];
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<int> Scheduler::pick(std::size_t step, std::span<const int> candidates, int last,
                                   std::size_t& cursor) const {
  switch (kind_) {
    case Kind::round_robin: {
      auto it = std::upper_bound(candidates.begin(), candidates.end(), last);
      return it != candidates.end() ? *it : candidates.front();
    }
    case Kind::uniform_random:
      return candidates[bounded(counter_draw(seed_, step), candidates.size())];
    case Kind::explicit_sequence:
      while (cursor < sequence_.size()) {
        const int agent = sequence_[cursor++];
        if (std::binary_search(candidates.begin(), candidates.end(), agent)) return agent;
      }
      return std::nullopt;
  }
  return std::nullopt;
}

namespace {

void check_inputs(const GameInstance& game, const AllocationProfile& initial, const BrdConfig& config) {
  require_valid(game);
  if (auto problems = feasibility_violations(game, initial); !problems.empty()) {
    throw InfeasibleProfile("initial profile is infeasible: " + problems.front());
  }
  if (!(config.tol > 0.0)) throw std::invalid_argument("BRD tolerance must be positive");
  if (config.max_steps && *config.max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
  if (config.scheduler.kind() == Scheduler::Kind::explicit_sequence) {
    for (int a : config.scheduler.sequence())
      if (a < 0 || a >= game.size()) throw std::invalid_argument("explicit schedule names an unknown agent");
  }
}

double residual_of(const Vector& gaps) { return gaps.cwiseAbs().maxCoeff(); }

BrdTrace start_trace(const AllocationProfile& initial, const Centralities& c, double residual,
                     const BrdConfig& config) {
  BrdTrace trace;
  trace.mode = config.mode;
  trace.scheduler = config.scheduler;
  trace.terminal = initial;
  trace.steps.push_back({0, -1, false, Vector(), c, residual});
  return trace;
}

}  // namespace

BrdTrace run_brd(const GameInstance& game, const AllocationProfile& initial, const BrdConfig& config) {
  check_inputs(game, initial, config);
  const int n = game.size();
  AllocationProfile w = initial;
  Centralities c = katz_solve(w);
  Vector gaps = improvement_gaps(game, c);
  BrdTrace trace = start_trace(initial, c, residual_of(gaps), config);
  if (trace.terminal_residual() <= config.tol) {
    trace.status = BrdStatus::converged;
    return trace;
  }

  const std::size_t limit = config.max_steps.value_or(500 * static_cast<std::size_t>(n));
  trace.status = BrdStatus::step_limit;
  for (std::size_t k = 0; k < limit; ++k) {
    const auto agent = config.scheduler.agent_at(k, n);
    if (!agent) break;
    const int i = *agent;
    bool rewritten = false;
    if (!(config.lazy && std::abs(gaps(i)) <= config.tol)) {
      const auto br = best_response(game, i, w);
      if (br.canonical != w.row(i)) {
        w = w.with_row(i, br.canonical);
        c = katz_solve(w);
        gaps = improvement_gaps(game, c);
        rewritten = true;
        ++trace.rewrites;
      }
    }
    trace.steps.push_back({k + 1, i, rewritten, w.row(i), c, residual_of(gaps)});
    trace.total_steps = k + 1;
    if (trace.terminal_residual() <= config.tol) {
      trace.status = BrdStatus::converged;
      break;
    }
  }
  trace.terminal = std::move(w);
  return trace;
}

BrdTrace run_modified_brd(const GameInstance& game, const AllocationProfile& initial,
                          const BrdConfig& config) {
  check_inputs(game, initial, config);
  AllocationProfile w = initial;
  Centralities c = katz_solve(w);
  Vector gaps = improvement_gaps(game, c);
  BrdTrace trace = start_trace(initial, c, residual_of(gaps), config);

  int last = -1;
  std::size_t cursor = 0;
  trace.status = BrdStatus::converged;
  for (std::size_t k = 0;; ++k) {
    std::vector<int> improving;
    for (int i = 0; i < game.size(); ++i)
      if (gaps(i) > config.tol) improving.push_back(i);
    if (improving.empty()) break;
    if (config.max_steps && k >= *config.max_steps) {
      trace.status = BrdStatus::step_limit;
      break;
    }
    const auto agent = config.scheduler.pick(k, improving, last, cursor);
    if (!agent) {
      trace.status = BrdStatus::step_limit;
      break;
    }
    const int i = *agent;
    w = w.with_row(i, best_response(game, i, w).canonical);
    c = katz_solve(w);
    gaps = improvement_gaps(game, c);
    ++trace.rewrites;
    trace.steps.push_back({k + 1, i, true, w.row(i), c, residual_of(gaps)});
    trace.total_steps = k + 1;
    last = i;
  }
  trace.terminal = std::move(w);
  return trace;
}

BrdTrace run_dynamics(const GameInstance& game, const AllocationProfile& initial, const BrdConfig& config) {
  return config.mode == BrdMode::modified ? run_modified_brd(game, initial, config)
                                          : run_brd(game, initial, config);
}

std::vector<int> select_agents_with_improvement(const GameInstance& game, const AllocationProfile& profile,
                                                double tol) {
  if (auto problems = feasibility_violations(game, profile); !problems.empty()) {
    throw InfeasibleProfile("infeasible allocation: " + problems.front());
  }
  const Vector gaps = improvement_gaps(game, katz_solve(profile));
  std::vector<int> out;
  for (int i = 0; i < game.size(); ++i)
    if (gaps(i) > tol) out.push_back(i);
  return out;
}

std::string trace_to_csv(const BrdTrace& trace) {
  std::ostringstream out;
  const auto n = trace.steps.front().centralities.size();
  out << "step,agent,residual";
  for (Eigen::Index i = 0; i < n; ++i) out << ",c_" << i + 1;
  out << '\n';
  for (const auto& s : trace.steps) {
    out << s.step << ',' << s.agent + 1 << ',' << format_double17(s.residual);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double17(s.centralities(i));
    out << '\n';
  }
  return out.str();
}

const char* to_string(BrdStatus status) {
  return status == BrdStatus::converged ? "converged" : "step-limit";
}

const char* to_string(BrdMode mode) { return mode == BrdMode::modified ? "modified" : "standard"; }

}  // namespace katzforge
