#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "katzforge/centrality.hpp"
#include "katzforge/instance.hpp"
#include "katzforge/tolerances.hpp"

namespace katzforge {

/// Chooses which agent moves at each step.
///
/// Round-robin cycles 1..n; uniform-random draws agent k from a counter-based
/// stream keyed by the seed. Explicit sequences are consumed once, in order,
/// and carry no guarantee that every agent moves.
class Scheduler {
 public:
  enum class Kind { round_robin, uniform_random, explicit_sequence };

  static Scheduler round_robin() { return Scheduler(Kind::round_robin, 0, {}); }
  static Scheduler uniform_random(std::uint64_t seed) { return Scheduler(Kind::uniform_random, seed, {}); }
  static Scheduler explicit_sequence(std::vector<int> agents) {
    return Scheduler(Kind::explicit_sequence, 0, std::move(agents));
  }

  Kind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<int>& sequence() const { return sequence_; }
  std::string describe() const;

  /// Agent moving at 0-based step `step`; nullopt once an explicit sequence
  /// is exhausted.
  std::optional<int> agent_at(std::size_t step, int n) const;

  /// Pick among `candidates` (ascending, nonempty) at step `step`, given the
  /// agent that moved last (-1 if none). Round-robin takes the first
  /// candidate after `last` cyclically; uniform-random draws uniformly;
  /// explicit takes the next sequence entry that is a candidate.
  std::optional<int> pick(std::size_t step, std::span<const int> candidates, int last,
                          std::size_t& cursor) const;

 private:
  Scheduler(Kind kind, std::uint64_t seed, std::vector<int> sequence)
      : kind_(kind), seed_(seed), sequence_(std::move(sequence)) {}

  Kind kind_;
  std::uint64_t seed_;
  std::vector<int> sequence_;
};

enum class BrdMode { standard, modified };

struct BrdConfig {
  Scheduler scheduler = Scheduler::round_robin();
  /// Unset: 500 n for standard BRD, unbounded for modified BRD.
  std::optional<std::size_t> max_steps;
  /// Convergence threshold on ||v(c) - c||_inf; also the best-response test.
  double tol = kDefaultTolerances.equality;
  /// Keep the current row when it is already a best response.
  bool lazy = true;
  BrdMode mode = BrdMode::standard;
};

/// Step 0 is the initial profile (agent = -1, empty row).
struct BrdStep {
  std::size_t step = 0;
  int agent = -1;
  bool rewritten = false;
  Vector row;
  Centralities centralities;
  double residual = 0.0;
};

enum class BrdStatus { converged, step_limit };

struct BrdTrace {
  BrdMode mode = BrdMode::standard;
  Scheduler scheduler = Scheduler::round_robin();
  std::vector<BrdStep> steps;
  AllocationProfile terminal = AllocationProfile::zero(1);
  BrdStatus status = BrdStatus::step_limit;
  std::size_t total_steps = 0;
  std::size_t rewrites = 0;

  const Centralities& terminal_centralities() const { return steps.back().centralities; }
  double terminal_residual() const { return steps.back().residual; }
};

/// Sequential best-response dynamics with the canonical single-edge response.
/// Stops when the residual of the current profile is within tol.
BrdTrace run_brd(const GameInstance& game, const AllocationProfile& initial, const BrdConfig& config);

/// Only agents with a strict better response move, each to a single-edge
/// best response. Terminates at an equilibrium in finitely many steps.
BrdTrace run_modified_brd(const GameInstance& game, const AllocationProfile& initial,
                          const BrdConfig& config);

/// Dispatches on config.mode.
BrdTrace run_dynamics(const GameInstance& game, const AllocationProfile& initial, const BrdConfig& config);

/// Agents that have a strict better response at `profile` (ascending).
std::vector<int> select_agents_with_improvement(const GameInstance& game, const AllocationProfile& profile,
                                                double tol = kDefaultTolerances.equality);

/// Header `step,agent,residual,c_1..c_n`; agents 1-based (0 on the initial
/// row); floats with 17 significant digits.
std::string trace_to_csv(const BrdTrace& trace);

const char* to_string(BrdStatus status);
const char* to_string(BrdMode mode);

}  // namespace katzforge
