#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "katzforge/tolerances.hpp"

namespace katzforge {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Ordered pair (from, to) of 0-based agent indices.
struct Edge {
  int from = 0;
  int to = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Unweighted digraph constraining which agents each agent may allocate to.
///
/// Construction rejects out-of-range indices and duplicate pairs. Agents with
/// no out-neighbor are representable so that `validate_instance` can report
/// them; every other module assumes a validated instance.
class Topology {
 public:
  Topology(int n, std::vector<Edge> edges);

  static Topology complete(int n, bool self_loops);

  int size() const { return n_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const int> out_neighbors(int agent) const { return out_[agent]; }
  bool has_edge(int from, int to) const { return adjacency_[from * n_ + to] != 0; }

  /// Every ordered pair, self-pairs included, is present.
  bool is_complete() const;
  /// Every agent may allocate to itself.
  bool has_all_self_loops() const;
  /// (i, j) present iff (j, i) present.
  bool is_symmetric() const;

  friend bool operator==(const Topology& a, const Topology& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> out_;
  std::vector<char> adjacency_;
};

/// Underlying topology plus per-agent budgets. Immutable.
class GameInstance {
 public:
  GameInstance(Topology topology, std::vector<double> budgets, std::string name = {});

  int size() const { return topology_.size(); }
  const Topology& topology() const { return topology_; }
  std::span<const double> budgets() const { return budgets_; }
  double budget(int agent) const { return budgets_[agent]; }
  double max_budget() const { return max_budget_; }
  const std::string& name() const { return name_; }

  friend bool operator==(const GameInstance& a, const GameInstance& b) {
    return a.topology_ == b.topology_ && a.budgets_ == b.budgets_ && a.name_ == b.name_;
  }

 private:
  Topology topology_;
  std::vector<double> budgets_;
  double max_budget_;
  std::string name_;
};

struct Violation {
  std::string rule;
  int agent = -1;  // 0-based; -1 when the violation is instance-wide
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string describe() const;
};

ValidationReport validate_instance(const GameInstance& game);

/// Throws InvalidInstance carrying the report text unless the instance is valid.
void require_valid(const GameInstance& game);

/// Strategy profile: row i holds the resources agent i places on each agent.
/// The matrix is the adjacency matrix A(w) of the played network.
class AllocationProfile {
 public:
  explicit AllocationProfile(Matrix weights);

  static AllocationProfile zero(int n);

  int size() const { return static_cast<int>(weights_.rows()); }
  double operator()(int from, int to) const { return weights_(from, to); }
  const Matrix& weights() const { return weights_; }
  Vector row(int agent) const { return weights_.row(agent).transpose(); }
  double row_sum(int agent) const { return weights_.row(agent).sum(); }

  /// Copy of this profile with row `agent` replaced.
  AllocationProfile with_row(int agent, const Vector& row) const;

  friend bool operator==(const AllocationProfile& a, const AllocationProfile& b) {
    return a.weights_.rows() == b.weights_.rows() && a.weights_ == b.weights_;
  }

 private:
  Matrix weights_;
};

/// Membership in K(G†): nonnegative entries, support inside the topology and
/// row sums within budget. Throws DimensionMismatch if sizes differ.
bool is_feasible(const GameInstance& game, const AllocationProfile& profile,
                 const Tolerances& tol = kDefaultTolerances);

/// Human-readable reasons a profile is infeasible; empty when feasible.
std::vector<std::string> feasibility_violations(const GameInstance& game,
                                                const AllocationProfile& profile,
                                                const Tolerances& tol = kDefaultTolerances);

struct RescaleParameters {
  double delta = 1.0;
};

/// Folds a discount factor into the budgets: centralities under (B, delta)
/// equal centralities of delta*w under (delta*B, 1). Requires
/// delta * max B < 1; throws std::invalid_argument otherwise.
GameInstance rescale(const GameInstance& game, RescaleParameters params);

struct RandomInstanceParams {
  int n = 1;
  double edge_density = 0.5;
  bool self_loops = false;
  double budget_min = 0.1;
  double budget_max = 0.9;
  std::uint64_t seed = 0;
  /// Sample unordered pairs so the topology is undirected.
  bool symmetric = false;
  /// 0 draws budgets uniformly; k >= 1 draws from k evenly spaced levels.
  int budget_levels = 0;
};

/// Deterministic for fixed parameters. Agents left without an out-neighbor
/// receive one uniformly chosen out-edge.
GameInstance generate_random_instance(const RandomInstanceParams& params);

/// Random feasible profile: support is a random nonempty subset of each
/// neighborhood and row sums are a random fraction of the budget.
AllocationProfile generate_random_profile(const GameInstance& game, std::uint64_t seed);

}  // namespace katzforge
