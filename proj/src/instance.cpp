#include "katzforge/instance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "katzforge/errors.hpp"
#include "katzforge/rng.hpp"

namespace katzforge {

Topology::Topology(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n_ < 1) throw InvalidInstance("topology needs at least one agent, got n=" + std::to_string(n_));
  adjacency_.assign(static_cast<std::size_t>(n_) * n_, 0);
  out_.resize(n_);
  for (const auto& e : edges_) {
    if (e.from < 0 || e.from >= n_ || e.to < 0 || e.to >= n_) {
      throw InvalidInstance("edge (" + std::to_string(e.from + 1) + ", " + std::to_string(e.to + 1) +
                            ") out of range 1.." + std::to_string(n_));
    }
    auto& cell = adjacency_[e.from * n_ + e.to];
    if (cell) {
      throw InvalidInstance("duplicate edge (" + std::to_string(e.from + 1) + ", " +
                            std::to_string(e.to + 1) + ")");
    }
    cell = 1;
  }
  std::sort(edges_.begin(), edges_.end());
  for (const auto& e : edges_) out_[e.from].push_back(e.to);
}

Topology Topology::complete(int n, bool self_loops) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (self_loops || i != j) edges.push_back({i, j});
  return Topology(n, std::move(edges));
}

bool Topology::is_complete() const {
  return edges_.size() == static_cast<std::size_t>(n_) * n_;
}

bool Topology::has_all_self_loops() const {
  for (int i = 0; i < n_; ++i)
    if (!has_edge(i, i)) return false;
  return true;
}

bool Topology::is_symmetric() const {
  return std::all_of(edges_.begin(), edges_.end(),
                     [this](const Edge& e) { return has_edge(e.to, e.from); });
}

GameInstance::GameInstance(Topology topology, std::vector<double> budgets, std::string name)
    : topology_(std::move(topology)), budgets_(std::move(budgets)), name_(std::move(name)) {
  if (static_cast<int>(budgets_.size()) != topology_.size()) {
    throw InvalidInstance("budgets has " + std::to_string(budgets_.size()) + " entries, expected n=" +
                          std::to_string(topology_.size()));
  }
  max_budget_ = *std::max_element(budgets_.begin(), budgets_.end());
}

std::string ValidationReport::describe() const {
  if (ok()) return "ok";
  std::ostringstream out;
  for (std::size_t k = 0; k < violations.size(); ++k) {
    if (k) out << "; ";
    out << violations[k].rule << ": " << violations[k].message;
  }
  return out.str();
}

ValidationReport validate_instance(const GameInstance& game) {
  ValidationReport report;
  const auto& top = game.topology();
  for (int i = 0; i < game.size(); ++i) {
    if (top.out_neighbors(i).empty()) {
      report.violations.push_back(
          {"SA1", i, "agent " + std::to_string(i + 1) + " has no out-neighbor in the topology"});
    }
    const double b = game.budget(i);
    if (!std::isfinite(b) || b <= 0.0 || b >= 1.0) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "agent " << i + 1 << " budget " << b << " outside (0, 1)";
      report.violations.push_back({"SA2", i, msg.str()});
    }
  }
  return report;
}

void require_valid(const GameInstance& game) {
  auto report = validate_instance(game);
  if (!report.ok()) throw InvalidInstance(report.describe());
}

AllocationProfile::AllocationProfile(Matrix weights) : weights_(std::move(weights)) {
  if (weights_.rows() != weights_.cols()) {
    throw DimensionMismatch("allocation matrix must be square, got " + std::to_string(weights_.rows()) +
                            "x" + std::to_string(weights_.cols()));
  }
}

AllocationProfile AllocationProfile::zero(int n) { return AllocationProfile(Matrix::Zero(n, n)); }

AllocationProfile AllocationProfile::with_row(int agent, const Vector& row) const {
  if (row.size() != weights_.cols()) {
    throw DimensionMismatch("row has " + std::to_string(row.size()) + " entries, expected " +
                            std::to_string(weights_.cols()));
  }
  Matrix next = weights_;
  next.row(agent) = row.transpose();
  return AllocationProfile(std::move(next));
}

std::vector<std::string> feasibility_violations(const GameInstance& game,
                                                const AllocationProfile& profile,
                                                const Tolerances& tol) {
  if (profile.size() != game.size()) {
    throw DimensionMismatch("allocation is " + std::to_string(profile.size()) + "x" +
                            std::to_string(profile.size()) + " but instance has n=" +
                            std::to_string(game.size()));
  }
  std::vector<std::string> out;
  const auto& top = game.topology();
  for (int i = 0; i < game.size(); ++i) {
    double sum = 0.0;
    for (int j = 0; j < game.size(); ++j) {
      const double w = profile(i, j);
      const std::string where = "w[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]";
      if (!std::isfinite(w) || w < 0.0) {
        out.push_back(where + " is negative or not finite");
      } else if (w > 0.0 && !top.has_edge(i, j)) {
        out.push_back(where + " > 0 but (" + std::to_string(i + 1) + ", " + std::to_string(j + 1) +
                      ") is not in the topology");
      }
      sum += w;
    }
    if (!(sum <= game.budget(i) + tol.feasibility)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "row " << i + 1 << " allocates " << sum << " > budget " << game.budget(i);
      out.push_back(msg.str());
    }
  }
  return out;
}

bool is_feasible(const GameInstance& game, const AllocationProfile& profile, const Tolerances& tol) {
  return feasibility_violations(game, profile, tol).empty();
}

GameInstance rescale(const GameInstance& game, RescaleParameters params) {
  const double bound = 1.0 / game.max_budget();
  if (!(params.delta > 0.0) || !(params.delta * game.max_budget() < 1.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "rescale requires 0 < delta < 1/max B = " << bound << ", got delta=" << params.delta;
    throw std::invalid_argument(msg.str());
  }
  std::vector<double> scaled(game.budgets().begin(), game.budgets().end());
  for (auto& b : scaled) b *= params.delta;
  return GameInstance(game.topology(), std::move(scaled), game.name());
}

GameInstance generate_random_instance(const RandomInstanceParams& params) {
  if (params.n < 1) throw std::invalid_argument("n must be positive");
  if (!(params.budget_min > 0.0 && params.budget_max < 1.0 && params.budget_min <= params.budget_max)) {
    throw std::invalid_argument("budget range must lie inside (0, 1)");
  }
  if (!(params.edge_density >= 0.0 && params.edge_density <= 1.0)) {
    throw std::invalid_argument("edge density must lie in [0, 1]");
  }
  const int n = params.n;
  Rng rng(params.seed);
  std::vector<char> adj(static_cast<std::size_t>(n) * n, 0);
  auto set = [&](int i, int j) { adj[i * n + j] = 1; };

  for (int i = 0; i < n; ++i) {
    for (int j = params.symmetric ? i + 1 : 0; j < n; ++j) {
      if (i == j) continue;
      if (rng.uniform() < params.edge_density) {
        set(i, j);
        if (params.symmetric) set(j, i);
      }
    }
  }
  if (params.self_loops)
    for (int i = 0; i < n; ++i) set(i, i);

  for (int i = 0; i < n; ++i) {
    bool empty = true;
    for (int j = 0; j < n && empty; ++j) empty = !adj[i * n + j];
    if (!empty) continue;
    if (n == 1) {
      set(0, 0);
      continue;
    }
    int j = static_cast<int>(rng.below(n - 1));
    if (j >= i) ++j;
    set(i, j);
    if (params.symmetric) set(j, i);
  }

  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (adj[i * n + j]) edges.push_back({i, j});

  std::vector<double> budgets(n);
  for (auto& b : budgets) {
    if (params.budget_levels <= 0) {
      b = rng.uniform(params.budget_min, params.budget_max);
    } else if (params.budget_levels == 1) {
      b = params.budget_min;
    } else {
      const auto level = static_cast<double>(rng.below(params.budget_levels));
      b = params.budget_min + (params.budget_max - params.budget_min) * level / (params.budget_levels - 1);
    }
  }
  return GameInstance(Topology(n, std::move(edges)), std::move(budgets));
}

AllocationProfile generate_random_profile(const GameInstance& game, std::uint64_t seed) {
  const int n = game.size();
  Rng rng(seed);
  Matrix w = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    auto nbrs = game.topology().out_neighbors(i);
    if (nbrs.empty()) continue;
    double total = 0.0;
    for (int j : nbrs) {
      if (rng.uniform() < 0.5) {
        w(i, j) = rng.uniform(0.05, 1.0);
        total += w(i, j);
      }
    }
    if (total == 0.0) {
      const int j = nbrs[rng.below(nbrs.size())];
      w(i, j) = 1.0;
      total = 1.0;
    }
    // Fraction of the budget used, in (0, 1].
    const double used = 1.0 - rng.uniform();
    w.row(i) *= used * game.budget(i) / total;
  }
  return AllocationProfile(std::move(w));
}

}  // namespace katzforge
