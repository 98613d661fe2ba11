#include "katzforge/game.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "katzforge/errors.hpp"

namespace katzforge {
namespace {

void require_feasible(const GameInstance& game, const AllocationProfile& profile) {
  auto problems = feasibility_violations(game, profile);
  if (!problems.empty()) throw InfeasibleProfile("infeasible allocation: " + problems.front());
}

// Rows other than `agent` must be feasible; the agent's own row is ignored.
void require_feasible_others(const GameInstance& game, const AllocationProfile& profile, int agent) {
  if (agent < 0 || agent >= game.size()) throw std::out_of_range("agent index out of range");
  require_feasible(game, profile.with_row(agent, Vector::Zero(game.size())));
}

BestResponseResult pick_argmax(const GameInstance& game, int agent, const std::vector<double>& scores,
                               const Tolerances& tol) {
  auto nbrs = game.topology().out_neighbors(agent);
  const double best = *std::max_element(scores.begin(), scores.end());
  const double cutoff = best - tol.tie * std::abs(best);
  BestResponseResult out;
  out.agent = agent;
  for (std::size_t k = 0; k < nbrs.size(); ++k)
    if (scores[k] >= cutoff) out.argmax_set.push_back(nbrs[k]);
  out.canonical = Vector::Zero(game.size());
  out.canonical(out.argmax_set.front()) = game.budget(agent);
  return out;
}

}  // namespace

Vector v_map(const GameInstance& game, const Vector& x) {
  if (x.size() != game.size()) throw DimensionMismatch("v-map argument has wrong length");
  if ((x.array() < 0.0).any()) throw std::invalid_argument("v-map is defined on nonnegative vectors only");
  Vector out(game.size());
  for (int i = 0; i < game.size(); ++i) {
    double best = 0.0;
    for (int j : game.topology().out_neighbors(i)) best = std::max(best, x(j));
    out(i) = game.budget(i) * (1.0 + best);
  }
  return out;
}

std::size_t equilibrium_iteration_bound(const GameInstance& game, double tol) {
  const double rate = game.max_budget();
  const double scale = *std::max_element(game.budgets().begin(), game.budgets().end());
  const double target = tol * (1.0 - rate) / scale;
  if (target >= 1.0) return 1;
  return static_cast<std::size_t>(std::ceil(std::log(target) / std::log(rate))) + 1;
}

EquilibriumCertificate equilibrium_centralities(const GameInstance& game, double tol) {
  require_valid(game);
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const double rate = game.max_budget();
  const double stop = tol * (1.0 - rate) / rate;
  const std::size_t cap = equilibrium_iteration_bound(game, tol) + 2;

  Vector x = Vector::Zero(game.size());
  EquilibriumCertificate cert;
  cert.contraction_rate = rate;
  for (std::size_t k = 1; k <= cap; ++k) {
    Vector next = v_map(game, x);
    const double step = (next - x).cwiseAbs().maxCoeff();
    x = std::move(next);
    cert.iterations = k;
    if (step <= stop) break;
  }
  cert.residual = (v_map(game, x) - x).cwiseAbs().maxCoeff();
  cert.c_star = std::move(x);
  return cert;
}

BestResponseResult best_response(const GameInstance& game, int agent, const AllocationProfile& profile,
                                 const Tolerances& tol) {
  require_feasible_others(game, profile, agent);
  const auto walks = walk_decomposition(game, profile, agent);
  std::vector<double> scores;
  for (int j : game.topology().out_neighbors(agent)) scores.push_back(walks.f(j));
  auto out = pick_argmax(game, agent, scores, tol);
  out.achieved_value = fractional_linear_centrality(agent, out.canonical, walks);
  return out;
}

BestResponseResult best_response_oracle(const GameInstance& game, int agent,
                                        const AllocationProfile& profile, const Tolerances& tol) {
  require_feasible_others(game, profile, agent);
  std::vector<double> values;
  for (int j : game.topology().out_neighbors(agent)) {
    Vector row = Vector::Zero(game.size());
    row(j) = game.budget(agent);
    values.push_back(katz_solve(profile.with_row(agent, row))(agent));
  }
  auto out = pick_argmax(game, agent, values, tol);
  auto nbrs = game.topology().out_neighbors(agent);
  const auto pos = std::find(nbrs.begin(), nbrs.end(), out.argmax_set.front()) - nbrs.begin();
  out.achieved_value = values[pos];
  return out;
}

Vector improvement_gaps(const GameInstance& game, const Centralities& c) {
  return v_map(game, c.cwiseMax(0.0)) - c;
}

bool strict_better_response_exists(const GameInstance& game, int agent, const AllocationProfile& profile,
                                   double tol) {
  require_feasible(game, profile);
  return improvement_gaps(game, katz_solve(profile))(agent) > tol;
}

bool is_best_response(const GameInstance& game, int agent, const AllocationProfile& profile, double tol) {
  require_feasible(game, profile);
  return std::abs(improvement_gaps(game, katz_solve(profile))(agent)) <= tol;
}

NashVerdict is_nash(const GameInstance& game, const AllocationProfile& profile, double tol,
                    const EquilibriumCertificate& certificate) {
  require_feasible(game, profile);
  NashVerdict out;
  out.centralities = katz_solve(profile);
  out.gaps = improvement_gaps(game, out.centralities);
  out.residual = out.gaps.cwiseAbs().maxCoeff();
  out.is_nash = out.residual <= tol;
  out.distance_to_equilibrium = (out.centralities - certificate.c_star).cwiseAbs().maxCoeff();
  return out;
}

NashVerdict is_nash(const GameInstance& game, const AllocationProfile& profile, double tol) {
  return is_nash(game, profile, tol, equilibrium_centralities(game, tol));
}

bool unilateral_swap_check(const GameInstance& game, const AllocationProfile& equilibrium, int agent,
                           const Vector& alternative, double tol) {
  const auto before = is_nash(game, equilibrium, tol);
  if (!before.is_nash) {
    throw std::invalid_argument("swap check needs an equilibrium profile; residual is " +
                                std::to_string(before.residual));
  }
  const auto swapped = equilibrium.with_row(agent, alternative);
  if (!is_feasible(game, swapped)) throw std::invalid_argument("alternative allocation is infeasible");
  const auto c_after = katz_solve(swapped);
  if (std::abs(c_after(agent) - before.centralities(agent)) > tol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "alternative changes c_" << agent + 1 << " from " << before.centralities(agent) << " to "
        << c_after(agent);
    throw std::invalid_argument(msg.str());
  }
  return is_nash(game, swapped, tol).is_nash;
}

}  // namespace katzforge
