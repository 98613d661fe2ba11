#pragma once

#include <optional>
#include <vector>

#include "katzforge/centrality.hpp"
#include "katzforge/instance.hpp"
#include "katzforge/tolerances.hpp"

namespace katzforge {

/// v_i(x) = B_i (1 + max_{j in N_i} x_j), neighborhoods taken in the
/// underlying topology. Throws std::invalid_argument on negative entries.
Vector v_map(const GameInstance& game, const Vector& x);

/// Unique fixed point c* of the v-map, which is the centrality vector shared
/// by every Nash equilibrium.
struct EquilibriumCertificate {
  Centralities c_star;
  std::size_t iterations = 0;
  double residual = 0.0;          // ||v(c*) - c*||_inf
  double contraction_rate = 0.0;  // B_M
};

/// Banach iteration x <- v(x) from x = 0. Stops once successive iterates are
/// within tol (1 - B_M) / B_M, which bounds the distance to c* by tol.
EquilibriumCertificate equilibrium_centralities(const GameInstance& game,
                                                double tol = kDefaultTolerances.equality);

/// A-priori iteration bound for `equilibrium_centralities`.
std::size_t equilibrium_iteration_bound(const GameInstance& game, double tol);

struct BestResponseResult {
  int agent = 0;
  /// Neighbors attaining the maximal score, ascending.
  std::vector<int> argmax_set;
  /// B_i e_j for the smallest j in argmax_set.
  Vector canonical;
  /// c_i after playing `canonical` against the other rows.
  double achieved_value = 0.0;
};

/// Exact best response from the walk decomposition: every j maximizing
/// d_j / (1 - q_j B_i) over N_i gives a best response B_i e_j.
BestResponseResult best_response(const GameInstance& game, int agent, const AllocationProfile& profile,
                                 const Tolerances& tol = kDefaultTolerances);

/// Validation path: evaluates c_i(B_i e_j, w_{-i}) with a full Katz solve
/// for every j in N_i and takes the argmax.
BestResponseResult best_response_oracle(const GameInstance& game, int agent,
                                        const AllocationProfile& profile,
                                        const Tolerances& tol = kDefaultTolerances);

/// v_i(c) - c_i for every agent. Entrywise nonnegative for feasible profiles.
Vector improvement_gaps(const GameInstance& game, const Centralities& c);

bool strict_better_response_exists(const GameInstance& game, int agent, const AllocationProfile& profile,
                                   double tol = kDefaultTolerances.equality);

bool is_best_response(const GameInstance& game, int agent, const AllocationProfile& profile,
                      double tol = kDefaultTolerances.equality);

struct NashVerdict {
  bool is_nash = false;
  double residual = 0.0;  // ||v(c(w)) - c(w)||_inf
  Centralities centralities;
  Vector gaps;
  /// ||c(w) - c*||_inf against the certificate.
  double distance_to_equilibrium = 0.0;
};

NashVerdict is_nash(const GameInstance& game, const AllocationProfile& profile,
                    double tol = kDefaultTolerances.equality);
NashVerdict is_nash(const GameInstance& game, const AllocationProfile& profile, double tol,
                    const EquilibriumCertificate& certificate);

/// Replaces agent i's row of an equilibrium profile by another allocation of
/// equal value and reports whether the result is still an equilibrium.
/// Throws std::invalid_argument when `equilibrium` is not certified or the
/// alternative changes c_i.
bool unilateral_swap_check(const GameInstance& game, const AllocationProfile& equilibrium, int agent,
                           const Vector& alternative, double tol = kDefaultTolerances.equality);

}  // namespace katzforge
