#pragma once

#include "katzforge/instance.hpp"
#include "katzforge/tolerances.hpp"

namespace katzforge {

/// Per-agent Katz centralities c(w), indexed by 0-based agent.
using Centralities = Vector;

/// Throws InfeasibleProfile unless every entry is finite and nonnegative and
/// every row sums to strictly less than one.
void require_substochastic(const AllocationProfile& profile);

/// c = (I - A)^{-1} A 1 by dense LU with partial pivoting.
Centralities katz_solve(const AllocationProfile& profile);

/// Truncated walk series sum_{k=1..depth} A^k 1. Independent of the solver;
/// entrywise error is at most B_M^{depth+1} / (1 - B_M).
Centralities katz_series(const AllocationProfile& profile, int depth);

/// ||(I - A) c - A 1||_inf for a candidate centrality vector.
double katz_residual(const AllocationProfile& profile, const Centralities& c);

/// Walk decomposition of every other agent's centrality with respect to a
/// focal agent i:
///   c_j = p_j + q_j (1 + c_i)
/// where p_j sums walks from j that never visit i and q_j sums walks from j
/// that end on their first visit to i. Both depend only on rows other than
/// i. Derived scores:
///   d_j = p_j + q_j + 1,  f_j = d_j / (1 - q_j B_i).
/// For j = i the conventions q_ii = d_ii = 1 apply; p_ii is undefined (NaN).
struct WalkDecomposition {
  int agent = 0;
  double budget = 0.0;
  Vector p;
  Vector q;
  Vector d;
  Vector f;
};

WalkDecomposition walk_decomposition(const AllocationProfile& profile, int agent, double budget);

inline WalkDecomposition walk_decomposition(const GameInstance& game, const AllocationProfile& profile,
                                            int agent) {
  return walk_decomposition(profile, agent, game.budget(agent));
}

/// c_i as a ratio that is linear in agent i's own row:
///   c_i = (sum_j d_j w_ij) / (1 - sum_j q_j w_ij).
/// Throws InfeasibleProfile if the denominator is not positive.
double fractional_linear_centrality(int agent, const Vector& row, const WalkDecomposition& walks);

}  // namespace katzforge
