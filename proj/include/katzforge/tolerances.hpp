#pragma once

namespace katzforge {

/// Numerical tolerances shared by every module. Call sites take a
/// `Tolerances` (or one of its fields) instead of spelling literals.
struct Tolerances {
  /// Equality of computed centralities and v-map residuals.
  double equality = 1e-10;
  /// Relative tolerance for argmax ties among best-response scores.
  double tie = 1e-10;
  /// Absolute tolerance for budget comparisons (budgets are inputs).
  double budget = 1e-12;
  /// Slack on the row-budget constraint when testing feasibility.
  double feasibility = 1e-12;
  /// Relative residual bound for the dense Katz solve (scaled by n).
  double solver_residual = 1e-12;
  /// Monotonicity slack when comparing consecutive centrality vectors.
  double monotone = 1e-12;
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace katzforge
