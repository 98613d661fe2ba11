#include "katzforge/centrality.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "katzforge/errors.hpp"

namespace katzforge {

void require_substochastic(const AllocationProfile& profile) {
  const Matrix& a = profile.weights();
  for (int i = 0; i < profile.size(); ++i) {
    double sum = 0.0;
    for (int j = 0; j < profile.size(); ++j) {
      const double w = a(i, j);
      if (!std::isfinite(w) || w < 0.0) {
        throw InfeasibleProfile("w[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) +
                                "] is negative or not finite");
      }
      sum += w;
    }
    if (!(sum < 1.0)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "row " << i + 1 << " sums to " << sum << " >= 1; walk series diverges";
      throw InfeasibleProfile(msg.str());
    }
  }
}

Centralities katz_solve(const AllocationProfile& profile) {
  require_substochastic(profile);
  const Matrix& a = profile.weights();
  const auto n = a.rows();
  const Vector rhs = a.rowwise().sum();
  Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(n, n) - a);
  return lu.solve(rhs);
}

Centralities katz_series(const AllocationProfile& profile, int depth) {
  if (depth < 1) throw std::invalid_argument("series depth must be at least 1");
  const Matrix& a = profile.weights();
  Vector term = a.rowwise().sum();
  Vector total = term;
  for (int k = 2; k <= depth; ++k) {
    term = a * term;
    total += term;
  }
  return total;
}

double katz_residual(const AllocationProfile& profile, const Centralities& c) {
  const Matrix& a = profile.weights();
  const Vector r = c - a * c - a.rowwise().sum();
  return r.cwiseAbs().maxCoeff();
}

WalkDecomposition walk_decomposition(const AllocationProfile& profile, int agent, double budget) {
  require_substochastic(profile);
  const int n = profile.size();
  if (agent < 0 || agent >= n) throw std::out_of_range("agent index out of range");

  // Delete agent i: no walk may leave or enter it.
  Matrix deleted = profile.weights();
  Vector into_agent = deleted.col(agent);
  into_agent(agent) = 0.0;
  deleted.row(agent).setZero();
  deleted.col(agent).setZero();

  Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(n, n) - deleted);
  WalkDecomposition out;
  out.agent = agent;
  out.budget = budget;
  out.p = lu.solve(Vector(deleted.rowwise().sum()));
  out.q = lu.solve(into_agent);
  out.p(agent) = std::numeric_limits<double>::quiet_NaN();
  out.q(agent) = 1.0;
  out.d = out.p.array() + out.q.array() + 1.0;
  out.d(agent) = 1.0;
  out.f = out.d.array() / (1.0 - out.q.array() * budget);
  return out;
}

double fractional_linear_centrality(int agent, const Vector& row, const WalkDecomposition& walks) {
  double numerator = 0.0;
  double weighted_q = 0.0;
  for (int j = 0; j < row.size(); ++j) {
    if (row(j) == 0.0) continue;
    numerator += walks.d(j) * row(j);
    weighted_q += walks.q(j) * row(j);
  }
  const double denominator = 1.0 - weighted_q;
  if (!(denominator > 0.0)) {
    throw InfeasibleProfile("fractional-linear denominator for agent " + std::to_string(agent + 1) +
                            " is not positive; row is outside the feasible set");
  }
  return numerator / denominator;
}

}  // namespace katzforge
