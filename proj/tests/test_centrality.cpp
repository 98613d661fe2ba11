#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "katzforge/centrality.hpp"
#include "katzforge/errors.hpp"
#include "support.hpp"

using namespace katzforge;
using namespace katzforge::testing;

namespace {

double tail_bound(double bm, int depth) { return std::pow(bm, depth + 1) / (1.0 - bm); }

double max_row_sum(const AllocationProfile& w) { return w.weights().rowwise().sum().maxCoeff(); }

}  // namespace

TEST_CASE("katz_solve") {
  SUBCASE("self-loop geometric series") {
    auto c = katz_solve(profile({{0.5}}));
    CHECK(c(0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("zero profile") {
    auto c = katz_solve(AllocationProfile::zero(4));
    CHECK(c.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("two-cycle solved by hand") {
    // c1 = 0.5 (1 + c2), c2 = 0.25 (1 + c1)  =>  c = (5/7, 3/7)
    auto w = profile({{0.0, 0.5}, {0.25, 0.0}});
    auto c = katz_solve(w);
    CHECK(c(0) == doctest::Approx(5.0 / 7.0).epsilon(1e-14));
    CHECK(c(1) == doctest::Approx(3.0 / 7.0).epsilon(1e-14));
    CHECK(katz_residual(w, c) <= 1e-12 * 2);
  }
  SUBCASE("rejects non-substochastic input") {
    CHECK_THROWS_AS(katz_solve(profile({{1.0}})), InfeasibleProfile);
    CHECK_THROWS_AS(katz_solve(profile({{0.2, 0.9}, {0.0, 0.1}})), InfeasibleProfile);
    CHECK_THROWS_AS(katz_solve(profile({{-0.1}})), InfeasibleProfile);
  }
}

TEST_CASE("katz_series") {
  CHECK(katz_series(profile({{0.5}}), 3)(0) == doctest::Approx(0.875).epsilon(1e-15));

  auto w = profile({{0.1, 0.2, 0.3}, {0.0, 0.0, 0.4}, {0.25, 0.25, 0.0}});
  auto one_step = katz_series(w, 1);
  CHECK(one_step(0) == doctest::Approx(0.6));
  CHECK(one_step(1) == doctest::Approx(0.4));
  CHECK(one_step(2) == doctest::Approx(0.5));

  auto i2 = profile({{0.0, 0.5}, {0.25, 0.0}});
  for (int depth : {5, 20, 80}) {
    const double gap = (katz_series(i2, depth) - katz_solve(i2)).cwiseAbs().maxCoeff();
    CHECK(gap <= tail_bound(0.5, depth) + 1e-15);
  }
  CHECK_THROWS(katz_series(i2, 0));
}

TEST_CASE("walk_decomposition") {
  SUBCASE("two-cycle, focal agent 1") {
    // The only walk from 2 that reaches 1 is the edge 2->1; none avoids 1.
    auto wd = walk_decomposition(profile({{0.0, 0.5}, {0.25, 0.0}}), 0, 0.5);
    CHECK(wd.q(1) == doctest::Approx(0.25));
    CHECK(wd.p(1) == doctest::Approx(0.0));
    CHECK(wd.d(1) == doctest::Approx(1.25));
    CHECK(wd.q(0) == 1.0);
    CHECK(wd.d(0) == 1.0);
    CHECK(std::isnan(wd.p(0)));
  }
  SUBCASE("focal agent unreachable") {
    auto w = profile({{0.3, 0.0, 0.2}, {0.0, 0.0, 0.6}, {0.1, 0.0, 0.2}});
    auto wd = walk_decomposition(w, 1, 0.5);
    CHECK(wd.q(0) == 0.0);
    CHECK(wd.q(2) == 0.0);
  }
  SUBCASE("complete pair with self-loops, focal agent 2") {
    // Walks from 1 avoiding 2 are 1->1->...; they sum to 0.5 / (1 - 0.5) = 1.
    auto wd = walk_decomposition(profile({{0.5, 0.0}, {0.0, 0.0}}), 1, 0.25);
    CHECK(wd.p(0) == doctest::Approx(1.0));
    CHECK(wd.q(0) == doctest::Approx(0.0));
    CHECK(wd.d(0) == doctest::Approx(2.0));
    CHECK(wd.f(0) == doctest::Approx(2.0));
    CHECK(wd.f(1) == doctest::Approx(4.0 / 3.0));
  }
  SUBCASE("independent of the focal row") {
    auto w = profile({{0.1, 0.2, 0.3}, {0.0, 0.3, 0.4}, {0.25, 0.25, 0.0}});
    auto a = walk_decomposition(w, 0, 0.6);
    auto b = walk_decomposition(w.with_row(0, Vector::Zero(3)), 0, 0.6);
    for (int j = 1; j < 3; ++j) {
      CHECK(a.p(j) == b.p(j));
      CHECK(a.q(j) == b.q(j));
    }
  }
}

TEST_CASE("fractional_linear_centrality") {
  auto i2 = profile({{0.0, 0.5}, {0.25, 0.0}});
  auto wd = walk_decomposition(i2, 0, 0.5);
  CHECK(fractional_linear_centrality(0, i2.row(0), wd) == doctest::Approx(5.0 / 7.0).epsilon(1e-14));
  CHECK(fractional_linear_centrality(0, Vector::Zero(2), wd) == 0.0);

  auto i3 = profile({{0.5, 0.0}, {0.0, 0.0}});
  auto wd3 = walk_decomposition(i3, 1, 0.25);
  Vector row(2);
  row << 0.25, 0.0;
  CHECK(fractional_linear_centrality(1, row, wd3) == doctest::Approx(0.5).epsilon(1e-14));

  Vector too_much(2);
  too_much << 0.0, 1.5;
  CHECK_THROWS_AS(fractional_linear_centrality(1, too_much, wd3), InfeasibleProfile);
}

TEST_CASE("centrality identities on random feasible profiles") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto g = random_instance(seed, 20);
    const auto w = random_profile(g, seed);
    const auto c = katz_solve(w);
    const double bm = std::max(max_row_sum(w), 1e-300);
    CAPTURE(seed);

    CHECK(katz_residual(w, c) <= 1e-12 * g.size());
    CHECK(c.minCoeff() >= 0.0);

    // c_i = sum_j w_ij (1 + c_j)
    const Vector rhs = w.weights() * (Vector::Ones(g.size()) + c);
    CHECK((c - rhs).cwiseAbs().maxCoeff() <= 1e-10);

    for (int depth : {1, 10, 40}) {
      const double gap = (katz_series(w, depth) - c).cwiseAbs().maxCoeff();
      CHECK(gap <= tail_bound(bm, depth) + 1e-12);
    }

    for (int i = 0; i < g.size(); ++i) {
      const auto wd = walk_decomposition(g, w, i);
      const double denom = 1.0 - wd.q.dot(w.row(i));
      CHECK(denom > 0.0);
      CHECK(std::abs(fractional_linear_centrality(i, w.row(i), wd) - c(i)) <= 1e-10);
      CHECK(wd.q.minCoeff() >= 0.0);
      for (int j : g.topology().out_neighbors(i)) CHECK(1.0 - wd.q(j) * g.budget(i) > 0.0);
    }
  }
}

TEST_CASE("raising one weight never lowers any centrality") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto g = random_instance(seed, 12);
    const auto w = random_profile(g, seed);
    Rng rng(seed);
    const int i = static_cast<int>(rng.below(g.size()));
    auto nbrs = g.topology().out_neighbors(i);
    const int j = nbrs[rng.below(nbrs.size())];
    const double slack = g.budget(i) - w.row_sum(i);
    if (slack <= 0.0) continue;
    Vector row = w.row(i);
    row(j) += slack * rng.uniform();
    const auto before = katz_solve(w);
    const auto after = katz_solve(w.with_row(i, row));
    CHECK((after - before).minCoeff() >= -1e-12);
  }
}

TEST_CASE("walk decomposition matches walk enumeration") {
  // Tail beyond depth 60 with row sums <= 0.6 is below 1e-13.
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto g = random_instance(seed, 5, 0.6);
    const auto w = random_profile(g, seed);
    for (int i = 0; i < g.size(); ++i) {
      const auto wd = walk_decomposition(g, w, i);
      const auto p = walk_sums_avoiding(w, i, 60);
      const auto q = first_hit_sums(w, i, 60);
      for (int j = 0; j < g.size(); ++j) {
        if (j == i) continue;
        CHECK(std::abs(wd.p(j) - p[j]) <= 1e-12);
        CHECK(std::abs(wd.q(j) - q[j]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("walk-length DP agrees with literal enumeration") {
  auto w = profile({{0.2, 0.3, 0.1}, {0.1, 0.0, 0.4}, {0.3, 0.2, 0.1}});
  for (int focal = 0; focal < 3; ++focal) {
    const auto literal = enumerate_walks(w, focal, 8);
    const auto p = walk_sums_avoiding(w, focal, 8);
    const auto q = first_hit_sums(w, focal, 8);
    for (int j = 0; j < 3; ++j) {
      if (j == focal) continue;
      CHECK(literal.p[j] == doctest::Approx(p[j]).epsilon(1e-13));
      CHECK(literal.q[j] == doctest::Approx(q[j]).epsilon(1e-13));
    }
  }
}
