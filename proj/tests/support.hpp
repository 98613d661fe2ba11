#pragma once

// Test-only fixtures, generators and oracles. The oracles here never call
// into the linear-solve code paths they are used to check.

#include <cstdint>
#include <functional>
#include <vector>

#include "katzforge/instance.hpp"
#include "katzforge/rng.hpp"

namespace katzforge::testing {

/// n=1, self-loop, B=[0.5].
inline GameInstance instance_i1() { return GameInstance(Topology(1, {{0, 0}}), {0.5}); }

/// n=2, 1->2 and 2->1, B=[0.5, 0.25].
inline GameInstance instance_i2() { return GameInstance(Topology(2, {{0, 1}, {1, 0}}), {0.5, 0.25}); }

/// n=2 complete with self-loops, B=[0.5, 0.25].
inline GameInstance instance_i3() { return GameInstance(Topology::complete(2, true), {0.5, 0.25}); }

/// Ten agents, complete topology with self-loops, three budget tiers plus one.
inline GameInstance ten_agent_complete_instance() {
  return GameInstance(Topology::complete(10, true),
                      {0.2, 0.2, 0.2, 0.83, 0.83, 0.83, 0.69, 0.69, 0.69, 0.17});
}

inline AllocationProfile profile(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n = static_cast<int>(rows.size());
  Matrix w(n, n);
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (double x : r) w(i, j++) = x;
    ++i;
  }
  return AllocationProfile(std::move(w));
}

/// Random valid instance; topology flavour chosen from the seed.
inline GameInstance random_instance(std::uint64_t seed, int max_n, double budget_max = 0.9) {
  Rng rng(seed * 7919 + 17);
  RandomInstanceParams p;
  p.n = 1 + static_cast<int>(rng.below(max_n));
  p.edge_density = rng.uniform(0.1, 0.9);
  p.self_loops = rng.uniform() < 0.5;
  p.budget_min = 0.05;
  p.budget_max = budget_max;
  p.seed = seed;
  return generate_random_instance(p);
}

/// Random feasible profile with a mix of zero rows, partial and exhausted
/// budgets.
inline AllocationProfile random_profile(const GameInstance& game, std::uint64_t seed) {
  Rng rng(seed ^ 0x5bd1e995ULL);
  Matrix w = generate_random_profile(game, seed).weights();
  for (int i = 0; i < game.size(); ++i) {
    const double u = rng.uniform();
    if (u < 0.15) {
      w.row(i).setZero();
    } else if (u < 0.4) {
      w.row(i) *= game.budget(i) / w.row(i).sum();
    }
  }
  return AllocationProfile(std::move(w));
}

/// Sum over walks of length 1..depth by dynamic programming over walk
/// length; `avoid` (if >= 0) is a node the walks may not visit. Returns
/// the per-start totals.
inline std::vector<double> walk_sums_avoiding(const AllocationProfile& w, int avoid, int depth) {
  const int n = w.size();
  std::vector<double> layer(n, 1.0), total(n, 0.0);
  if (avoid >= 0) layer[avoid] = 0.0;
  for (int m = 1; m <= depth; ++m) {
    std::vector<double> next(n, 0.0);
    for (int j = 0; j < n; ++j) {
      if (j == avoid) continue;
      for (int k = 0; k < n; ++k)
        if (k != avoid) next[j] += w(j, k) * layer[k];
    }
    for (int j = 0; j < n; ++j) total[j] += next[j];
    layer = std::move(next);
  }
  return total;
}

/// Sum over walks of length 1..depth from each start that end at their
/// first visit to `target`.
inline std::vector<double> first_hit_sums(const AllocationProfile& w, int target, int depth) {
  const int n = w.size();
  // layer[j] = weight of walks of current length from j that first hit target at the end.
  std::vector<double> layer(n, 0.0), total(n, 0.0);
  for (int j = 0; j < n; ++j)
    if (j != target) layer[j] = w(j, target);
  for (int j = 0; j < n; ++j) total[j] += layer[j];
  for (int m = 2; m <= depth; ++m) {
    std::vector<double> next(n, 0.0);
    for (int j = 0; j < n; ++j) {
      if (j == target) continue;
      for (int k = 0; k < n; ++k)
        if (k != target) next[j] += w(j, k) * layer[k];
    }
    for (int j = 0; j < n; ++j) total[j] += next[j];
    layer = std::move(next);
  }
  return total;
}

/// Literal enumeration of every walk of length 1..depth, classified as
/// avoiding `focal` (contributes to p) or ending at its first visit to
/// `focal` (contributes to q). Exponential; tiny graphs only.
struct EnumeratedWalks {
  std::vector<double> p;
  std::vector<double> q;
};

inline EnumeratedWalks enumerate_walks(const AllocationProfile& w, int focal, int depth) {
  const int n = w.size();
  EnumeratedWalks out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  std::function<void(int, int, int, double)> walk = [&](int start, int at, int length, double weight) {
    if (length == depth) return;
    for (int next = 0; next < n; ++next) {
      const double x = w(at, next);
      if (x == 0.0) continue;
      if (next == focal) {
        out.q[start] += weight * x;
      } else {
        out.p[start] += weight * x;
        walk(start, next, length + 1, weight * x);
      }
    }
  };
  for (int j = 0; j < n; ++j)
    if (j != focal) walk(j, j, 0, 1.0);
  return out;
}

}  // namespace katzforge::testing
