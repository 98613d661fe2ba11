#pragma once

#include <cstdint>
#include <random>

namespace katzforge {

/// SplitMix64 finalizer. Used as a counter-based generator: the k-th draw of
/// a stream is splitmix64(seed + k * golden), so draws never depend on
/// earlier calls and traces are bit-reproducible.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t counter_draw(std::uint64_t seed, std::uint64_t counter) {
  return splitmix64(seed ^ splitmix64(counter));
}

/// Maps a 64-bit draw onto [0, bound) with the multiply-shift method.
inline std::uint64_t bounded(std::uint64_t draw, std::uint64_t bound) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(draw) * bound) >> 64);
}

/// Sequential generator for instance/profile sampling. Uses mt19937_64 bits
/// directly (the std distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t bound) { return bounded(engine_(), bound); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace katzforge
