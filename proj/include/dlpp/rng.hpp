#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace dlpp {

/// Module tags separate the key spaces of independent consumers of one seed.
enum class Tag : std::uint64_t {
  field = 1,
  dyadic = 2,
  cloud = 3,
  bootstrap = 4,
  harness = 5,
  test = 6,
};

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: every draw is a pure function of (key, a, b).
/// No internal state, so draws may be taken in any order from any thread.
class CounterRng {
 public:
  CounterRng() = default;
  CounterRng(std::uint64_t seed, std::uint64_t stream, Tag tag)
      : key_(mix64(mix64(mix64(seed) ^ (stream * 0x9e3779b97f4a7c15ULL)) +
                   static_cast<std::uint64_t>(tag) * 0xd1b54a32d192ed03ULL)) {}

  std::uint64_t bits(std::uint64_t a, std::uint64_t b) const {
    return mix64(mix64(key_ ^ (a * 0x9e3779b97f4a7c15ULL)) + b * 0xc2b2ae3d27d4eb4fULL + 1);
  }

  /// Uniform on [0,1) with 53 bits.
  static double to_unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }
  /// Uniform on (0,1].
  static double to_unit_open(std::uint64_t h) {
    return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
  }

  double uniform(std::uint64_t a, std::uint64_t b) const { return to_unit(bits(a, b)); }

  /// Two independent standard normals (Box-Muller) from counter (a, b).
  std::pair<double, double> normal_pair(std::uint64_t a, std::uint64_t b) const {
    const std::uint64_t h1 = bits(a, b);
    const std::uint64_t h2 = mix64(h1 ^ 0x5851f42d4c957f2dULL);
    const double r = std::sqrt(-2.0 * std::log(to_unit_open(h1)));
    const double th = 2.0 * std::numbers::pi * to_unit(h2);
    return {r * std::cos(th), r * std::sin(th)};
  }

  double normal(std::uint64_t a, std::uint64_t b) const { return normal_pair(a, b).first; }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_ = 0;
};

}  // namespace dlpp
