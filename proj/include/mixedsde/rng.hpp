#pragma once

// Deterministic random streams. Every consumer (driver component, ensemble
// path, probe) derives its own substream from (seed, tag, index), so draws
// never depend on what other code sampled first. The normal recipe is pinned
// (mt19937_64 + Box-Muller) instead of std::normal_distribution, whose
// algorithm is implementation-defined.

#include <cmath>
#include <cstdint>
#include <random>

namespace mixedsde {

inline constexpr std::uint64_t kStreamBrownian   = 0x6272;  // Brownian driver
inline constexpr std::uint64_t kStreamFractional = 0x6662;  // fBm driver
inline constexpr std::uint64_t kStreamProbe      = 0x7072;  // hypothesis probe
inline constexpr std::uint64_t kStreamAudit      = 0x6175;  // audit cases

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Derives an independent substream seed from (seed, tag, index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag,
                                 std::uint64_t index = 0) {
  std::uint64_t s = detail::splitmix64(seed ^ (tag * 0x9e3779b97f4a7c15ull));
  return detail::splitmix64(s ^ (index * 0xbf58476d1ce4e5b9ull));
}

/// Seed for ensemble member `path_index` under a master seed.
inline std::uint64_t path_seed(std::uint64_t master_seed, std::uint64_t path_index) {
  return derive_seed(master_seed, 0x7061, path_index);
}

/// N(0,1) stream; identical seed gives identical draws on every platform.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1].
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = kTwoPi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  static constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace mixedsde
