#pragma once

// Exact simulation of the two drivers on finite grids: standard Brownian
// motion and fractional Brownian motion with H > 1/2, plus the driver norm
//
//   ||f||_{1-a,inf,t} = sup_{u<v<=t} ( |f(v)-f(u)|/(v-u)^{1-a}
//                                      + int_u^v |f(y)-f(u)|/(y-u)^{2-a} dy ).
//
// Normalization: E|B^H(1)|^2 = 1, so Var B^H(t) = t^{2H} and
// R(s,t) = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2.
//
// The norm's supremum runs over grid-node pairs only; it is a lower bound of
// the continuum norm that converges under grid refinement. Inner integrals
// use piecewise-linear interpolation of |f(.)-f(u)| with the singular kernel
// integrated in closed form on each segment.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixedsde/grid.hpp"
#include "mixedsde/rng.hpp"

namespace mixedsde {

inline double fbm_covariance(double s, double t, HurstParameter h) {
  if (s < 0.0 || t < 0.0) {
    throw std::domain_error("fbm_covariance: negative time");
  }
  const double twoh = 2.0 * h.value;
  return 0.5 * (std::pow(t, twoh) + std::pow(s, twoh) - std::pow(std::abs(t - s), twoh));
}

enum class FbmMethod { kCholesky, kCirculantFft };

namespace detail {

// In-place radix-2 FFT, size must be a power of two.
inline void fft_pow2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("fft_pow2: size must be a power of two");
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * 3.14159265358979323846 / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

// Lower-triangular Cholesky factor of a dense SPD matrix (row-major).
// Throws naming the first non-positive pivot.
inline std::vector<double> cholesky_lower(std::vector<double> m, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    double d = m[k * n + k];
    for (std::size_t j = 0; j < k; ++j) d -= m[k * n + j] * m[k * n + j];
    if (!(d > 0.0)) {
      throw std::runtime_error("cholesky: non-positive pivot " + std::to_string(k) +
                               " (value " + std::to_string(d) + ")");
    }
    const double lkk = std::sqrt(d);
    m[k * n + k] = lkk;
    for (std::size_t i = k + 1; i < n; ++i) {
      double s = m[i * n + k];
      for (std::size_t j = 0; j < k; ++j) s -= m[i * n + j] * m[k * n + j];
      m[i * n + k] = s / lkk;
    }
    for (std::size_t j = k + 1; j < n; ++j) m[k * n + j] = 0.0;
  }
  return m;
}

}  // namespace detail

/// Samples fBm paths on a fixed grid. The covariance model is prepared once
/// (circulant eigenvalues or Cholesky factor of the increment covariance), so
/// ensembles amortize the setup. Components of a d-dimensional path are
/// independent, each drawn from its own (seed, component) substream.
class FbmSampler {
 public:
  FbmSampler(TimeGrid grid, HurstParameter h, FbmMethod method)
      : grid_(std::move(grid)), h_(h), requested_(method) {
    const std::size_t n = grid_.cells();
    if (n == 0) return;  // degenerate {0} grid: constant zero paths
    if (method == FbmMethod::kCirculantFft) {
      if (!grid_.is_uniform()) {
        throw std::invalid_argument("FbmSampler: circulant-fft requires a uniform grid");
      }
      if (!build_circulant()) {
        fell_back_ = true;
        build_cholesky();
      }
    } else {
      build_cholesky();
    }
  }

  const TimeGrid& grid() const { return grid_; }
  bool circulant_fell_back() const { return fell_back_; }
  FbmMethod effective_method() const {
    return (requested_ == FbmMethod::kCirculantFft && !fell_back_) ? FbmMethod::kCirculantFft
                                                                   : FbmMethod::kCholesky;
  }

  SamplePath sample(std::uint64_t seed, std::size_t dim = 1) const {
    SamplePath path(grid_, dim);
    const std::size_t n = grid_.cells();
    if (n == 0) return path;
    std::vector<double> incr(n);
    for (std::size_t k = 0; k < dim; ++k) {
      GaussianStream stream(derive_seed(seed, kStreamFractional, k));
      if (effective_method() == FbmMethod::kCirculantFft) {
        draw_circulant(stream, incr);
      } else {
        draw_cholesky(stream, incr);
      }
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += incr[i];
        path.at(i + 1, k) = acc;
      }
    }
    return path;
  }

 private:
  // Stationary increment covariance at lag k for the uniform mesh h:
  // c_k = h^{2H} (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2.
  double fgn_cov(double mesh, std::size_t k) const {
    const double twoh = 2.0 * h_.value;
    if (k == 0) return std::pow(mesh, twoh);
    const double kd = static_cast<double>(k);
    return 0.5 * std::pow(mesh, twoh) *
           (std::pow(kd + 1.0, twoh) - 2.0 * std::pow(kd, twoh) + std::pow(kd - 1.0, twoh));
  }

  bool build_circulant() {
    const std::size_t n = grid_.cells();
    const double mesh = grid_[1] - grid_[0];
    const std::size_t m = detail::next_pow2(n);
    const std::size_t big = 2 * m;
    std::vector<std::complex<double>> row(big);
    for (std::size_t k = 0; k <= m; ++k) row[k] = fgn_cov(mesh, k);
    for (std::size_t k = 1; k < m; ++k) row[big - k] = row[k];
    detail::fft_pow2(row);
    eigenvalues_.resize(big);
    for (std::size_t k = 0; k < big; ++k) {
      const double lam = row[k].real();
      if (lam < -1e-12) {
        std::fprintf(stderr,
                     "mixedsde: circulant embedding not nonnegative definite "
                     "(eigenvalue %g at index %zu); falling back to cholesky\n",
                     lam, k);
        eigenvalues_.clear();
        return false;
      }
      eigenvalues_[k] = std::max(lam, 0.0);
    }
    return true;
  }

  void build_cholesky() {
    const std::size_t n = grid_.cells();
    std::vector<double> cov(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const double v = fbm_covariance(grid_[i + 1], grid_[j + 1], h_) -
                         fbm_covariance(grid_[i + 1], grid_[j], h_) -
                         fbm_covariance(grid_[i], grid_[j + 1], h_) +
                         fbm_covariance(grid_[i], grid_[j], h_);
        cov[i * n + j] = v;
        cov[j * n + i] = v;
      }
    }
    chol_ = detail::cholesky_lower(std::move(cov), n);
  }

  void draw_circulant(GaussianStream& stream, std::vector<double>& incr) const {
    const std::size_t big = eigenvalues_.size();
    const std::size_t m = big / 2;
    std::vector<std::complex<double>> w(big);
    const double inv_big = 1.0 / static_cast<double>(big);
    w[0] = std::sqrt(eigenvalues_[0] * inv_big) * stream.normal();
    w[m] = std::sqrt(eigenvalues_[m] * inv_big) * stream.normal();
    for (std::size_t k = 1; k < m; ++k) {
      const double scale = std::sqrt(0.5 * eigenvalues_[k] * inv_big);
      const double re = stream.normal();
      const double im = stream.normal();
      w[k] = std::complex<double>(scale * re, scale * im);
      w[big - k] = std::conj(w[k]);
    }
    detail::fft_pow2(w);
    for (std::size_t i = 0; i < incr.size(); ++i) incr[i] = w[i].real();
  }

  void draw_cholesky(GaussianStream& stream, std::vector<double>& incr) const {
    const std::size_t n = incr.size();
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = stream.normal();
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j <= i; ++j) s += chol_[i * n + j] * z[j];
      incr[i] = s;
    }
  }

  TimeGrid grid_;
  HurstParameter h_;
  FbmMethod requested_;
  bool fell_back_ = false;
  std::vector<double> eigenvalues_;
  std::vector<double> chol_;
};

/// One-shot fBm path; prefer FbmSampler for ensembles on a shared grid.
inline SamplePath sample_fbm(const TimeGrid& grid, HurstParameter h, std::uint64_t seed,
                             FbmMethod method = FbmMethod::kCirculantFft,
                             std::size_t dim = 1) {
  return FbmSampler(grid, h, method).sample(seed, dim);
}

/// Standard m-dimensional Brownian path: independent Gaussian increments of
/// variance t_{i+1} - t_i. Component k draws from substream (seed, k), so the
/// first component is identical whatever the total dimension.
inline SamplePath sample_bm(const TimeGrid& grid, std::uint64_t seed, std::size_t dim = 1) {
  if (dim == 0) throw std::invalid_argument("sample_bm: dim must be >= 1");
  SamplePath path(grid, dim);
  const std::size_t n = grid.cells();
  for (std::size_t k = 0; k < dim; ++k) {
    GaussianStream stream(derive_seed(seed, kStreamBrownian, k));
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += std::sqrt(grid[i + 1] - grid[i]) * stream.normal();
      path.at(i + 1, k) = acc;
    }
  }
  return path;
}

struct DriverNormEstimate {
  double value = 0.0;
  double alpha = 0.0;
  double t = 0.0;
  std::size_t cells_used = 0;
  double mesh = 0.0;
};

namespace detail {

// Running driver norm r[j] = sup over node pairs (u < v <= t_j) of the pair
// functional, for j = 0..last. O(last^2); uniform grids use power tables.
inline std::vector<double> driver_norm_profile_impl(const SamplePath& path, double alpha,
                                                    std::size_t last) {
  if (!(alpha > 0.0) || !(alpha < 0.5)) {
    throw std::domain_error("driver_norm: alpha must lie in (0, 1/2)");
  }
  const auto& t = path.grid.nodes();
  std::vector<double> pairmax(last + 1, 0.0);

  const bool uni = path.grid.is_uniform();
  std::vector<double> pow_am1, pow_a;  // (k h)^{alpha-1}, (k h)^alpha
  if (uni && last >= 1) {
    const double h = t[1] - t[0];
    pow_am1.resize(last + 1);
    pow_a.resize(last + 1);
    for (std::size_t k = 1; k <= last; ++k) {
      const double d = static_cast<double>(k) * h;
      pow_am1[k] = std::pow(d, alpha - 1.0);
      pow_a[k] = pow_am1[k] * d;
    }
  }

  for (std::size_t i = 0; i < last; ++i) {
    double integral = 0.0;
    double g_prev = 0.0;
    double tp_am1 = 0.0, tp_a = 0.0;
    for (std::size_t j = i + 1; j <= last; ++j) {
      const double g = path.node_distance(j, i);
      const double dt = t[j] - t[j - 1];
      double tq_am1, tq_a;
      if (uni) {
        tq_am1 = pow_am1[j - i];
        tq_a = pow_a[j - i];
      } else {
        const double d = t[j] - t[i];
        tq_am1 = std::pow(d, alpha - 1.0);
        tq_a = tq_am1 * d;
      }
      if (j == i + 1) {
        // first segment: the interpolant of |f(.)-f(u)| vanishes at y = u
        integral += (g / dt) * tq_a / alpha;
      } else {
        const double slope = (g - g_prev) / dt;
        const double offset = g_prev - slope * (t[j - 1] - t[i]);
        integral += offset * (tq_am1 - tp_am1) / (alpha - 1.0) +
                    slope * (tq_a - tp_a) / alpha;
      }
      // |f(v)-f(u)|/(v-u)^{1-alpha} = g (v-u)^{alpha-1}
      const double value = g * tq_am1 + integral;
      if (value > pairmax[j]) pairmax[j] = value;
      g_prev = g;
      tp_am1 = tq_am1;
      tp_a = tq_a;
    }
  }

  std::vector<double> out(last + 1, 0.0);
  double run = 0.0;
  for (std::size_t j = 1; j <= last; ++j) {
    run = std::max(run, pairmax[j]);
    out[j] = run;
  }
  return out;
}

}  // namespace detail

/// Running norm at every node up to the horizon (used for first-passage).
inline std::vector<double> driver_norm_profile(const SamplePath& path, double alpha) {
  return detail::driver_norm_profile_impl(path, alpha, path.grid.size() - 1);
}

inline DriverNormEstimate driver_norm(const SamplePath& path, double alpha, double t) {
  const std::size_t last = path.grid.floor_index(t);
  const auto profile = detail::driver_norm_profile_impl(path, alpha, last);
  return DriverNormEstimate{profile[last], alpha, t, last, path.grid.mesh()};
}

}  // namespace mixedsde
