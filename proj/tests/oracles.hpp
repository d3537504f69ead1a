#pragma once

// Test-only oracles, kept independent of the library's computational paths:
// Riemann-Stieltjes sums on refined grids, adaptive Simpson quadrature, and a
// two-sample Kolmogorov-Smirnov statistic.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracles {

// Trapezoid Riemann-Stieltjes sum of analytic f against analytic g on a
// uniform n-cell grid over [a, b].
inline double riemann_stieltjes(const std::function<double(double)>& f,
                                const std::function<double(double)>& g, double a, double b,
                                std::size_t cells) {
  double acc = 0.0;
  double fp = f(a), gp = g(a);
  for (std::size_t i = 1; i <= cells; ++i) {
    const double t = a + (b - a) * static_cast<double>(i) / static_cast<double>(cells);
    const double fv = f(t), gv = g(t);
    acc += 0.5 * (fp + fv) * (gv - gp);
    fp = fv;
    gp = gv;
  }
  return acc;
}

// Compensated trapezoid RS sum of sampled data (the exact integral of the
// piecewise-linear interpretation).
inline double riemann_stieltjes_sampled(const std::vector<double>& f,
                                        const std::vector<double>& g) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    acc += 0.5 * (f[i] + f[i + 1]) * (g[i + 1] - g[i]);
  }
  return acc;
}

namespace detail {
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double flm = f(0.5 * (a + m));
  const double frm = f(0.5 * (m + b));
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-11, int depth = 44) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  return detail::simpson_rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol,
                             depth);
}

// Composite Gauss-Legendre (7 point) on panels; never evaluates endpoints,
// which suits integrands with integrable endpoint singularities.
inline double gauss7_composite(const std::function<double(double)>& f, double a, double b,
                               std::size_t panels) {
  static const double xs[7] = {-0.9491079123427585, -0.7415311855993945, -0.4058451513773972,
                               0.0,                 0.4058451513773972,  0.7415311855993945,
                               0.9491079123427585};
  static const double ws[7] = {0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
                               0.4179591836734694, 0.3818300505051189,  0.2797053914892766,
                               0.1294849661688697};
  double acc = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + (b - a) * static_cast<double>(p) / static_cast<double>(panels);
    const double hi = a + (b - a) * static_cast<double>(p + 1) / static_cast<double>(panels);
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int k = 0; k < 7; ++k) acc += ws[k] * f(mid + half * xs[k]) * half;
  }
  return acc;
}

// Quadrature oracle for B(1-pa, 1-pa) = int_0^1 u^{-pa} (1-u)^{-pa} du, valid
// for pa < 1: split at 1/2 (symmetry) and substitute w = u^{1-pa}, which
// removes the endpoint singularity entirely.
inline double beta_symmetric_oracle(double alpha, double p) {
  const double s = 1.0 - alpha * p;  // exponent after substitution
  const double wmax = std::pow(0.5, s);
  return (2.0 / s) * adaptive_simpson(
                         [s](double w) {
                           const double u = std::pow(w, 1.0 / s);
                           return std::pow(1.0 - u, s - 1.0);
                         },
                         0.0, wmax, 1e-12);
}

// Direct quadrature of int_0^t (t-s)^{-pa} s^{-pa} ds with the same endpoint
// substitution applied to the left half (the integrand is symmetric in s
// about t/2).
inline double singular_product_oracle(double t, double pa) {
  const double s = 1.0 - pa;
  const double wmax = std::pow(0.5 * t, s);
  return (2.0 / s) * adaptive_simpson(
                         [s, pa, t](double w) {
                           const double u = std::pow(w, 1.0 / s);
                           return std::pow(t - u, -pa);
                         },
                         0.0, wmax, 1e-12);
}

// Two-sample KS statistic; reject at significance 0.01 when
// D > 1.628 sqrt((n+m)/(n m)).
inline bool ks_two_sample_same(std::vector<double> a, std::vector<double> b,
                               double c_alpha = 1.628) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t n = a.size(), m = b.size();
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < n && j < m) {
    if (a[i] <= b[j]) {
      ++i;
    } else {
      ++j;
    }
    d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(n) -
                             static_cast<double>(j) / static_cast<double>(m)));
  }
  const double thresh = c_alpha * std::sqrt(static_cast<double>(n + m) /
                                            (static_cast<double>(n) * static_cast<double>(m)));
  return d <= thresh;
}

}  // namespace oracles
