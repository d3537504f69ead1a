#pragma once

// Executable form of the Bihari-type lemma: for continuous f >= 0 with
//
//   f(t) <= a + b t^alpha int_0^t (t-s)^{-alpha} s^{-alpha} rho(f(s)) ds,
//
// (alpha in (1/2,1) here, a regime distinct from the SDE exponents) the bound
//
//   f(t) <= [ F^{-1}( F(2^{q-1} a^q)
//             + 2^{q-1} b^q C_{alpha,p}^{q/p} t^{q((1/p)-alpha)+1} ) ]^{1/q},
//
// with C_{alpha,p} = B(1 - p alpha, 1 - p alpha), F(x) = int_1^x du /
// rho^q(u^{1/q}), and 1 < p < 2, alpha < 1/p, 1/p + 1/q = 1. Membership of
// the F-argument in Dom(F^{-1}) is part of the statement, so domain escape is
// a value, not an error. F is computed after the substitution u = v^q (and
// then v = e^w), which turns the built-in moduli's stiff endpoint into a
// smooth integrand.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "mixedsde/coefficients.hpp"

namespace mixedsde {

/// C_{alpha,p} = B(1 - p alpha, 1 - p alpha); diverges when p alpha >= 1.
inline double beta_constant(double alpha, double p) {
  if (!(alpha > 0.0) || !(p > 0.0)) {
    throw std::domain_error("beta_constant: alpha and p must be positive");
  }
  if (!(p * alpha < 1.0)) {
    throw std::domain_error("beta_constant: p*alpha must be < 1 (integral diverges)");
  }
  const double s = 1.0 - p * alpha;
  return std::exp(2.0 * std::lgamma(s) - std::lgamma(2.0 * s));
}

namespace detail {

template <class Fn>
double adaptive_simpson_rec(const Fn& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (!std::isfinite(delta)) {
    throw std::runtime_error("adaptive_simpson: integrand overflow");
  }
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class Fn>
double adaptive_simpson(const Fn& f, double a, double b, double tol, int depth = 48) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

}  // namespace detail

/// Barrier F(x) = int_1^x du / rho^q(u^{1/q}); signed (negative for x < 1),
/// strictly increasing, relative tolerance ~1e-9.
inline double barrier_F(double x, const ModulusOfContinuity& rho, double q) {
  if (!(x > 0.0)) throw std::domain_error("barrier_F: x must be positive");
  if (!(q > 1.0)) throw std::domain_error("barrier_F: q must be > 1");
  if (x == 1.0) return 0.0;
  // u = v^q, then v = e^w: F(x) = int_0^{ln(x)/q} q e^{qw} / rho^q(e^w) dw;
  // evaluated in log space so the huge-argument tail cannot overflow
  auto integrand = [&](double w) {
    const double v = std::exp(w);
    const double r = rho(v);
    if (!(r > 0.0)) {
      throw std::domain_error("barrier_F: modulus not positive at u = " + std::to_string(v));
    }
    return q * std::exp(q * (w - std::log(r)));
  };
  const double w1 = std::log(x) / q;
  // split at the modulus splice point when it falls inside the range
  double split = w1;
  if (rho.kind() == ModulusOfContinuity::Kind::kRho1 ||
      rho.kind() == ModulusOfContinuity::Kind::kRho2) {
    const double wd = std::log(rho.delta());
    if ((w1 < wd && wd < 0.0) || (0.0 < wd && wd < w1)) split = wd;
  }
  const double tol_scale = 1e-10 * std::max(1.0, std::abs(w1));
  if (split == w1) {
    return detail::adaptive_simpson(integrand, 0.0, w1, tol_scale);
  }
  return detail::adaptive_simpson(integrand, 0.0, split, tol_scale) +
         detail::adaptive_simpson(integrand, split, w1, tol_scale);
}

/// Inverse barrier: root of F(x) = y, bracketed and solved on u = log x
/// (F's range can require x beyond any linear search). Returns nothing when y
/// lies outside the reachable range (the lemma's applicability edge).
inline std::optional<double> barrier_F_inverse(double y, const ModulusOfContinuity& rho,
                                               double q) {
  if (y == 0.0) return 1.0;
  auto f_of = [&](double u) { return barrier_F(std::exp(u), rho, q); };
  const double u_cap = 705.0;  // exp(u) must stay finite
  double u_lo = 0.0, u_hi = 0.0, f_lo = 0.0, f_hi = 0.0;
  if (y > 0.0) {
    double step = 1.0;
    while (true) {
      u_hi += step;
      step *= 2.0;
      if (u_hi >= u_cap) {
        u_hi = u_cap;
        f_hi = f_of(u_hi);
        if (f_hi < y) return std::nullopt;
        break;
      }
      f_hi = f_of(u_hi);
      if (f_hi >= y) break;
      u_lo = u_hi;
      f_lo = f_hi;
    }
  } else {
    double step = 1.0;
    while (true) {
      u_lo -= step;
      step *= 2.0;
      if (u_lo <= -u_cap) {
        u_lo = -u_cap;
        f_lo = f_of(u_lo);
        if (f_lo > y) return std::nullopt;
        break;
      }
      f_lo = f_of(u_lo);
      if (f_lo <= y) break;
      u_hi = u_lo;
      f_hi = f_lo;
    }
  }
  // secant with bisection safeguards; F(exp(u)) is smooth and increasing
  const double tol = 1e-11 * std::max(1.0, std::abs(y));
  double u = 0.5 * (u_lo + u_hi);
  for (int it = 0; it < 300; ++it) {
    double cand;
    if (f_hi > f_lo) {
      const double margin = 1e-3 * (u_hi - u_lo);
      cand = std::clamp(u_lo + (y - f_lo) * (u_hi - u_lo) / (f_hi - f_lo), u_lo + margin,
                        u_hi - margin);
    } else {
      cand = 0.5 * (u_lo + u_hi);
    }
    u = cand;
    const double fu = f_of(u);
    if (std::abs(fu - y) <= tol) return std::exp(u);
    if (fu < y) {
      u_lo = u;
      f_lo = fu;
    } else {
      u_hi = u;
      f_hi = fu;
    }
    if (u_hi - u_lo <= 1e-14 * std::max(1.0, std::abs(u_hi))) break;
  }
  return std::exp(u);
}

struct BihariParams {
  double a = 0.0;       // additive constant, >= 0
  double b_coef = 0.0;  // kernel coefficient, >= 0
  double alpha = 0.55;  // lemma regime: (1/2, 1)
  double p = 1.6;       // 1 < p < 2, alpha < 1/p
  double q = 8.0 / 3.0; // conjugate exponent, 1/p + 1/q = 1
  ModulusOfContinuity rho = ModulusOfContinuity::linear();
  double t = 1.0;

  void validate() const {
    if (!(a >= 0.0) || !(b_coef >= 0.0)) {
      throw std::invalid_argument("BihariParams: a and b must be nonnegative");
    }
    if (!(alpha > 0.5) || !(alpha < 1.0)) {
      throw std::invalid_argument("BihariParams: alpha must lie in (1/2, 1)");
    }
    if (!(p > 1.0) || !(p < 2.0)) {
      throw std::invalid_argument("BihariParams: p must lie in (1, 2)");
    }
    if (!(alpha < 1.0 / p)) {
      throw std::invalid_argument("BihariParams: need alpha < 1/p");
    }
    if (std::abs(1.0 / p + 1.0 / q - 1.0) > 1e-12) {
      throw std::invalid_argument("BihariParams: 1/p + 1/q must equal 1");
    }
    if (!(t >= 0.0)) throw std::invalid_argument("BihariParams: t must be nonnegative");
  }
};

struct BihariEvaluation {
  double c_alpha_p = 0.0;   // Beta constant
  double f_start = 0.0;     // F(2^{q-1} a^q)
  double f_argument = 0.0;  // F-argument fed to the inverse
  bool in_domain = true;    // false = "escaped-domain"
  double bound = 0.0;       // valid only when in_domain
};

/// Evaluates the lemma display. a = 0 short-circuits to the exact zero bound.
inline BihariEvaluation bihari_bound(const BihariParams& params) {
  params.validate();
  BihariEvaluation ev;
  ev.c_alpha_p = beta_constant(params.alpha, params.p);
  if (params.a == 0.0) {
    ev.f_start = -std::numeric_limits<double>::infinity();
    ev.f_argument = -std::numeric_limits<double>::infinity();
    ev.in_domain = true;
    ev.bound = 0.0;
    return ev;
  }
  const double q = params.q;
  const double pre = std::pow(2.0, q - 1.0);
  ev.f_start = barrier_F(pre * std::pow(params.a, q), params.rho, q);
  const double growth = pre * std::pow(params.b_coef, q) * std::pow(ev.c_alpha_p, q / params.p) *
                        std::pow(params.t, q * (1.0 / params.p - params.alpha) + 1.0);
  ev.f_argument = ev.f_start + growth;
  const auto inv = barrier_F_inverse(ev.f_argument, params.rho, q);
  if (!inv) {
    ev.in_domain = false;
    return ev;
  }
  ev.in_domain = true;
  ev.bound = std::pow(*inv, 1.0 / q);
  return ev;
}

}  // namespace mixedsde
