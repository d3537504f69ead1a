#pragma once

// Coefficient triples (b, sigma_W, sigma_H) with hypothesis metadata, the
// built-in moduli of continuity
//
//   rho1(u) = u log^{1/q}(1/u)                          on [0, delta]
//   rho2(u) = u log^{1/q}(1/u) log^{1/q}(log(1/u))      on [0, delta]
//
// extended linearly above delta with the analytic left derivative, and a
// quasi-random falsification probe for the growth/modulus inequalities.
// delta must satisfy log(1/delta) > 1; for rho2 the left derivative must
// also come out nonnegative. These are sufficient conditions keeping the
// extension real and nondecreasing.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixedsde/rng.hpp"

namespace mixedsde {

namespace detail {

inline void check_rho_params(const char* who, double q, double delta) {
  if (!(q > 1.0)) {
    throw std::invalid_argument(std::string(who) + ": need q > 1, got " + std::to_string(q));
  }
  if (!(delta > 0.0) || !(std::log(1.0 / delta) > 1.0)) {
    throw std::invalid_argument(std::string(who) + ": need 0 < delta < 1/e, got " +
                                std::to_string(delta));
  }
}

}  // namespace detail

/// Left derivative of rho1 at delta: log^{1/q}(1/d) - (1/q) log^{1/q-1}(1/d).
inline double rho1_left_derivative(double q, double delta) {
  detail::check_rho_params("rho1", q, delta);
  const double l = std::log(1.0 / delta);
  return std::pow(l, 1.0 / q) - (1.0 / q) * std::pow(l, 1.0 / q - 1.0);
}

inline double rho1(double u, double q, double delta) {
  detail::check_rho_params("rho1", q, delta);
  if (u < 0.0) throw std::domain_error("rho1: negative argument");
  if (u == 0.0) return 0.0;
  if (u <= delta) return u * std::pow(std::log(1.0 / u), 1.0 / q);
  return delta * std::pow(std::log(1.0 / delta), 1.0 / q) +
         rho1_left_derivative(q, delta) * (u - delta);
}

/// Left derivative of rho2 at delta (L = log(1/d), M = log L):
/// L^{1/q} M^{1/q} - (1/q) L^{1/q-1} M^{1/q} - (1/q) L^{1/q-1} M^{1/q-1}.
inline double rho2_left_derivative(double q, double delta) {
  detail::check_rho_params("rho2", q, delta);
  const double l = std::log(1.0 / delta);
  const double m = std::log(l);
  return std::pow(l, 1.0 / q) * std::pow(m, 1.0 / q) -
         (1.0 / q) * std::pow(l, 1.0 / q - 1.0) * std::pow(m, 1.0 / q) -
         (1.0 / q) * std::pow(l, 1.0 / q - 1.0) * std::pow(m, 1.0 / q - 1.0);
}

inline double rho2(double u, double q, double delta) {
  detail::check_rho_params("rho2", q, delta);
  const double dleft = rho2_left_derivative(q, delta);
  if (!(dleft >= 0.0)) {
    throw std::invalid_argument("rho2: left derivative at delta is negative; pick smaller delta");
  }
  if (u < 0.0) throw std::domain_error("rho2: negative argument");
  if (u == 0.0) return 0.0;
  if (u <= delta) {
    const double l = std::log(1.0 / u);
    return u * std::pow(l, 1.0 / q) * std::pow(std::log(l), 1.0 / q);
  }
  const double l = std::log(1.0 / delta);
  return delta * std::pow(l, 1.0 / q) * std::pow(std::log(l), 1.0 / q) + dleft * (u - delta);
}

/// Concave nondecreasing modulus with rho(0) = 0, rho(u) > 0 for u > 0.
/// Built-ins certify the divergence condition int_{0+} du / rho^q(u^{1/q}) =
/// infinity through the barrier diagnostic in the bihari module.
class ModulusOfContinuity {
 public:
  enum class Kind { kRho1, kRho2, kLinear, kCustom };

  static ModulusOfContinuity rho1_modulus(double q, double delta) {
    detail::check_rho_params("rho1", q, delta);
    ModulusOfContinuity m;
    m.kind_ = Kind::kRho1;
    m.q_ = q;
    m.delta_ = delta;
    return m;
  }

  static ModulusOfContinuity rho2_modulus(double q, double delta) {
    detail::check_rho_params("rho2", q, delta);
    if (!(rho2_left_derivative(q, delta) >= 0.0)) {
      throw std::invalid_argument("rho2 modulus: left derivative at delta is negative");
    }
    ModulusOfContinuity m;
    m.kind_ = Kind::kRho2;
    m.q_ = q;
    m.delta_ = delta;
    return m;
  }

  static ModulusOfContinuity linear(double slope = 1.0) {
    if (!(slope > 0.0)) throw std::invalid_argument("linear modulus: slope must be positive");
    ModulusOfContinuity m;
    m.kind_ = Kind::kLinear;
    m.slope_ = slope;
    return m;
  }

  static ModulusOfContinuity custom(std::function<double(double)> f, double q = 2.0) {
    ModulusOfContinuity m;
    m.kind_ = Kind::kCustom;
    m.q_ = q;
    m.custom_ = std::move(f);
    return m;
  }

  double operator()(double u) const {
    switch (kind_) {
      case Kind::kRho1:
        return rho1(u, q_, delta_);
      case Kind::kRho2:
        return rho2(u, q_, delta_);
      case Kind::kLinear:
        if (u < 0.0) throw std::domain_error("modulus: negative argument");
        return slope_ * u;
      case Kind::kCustom:
        return custom_(u);
    }
    return 0.0;
  }

  Kind kind() const { return kind_; }
  double q() const { return q_; }
  double delta() const { return delta_; }
  double slope() const { return slope_; }

  std::string name() const {
    switch (kind_) {
      case Kind::kRho1:
        return "rho1";
      case Kind::kRho2:
        return "rho2";
      case Kind::kLinear:
        return "linear";
      case Kind::kCustom:
        return "custom";
    }
    return "?";
  }

 private:
  Kind kind_ = Kind::kLinear;
  double q_ = 2.0;
  double delta_ = 0.2;
  double slope_ = 1.0;
  std::function<double(double)> custom_;
};

/// Evaluable coefficient triple for
///   dX = b(t,X) dt + sigma_W(t,X) dW + sigma_H(t,X) dB^H
/// with the growth constant K, time-Holder exponent beta and the modulus
/// governing the x-continuity of b and sigma_W. Matrices are row-major.
struct CoefficientSet {
  using Field = std::function<void(double, std::span<const double>, std::span<double>)>;

  std::size_t state_dim = 1;  // n
  std::size_t bm_dim = 1;     // m
  std::size_t fbm_dim = 1;    // d
  Field drift;                // -> n
  Field sigma_w;              // -> n x m
  Field sigma_h;              // -> n x d
  Field dsigma_h;             // -> n blocks of n x d: out[i*n*d + r*d + c] = d sigma_h[r][c] / dx_i
  double growth_k = 1.0;
  double beta = 1.0;
  ModulusOfContinuity modulus = ModulusOfContinuity::linear();
  std::string name = "custom";
  std::vector<double> default_x0;

  void validate() const {
    if (state_dim == 0 || bm_dim == 0 || fbm_dim == 0) {
      throw std::invalid_argument("CoefficientSet: dimensions must be >= 1");
    }
    if (!(growth_k > 0.0)) throw std::invalid_argument("CoefficientSet: K must be positive");
    if (!(beta > 0.0) || !(beta <= 1.0)) {
      throw std::invalid_argument("CoefficientSet: beta must lie in (0,1]");
    }
    if (!drift || !sigma_w || !sigma_h) {
      throw std::invalid_argument("CoefficientSet: missing evaluator");
    }
  }
};

/// Central-difference fallback for the spatial derivative of sigma_h
/// (step 1e-6); approximate, for coefficient sets without an analytic one.
inline CoefficientSet::Field finite_difference_dsigma_h(CoefficientSet::Field sigma_h,
                                                        std::size_t n, std::size_t d,
                                                        double step = 1e-6) {
  return [sigma_h = std::move(sigma_h), n, d, step](double t, std::span<const double> x,
                                                    std::span<double> out) {
    std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
    std::vector<double> hi(n * d), lo(n * d);
    for (std::size_t i = 0; i < n; ++i) {
      xp[i] = x[i] + step;
      xm[i] = x[i] - step;
      sigma_h(t, xp, hi);
      sigma_h(t, xm, lo);
      for (std::size_t rc = 0; rc < n * d; ++rc) {
        out[i * n * d + rc] = (hi[rc] - lo[rc]) / (2.0 * step);
      }
      xp[i] = x[i];
      xm[i] = x[i];
    }
  };
}

// ---------------------------------------------------------------------------
// Hypothesis probing (falsification only; the hypotheses quantify over all
// points, so a pass certifies nothing beyond the sampled box).
// ---------------------------------------------------------------------------

struct SampleBox {
  double t_min = 0.0;
  double t_max = 1.0;
  std::vector<double> x_min;  // per state coordinate
  std::vector<double> x_max;
};

struct HypothesisCheck {
  std::string id;          // e.g. "H.1.1"
  double max_ratio = 0.0;  // <= 1 means the inequality held on every sample
  bool pass = true;
  std::vector<double> witness;  // sample point achieving max_ratio: t, s, x..., y...
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;
  bool pass = true;

  const HypothesisCheck& check(const std::string& id) const {
    for (const auto& c : checks) {
      if (c.id == id) return c;
    }
    throw std::out_of_range("HypothesisReport: no check " + id);
  }
};

namespace detail {

inline double halton(std::uint64_t index, std::uint64_t base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

inline constexpr std::array<std::uint64_t, 16> kHaltonBases = {2,  3,  5,  7,  11, 13, 17, 19,
                                                               23, 29, 31, 37, 41, 43, 47, 53};

inline double frobenius(std::span<const double> m) {
  double s = 0.0;
  for (double v : m) s += v * v;
  return std::sqrt(s);
}

}  // namespace detail

/// Draws (t, s, x, y) quasi-uniformly in the box and reports the worst
/// observed ratio for each hypothesis inequality. Evaluator exceptions are
/// rethrown with the offending point attached.
inline HypothesisReport probe_hypotheses(const CoefficientSet& cs, const SampleBox& box,
                                         std::size_t n_samples, std::uint64_t seed) {
  cs.validate();
  if (n_samples < 1) throw std::invalid_argument("probe_hypotheses: n_samples must be >= 1");
  const std::size_t n = cs.state_dim;
  if (box.x_min.size() != n || box.x_max.size() != n) {
    throw std::invalid_argument("probe_hypotheses: box dimension mismatch");
  }
  const std::size_t dims = 2 + 2 * n;
  if (dims > detail::kHaltonBases.size()) {
    throw std::invalid_argument("probe_hypotheses: state dimension too large for the probe");
  }

  // Cranley-Patterson rotation keyed by the seed.
  std::vector<double> shift(dims);
  {
    GaussianStream s(derive_seed(seed, kStreamProbe));
    for (auto& v : shift) v = s.uniform();
  }

  HypothesisReport report;
  report.checks = {HypothesisCheck{"H.1.1", 0.0, true, {}}, HypothesisCheck{"H.1.2", 0.0, true, {}},
                   HypothesisCheck{"H.1.3", 0.0, true, {}}, HypothesisCheck{"H.1.4", 0.0, true, {}},
                   HypothesisCheck{"H.2.1", 0.0, true, {}}, HypothesisCheck{"H.2.2", 0.0, true, {}},
                   HypothesisCheck{"H.2.3", 0.0, true, {}}};

  const bool have_dsigma = static_cast<bool>(cs.dsigma_h);
  std::vector<double> x(n), y(n);
  std::vector<double> bx(n), by(n);
  std::vector<double> swx(n * cs.bm_dim), swy(n * cs.bm_dim);
  std::vector<double> shx(n * cs.fbm_dim), shy(n * cs.fbm_dim), shs(n * cs.fbm_dim);
  std::vector<double> dshx(n * n * cs.fbm_dim), dshy(n * n * cs.fbm_dim), dshs(n * n * cs.fbm_dim);

  auto record = [&](std::size_t check, double ratio, double t, double s) {
    auto& c = report.checks[check];
    if (ratio > c.max_ratio) {
      c.max_ratio = ratio;
      c.witness.clear();
      c.witness.push_back(t);
      c.witness.push_back(s);
      c.witness.insert(c.witness.end(), x.begin(), x.end());
      c.witness.insert(c.witness.end(), y.begin(), y.end());
    }
  };

  for (std::size_t k = 0; k < n_samples; ++k) {
    const std::uint64_t idx = k + 1;
    auto coord = [&](std::size_t dim) {
      double u = detail::halton(idx, detail::kHaltonBases[dim]) + shift[dim];
      u -= std::floor(u);
      return u;
    };
    const double t = box.t_min + coord(0) * (box.t_max - box.t_min);
    const double s = box.t_min + coord(1) * (box.t_max - box.t_min);
    double dist2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = box.x_min[i] + coord(2 + i) * (box.x_max[i] - box.x_min[i]);
      y[i] = box.x_min[i] + coord(2 + n + i) * (box.x_max[i] - box.x_min[i]);
      const double d = x[i] - y[i];
      dist2 += d * d;
    }
    double xmag = 0.0;
    for (double v : x) xmag += v * v;
    xmag = std::sqrt(xmag);

    try {
      cs.drift(t, x, bx);
      cs.drift(t, y, by);
      cs.sigma_w(t, x, swx);
      cs.sigma_w(t, y, swy);
      cs.sigma_h(t, x, shx);
      cs.sigma_h(t, y, shy);
      cs.sigma_h(s, x, shs);
      if (have_dsigma) {
        cs.dsigma_h(t, x, dshx);
        cs.dsigma_h(t, y, dshy);
        cs.dsigma_h(s, x, dshs);
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("probe_hypotheses: evaluator failed at t=" + std::to_string(t) +
                               " x[0]=" + std::to_string(x[0]) + ": " + e.what());
    }

    const double growth = cs.growth_k * (1.0 + xmag);
    record(0, detail::frobenius(bx) / growth, t, s);
    record(2, detail::frobenius(swx) / growth, t, s);

    if (dist2 > 0.0) {
      const double rho = cs.modulus(dist2);
      double db = 0.0, dsw = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        db += (bx[i] - by[i]) * (bx[i] - by[i]);
      }
      for (std::size_t i = 0; i < swx.size(); ++i) {
        const double dv = swx[i] - swy[i];
        dsw += dv * dv;
      }
      if (rho > 0.0) {
        record(1, db / rho, t, s);
        record(3, dsw / rho, t, s);
      }
    }

    if (have_dsigma) {
      const std::size_t block = n * cs.fbm_dim;
      double worst21 = 0.0, worst22 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        std::span<const double> bi(dshx.data() + i * block, block);
        worst21 = std::max(worst21, detail::frobenius(bi) / cs.growth_k);
        if (dist2 > 0.0) {
          double dd = 0.0;
          for (std::size_t rc = 0; rc < block; ++rc) {
            const double dv = dshx[i * block + rc] - dshy[i * block + rc];
            dd += dv * dv;
          }
          worst22 = std::max(worst22,
                             std::sqrt(dd) / (cs.growth_k * std::sqrt(dist2)));
        }
      }
      record(4, worst21, t, s);
      if (dist2 > 0.0) record(5, worst22, t, s);

      if (t != s) {
        double dsh = 0.0;
        for (std::size_t rc = 0; rc < shx.size(); ++rc) {
          const double dv = shx[rc] - shs[rc];
          dsh += dv * dv;
        }
        double worst_d = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          double dd = 0.0;
          for (std::size_t rc = 0; rc < block; ++rc) {
            const double dv = dshx[i * block + rc] - dshs[i * block + rc];
            dd += dv * dv;
          }
          worst_d = std::max(worst_d, std::sqrt(dd));
        }
        const double denom = cs.growth_k * std::pow(std::abs(t - s), cs.beta);
        record(6, (std::sqrt(dsh) + worst_d) / denom, t, s);
      }
    }
  }

  for (auto& c : report.checks) {
    c.pass = c.max_ratio <= 1.0;
    report.pass = report.pass && c.pass;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Built-in presets addressable by name in experiment configs.
// ---------------------------------------------------------------------------

/// `linear`            b = -x, sigma_W = 0.5, sigma_H = 0.5 (1 + sin x)
/// `trig`              b = sin x, sigma_W = 0.5 cos x, sigma_H = sin x
/// `rho1-lipschitz-free` drift 0.3 sign(x) rho1(|x|; q=2, d=0.2):
///                      non-Lipschitz at 0, modulus class rho1
inline CoefficientSet make_preset(const std::string& name) {
  CoefficientSet cs;
  cs.name = name;
  if (name == "linear") {
    cs.drift = [](double, std::span<const double> x, std::span<double> out) { out[0] = -x[0]; };
    cs.sigma_w = [](double, std::span<const double>, std::span<double> out) { out[0] = 0.5; };
    cs.sigma_h = [](double, std::span<const double> x, std::span<double> out) {
      out[0] = 0.5 * (1.0 + std::sin(x[0]));
    };
    cs.dsigma_h = [](double, std::span<const double> x, std::span<double> out) {
      out[0] = 0.5 * std::cos(x[0]);
    };
    cs.growth_k = 1.0;
    cs.beta = 1.0;
    cs.modulus = ModulusOfContinuity::linear(1.0);
    cs.default_x0 = {1.0};
  } else if (name == "trig") {
    cs.drift = [](double, std::span<const double> x, std::span<double> out) {
      out[0] = std::sin(x[0]);
    };
    cs.sigma_w = [](double, std::span<const double> x, std::span<double> out) {
      out[0] = 0.5 * std::cos(x[0]);
    };
    cs.sigma_h = [](double, std::span<const double> x, std::span<double> out) {
      out[0] = std::sin(x[0]);
    };
    cs.dsigma_h = [](double, std::span<const double> x, std::span<double> out) {
      out[0] = std::cos(x[0]);
    };
    cs.growth_k = 1.0;
    cs.beta = 1.0;
    cs.modulus = ModulusOfContinuity::linear(1.0);
    cs.default_x0 = {0.5};
  } else if (name == "rho1-lipschitz-free") {
    const double q = 2.0, delta = 0.2, scale = 0.3;
    cs.drift = [q, delta, scale](double, std::span<const double> x, std::span<double> out) {
      const double r = std::abs(x[0]);
      const double v = scale * rho1(r, q, delta);
      out[0] = x[0] >= 0.0 ? v : -v;
    };
    cs.sigma_w = [](double, std::span<const double>, std::span<double> out) { out[0] = 0.4; };
    cs.sigma_h = [](double, std::span<const double> x, std::span<double> out) {
      out[0] = 0.5 * (1.0 + std::sin(x[0]));
    };
    cs.dsigma_h = [](double, std::span<const double> x, std::span<double> out) {
      out[0] = 0.5 * std::cos(x[0]);
    };
    cs.growth_k = 1.0;
    cs.beta = 1.0;
    cs.modulus = ModulusOfContinuity::rho1_modulus(q, delta);
    cs.default_x0 = {0.0};
  } else {
    throw std::invalid_argument("make_preset: unknown preset '" + name + "'");
  }
  cs.validate();
  return cs;
}

}  // namespace mixedsde
