#pragma once

// Mixed Euler approximation
//
//   X(t) = x0 + int_0^t b(k_n(s), X(k_n(s))) ds
//             + int_0^t sigma_W(k_n(s), X(k_n(s))) dW(s)
//             + int_0^t sigma_H(k_n(s), X(k_n(s))) dB^H(s),
//
// where k_n freezes time and state at the left node of each partition cell.
// With piecewise-constant integrands both stochastic integrals reduce to
// exact increment sums, so the solution is evaluated on the full driver
// grid, not just the partition. Stopping times are resolved at grid
// resolution (first crossing node); the sub-grid infimum is unobservable and
// the bias is at most one mesh width. Non-finite states abort the path and
// mark it censored; ensembles count censored members.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixedsde/coefficients.hpp"
#include "mixedsde/frac_calc.hpp"
#include "mixedsde/gauss_drivers.hpp"
#include "mixedsde/grid.hpp"

namespace mixedsde {

struct EulerConfig {
  TimeGrid partition;
  std::vector<double> x0;
  std::optional<double> truncation_r;  // R for the driver-norm stopping time T_R
  double alpha = 0.3;                  // exponent for T_R when truncation_r is set

  void validate() const {
    if (x0.empty()) throw std::invalid_argument("EulerConfig: empty initial state");
    if (truncation_r && !(*truncation_r > 0.0)) {
      throw std::invalid_argument("EulerConfig: truncation R must be positive");
    }
  }
};

struct CensorInfo {
  std::size_t cell = 0;  // partition cell where the state first left the finite range
  double time = 0.0;
  std::string reason;
};

struct SolutionPath {
  SamplePath path;  // values on the driver grid; frozen after stopped_at
  std::optional<double> stopped_at;
  std::optional<CensorInfo> censored;
  std::vector<std::pair<double, NormReport>> diagnostics;
};

/// First grid node t with ||B^H||_{1-alpha,inf,t} >= R, or the horizon.
inline double stopping_time_TR(const SamplePath& bh, double alpha, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("stopping_time_TR: R must be positive");
  const auto profile = driver_norm_profile(bh, alpha);
  for (std::size_t j = 0; j < profile.size(); ++j) {
    if (profile[j] >= r) return bh.grid[j];
  }
  return bh.grid.horizon();
}

/// First node with ||X||_{alpha,t} v ||Y||_{alpha,t} > M, or the horizon.
inline double stopping_time_tauM(const SolutionPath& x, const SolutionPath& y, double alpha,
                                 double m) {
  if (!x.path.grid.same_nodes(y.path.grid)) {
    throw std::invalid_argument("stopping_time_tauM: grid mismatch");
  }
  const auto px = alpha_norm_profile(x.path, alpha);
  const auto py = alpha_norm_profile(y.path, alpha);
  for (std::size_t j = 0; j < px.size(); ++j) {
    if (std::max(px[j], py[j]) > m) return x.path.grid[j];
  }
  return x.path.grid.horizon();
}

/// X(. ^ tau): values frozen at the last node <= tau.
inline SolutionPath stop_process(const SolutionPath& x, double tau) {
  const std::size_t jstop = x.path.grid.floor_index(tau);
  SolutionPath out = x;
  for (std::size_t j = jstop + 1; j < x.path.grid.size(); ++j) {
    for (std::size_t c = 0; c < x.path.dim; ++c) out.path.at(j, c) = x.path.at(jstop, c);
  }
  out.stopped_at = x.stopped_at ? std::min(*x.stopped_at, tau) : tau;
  return out;
}

/// Euler run against fixed driver realizations. The drivers must live on a
/// common grid refining cfg.partition; the result is sampled on the driver
/// grid with coefficients frozen at partition cell starts.
inline SolutionPath euler_solve(const CoefficientSet& cs, const EulerConfig& cfg,
                                const SamplePath& w, const SamplePath& bh) {
  cs.validate();
  cfg.validate();
  if (!w.grid.same_nodes(bh.grid)) {
    throw std::invalid_argument("euler_solve: drivers must share one grid");
  }
  if (w.dim != cs.bm_dim || bh.dim != cs.fbm_dim) {
    throw std::invalid_argument("euler_solve: driver dimensions do not match coefficients");
  }
  if (cfg.x0.size() != cs.state_dim) {
    throw std::invalid_argument("euler_solve: x0 dimension does not match coefficients");
  }
  if (!w.grid.refines(cfg.partition)) {
    throw std::invalid_argument("euler_solve: driver grid does not refine the partition");
  }
  const TimeGrid& fine = w.grid;
  const std::size_t n = cs.state_dim;

  SolutionPath sol{SamplePath(fine, n), std::nullopt, std::nullopt, {}};
  std::vector<double> state(cfg.x0);
  for (std::size_t c = 0; c < n; ++c) sol.path.at(0, c) = state[c];

  std::vector<double> frozen_b(n), frozen_sw(n * cs.bm_dim), frozen_sh(n * cs.fbm_dim);
  std::size_t cell = 0;  // current partition cell index
  const double tol = 1e-9 * std::max(1.0, fine.horizon());
  auto freeze = [&](double cell_time) {
    cs.drift(cell_time, state, frozen_b);
    cs.sigma_w(cell_time, state, frozen_sw);
    cs.sigma_h(cell_time, state, frozen_sh);
  };
  freeze(cfg.partition[0]);

  for (std::size_t k = 0; k + 1 < fine.size(); ++k) {
    // entering a new partition cell refreezes the coefficients at (t_i, X(t_i))
    while (cell + 1 < cfg.partition.cells() && fine[k] >= cfg.partition[cell + 1] - tol) {
      ++cell;
      freeze(cfg.partition[cell]);
    }
    const double dt = fine[k + 1] - fine[k];
    for (std::size_t r = 0; r < n; ++r) {
      double v = state[r] + frozen_b[r] * dt;
      for (std::size_t c = 0; c < cs.bm_dim; ++c) {
        v += frozen_sw[r * cs.bm_dim + c] * (w.at(k + 1, c) - w.at(k, c));
      }
      for (std::size_t c = 0; c < cs.fbm_dim; ++c) {
        v += frozen_sh[r * cs.fbm_dim + c] * (bh.at(k + 1, c) - bh.at(k, c));
      }
      state[r] = v;
    }
    bool finite = true;
    for (double v : state) finite = finite && std::isfinite(v);
    if (!finite) {
      sol.censored = CensorInfo{cell, fine[k + 1],
                                "non-finite state at t=" + std::to_string(fine[k + 1]) +
                                    " (partition cell " + std::to_string(cell) + ")"};
      // freeze the path at the last finite state
      for (std::size_t j = k + 1; j < fine.size(); ++j) {
        for (std::size_t c = 0; c < n; ++c) sol.path.at(j, c) = sol.path.at(k, c);
      }
      return sol;
    }
    for (std::size_t c = 0; c < n; ++c) sol.path.at(k + 1, c) = state[c];
  }

  if (cfg.truncation_r) {
    sol = stop_process(sol, stopping_time_TR(bh, cfg.alpha, *cfg.truncation_r));
  }
  return sol;
}

struct MomentEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t paths_used = 0;
  std::size_t censored = 0;
};

/// Empirical E[ ||X||_{alpha,t}^{2N} ] over an ensemble, where the norm is
/// the running maximum of ||X||_{alpha,.} over node times up to t (making the
/// diagnostic literally nondecreasing in t). Censored paths are excluded and
/// counted.
inline MomentEstimate moment_diagnostic(const std::vector<SolutionPath>& ensemble, double alpha,
                                        double t, unsigned n_power) {
  if (ensemble.empty()) throw std::invalid_argument("moment_diagnostic: empty ensemble");
  if (n_power < 1) throw std::invalid_argument("moment_diagnostic: N must be >= 1");
  MomentEstimate est;
  double sum = 0.0, sumsq = 0.0;
  for (const auto& sol : ensemble) {
    if (sol.censored) {
      ++est.censored;
      continue;
    }
    const std::size_t last = sol.path.grid.floor_index(t);
    const auto prof = alpha_norm_profile(sol.path, alpha);
    double running = 0.0;
    for (std::size_t j = 0; j <= last; ++j) running = std::max(running, prof[j]);
    const double powed = std::pow(running, 2.0 * static_cast<double>(n_power));
    sum += powed;
    sumsq += powed * powed;
    ++est.paths_used;
  }
  if (est.paths_used == 0) throw std::runtime_error("moment_diagnostic: all paths censored");
  const double mean = sum / static_cast<double>(est.paths_used);
  est.value = mean;
  if (est.paths_used > 1) {
    const double var =
        (sumsq - sum * mean) / static_cast<double>(est.paths_used - 1);
    est.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(est.paths_used));
  }
  return est;
}

/// Norm reports along the path at the requested times (attached to the
/// solution's diagnostics field).
inline void attach_diagnostics(SolutionPath& sol, const FracOrder& fo,
                               std::span<const double> times) {
  sol.diagnostics.clear();
  for (double t : times) {
    sol.diagnostics.emplace_back(t, norms(sol.path, fo, t));
  }
}

}  // namespace mixedsde
