// Acceptance suite: end-to-end checks at full scale, one PASS/FAIL line per
// criterion, exit code 0 iff all pass. Expected values are statistical or
// closed-form oracles; tolerances are pinned in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "mixedsde/mixedsde.hpp"

using namespace mixedsde;
using namespace mixedsde::harness;

namespace {

int g_failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  if (!pass) ++g_failures;
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmtg(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// --------------------------------------------------------------------------
// 1. fBm increment statistics across Hurst exponents + Brownian reduction.
// --------------------------------------------------------------------------
void criterion_1() {
  const double t0 = now_seconds();
  const std::size_t cells = 512;
  const int paths = 10000;
  const auto grid = TimeGrid::uniform(1.0, cells);
  bool ok = true;
  std::string worst_note;
  double worst_z = 0.0;

  for (double hurst : {0.6, 0.75, 0.9, 0.5}) {
    FbmSampler sampler(grid, HurstParameter(hurst), FbmMethod::kCirculantFft);
    // 20 deterministic probed pairs spread over the grid
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    GaussianStream pick(derive_seed(2026, 0x7061u, static_cast<std::uint64_t>(hurst * 100)));
    while (pairs.size() < 20) {
      std::size_t i = static_cast<std::size_t>(pick.uniform() * cells);
      std::size_t j = static_cast<std::size_t>(pick.uniform() * cells);
      if (i == j) continue;
      if (i > j) std::swap(i, j);
      pairs.emplace_back(i, j);
    }
    std::vector<double> sums(pairs.size(), 0.0);
    for (int p = 0; p < paths; ++p) {
      const auto path = sampler.sample(path_seed(88551, static_cast<std::uint64_t>(p)));
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        const double d = path.at(pairs[k].second) - path.at(pairs[k].first);
        sums[k] += d * d;
      }
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const double var = sums[k] / paths;
      const double dt = grid[pairs[k].second] - grid[pairs[k].first];
      const double want = std::pow(dt, 2.0 * hurst);  // H=1/2: |t-s|, the Brownian law
      const double se = want * std::sqrt(2.0 / paths);
      const double z = std::abs(var - want) / se;
      if (z > worst_z) {
        worst_z = z;
        worst_note = "H=" + std::to_string(hurst) + " pair " + std::to_string(k);
      }
      ok = ok && (z <= 4.0);
    }
  }
  const double elapsed = now_seconds() - t0;
  ok = ok && elapsed < 60.0;
  report(1, "fBm increment statistics", ok,
         "worst |z| = " + fmtg(worst_z) + " at " + worst_note + ", " +
             fmtg(elapsed) + " s (target < 60)");
}

// --------------------------------------------------------------------------
// 2. GLS integral against Riemann-Stieltjes oracles.
// --------------------------------------------------------------------------
void criterion_2() {
  bool ok = true;
  std::string detail;

  // smooth pair: fine-grid RS sum as the oracle, dyadic refinement order
  auto f_fn = [](double t) { return std::cos(5.0 * t) + t; };
  auto g_fn = [](double t) { return std::sin(3.0 * t) - 0.3 * t * t; };
  double truth = 0.0;
  {
    const int nf = 1 << 17;
    double fp = f_fn(0.0), gp = g_fn(0.0);
    for (int i = 1; i <= nf; ++i) {
      const double t = static_cast<double>(i) / nf;
      const double fv = f_fn(t), gv = g_fn(t);
      truth += 0.5 * (fp + fv) * (gv - gp);
      fp = fv;
      gp = gv;
    }
  }
  double prev_err = 0.0, min_order = 1e9, err_at_4096 = 0.0;
  for (std::size_t n : {512u, 1024u, 2048u, 4096u}) {
    const auto grid = TimeGrid::uniform(1.0, n);
    SamplePath f(grid, 1), g(grid, 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      f.at(i) = f_fn(grid[i]);
      g.at(i) = g_fn(grid[i]);
    }
    const double got = gls_integral(f, g, 0.3, 0.0, 1.0);
    const double err = std::abs(got - truth) / std::abs(truth);
    if (prev_err > 0.0) min_order = std::min(min_order, std::log2(prev_err / err));
    prev_err = err;
    if (n == 4096) err_at_4096 = err;
  }
  ok = ok && err_at_4096 <= 1e-3 && min_order >= 1.0;
  detail = "smooth rel err " + fmtg(err_at_4096) + " at 2^12, order " +
           fmtg(min_order);

  // pathwise chain rule for fBm, 20 seeds
  {
    const auto grid = TimeGrid::uniform(1.0, 4096);
    FbmSampler sampler(grid, HurstParameter(0.75), FbmMethod::kCirculantFft);
    double worst = 0.0;
    for (int s = 0; s < 20; ++s) {
      const auto bh = sampler.sample(path_seed(7331, static_cast<std::uint64_t>(s)));
      const double want = 0.5 * bh.at(grid.size() - 1) * bh.at(grid.size() - 1);
      const double got = gls_integral(bh, bh, 0.3, 0.0, 1.0);
      worst = std::max(worst, std::abs(got - want) / std::abs(want));
    }
    ok = ok && worst <= 1e-2;
    detail += ", fBm chain rule worst rel " + fmtg(worst);
  }
  report(2, "fractional-calculus oracles", ok, detail);
}

// --------------------------------------------------------------------------
// 3. Explicit-constant inequality audits (100 randomized cases at 2^12).
// --------------------------------------------------------------------------
void criterion_3() {
  nlohmann::json j = {{"experiment", "audit"},
                      {"audit_cases", 100},
                      {"audit_nodes", 4096},
                      {"master_seed", 90210},
                      {"frac_order", {{"alpha", 0.3}, {"h", 0.75}}}};
  const auto study = run_audit_suite(config_from_json(j));
  const bool ok = study.max_ratio <= 1.05 && study.dbound_ok;
  report(3, "integral-estimate inequality audits", ok,
         "max ratio " + fmtg(study.max_ratio) + " (<= 1.05), max D-bound ratio " +
             fmtg(study.max_dbound) + " (pathwise <= 1)");
}

// --------------------------------------------------------------------------
// 4. Euler exactness reductions.
// --------------------------------------------------------------------------
void criterion_4() {
  const auto grid = TimeGrid::uniform(1.0, 512);
  const auto w = sample_bm(grid, 17, 1);
  const auto bh = sample_fbm(grid, HurstParameter(0.75), 17);
  auto make = [](double bscale, double sw, double sh) {
    CoefficientSet cs;
    cs.drift = [bscale](double, std::span<const double> x, std::span<double> o) {
      o[0] = bscale * x[0];
    };
    cs.sigma_w = [sw](double, std::span<const double>, std::span<double> o) { o[0] = sw; };
    cs.sigma_h = [sh](double, std::span<const double>, std::span<double> o) { o[0] = sh; };
    cs.dsigma_h = [](double, std::span<const double>, std::span<double> o) { o[0] = 0.0; };
    cs.growth_k = std::max(1.0, std::abs(bscale));
    return cs;
  };
  double worst = 0.0;
  {  // pure BM
    const auto sol = euler_solve(make(0.0, 1.0, 0.0), {grid, {0.0}, {}, 0.3}, w, bh);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      worst = std::max(worst, std::abs(sol.path.at(i) - w.at(i)));
    }
  }
  {  // pure fBm
    const auto sol = euler_solve(make(0.0, 0.0, 1.0), {grid, {0.0}, {}, 0.3}, w, bh);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      worst = std::max(worst, std::abs(sol.path.at(i) - bh.at(i)));
    }
  }
  double drift_err = 0.0;
  {  // pure drift closed form on 100 steps
    const auto g100 = TimeGrid::uniform(1.0, 100);
    const auto sol = euler_solve(make(1.0, 0.0, 0.0), {g100, {1.0}, {}, 0.3},
                                 sample_bm(g100, 1, 1), sample_fbm(g100, HurstParameter(0.75), 1));
    drift_err = std::abs(sol.path.at(g100.size() - 1) - std::pow(1.01, 100)) / std::pow(1.01, 100);
  }
  const bool ok = worst <= 1e-12 && drift_err <= 1e-12;
  report(4, "Euler exactness reductions", ok,
         "telescoping sup err " + fmtg(worst) + ", drift rel err " +
             fmtg(drift_err));
}

// --------------------------------------------------------------------------
// 5. Empirical strong convergence of the Euler scheme (linear preset).
// --------------------------------------------------------------------------
ConvergenceStudy criterion_5_run(std::size_t workers) {
  nlohmann::json j = {{"experiment", "convergence"},
                      {"preset", "linear"},
                      {"grid_sizes", {64, 128, 256, 512, 1024}},
                      {"ensemble", 200},
                      {"master_seed", 112233},
                      {"frac_order", {{"alpha", 0.3}, {"h", 0.75}}}};
  auto cfg = config_from_json(j);
  cfg.workers = workers;
  return run_convergence_study(cfg);
}

void criterion_5() {
  const double t0 = now_seconds();
  const auto study = criterion_5_run(0);
  const double elapsed = now_seconds() - t0;
  std::string medians = "medians";
  for (double m : study.medians) medians += " " + fmtg(m);
  const bool ok = study.median_decreasing && study.q90_decreasing && study.censored == 0 &&
                  elapsed < 600.0;
  report(5, "empirical Euler strong convergence", ok,
         medians + ", q90 decreasing = " + (study.q90_decreasing ? "yes" : "no") + ", " +
             fmtg(elapsed) + " s (target < 600)");
}

// --------------------------------------------------------------------------
// 6. Non-Lipschitz uniqueness probe.
// --------------------------------------------------------------------------
void criterion_6() {
  nlohmann::json j = {{"experiment", "uniqueness"},
                      {"preset", "rho1-lipschitz-free"},
                      {"grid_sizes", {64, 128, 256, 512, 1024}},
                      {"ensemble", 200},
                      {"master_seed", 445566},
                      {"frac_order", {{"alpha", 0.3}, {"h", 0.75}}}};
  const auto study = run_uniqueness_probe(config_from_json(j));
  const bool ok = study.fraction_below >= 0.9 && study.censored == 0;
  report(6, "non-Lipschitz uniqueness probe", ok,
         "fraction below coarsest gap " + fmtg(study.fraction_below) +
             " (>= 0.9), median dist " + fmtg(study.dist_median));
}

// --------------------------------------------------------------------------
// 7. Bihari module oracles.
// --------------------------------------------------------------------------
void criterion_7() {
  bool ok = true;
  std::string detail;

  // C_{alpha,p} vs singular quadrature (endpoint substitution w = u^{1-pa})
  {
    double worst = 0.0;
    for (const auto& [alpha, p] :
         {std::pair{0.25, 2.0}, std::pair{0.3, 1.5}, std::pair{0.55, 1.6}, std::pair{0.45, 1.9}}) {
      const double oracle = oracles::beta_symmetric_oracle(alpha, p);
      worst = std::max(worst, std::abs(beta_constant(alpha, p) - oracle) / std::abs(oracle));
    }
    ok = ok && worst <= 1e-6;
    const double pi_err = std::abs(beta_constant(0.25, 2.0) - M_PI) / M_PI;
    ok = ok && pi_err <= 1e-6;
    detail += "beta vs quadrature worst rel " + fmtg(worst);
  }

  // identity-modulus closed form over a 50-point sweep
  {
    const auto lin = ModulusOfContinuity::linear(1.0);
    GaussianStream stream(515151);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      BihariParams bp;
      bp.a = 0.1 + 2.0 * stream.uniform();
      bp.b_coef = 0.1 + 0.45 * stream.uniform();
      bp.p = 1.5 + 0.25 * stream.uniform();
      // p alpha <= 0.9 keeps exp(growth) inside double range
      bp.alpha = 0.505 + (std::min(0.9 / bp.p, 1.0 / bp.p - 0.01) - 0.505) * stream.uniform();
      bp.q = bp.p / (bp.p - 1.0);
      bp.rho = lin;
      bp.t = 0.05 + stream.uniform();
      const auto ev = bihari_bound(bp);
      if (!ev.in_domain) {
        ok = false;
        continue;
      }
      const double growth = std::pow(2.0, bp.q - 1.0) * std::pow(bp.b_coef, bp.q) *
                            std::pow(ev.c_alpha_p, bp.q / bp.p) *
                            std::pow(bp.t, bp.q * (1.0 / bp.p - bp.alpha) + 1.0);
      const double want = std::pow(
          std::pow(2.0, bp.q - 1.0) * std::pow(bp.a, bp.q) * std::exp(growth), 1.0 / bp.q);
      worst = std::max(worst, std::abs(ev.bound - want) / want);
    }
    ok = ok && worst <= 1e-9;
    detail += ", exp closed form worst rel " + fmtg(worst);
  }

  // a = 0 collapses exactly
  {
    BihariParams bp;
    bp.a = 0.0;
    bp.b_coef = 2.0;
    bp.alpha = 0.55;
    bp.p = 1.6;
    bp.q = 8.0 / 3.0;
    bp.rho = ModulusOfContinuity::rho1_modulus(8.0 / 3.0, 0.2);
    bp.t = 0.75;
    const auto ev = bihari_bound(bp);
    ok = ok && ev.in_domain && ev.bound == 0.0;
  }

  // F / F^{-1} round trip over [1e-6, 1e3]
  {
    const auto r1 = ModulusOfContinuity::rho1_modulus(2.0, 0.2);
    GaussianStream stream(808);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double x = std::pow(10.0, -6.0 + 9.0 * stream.uniform());
      const double y = barrier_F(x, r1, 2.0);
      const auto back = barrier_F_inverse(y, r1, 2.0);
      if (!back) {
        ok = false;
        continue;
      }
      worst = std::max(worst, std::abs(*back - x) / x);
    }
    ok = ok && worst <= 1e-8;
    detail += ", roundtrip worst rel " + fmtg(worst);
  }
  report(7, "Bihari bound oracles", ok, detail);
}

// --------------------------------------------------------------------------
// 8. Moduli probes and the divergence diagnostic.
// --------------------------------------------------------------------------
void criterion_8() {
  bool ok = true;
  const auto r1 = ModulusOfContinuity::rho1_modulus(2.0, 0.2);
  const auto r2 = ModulusOfContinuity::rho2_modulus(2.0, 0.1);
  GaussianStream stream(321);
  for (const auto& [rho, delta] : {std::pair{&r1, 0.2}, std::pair{&r2, 0.1}}) {
    for (int k = 0; k < 10000; ++k) {
      const double u = stream.uniform() * delta;
      const double v = stream.uniform() * delta;
      if ((*rho)((u + v) / 2.0) < 0.5 * ((*rho)(u) + (*rho)(v)) - 1e-12) ok = false;
      const double lo = std::min(u, v) * 6.0, hi = std::max(u, v) * 6.0;
      if ((*rho)(hi) < (*rho)(lo) - 1e-12) ok = false;
    }
  }
  double min_step = 1e300;
  for (const auto* rho : {&r1, &r2}) {
    double prev = 0.0;
    for (int k = 1; k <= 12; ++k) {
      const double v = std::abs(barrier_F(std::pow(10.0, -k), *rho, 2.0));
      if (!(v > prev)) ok = false;
      min_step = std::min(min_step, v - prev);
      prev = v;
    }
  }
  report(8, "moduli concavity/monotonicity and divergence diagnostic", ok,
         "10^4 samples each, min |F| increment " + fmtg(min_step));
}

// --------------------------------------------------------------------------
// 9. Bit-identical reports across worker counts.
// --------------------------------------------------------------------------
void criterion_9() {
  const auto s1 = criterion_5_run(1);
  const auto s4 = criterion_5_run(4);
  const std::string r1 = s1.to_json().dump(2) + "\n" + s1.summary_csv();
  const std::string r4 = s4.to_json().dump(2) + "\n" + s4.summary_csv();
  const bool ok = r1 == r4;
  report(9, "determinism across worker counts {1,4}", ok,
         ok ? "report bytes identical" : "reports differ");
}

}  // namespace

int main() {
  std::printf("mixedsde acceptance suite\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", g_failures);
  return 1;
}
