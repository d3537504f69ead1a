#pragma once

// Declarative experiment configuration (TOML or JSON, one schema).
// Coefficients come from a named preset or an inline parametrized family;
// arbitrary user code is not expressible in a config file.

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixedsde/coefficients.hpp"
#include "mixedsde/frac_calc.hpp"
#include "mixedsde/gauss_drivers.hpp"
#include "mixedsde/harness/toml_lite.hpp"

namespace mixedsde::harness {

enum class ExperimentKind { kConvergence, kUniqueness, kMoment, kAudit, kBihariEval };

inline ExperimentKind parse_kind(const std::string& s) {
  if (s == "convergence") return ExperimentKind::kConvergence;
  if (s == "uniqueness") return ExperimentKind::kUniqueness;
  if (s == "moment") return ExperimentKind::kMoment;
  if (s == "audit") return ExperimentKind::kAudit;
  if (s == "bihari-eval") return ExperimentKind::kBihariEval;
  throw std::invalid_argument("config: unknown experiment kind '" + s + "'");
}

inline std::string kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kConvergence: return "convergence";
    case ExperimentKind::kUniqueness: return "uniqueness";
    case ExperimentKind::kMoment: return "moment";
    case ExperimentKind::kAudit: return "audit";
    case ExperimentKind::kBihariEval: return "bihari-eval";
  }
  return "?";
}

inline ModulusOfContinuity modulus_from_json(const nlohmann::json& j) {
  const std::string kind = j.value("kind", "linear");
  if (kind == "rho1") {
    return ModulusOfContinuity::rho1_modulus(j.value("q", 2.0), j.value("delta", 0.2));
  }
  if (kind == "rho2") {
    return ModulusOfContinuity::rho2_modulus(j.value("q", 2.0), j.value("delta", 0.1));
  }
  if (kind == "linear") return ModulusOfContinuity::linear(j.value("slope", 1.0));
  throw std::invalid_argument("config: unknown modulus kind '" + kind + "'");
}

/// Inline coefficient family: scalar SDE with
///   b(t,x) = drift_const + drift_linear x,
///   sigma_W = sigma_w_const, sigma_H = sigma_h_scale (1 + sin(sigma_h_freq x)).
inline CoefficientSet coefficients_from_json(const nlohmann::json& j) {
  CoefficientSet cs;
  cs.name = j.value("family", "affine");
  const double b0 = j.value("drift_const", 0.0);
  const double b1 = j.value("drift_linear", -1.0);
  const double sw = j.value("sigma_w_const", 0.5);
  const double sh = j.value("sigma_h_scale", 0.5);
  const double freq = j.value("sigma_h_freq", 1.0);
  cs.drift = [b0, b1](double, std::span<const double> x, std::span<double> out) {
    out[0] = b0 + b1 * x[0];
  };
  cs.sigma_w = [sw](double, std::span<const double>, std::span<double> out) { out[0] = sw; };
  cs.sigma_h = [sh, freq](double, std::span<const double> x, std::span<double> out) {
    out[0] = sh * (1.0 + std::sin(freq * x[0]));
  };
  cs.dsigma_h = [sh, freq](double, std::span<const double> x, std::span<double> out) {
    out[0] = sh * freq * std::cos(freq * x[0]);
  };
  cs.growth_k = j.value("growth_k", std::max({1.0, std::abs(b0) + std::abs(b1), sw, sh * freq}));
  cs.beta = j.value("beta", 1.0);
  cs.modulus = j.contains("modulus") ? modulus_from_json(j.at("modulus"))
                                     : ModulusOfContinuity::linear(
                                           std::max(b1 * b1, sh * freq * sh * freq) + 1e-9);
  cs.default_x0 = {j.value("x0", 0.0)};
  cs.validate();
  return cs;
}

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kConvergence;
  std::string preset = "linear";       // ignored when inline_coefficients is set
  nlohmann::json inline_coefficients;  // optional family spec
  double alpha = 0.3;
  double hurst = 0.75;
  double beta = 1.0;
  double mu = 0.5;
  std::vector<std::size_t> grid_sizes = {64, 128, 256, 512, 1024};
  std::size_t ensemble = 200;
  std::uint64_t master_seed = 12345;
  std::optional<double> truncation_r;
  std::string output_dir = "out";
  std::size_t workers = 0;  // 0: hardware concurrency
  double horizon = 1.0;
  std::vector<double> x0;  // empty: preset default
  bool allow_inadmissible = false;
  bool dump_paths = false;
  FbmMethod fbm_method = FbmMethod::kCirculantFft;
  // audit study
  std::size_t audit_cases = 100;
  std::size_t audit_nodes = 4096;
  // moment study
  unsigned moment_power = 1;
  double moment_time = 1.0;
  double moment_stability_tol = 0.25;
  // bihari-eval passthrough block
  nlohmann::json bihari_params;

  CoefficientSet coefficients() const {
    if (!inline_coefficients.is_null() && !inline_coefficients.empty()) {
      return coefficients_from_json(inline_coefficients);
    }
    return make_preset(preset);
  }

  FracOrder frac_order() const {
    if (allow_inadmissible) return FracOrder(alpha, HurstParameter(hurst), beta, mu);
    auto cs = coefficients();
    return FracOrder::for_sde(alpha, HurstParameter(hurst), std::min(beta, cs.beta), mu);
  }

  std::vector<double> initial_state() const {
    if (!x0.empty()) return x0;
    auto cs = coefficients();
    if (!cs.default_x0.empty()) return cs.default_x0;
    return std::vector<double>(cs.state_dim, 0.0);
  }

  void validate() const {
    if (grid_sizes.empty()) throw std::invalid_argument("config: grid_sizes must be nonempty");
    for (std::size_t i = 1; i < grid_sizes.size(); ++i) {
      if (grid_sizes[i] <= grid_sizes[i - 1]) {
        throw std::invalid_argument("config: grid_sizes must be strictly increasing");
      }
    }
    for (std::size_t g : grid_sizes) {
      if (grid_sizes.back() % g != 0) {
        throw std::invalid_argument(
            "config: every grid size must divide the finest one (common-node comparisons)");
      }
    }
    if (ensemble < 1) throw std::invalid_argument("config: ensemble size must be >= 1");
    if (!(horizon > 0.0)) throw std::invalid_argument("config: horizon must be positive");
    if (truncation_r && !(*truncation_r > 0.0)) {
      throw std::invalid_argument("config: truncation_r must be positive");
    }
    frac_order();  // throws when inadmissible and no override
  }
};

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (j.contains("experiment")) cfg.kind = parse_kind(j.at("experiment").get<std::string>());
  cfg.preset = j.value("preset", cfg.preset);
  if (j.contains("coefficients")) cfg.inline_coefficients = j.at("coefficients");
  if (j.contains("frac_order")) {
    const auto& fo = j.at("frac_order");
    cfg.alpha = fo.value("alpha", cfg.alpha);
    cfg.hurst = fo.value("h", cfg.hurst);
    cfg.beta = fo.value("beta", cfg.beta);
    cfg.mu = fo.value("mu", cfg.mu);
  }
  if (j.contains("grid_sizes")) {
    cfg.grid_sizes.clear();
    for (const auto& v : j.at("grid_sizes")) cfg.grid_sizes.push_back(v.get<std::size_t>());
  }
  cfg.ensemble = j.value("ensemble", cfg.ensemble);
  cfg.master_seed = j.value("master_seed", cfg.master_seed);
  if (j.contains("truncation_r") && !j.at("truncation_r").is_null()) {
    cfg.truncation_r = j.at("truncation_r").get<double>();
  }
  cfg.output_dir = j.value("output_dir", cfg.output_dir);
  cfg.workers = j.value("workers", cfg.workers);
  cfg.horizon = j.value("horizon", cfg.horizon);
  if (j.contains("x0")) {
    if (j.at("x0").is_array()) {
      cfg.x0 = j.at("x0").get<std::vector<double>>();
    } else {
      cfg.x0 = {j.at("x0").get<double>()};
    }
  }
  cfg.allow_inadmissible = j.value("allow_inadmissible", false);
  cfg.dump_paths = j.value("dump_paths", false);
  const std::string method = j.value("fbm_method", "circulant-fft");
  if (method == "circulant-fft") {
    cfg.fbm_method = FbmMethod::kCirculantFft;
  } else if (method == "cholesky") {
    cfg.fbm_method = FbmMethod::kCholesky;
  } else {
    throw std::invalid_argument("config: unknown fbm_method '" + method + "'");
  }
  cfg.audit_cases = j.value("audit_cases", cfg.audit_cases);
  cfg.audit_nodes = j.value("audit_nodes", cfg.audit_nodes);
  cfg.moment_power = j.value("moment_power", cfg.moment_power);
  cfg.moment_time = j.value("moment_time", cfg.moment_time);
  cfg.moment_stability_tol = j.value("moment_stability_tol", cfg.moment_stability_tol);
  if (j.contains("bihari")) cfg.bihari_params = j.at("bihari");
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(parse_config_text(ss.str()));
}

}  // namespace mixedsde::harness
