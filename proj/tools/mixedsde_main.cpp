// mixedsde CLI: batch experiment runner.
//
//   mixedsde run <config-file> [--workers N] [--output-dir DIR] [--dump-paths]
//   mixedsde replay --seed S --level N --preset P [--kind K] [--config FILE]
//   mixedsde bihari-eval <params-file>
//
// Configs are TOML or JSON (one schema, see README). `run` exits 0 iff every
// verdict of the study passes. report.json contains only deterministic
// statistics; wall-clock and throughput go to stdout.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixedsde/mixedsde.hpp"

namespace {

using namespace mixedsde;
using namespace mixedsde::harness;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

nlohmann::json config_echo(const ExperimentConfig& cfg) {
  // deterministic config echo: no workers / output destinations
  nlohmann::json j;
  j["experiment"] = kind_name(cfg.kind);
  if (!cfg.inline_coefficients.is_null() && !cfg.inline_coefficients.empty()) {
    j["coefficients"] = cfg.inline_coefficients;
  } else {
    j["preset"] = cfg.preset;
  }
  j["frac_order"] = {{"alpha", cfg.alpha}, {"h", cfg.hurst}, {"beta", cfg.beta}, {"mu", cfg.mu}};
  j["grid_sizes"] = cfg.grid_sizes;
  j["ensemble"] = cfg.ensemble;
  j["master_seed"] = cfg.master_seed;
  j["horizon"] = cfg.horizon;
  if (cfg.truncation_r) j["truncation_r"] = *cfg.truncation_r;
  j["x0"] = cfg.initial_state();
  return j;
}

void dump_ensemble_paths(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto cs = cfg.coefficients();
  const auto x0 = cfg.initial_state();
  const std::size_t cells = cfg.kind == ExperimentKind::kUniqueness ? 3 * cfg.grid_sizes.back()
                                                                    : cfg.grid_sizes.back();
  const TimeGrid driver = TimeGrid::uniform(cfg.horizon, cells);
  const FbmSampler sampler(driver, HurstParameter(cfg.hurst), cfg.fbm_method);
  for (std::size_t i = 0; i < cfg.ensemble; ++i) {
    const std::uint64_t ps = path_seed(cfg.master_seed, i);
    const SamplePath w = sample_bm(driver, ps, cs.bm_dim);
    const SamplePath bh = sampler.sample(ps, cs.fbm_dim);
    EulerConfig ecfg{TimeGrid::uniform(cfg.horizon, cfg.grid_sizes.back()), x0, cfg.truncation_r,
                     cfg.alpha};
    const SolutionPath sol = euler_solve(cs, ecfg, w, bh);
    std::ofstream out(dir / ("seed_" + std::to_string(i) + ".csv"), std::ios::binary);
    write_csv(out, sol.path, sol.stopped_at);
  }
}

int cmd_run(const std::string& config_path, std::size_t workers_override,
            const std::string& outdir_override, bool dump_paths_flag) {
  ExperimentConfig cfg = load_config(config_path);
  if (workers_override > 0) cfg.workers = workers_override;
  if (!outdir_override.empty()) cfg.output_dir = outdir_override;
  if (dump_paths_flag) cfg.dump_paths = true;

  const std::filesystem::path outdir(cfg.output_dir);
  std::filesystem::create_directories(outdir);

  nlohmann::json report;
  report["config"] = config_echo(cfg);
  std::string summary;
  bool pass = false;
  double wall = 0.0, throughput = 0.0;

  switch (cfg.kind) {
    case ExperimentKind::kConvergence: {
      const auto study = run_convergence_study(cfg);
      report["results"] = study.to_json();
      summary = study.summary_csv();
      pass = study.pass;
      wall = study.wall_seconds;
      throughput = study.paths_per_second;
      break;
    }
    case ExperimentKind::kUniqueness: {
      const auto study = run_uniqueness_probe(cfg);
      report["results"] = study.to_json();
      summary = study.summary_csv();
      pass = study.pass;
      wall = study.wall_seconds;
      throughput = study.paths_per_second;
      break;
    }
    case ExperimentKind::kAudit: {
      const auto study = run_audit_suite(cfg);
      report["results"] = study.to_json();
      summary = study.summary_csv();
      write_text(outdir / "audit_detail.csv", study.detail_csv());
      pass = study.pass;
      wall = study.wall_seconds;
      throughput = static_cast<double>(cfg.audit_cases) / std::max(wall, 1e-9);
      break;
    }
    case ExperimentKind::kMoment: {
      const auto study = run_moment_study(cfg);
      report["results"] = study.to_json();
      summary = study.summary_csv();
      pass = study.pass;
      wall = study.wall_seconds;
      throughput = study.paths_per_second;
      break;
    }
    case ExperimentKind::kBihariEval: {
      std::fprintf(stderr, "use the bihari-eval subcommand for this config kind\n");
      return 2;
    }
  }

  report["pass"] = pass;
  write_text(outdir / "report.json", report.dump(2) + "\n");
  write_text(outdir / "summary.csv", summary);
  if (cfg.dump_paths) dump_ensemble_paths(cfg, outdir / "paths");

  std::printf("experiment: %s\n", kind_name(cfg.kind).c_str());
  std::printf("wall_seconds: %.3f\n", wall);
  std::printf("throughput: %.1f paths/s\n", throughput);
  std::printf("report: %s\n", (outdir / "report.json").string().c_str());
  std::printf("%s\n", pass ? "PASS" : "FAIL");
  return pass ? 0 : 1;
}

int cmd_replay(std::uint64_t seed, std::size_t level, const std::string& preset,
               const std::string& kind, const std::string& config_path) {
  ExperimentConfig cfg;
  if (!config_path.empty()) cfg = load_config(config_path);
  if (!preset.empty()) cfg.preset = preset;
  cfg.kind = parse_kind(kind);
  cfg.validate();

  nlohmann::json out;
  out["seed"] = seed;
  out["preset"] = cfg.preset;
  out["kind"] = kind;

  if (cfg.kind == ExperimentKind::kConvergence) {
    auto it = std::find(cfg.grid_sizes.begin(), cfg.grid_sizes.end(), level);
    if (it == cfg.grid_sizes.end() || it + 1 == cfg.grid_sizes.end()) {
      throw std::invalid_argument("replay: level must be a non-final configured grid size");
    }
    const std::size_t next = *(it + 1);
    const auto cs = cfg.coefficients();
    const auto x0 = cfg.initial_state();
    const TimeGrid driver = TimeGrid::uniform(cfg.horizon, cfg.grid_sizes.back());
    const FbmSampler sampler(driver, HurstParameter(cfg.hurst), cfg.fbm_method);
    const std::uint64_t ps = path_seed(cfg.master_seed, seed);
    const SamplePath w = sample_bm(driver, ps, cs.bm_dim);
    const SamplePath bh = sampler.sample(ps, cs.fbm_dim);
    auto solve_at = [&](std::size_t cells) {
      EulerConfig ecfg{TimeGrid::uniform(cfg.horizon, cells), x0, cfg.truncation_r, cfg.alpha};
      return euler_solve(cs, ecfg, w, bh);
    };
    const auto a = solve_at(level);
    const auto b = solve_at(next);
    out["level"] = level;
    out["next_level"] = next;
    out["censored"] = a.censored.has_value() || b.censored.has_value();
    if (!a.censored && !b.censored) {
      out["distance"] = sup_node_distance(a.path, b.path);
    }
  } else if (cfg.kind == ExperimentKind::kAudit) {
    const TimeGrid grid = TimeGrid::uniform(cfg.horizon, level ? level : cfg.audit_nodes);
    const FbmSampler sampler(grid, HurstParameter(cfg.hurst), cfg.fbm_method);
    const auto row = mixedsde::harness::detail::run_audit_case(grid, sampler, cfg.hurst, seed,
                                                               cfg.master_seed);
    out["case_id"] = row.case_id;
    out["alpha"] = row.alpha;
    out["nodes"] = row.nodes;
    out["ratio"] = row.ratio_estimate;
    out["ratio_halfgrid"] = row.ratio_halfgrid;
    out["dbound_ratio"] = row.dbound_ratio;
    out["nuaras_i"] = row.nuaras_i;
    out["nuaras_ii"] = row.nuaras_ii;
  } else if (cfg.kind == ExperimentKind::kUniqueness) {
    const auto cs = cfg.coefficients();
    const auto x0 = cfg.initial_state();
    const std::size_t a_fine = cfg.grid_sizes.back();
    const TimeGrid driver = TimeGrid::uniform(cfg.horizon, 3 * a_fine);
    const FbmSampler sampler(driver, HurstParameter(cfg.hurst), cfg.fbm_method);
    const std::uint64_t ps = path_seed(cfg.master_seed, seed);
    const SamplePath w = sample_bm(driver, ps, cs.bm_dim);
    const SamplePath bh = sampler.sample(ps, cs.fbm_dim);
    auto solve_at = [&](std::size_t cells) {
      EulerConfig ecfg{TimeGrid::uniform(cfg.horizon, cells), x0, cfg.truncation_r, cfg.alpha};
      return euler_solve(cs, ecfg, w, bh);
    };
    const auto a0 = solve_at(cfg.grid_sizes[0]);
    const auto a1 = solve_at(cfg.grid_sizes[1]);
    const auto af = solve_at(a_fine);
    const auto bf = solve_at(3 * a_fine / 2);
    out["gap"] = sup_node_distance(a0.path, a1.path);
    out["distance"] = sup_node_distance(af.path, bf.path);
    out["below"] = out["distance"].get<double>() < out["gap"].get<double>();
  } else {
    throw std::invalid_argument("replay: unsupported kind '" + kind + "'");
  }

  std::printf("%s\n", out.dump(2).c_str());
  return 0;
}

int cmd_bihari_eval(const std::string& params_path) {
  std::ifstream in(params_path);
  if (!in) throw std::runtime_error("cannot open " + params_path);
  std::stringstream ss;
  ss << in.rdbuf();
  const nlohmann::json j = parse_config_text(ss.str());

  BihariParams params;
  params.a = j.value("a", 0.0);
  params.b_coef = j.value("b", j.value("b_coef", 0.0));
  params.alpha = j.value("alpha", 0.55);
  params.p = j.value("p", 1.6);
  params.q = j.contains("q") ? j.at("q").get<double>() : params.p / (params.p - 1.0);
  params.t = j.value("t", 1.0);
  if (j.contains("rho")) params.rho = modulus_from_json(j.at("rho"));

  const auto ev = bihari_bound(params);
  nlohmann::json out;
  out["params"] = {{"a", params.a}, {"b", params.b_coef}, {"alpha", params.alpha},
                   {"p", params.p}, {"q", params.q},      {"t", params.t},
                   {"rho", params.rho.name()}};
  out["c_alpha_p"] = ev.c_alpha_p;
  if (std::isfinite(ev.f_start)) {
    out["f_start"] = ev.f_start;
    out["f_argument"] = ev.f_argument;
  } else {
    out["f_start"] = "-inf";
    out["f_argument"] = "-inf";
  }
  out["domain"] = ev.in_domain ? "ok" : "escaped-domain";
  if (ev.in_domain) out["bound"] = ev.bound;
  std::printf("%s\n", out.dump(2).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixed SDE simulation and experiment harness"};
  app.require_subcommand(1);

  std::string config_path, outdir_override, params_path;
  std::size_t workers_override = 0;
  bool dump_paths_flag = false;
  auto* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("config", config_path, "TOML or JSON experiment config")->required();
  run->add_option("--workers", workers_override, "worker thread count (0 = hardware)");
  run->add_option("--output-dir", outdir_override, "override the config output directory");
  run->add_flag("--dump-paths", dump_paths_flag, "write per-path CSVs");

  std::uint64_t replay_seed = 0;
  std::size_t replay_level = 0;
  std::string replay_preset, replay_kind = "convergence", replay_config;
  auto* replay = app.add_subcommand("replay", "re-run a single study case");
  replay->add_option("--seed", replay_seed, "seed / case index")->required();
  replay->add_option("--level", replay_level, "grid level (convergence) or nodes (audit)");
  replay->add_option("--preset", replay_preset, "coefficient preset");
  replay->add_option("--kind", replay_kind, "convergence | uniqueness | audit");
  replay->add_option("--config", replay_config, "base config file");

  auto* bihari = app.add_subcommand("bihari-eval", "evaluate the Bihari bound");
  bihari->add_option("params", params_path, "TOML or JSON parameter block")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(config_path, workers_override, outdir_override, dump_paths_flag);
    }
    if (replay->parsed()) {
      return cmd_replay(replay_seed, replay_level, replay_preset, replay_kind, replay_config);
    }
    if (bihari->parsed()) {
      return cmd_bihari_eval(params_path);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
