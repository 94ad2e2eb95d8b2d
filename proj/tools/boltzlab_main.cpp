// Command-line front end: deterministic verification, probe, and evolution
// runs with content-addressed output directories.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "boltzlab/reporting.hpp"

namespace {

using namespace boltzlab;

constexpr int kExitPass = 0;
constexpr int kExitNumericFailure = 1;
constexpr int kExitConfigError = 2;

RunManifest make_manifest(const RunConfig& cfg) {
  RunManifest m;
  m.run_id = cfg.run_id();
  m.tool_version = kToolVersion;
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  m.created_utc = buf;
  return m;
}

int cmd_verify(const RunConfig& cfg) {
  const std::string dir = cfg.output_dir + "/" + cfg.run_id();
  RunManifest manifest = make_manifest(cfg);

  std::vector<IdentityCheck> identities;
  MonteCarloPlan plan;
  plan.sample_count = cfg.samples();
  plan.seed = cfg.seed;
  for (const auto& id : identity_ids()) {
    // The singular change of variables has finite variance only for
    // gamma < -1; it runs on its validity domain.
    const double gamma = id == "singular-cov" ? std::min(cfg.gamma, -1.5) : cfg.gamma;
    identities.push_back(run_identity(id, plan, gamma));
  }

  const std::vector<FitReport> fits = run_registry(cfg.subset, cfg.lab_context());

  write_output(manifest, dir, "report.json",
               fit_reports_json(cfg, fits, identities));
  write_output(manifest, dir, "probes_" + cfg.run_id() + ".csv",
               fit_reports_csv(fits));
  write_manifest(manifest, dir);

  bool all_pass = true;
  for (const auto& f : fits) {
    std::printf("%-12s %s\n", f.id.c_str(), f.pass ? "pass" : "FAIL");
    all_pass = all_pass && f.pass;
  }
  for (const auto& c : identities) {
    std::printf("%-12s z=%+.3f %s\n", c.id.c_str(), c.z, c.pass ? "pass" : "FAIL");
    all_pass = all_pass && c.pass;
  }
  std::printf("reports: %s\n", dir.c_str());
  return all_pass ? kExitPass : kExitNumericFailure;
}

int cmd_probe(const RunConfig& cfg, const std::string& entry) {
  const std::string dir = cfg.output_dir + "/" + cfg.run_id();
  RunManifest manifest = make_manifest(cfg);
  FitReport report = probe_bound(entry, cfg.lab_context());
  write_output(manifest, dir, "report.json", fit_reports_json(cfg, {report}, {}));
  write_output(manifest, dir, "probes_" + cfg.run_id() + ".csv",
               fit_reports_csv({report}));
  write_manifest(manifest, dir);
  std::printf("%-12s %s (worst ratio %.6g at |v|=%.4g)\n", report.id.c_str(),
              report.pass ? "pass" : "FAIL", report.worst_ratio,
              report.worst_location);
  std::printf("reports: %s\n", dir.c_str());
  return report.pass ? kExitPass : kExitNumericFailure;
}

int cmd_evolve(const RunConfig& cfg) {
  const std::string dir = cfg.output_dir + "/" + cfg.run_id();
  RunManifest manifest = make_manifest(cfg);

  auto grid = std::make_shared<VelocityGrid>(cfg.v_max, cfg.grid_n());
  EvolutionConfig econfig;
  econfig.spec = cfg.kernel_spec();
  econfig.mode = cfg.evolve.mode == "nonlinear" ? EvolveMode::Nonlinear
                                                : EvolveMode::Linearized;
  econfig.dt = cfg.evolve.dt;
  econfig.t_end = cfg.evolve.t_end;
  econfig.cache_dir = cfg.cache_dir;
  econfig.monitor_norms.clear();
  for (double k : cfg.evolve.monitor_k) {
    WeightContext w;
    w.k = k;
    if (cfg.evolve.monitor_a) {
      w.a = cfg.evolve.monitor_a;
      w.b_exp = cfg.evolve.monitor_b;
    }
    econfig.monitor_norms.push_back(std::move(w));
  }
  Distribution f0 = make_initial_state(grid, cfg.evolve.initial,
                                       cfg.evolve.amplitude,
                                       cfg.evolve.tail_exponent);
  DecaySeries series = evolve(econfig, f0);

  // Regime dispatch: hard and Maxwellian potentials decay exponentially,
  // soft potentials algebraically under polynomial weights and
  // stretched-exponentially under exponential weights.
  DecayModel model;
  if (!cfg.evolve.fit_model.empty()) {
    if (cfg.evolve.fit_model == "exponential") model = DecayModel::Exponential;
    else if (cfg.evolve.fit_model == "algebraic") model = DecayModel::Algebraic;
    else if (cfg.evolve.fit_model == "stretched") model = DecayModel::StretchedExponential;
    else fail(ErrorCode::ConfigError, "unknown fit_model");
  } else if (cfg.gamma >= 0.0) {
    model = DecayModel::Exponential;
  } else if (cfg.evolve.monitor_a) {
    model = DecayModel::StretchedExponential;
  } else {
    model = DecayModel::Algebraic;
  }
  RateFit fit = fit_decay(series, model, 0);

  write_output(manifest, dir, "series_" + cfg.run_id() + ".csv",
               decay_series_csv(series));
  write_output(manifest, dir, "rate_fit.json", rate_fit_json(cfg, fit, series));
  write_manifest(manifest, dir);

  std::printf("model=%s parameter=%.6g R2=%.6f window=[%.3g, %.3g]\n",
              decay_model_name(fit.model), fit.parameter, fit.r_squared,
              fit.window_lo, fit.window_hi);
  if (econfig.mode == EvolveMode::Nonlinear && !series.entropy_monotone) {
    std::printf("entropy monotonicity violated (max rise %.3g)\n",
                series.max_entropy_increase);
    return kExitNumericFailure;
  }
  std::printf("reports: %s\n", dir.c_str());
  return kExitPass;
}

int cmd_report(const std::string& output_dir, const std::string& run_id) {
  const std::string dir = output_dir + "/" + run_id;
  const auto bad = verify_run_directory(dir);
  if (bad.empty()) {
    std::printf("run %s: all files match their recorded hashes\n", run_id.c_str());
    return kExitPass;
  }
  for (const auto& name : bad) {
    std::printf("run %s: MISMATCH %s\n", run_id.c_str(), name.c_str());
  }
  return kExitNumericFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical workbench for the cutoff Boltzmann collision "
               "operator near equilibrium"};
  app.require_subcommand(1);

  std::string config_path, tier_override, entry_id, run_id;
  std::vector<std::string> subset_override;
  std::string report_dir = "runs";

  auto* verify = app.add_subcommand("verify", "identity checks + bound registry");
  verify->add_option("--config", config_path, "JSON config")->required();
  verify->add_option("--subset", subset_override, "registry entry ids");
  verify->add_option("--tier", tier_override, "smoke|standard|deep");

  auto* probe = app.add_subcommand("probe", "one registry entry");
  probe->add_option("entry", entry_id, "registry entry id")->required();
  probe->add_option("--config", config_path, "JSON config")->required();
  probe->add_option("--tier", tier_override, "smoke|standard|deep");

  auto* evolve_cmd = app.add_subcommand("evolve", "homogeneous evolution + rate fit");
  evolve_cmd->add_option("--config", config_path, "JSON config")->required();
  evolve_cmd->add_option("--tier", tier_override, "smoke|standard|deep");

  auto* report = app.add_subcommand("report", "re-hash stored outputs");
  report->add_option("--run-id", run_id, "run id")->required();
  report->add_option("--output-dir", report_dir, "runs directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (report->parsed()) {
      return cmd_report(report_dir, run_id);
    }
    RunConfig cfg = RunConfig::from_file(config_path);
    if (!tier_override.empty()) cfg.tier = tier_from_name(tier_override);
    if (!subset_override.empty()) cfg.subset = subset_override;
    if (verify->parsed()) return cmd_verify(cfg);
    if (probe->parsed()) return cmd_probe(cfg, entry_id);
    if (evolve_cmd->parsed()) return cmd_evolve(cfg);
  } catch (const boltzlab::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    const auto code = e.code();
    if (code == boltzlab::ErrorCode::ConfigError ||
        code == boltzlab::ErrorCode::UnknownEntry ||
        code == boltzlab::ErrorCode::UnknownIdentity ||
        code == boltzlab::ErrorCode::IoError) {
      return kExitConfigError;
    }
    return kExitNumericFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumericFailure;
  }
  return kExitConfigError;
}
