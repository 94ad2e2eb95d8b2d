#include "boltzlab/reporting.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace boltzlab {

using nlohmann::json;

const char* kToolVersion = "boltzlab 0.1.0";

const char* tier_name(ResolutionTier tier) {
  switch (tier) {
    case ResolutionTier::Smoke: return "smoke";
    case ResolutionTier::Standard: return "standard";
    case ResolutionTier::Deep: return "deep";
  }
  return "unknown";
}

ResolutionTier tier_from_name(const std::string& name) {
  if (name == "smoke") return ResolutionTier::Smoke;
  if (name == "standard") return ResolutionTier::Standard;
  if (name == "deep") return ResolutionTier::Deep;
  fail(ErrorCode::ConfigError, "unknown resolution tier '" + name + "'");
}

TierSettings tier_settings(ResolutionTier tier) {
  switch (tier) {
    case ResolutionTier::Smoke: return {32, 10000};
    case ResolutionTier::Standard: return {64, 100000};
    case ResolutionTier::Deep: return {96, 1000000};
  }
  return {32, 10000};
}

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void require_keys(const json& j, const std::vector<std::string>& allowed,
                  const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed) ok = ok || it.key() == k;
    if (!ok) {
      fail(ErrorCode::ConfigError, "unknown key '" + it.key() + "' in " + where);
    }
  }
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::ConfigError, std::string("invalid JSON: ") + e.what());
  }
  RunConfig cfg;
  require_keys(j, {"tier", "kernel", "grid", "sphere", "mc", "verify", "evolve",
                   "output_dir", "cache_dir"},
               "config");
  if (j.contains("tier")) cfg.tier = tier_from_name(j["tier"].get<std::string>());
  if (j.contains("kernel")) {
    const auto& k = j["kernel"];
    require_keys(k, {"gamma", "b_profile", "K"}, "kernel");
    if (k.contains("gamma")) cfg.gamma = k["gamma"].get<double>();
    if (k.contains("b_profile")) cfg.b_profile = k["b_profile"].get<std::string>();
    if (k.contains("K")) cfg.cutoff_K = k["K"].get<double>();
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    require_keys(g, {"v_max", "n_per_axis"}, "grid");
    if (g.contains("v_max")) cfg.v_max = g["v_max"].get<double>();
    if (g.contains("n_per_axis")) cfg.n_per_axis = g["n_per_axis"].get<int>();
  }
  if (j.contains("sphere")) {
    const auto& s = j["sphere"];
    require_keys(s, {"n_theta", "n_phi"}, "sphere");
    if (s.contains("n_theta")) cfg.n_theta = s["n_theta"].get<int>();
    if (s.contains("n_phi")) cfg.n_phi = s["n_phi"].get<int>();
  }
  if (j.contains("mc")) {
    const auto& m = j["mc"];
    require_keys(m, {"samples", "seed"}, "mc");
    if (m.contains("samples")) cfg.mc_samples = m["samples"].get<std::size_t>();
    if (m.contains("seed")) cfg.seed = m["seed"].get<std::uint64_t>();
  }
  if (j.contains("verify")) {
    const auto& v = j["verify"];
    require_keys(v, {"subset"}, "verify");
    if (v.contains("subset")) {
      for (const auto& id : v["subset"]) cfg.subset.push_back(id.get<std::string>());
    }
  }
  if (j.contains("evolve")) {
    const auto& e = j["evolve"];
    require_keys(e,
                 {"mode", "dt", "t_end", "monitor_k", "monitor_a", "monitor_b",
                  "initial", "amplitude", "tail_exponent", "fit_model"},
                 "evolve");
    if (e.contains("mode")) cfg.evolve.mode = e["mode"].get<std::string>();
    if (e.contains("dt")) cfg.evolve.dt = e["dt"].get<double>();
    if (e.contains("t_end")) cfg.evolve.t_end = e["t_end"].get<double>();
    if (e.contains("monitor_k")) {
      cfg.evolve.monitor_k.clear();
      for (const auto& k : e["monitor_k"]) cfg.evolve.monitor_k.push_back(k.get<double>());
    }
    if (e.contains("monitor_a")) cfg.evolve.monitor_a = e["monitor_a"].get<double>();
    if (e.contains("monitor_b")) cfg.evolve.monitor_b = e["monitor_b"].get<double>();
    if (e.contains("initial")) cfg.evolve.initial = e["initial"].get<std::string>();
    if (e.contains("amplitude")) cfg.evolve.amplitude = e["amplitude"].get<double>();
    if (e.contains("tail_exponent")) cfg.evolve.tail_exponent = e["tail_exponent"].get<double>();
    if (e.contains("fit_model")) cfg.evolve.fit_model = e["fit_model"].get<std::string>();
  }
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("cache_dir")) cfg.cache_dir = j["cache_dir"].get<std::string>();

  // Validate module preconditions up front.
  cfg.kernel_spec().validate();
  if (cfg.grid_n() < 8) fail(ErrorCode::ConfigError, "n_per_axis must be >= 8");
  if (!(cfg.v_max > 0.0)) fail(ErrorCode::ConfigError, "v_max must be positive");
  if (cfg.n_theta < 1 || cfg.n_phi < 1) {
    fail(ErrorCode::ConfigError, "sphere rule sizes must be positive");
  }
  if (cfg.evolve.mode != "linearized" && cfg.evolve.mode != "nonlinear") {
    fail(ErrorCode::ConfigError, "evolve.mode must be linearized or nonlinear");
  }
  if (!(cfg.evolve.dt > 0.0) || !(cfg.evolve.t_end > 0.0)) {
    fail(ErrorCode::ConfigError, "evolve.dt and evolve.t_end must be positive");
  }
  if (cfg.evolve.monitor_a && !(cfg.evolve.monitor_b && *cfg.evolve.monitor_b > 0.0 &&
                                *cfg.evolve.monitor_b < 2.0)) {
    fail(ErrorCode::ConfigError, "exponential monitor needs b in (0, 2)");
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string RunConfig::canonical_json() const {
  json j;
  j["tier"] = tier_name(tier);
  j["kernel"] = {{"gamma", gamma}, {"b_profile", b_profile}, {"K", cutoff_K}};
  j["grid"] = {{"v_max", v_max}, {"n_per_axis", grid_n()}};
  j["sphere"] = {{"n_theta", n_theta}, {"n_phi", n_phi}};
  j["mc"] = {{"samples", samples()}, {"seed", seed}};
  j["verify"] = {{"subset", subset}};
  j["evolve"] = {{"mode", evolve.mode},
                 {"dt", evolve.dt},
                 {"t_end", evolve.t_end},
                 {"monitor_k", evolve.monitor_k},
                 {"initial", evolve.initial},
                 {"amplitude", evolve.amplitude},
                 {"tail_exponent", evolve.tail_exponent},
                 {"fit_model", evolve.fit_model}};
  if (evolve.monitor_a) {
    j["evolve"]["monitor_a"] = *evolve.monitor_a;
    j["evolve"]["monitor_b"] = *evolve.monitor_b;
  }
  return j.dump();  // nlohmann orders keys deterministically
}

std::string RunConfig::run_id() const {
  return sha256_hex(canonical_json() + "|" + kToolVersion).substr(0, 16);
}

CollisionKernelSpec RunConfig::kernel_spec() const {
  CollisionKernelSpec spec;
  spec.gamma = gamma;
  if (b_profile == "constant") {
    spec.angular_profile = AngularProfile::constant(1.0);
  } else if (b_profile == "one_plus_cos") {
    spec.angular_profile = AngularProfile::one_plus_cos();
    spec.cutoff_lower = std::min(cutoff_K, 0.4);
  } else {
    fail(ErrorCode::ConfigError, "unknown b_profile '" + b_profile + "'");
  }
  spec.cutoff_lower = std::min(spec.cutoff_lower, cutoff_K);
  spec.support_restricted = true;
  return spec;
}

int RunConfig::grid_n() const {
  return n_per_axis ? *n_per_axis : tier_settings(tier).grid_n;
}

std::size_t RunConfig::samples() const {
  return mc_samples ? *mc_samples : tier_settings(tier).mc_samples;
}

LabContext RunConfig::lab_context() const {
  LabContext ctx;
  ctx.grid_n = grid_n();
  ctx.v_max = v_max;
  ctx.mc_samples = samples();
  ctx.seed = seed;
  ctx.sphere_n_theta = std::min(n_theta, 12);
  ctx.sphere_n_phi = std::min(n_phi, 24);
  ctx.cache_dir = cache_dir;
  return ctx;
}

namespace {

json fit_to_json(const FitReport& r) {
  json e;
  e["id"] = r.id;
  e["pass"] = r.pass;
  e["constants"] = r.constants;
  e["residual"] = r.residual;
  e["diagnostics"] = {{"worst_ratio", r.worst_ratio},
                      {"worst_location", r.worst_location},
                      {"notes", r.diagnostics}};
  if (r.scaling_exponent) {
    e["diagnostics"]["scaling_exponent"] = *r.scaling_exponent;
    e["diagnostics"]["scaling_expected"] = *r.scaling_expected;
  }
  json groups = json::array();
  for (const auto& g : r.groups) {
    groups.push_back({{"param", g.param},
                      {"constants", g.constants},
                      {"worst_ratio", g.worst_ratio},
                      {"residual", g.residual}});
  }
  e["groups"] = groups;
  return e;
}

}  // namespace

std::string fit_reports_json(const RunConfig& config,
                             const std::vector<FitReport>& fits,
                             const std::vector<IdentityCheck>& identities) {
  json j;
  j["run_id"] = config.run_id();
  j["seed"] = config.seed;
  j["resolution_tier"] = tier_name(config.tier);
  j["tool_version"] = kToolVersion;
  json entries = json::array();
  for (const auto& f : fits) entries.push_back(fit_to_json(f));
  j["entries"] = entries;
  json ids = json::array();
  for (const auto& c : identities) {
    ids.push_back({{"id", c.id},
                   {"gamma", c.gamma},
                   {"lhs", c.lhs},
                   {"lhs_se", c.lhs_se},
                   {"rhs", c.rhs},
                   {"rhs_se", c.rhs_se},
                   {"z", c.z},
                   {"pass", c.pass}});
  }
  j["identities"] = ids;
  return j.dump(2) + "\n";
}

std::string fit_reports_csv(const std::vector<FitReport>& fits) {
  std::ostringstream out;
  out << "entry_id,param,value,lhs,rhs,ratio\n";
  for (const auto& f : fits) {
    for (const auto& g : f.groups) {
      // One row per group: fitted envelope against the worst probe.
      const double rhs = g.worst_ratio > 0.0 ? 1.0 : 0.0;
      out << f.id << "," << fmt(g.param) << "," << fmt(g.worst_location) << ","
          << fmt(g.worst_ratio) << "," << fmt(rhs) << "," << fmt(g.worst_ratio)
          << "\n";
    }
  }
  return out.str();
}

std::string decay_series_csv(const DecaySeries& series) {
  std::ostringstream out;
  out << "t";
  for (const auto& label : series.norm_labels) out << "," << label;
  out << ",mass_drift,momentum_drift,energy_drift,entropy\n";
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    out << fmt(series.times[i]);
    for (const auto& col : series.norms) out << "," << fmt(col[i]);
    out << "," << fmt(series.mass_drift[i]) << "," << fmt(series.momentum_drift[i])
        << "," << fmt(series.energy_drift[i]) << ","
        << fmt(series.entropy.empty() ? 0.0 : series.entropy[i]) << "\n";
  }
  return out.str();
}

std::string rate_fit_json(const RunConfig& config, const RateFit& fit,
                          const DecaySeries& series) {
  json j;
  j["run_id"] = config.run_id();
  j["model"] = decay_model_name(fit.model);
  j["parameter"] = fit.parameter;
  j["amplitude"] = fit.amplitude;
  j["r_squared"] = fit.r_squared;
  j["window"] = {{"lo", fit.window_lo}, {"hi", fit.window_hi},
                 {"samples", fit.samples_used}};
  j["entropy_monotone"] = series.entropy_monotone;
  j["used_symmetry_reduction"] = series.used_symmetry_reduction;
  return j.dump(2) + "\n";
}

void write_output(RunManifest& manifest, const std::string& dir,
                  const std::string& name, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  const std::string path = dir + "/" + name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << content;
  manifest.files.emplace_back(name, sha256_hex(content));
}

void write_manifest(const RunManifest& manifest, const std::string& dir) {
  json j;
  j["run_id"] = manifest.run_id;
  j["tool_version"] = manifest.tool_version;
  j["created_utc"] = manifest.created_utc;
  json files = json::array();
  for (const auto& [name, hash] : manifest.files) {
    files.push_back({{"name", name}, {"sha256", hash}});
  }
  j["files"] = files;
  std::ofstream out(dir + "/manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write manifest in " + dir);
  out << j.dump(2) << "\n";
}

std::vector<std::string> verify_run_directory(const std::string& dir) {
  std::ifstream in(dir + "/manifest.json");
  if (!in) fail(ErrorCode::IoError, "no manifest in " + dir);
  json j;
  in >> j;
  std::vector<std::string> bad;
  for (const auto& f : j["files"]) {
    const std::string name = f["name"].get<std::string>();
    std::ifstream file(dir + "/" + name, std::ios::binary);
    if (!file) {
      bad.push_back(name + " (missing)");
      continue;
    }
    std::stringstream ss;
    ss << file.rdbuf();
    if (sha256_hex(ss.str()) != f["sha256"].get<std::string>()) {
      bad.push_back(name);
    }
  }
  return bad;
}

}  // namespace boltzlab
