#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "boltzlab/evolution.hpp"
#include "boltzlab/inequality_lab.hpp"

namespace boltzlab {

std::string sha256_hex(const std::string& bytes);

enum class ResolutionTier { Smoke, Standard, Deep };

const char* tier_name(ResolutionTier tier);
ResolutionTier tier_from_name(const std::string& name);

/// Central resolution table: grid nodes per axis and Monte Carlo samples.
struct TierSettings {
  int grid_n = 32;
  std::size_t mc_samples = 10000;
};
TierSettings tier_settings(ResolutionTier tier);

/// Parsed and validated run configuration (single JSON document; unknown
/// keys rejected). Defaults follow the tier table.
struct RunConfig {
  ResolutionTier tier = ResolutionTier::Smoke;

  // kernel
  double gamma = 0.0;
  std::string b_profile = "constant";  // constant | one_plus_cos
  double cutoff_K = 0.5;

  // grid
  double v_max = 8.0;
  std::optional<int> n_per_axis;  // overrides the tier default

  // sphere
  int n_theta = 32;
  int n_phi = 64;

  // mc
  std::optional<std::size_t> mc_samples;
  std::uint64_t seed = 1;

  // verify
  std::vector<std::string> subset;

  // evolve block
  struct EvolveBlock {
    std::string mode = "linearized";  // linearized | nonlinear
    double dt = 0.05;
    double t_end = 1.0;
    std::vector<double> monitor_k{0.0};
    std::optional<double> monitor_a;
    std::optional<double> monitor_b;
    std::string initial = "sonine2";  // sonine2 | sonine3-mix | poly-tail
    double amplitude = 0.05;
    double tail_exponent = 13.5;      // poly-tail initial data
    std::string fit_model;            // empty = regime dispatch by gamma
  } evolve;

  std::string output_dir = "runs";
  std::string cache_dir = "cache";

  std::string canonical_json() const;  // deterministic serialisation
  std::string run_id() const;          // content hash (config + version)

  CollisionKernelSpec kernel_spec() const;
  int grid_n() const;
  std::size_t samples() const;
  LabContext lab_context() const;

  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_file(const std::string& path);
};

extern const char* kToolVersion;

struct RunManifest {
  std::string run_id;
  std::string tool_version;
  std::string created_utc;                       // informational only
  std::vector<std::pair<std::string, std::string>> files;  // path, sha256
};

/// Writers. All numeric output uses %.17g so reruns are byte-identical.
std::string fit_reports_json(const RunConfig& config,
                             const std::vector<FitReport>& fits,
                             const std::vector<IdentityCheck>& identities);
std::string fit_reports_csv(const std::vector<FitReport>& fits);
std::string decay_series_csv(const DecaySeries& series);
std::string rate_fit_json(const RunConfig& config, const RateFit& fit,
                          const DecaySeries& series);

/// Writes content and records it in the manifest.
void write_output(RunManifest& manifest, const std::string& dir,
                  const std::string& name, const std::string& content);
void write_manifest(const RunManifest& manifest, const std::string& dir);

/// Re-hashes the files of a stored run; returns mismatching paths.
std::vector<std::string> verify_run_directory(const std::string& dir);

}  // namespace boltzlab
