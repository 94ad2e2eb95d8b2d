#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "boltzlab/collision.hpp"
#include "boltzlab/gain_kernel.hpp"

namespace boltzlab {

/// Shared resources for probe evaluation at a resolution tier.
struct LabContext {
  int grid_n = 32;                 // velocity grid per axis
  double v_max = 8.0;
  std::size_t mc_samples = 10000;
  std::uint64_t seed = 1;
  int sphere_n_theta = 8;
  int sphere_n_phi = 16;
  std::string cache_dir = "cache";
  int resolution_scale = 1;        // doubled on automatic retry
};

/// One probe sample: LHS value against the envelope basis at a location.
struct ProbeSample {
  double location = 0.0;           // |v| or the scalar argument
  double lhs = 0.0;
  std::vector<double> basis;
};

/// Samples sharing one value of the swept parameter.
struct ProbeGroup {
  double param = 0.0;
  std::string param_name;
  std::vector<ProbeSample> samples;
};

struct GroupFit {
  double param = 0.0;
  std::vector<double> constants;
  double worst_ratio = 0.0;
  double worst_location = 0.0;
  double residual = 0.0;
};

struct FitReport {
  std::string id;
  bool pass = false;
  // Pass rule: nonnegative envelope constants rescaled to dominate every
  // probe (max ratio <= 1 + 1e-6); any scaling claim must match within 25%.
  std::vector<double> constants;           // of the first group (reference)
  double residual = 0.0;
  double worst_ratio = 0.0;
  double worst_location = 0.0;
  std::optional<double> scaling_exponent;  // fitted
  std::optional<double> scaling_expected;
  std::vector<GroupFit> groups;
  std::string diagnostics;
};

struct ScalingClaim {
  std::string param_name;
  double exponent = 0.0;  // expected d ln c1 / d ln param
};

struct BoundRegistryEntry {
  std::string id;
  std::string description;
  std::string paper_anchor;                   // verbatim citation anchor
  std::vector<std::string> basis_names;
  std::optional<ScalingClaim> scaling;
  std::function<std::vector<ProbeGroup>(const LabContext&)> evaluate;
  // Optional entry-specific pass refinement (e.g. monotone eps trend).
  std::function<bool(const std::vector<GroupFit>&, std::string&)> extra_check;
  // Optional check with access to the raw samples (e.g. tail exponent fits).
  std::function<bool(const std::vector<ProbeGroup>&, std::string&)> sample_check;
};

/// The registered quantitative bounds, ordered by id.
const std::vector<BoundRegistryEntry>& bound_registry();

/// Envelope fit + scaling regression + extra checks for one entry.
/// Throws UnknownEntry for unregistered ids, PreconditionViolated for
/// sweeps violating an entry's parameter constraints.
FitReport probe_bound(const std::string& entry_id, const LabContext& ctx);

/// All entries (deterministic order); smoke failures retry once at doubled
/// resolution before being reported.
std::vector<FitReport> run_registry(const std::vector<std::string>& subset,
                                    const LabContext& ctx);

struct IdentityCheck {
  std::string id;
  double lhs = 0.0, lhs_se = 0.0;
  double rhs = 0.0, rhs_se = 0.0;
  double z = 0.0;
  bool pass = false;  // |z| <= 3
  double gamma = 0.0;
};

const std::vector<std::string>& identity_ids();  // prepost, regular-cov, ...

/// Monte Carlo check of one change-of-variable identity at the given gamma.
/// Shared samples where the transport permits, independent substreams
/// otherwise. Throws UnknownIdentity.
IdentityCheck run_identity(const std::string& id, const MonteCarloPlan& plan,
                           double gamma);

/// Nonnegative least squares for small bases (enumerates active sets).
std::vector<double> nnls(const std::vector<ProbeSample>& samples);

/// Rescales constants so the envelope dominates all samples; returns the
/// pre-rescale worst ratio (inf when domination is impossible).
double rescale_to_dominate(const std::vector<ProbeSample>& samples,
                           std::vector<double>& constants);

}  // namespace boltzlab
