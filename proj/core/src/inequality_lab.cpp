#include "boltzlab/inequality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace boltzlab {

std::vector<double> nnls(const std::vector<ProbeSample>& samples) {
  if (samples.empty()) return {};
  const std::size_t nb = samples[0].basis.size();
  // Enumerate support subsets (nb <= 3 in the registry); solve the normal
  // equations on each support, keep the feasible fit with least residual.
  auto residual_of = [&](const std::vector<double>& c) {
    double r = 0.0;
    for (const auto& s : samples) {
      double pred = 0.0;
      for (std::size_t j = 0; j < nb; ++j) pred += c[j] * s.basis[j];
      r += (s.lhs - pred) * (s.lhs - pred);
    }
    return r;
  };
  std::vector<double> best(nb, 0.0);
  double best_res = residual_of(best);
  for (unsigned mask = 1; mask < (1u << nb); ++mask) {
    std::vector<int> idx;
    for (std::size_t j = 0; j < nb; ++j) {
      if (mask & (1u << j)) idx.push_back(static_cast<int>(j));
    }
    const std::size_t m = idx.size();
    // Normal equations A c = b on the subset.
    std::vector<double> A(m * m, 0.0), b(m, 0.0);
    for (const auto& s : samples) {
      for (std::size_t p = 0; p < m; ++p) {
        b[p] += s.basis[idx[p]] * s.lhs;
        for (std::size_t q = 0; q < m; ++q) {
          A[p * m + q] += s.basis[idx[p]] * s.basis[idx[q]];
        }
      }
    }
    // Gaussian elimination.
    std::vector<double> c(m, 0.0);
    bool singular = false;
    for (std::size_t col = 0; col < m; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < m; ++r) {
        if (std::abs(A[r * m + col]) > std::abs(A[piv * m + col])) piv = r;
      }
      if (std::abs(A[piv * m + col]) < 1e-300) { singular = true; break; }
      for (std::size_t cc = 0; cc < m; ++cc) std::swap(A[col * m + cc], A[piv * m + cc]);
      std::swap(b[col], b[piv]);
      for (std::size_t r = col + 1; r < m; ++r) {
        const double f = A[r * m + col] / A[col * m + col];
        for (std::size_t cc = col; cc < m; ++cc) A[r * m + cc] -= f * A[col * m + cc];
        b[r] -= f * b[col];
      }
    }
    if (singular) continue;
    for (int r = static_cast<int>(m) - 1; r >= 0; --r) {
      double s = b[r];
      for (std::size_t cc = r + 1; cc < m; ++cc) s -= A[r * m + cc] * c[cc];
      c[r] = s / A[r * m + r];
    }
    bool feasible = true;
    for (double x : c) feasible = feasible && x >= 0.0;
    if (!feasible) continue;
    std::vector<double> full(nb, 0.0);
    for (std::size_t p = 0; p < m; ++p) full[idx[p]] = c[p];
    const double res = residual_of(full);
    if (res < best_res) {
      best_res = res;
      best = full;
    }
  }
  return best;
}

double rescale_to_dominate(const std::vector<ProbeSample>& samples,
                           std::vector<double>& constants) {
  double worst = 0.0;
  for (const auto& s : samples) {
    double pred = 0.0;
    for (std::size_t j = 0; j < constants.size(); ++j) pred += constants[j] * s.basis[j];
    if (s.lhs <= 0.0) continue;
    if (pred <= 0.0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, s.lhs / pred);
  }
  if (worst > 1.0) {
    for (double& c : constants) c *= worst;
  }
  return worst;
}

namespace {

GroupFit fit_group(const ProbeGroup& group) {
  GroupFit gf;
  gf.param = group.param;
  gf.constants = nnls(group.samples);
  const double worst = rescale_to_dominate(group.samples, gf.constants);
  if (!std::isfinite(worst)) {
    gf.worst_ratio = worst;
    return gf;
  }
  // Post-rescale diagnostics.
  gf.worst_ratio = 0.0;
  double res = 0.0;
  for (const auto& s : group.samples) {
    double pred = 0.0;
    for (std::size_t j = 0; j < gf.constants.size(); ++j) {
      pred += gf.constants[j] * s.basis[j];
    }
    if (pred > 0.0 && s.lhs > 0.0) {
      const double ratio = s.lhs / pred;
      if (ratio > gf.worst_ratio) {
        gf.worst_ratio = ratio;
        gf.worst_location = s.location;
      }
    }
    res += (s.lhs - pred) * (s.lhs - pred);
  }
  gf.residual = std::sqrt(res / std::max<std::size_t>(1, group.samples.size()));
  return gf;
}

FitReport fit_entry(const BoundRegistryEntry& entry, const LabContext& ctx) {
  FitReport report;
  report.id = entry.id;
  const std::vector<ProbeGroup> groups = entry.evaluate(ctx);
  bool ok = !groups.empty();
  for (const auto& g : groups) {
    GroupFit gf = fit_group(g);
    if (!std::isfinite(gf.worst_ratio) || gf.worst_ratio > 1.0 + 1e-6) ok = false;
    bool any_finite = false;
    for (double c : gf.constants) any_finite = any_finite || std::isfinite(c);
    ok = ok && any_finite;
    report.groups.push_back(std::move(gf));
  }
  if (!report.groups.empty()) {
    report.constants = report.groups.front().constants;
    for (const auto& g : report.groups) {
      if (g.worst_ratio > report.worst_ratio) {
        report.worst_ratio = g.worst_ratio;
        report.worst_location = g.worst_location;
      }
      report.residual = std::max(report.residual, g.residual);
    }
  }
  if (entry.scaling && report.groups.size() >= 2) {
    // Regression of ln c1 against ln param over the sweep.
    std::vector<double> xs, ys;
    for (const auto& g : report.groups) {
      if (g.param > 0.0 && !g.constants.empty() && g.constants[0] > 0.0) {
        xs.push_back(std::log(g.param));
        ys.push_back(std::log(g.constants[0]));
      }
    }
    if (xs.size() >= 2) {
      double mx = 0.0, my = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) { mx += xs[i]; my += ys[i]; }
      mx /= xs.size();
      my /= ys.size();
      double sxx = 0.0, sxy = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
      }
      const double slope = sxy / sxx;
      report.scaling_exponent = slope;
      report.scaling_expected = entry.scaling->exponent;
      const double tol = 0.25 * std::abs(entry.scaling->exponent);
      if (std::abs(slope - entry.scaling->exponent) > tol) ok = false;
    } else {
      ok = false;
    }
  }
  if (entry.extra_check) {
    std::string diag;
    if (!entry.extra_check(report.groups, diag)) ok = false;
    if (!diag.empty()) report.diagnostics = diag;
  }
  if (entry.sample_check) {
    std::string diag;
    if (!entry.sample_check(groups, diag)) ok = false;
    if (!diag.empty()) {
      report.diagnostics += (report.diagnostics.empty() ? "" : "; ") + diag;
    }
  }
  report.pass = ok;
  return report;
}

}  // namespace

FitReport probe_bound(const std::string& entry_id, const LabContext& ctx) {
  for (const auto& entry : bound_registry()) {
    if (entry.id == entry_id) return fit_entry(entry, ctx);
  }
  fail(ErrorCode::UnknownEntry, "no registry entry with id '" + entry_id + "'");
}

std::vector<FitReport> run_registry(const std::vector<std::string>& subset,
                                    const LabContext& ctx) {
  std::vector<std::string> ids = subset;
  if (ids.empty()) {
    for (const auto& e : bound_registry()) ids.push_back(e.id);
  } else {
    for (const auto& id : ids) {
      bool found = false;
      for (const auto& e : bound_registry()) found = found || e.id == id;
      if (!found) fail(ErrorCode::UnknownEntry, "no registry entry with id '" + id + "'");
    }
  }
  std::sort(ids.begin(), ids.end());
  std::vector<FitReport> reports;
  for (const auto& id : ids) {
    FitReport r = probe_bound(id, ctx);
    if (!r.pass && ctx.resolution_scale == 1) {
      // Failures re-run once at doubled resolution before being reported.
      LabContext retry = ctx;
      retry.resolution_scale = 2;
      retry.grid_n = std::min(96, ctx.grid_n * 2);
      retry.mc_samples = ctx.mc_samples * 4;
      FitReport r2 = probe_bound(id, retry);
      r2.diagnostics += (r2.diagnostics.empty() ? "" : "; ");
      r2.diagnostics += "retried at 2x resolution";
      reports.push_back(std::move(r2));
    } else {
      reports.push_back(std::move(r));
    }
  }
  return reports;
}

}  // namespace boltzlab
