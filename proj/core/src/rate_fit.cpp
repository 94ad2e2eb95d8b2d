#include <cmath>

#include "boltzlab/evolution.hpp"

namespace boltzlab {

namespace {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LinearFit linear_regression(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit fit;
  if (sxx <= 0.0) fail(ErrorCode::DegenerateWindow, "regression abscissae coincide");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

}  // namespace

RateFit fit_decay(const DecaySeries& series, DecayModel model,
                  std::size_t context_index) {
  if (context_index >= series.norms.size()) {
    fail(ErrorCode::PreconditionViolated, "fit_decay: no such monitored norm");
  }
  const std::vector<double>& t = series.times;
  const std::vector<double>& y = series.norms[context_index];
  if (t.size() != y.size() || t.size() < 2) {
    fail(ErrorCode::InsufficientData, "fit_decay: series too short");
  }
  // Window: drop the initial transient (first 20% of samples) and anything
  // at the quadrature floor.
  const std::size_t start = t.size() / 5;
  const double floor_val = 1e3 * std::sqrt(std::max(0.0, series.norm_tail_bound[context_index]));
  std::vector<double> xs, ys;
  const double y_ref = y[start] > 0.0 ? y[start] : 1.0;
  for (std::size_t i = start; i < t.size(); ++i) {
    if (!(y[i] > floor_val) || !(y[i] > 0.0)) continue;
    switch (model) {
      case DecayModel::Exponential:
        xs.push_back(t[i]);
        ys.push_back(std::log(y[i]));
        break;
      case DecayModel::Algebraic:
        if (t[i] <= 0.0) continue;
        xs.push_back(std::log1p(t[i]));
        ys.push_back(std::log(y[i]));
        break;
      case DecayModel::StretchedExponential: {
        if (t[i] <= t[start] || !(y[i] < y_ref)) continue;
        const double ratio = y[i] / y_ref;
        xs.push_back(std::log(t[i]));
        ys.push_back(std::log(-std::log(ratio)));
        break;
      }
    }
  }
  if (xs.size() < 20) {
    fail(ErrorCode::InsufficientData, "fit_decay: fewer than 20 usable samples");
  }
  const LinearFit fit = linear_regression(xs, ys);
  RateFit out;
  out.model = model;
  out.r_squared = fit.r_squared;
  out.amplitude = fit.intercept;
  out.samples_used = static_cast<int>(xs.size());
  out.window_lo = t[start];
  out.window_hi = t.back();
  switch (model) {
    case DecayModel::Exponential: out.parameter = -fit.slope; break;
    case DecayModel::Algebraic: out.parameter = -fit.slope; break;
    case DecayModel::StretchedExponential: out.parameter = fit.slope; break;
  }
  return out;
}

}  // namespace boltzlab
