#include "boltzlab/distribution.hpp"

#include <cmath>

namespace boltzlab {

Distribution::Distribution(std::shared_ptr<const VelocityGrid> grid,
                           std::vector<double> values,
                           std::optional<WeightContext> weight_context)
    : grid_(std::move(grid)), values_(std::move(values)),
      weight_context_(std::move(weight_context)) {
  if (values_.size() != grid_->size()) {
    fail(ErrorCode::GridMismatch, "Distribution: value count != node count");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteField, "Distribution: non-finite value");
  }
}

Distribution Distribution::zero(std::shared_ptr<const VelocityGrid> grid) {
  std::vector<double> v(grid->size(), 0.0);
  return Distribution(std::move(grid), std::move(v));
}

Distribution Distribution::from_function(std::shared_ptr<const VelocityGrid> grid,
                                         const std::function<double(Vec3)>& f) {
  auto vals = grid->sample(f);
  return Distribution(std::move(grid), std::move(vals));
}

const std::vector<double>& Distribution::ratio_values() const {
  if (!ratio_) {
    auto r = std::make_shared<std::vector<double>>(values_.size());
    const auto& g = *grid_;
    parallel_for_blocked(values_.size(), 8192, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        (*r)[i] = values_[i] / maxwellian(g.node(i));
      }
    });
    ratio_ = std::move(r);
  }
  return *ratio_;
}

double Distribution::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double Distribution::interpolate(Vec3 v, InterpMode mode) const {
  switch (mode) {
    case InterpMode::Trilinear:
      return interpolate_trilinear(*grid_, values_, v);
    case InterpMode::TrilinearMuFactored:
      return maxwellian(v) * interpolate_trilinear(*grid_, ratio_values(), v);
    case InterpMode::TricubicMuFactored:
      return maxwellian(v) * interpolate_tricubic(*grid_, ratio_values(), v);
  }
  return 0.0;
}

double interpolate_trilinear(const VelocityGrid& grid, const std::vector<double>& f,
                             Vec3 v) {
  const int n = grid.n_per_axis();
  const double h = grid.spacing();
  double t[3];
  int i0[3];
  for (int c = 0; c < 3; ++c) {
    const double x = (v[c] + grid.v_max()) / h - 0.5;  // node-index coordinate
    if (x < -0.5 || x > n - 0.5) return 0.0;           // outside the box
    const double fl = std::floor(x);
    i0[c] = static_cast<int>(fl);
    t[c] = x - fl;
  }
  double acc = 0.0;
  for (int a = 0; a < 2; ++a) {
    const int i = i0[0] + a;
    if (i < 0 || i >= n) continue;
    const double wa = a ? t[0] : 1.0 - t[0];
    for (int b = 0; b < 2; ++b) {
      const int j = i0[1] + b;
      if (j < 0 || j >= n) continue;
      const double wb = b ? t[1] : 1.0 - t[1];
      for (int ci = 0; ci < 2; ++ci) {
        const int k = i0[2] + ci;
        if (k < 0 || k >= n) continue;
        const double wc = ci ? t[2] : 1.0 - t[2];
        acc += wa * wb * wc * f[grid.index(i, j, k)];
      }
    }
  }
  return acc;
}

namespace {
// Lagrange cubic through 4 consecutive nodes, local coordinate t in [0,1]
// between nodes 1 and 2.
inline void cubic_weights(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = (-t3 + 2.0 * t2 - t) / 2.0;
  w[1] = (3.0 * t3 - 5.0 * t2 + 2.0) / 2.0;
  w[2] = (-3.0 * t3 + 4.0 * t2 + t) / 2.0;
  w[3] = (t3 - t2) / 2.0;
}
}  // namespace

double interpolate_tricubic(const VelocityGrid& grid, const std::vector<double>& f,
                            Vec3 v) {
  const int n = grid.n_per_axis();
  const double h = grid.spacing();
  int base[3];
  double w[3][4];
  for (int c = 0; c < 3; ++c) {
    const double x = (v[c] + grid.v_max()) / h - 0.5;
    if (x < -0.5 || x > n - 0.5) return 0.0;
    int i1 = static_cast<int>(std::floor(x));
    double t = x - i1;
    // Clamp the stencil inside the box near the boundary (shift, keep t
    // consistent with the shifted base).
    if (i1 < 1) { t -= (1 - i1); i1 = 1; }
    if (i1 > n - 3) { t += (i1 - (n - 3)); i1 = n - 3; }
    base[c] = i1 - 1;
    cubic_weights(t, w[c]);
  }
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    const int i = base[0] + a;
    double accj = 0.0;
    for (int b = 0; b < 4; ++b) {
      const int j = base[1] + b;
      double acck = 0.0;
      const std::size_t row = grid.index(i, j, base[2]);
      for (int ci = 0; ci < 4; ++ci) {
        acck += w[2][ci] * f[row + ci];
      }
      accj += w[1][b] * acck;
    }
    acc += w[0][a] * accj;
  }
  return acc;
}

}  // namespace boltzlab
