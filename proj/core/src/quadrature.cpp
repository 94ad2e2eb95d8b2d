#include "boltzlab/quadrature.hpp"

#include <cmath>

namespace boltzlab {

VelocityGrid::VelocityGrid(double v_max, int n_per_axis)
    : v_max_(v_max), n_(n_per_axis), h_(2.0 * v_max / n_per_axis) {
  if (!(v_max > 0.0)) fail(ErrorCode::PreconditionViolated, "v_max must be positive");
  if (n_per_axis < 8) fail(ErrorCode::PreconditionViolated, "n_per_axis must be >= 8");
}

std::vector<double> VelocityGrid::sample(const std::function<double(Vec3)>& f) const {
  std::vector<double> field(size());
  parallel_for_blocked(size(), 8192, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) field[i] = f(node(i));
  });
  return field;
}

double integrate_velocity(const VelocityGrid& grid, const std::vector<double>& field) {
  if (field.size() != grid.size()) {
    fail(ErrorCode::GridMismatch, "field size does not match grid");
  }
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (!std::isfinite(field[i])) {
      fail(ErrorCode::NonFiniteField, "integrate_velocity: non-finite value");
    }
  }
  constexpr std::size_t kBlock = 4096;
  const std::size_t nblocks = (field.size() + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks, 0.0);
  parallel_for_blocked(field.size(), kBlock, [&](std::size_t lo, std::size_t hi) {
    partial[lo / kBlock] = pairwise_sum(field.data() + lo, hi - lo);
  });
  return grid.cell_volume() * pairwise_sum(partial);
}

void gauss_legendre(int n, double a, double b,
                    std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton iteration from the Chebyshev estimate of the i-th root.
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    const double xm = 0.5 * (b + a);
    const double xl = 0.5 * (b - a);
    x[i] = xm - xl * z;
    x[n - 1 - i] = xm + xl * z;
    w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

SphereRule::SphereRule(int n_theta, int n_phi) {
  if (n_theta < 1 || n_phi < 1) {
    fail(ErrorCode::PreconditionViolated, "sphere rule sizes must be positive");
  }
  std::vector<double> c, wc;
  gauss_legendre(n_theta, -1.0, 1.0, c, wc);
  nodes_.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  weights_.reserve(nodes_.capacity());
  const double wphi = kTwoPi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    const double s = std::sqrt(std::max(0.0, 1.0 - c[i] * c[i]));
    for (int j = 0; j < n_phi; ++j) {
      const double phi = wphi * (j + 0.5);
      nodes_.push_back({s * std::cos(phi), s * std::sin(phi), c[i]});
      weights_.push_back(wc[i] * wphi);
    }
  }
  exactness_ = std::min(2 * n_theta - 1, n_phi - 1);
}

SphereRule SphereRule::rotated(const Vec3& r0, const Vec3& r1, const Vec3& r2) const {
  SphereRule out;
  out.weights_ = weights_;
  out.exactness_ = exactness_;
  out.nodes_.reserve(nodes_.size());
  for (const Vec3& n : nodes_) {
    out.nodes_.push_back({dot(r0, n), dot(r1, n), dot(r2, n)});
  }
  return out;
}

double sphere_integrate(const SphereRule& rule, const std::function<double(Vec3)>& g) {
  std::vector<double> vals(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    vals[i] = rule.weights()[i] * g(rule.nodes()[i]);
    if (!std::isfinite(vals[i])) {
      fail(ErrorCode::NonFiniteField, "sphere_integrate: non-finite value");
    }
  }
  return pairwise_sum(vals);
}

Vec3 mc_sample(const MonteCarloPlan& plan, Rng& rng) {
  if (plan.proposal == McProposal::Gaussian) {
    return {rng.normal(), rng.normal(), rng.normal()};
  }
  // Uniform in the ball of radius R: direction times R * u^{1/3}.
  double dir[3];
  rng.unit_vector(dir);
  const double r = plan.ball_radius * std::cbrt(rng.uniform());
  return {r * dir[0], r * dir[1], r * dir[2]};
}

double mc_proposal_density(const MonteCarloPlan& plan, Vec3 v) {
  if (plan.proposal == McProposal::Gaussian) {
    return std::pow(kTwoPi, -1.5) * std::exp(-0.5 * norm2(v));
  }
  const double R = plan.ball_radius;
  return norm2(v) <= R * R ? 3.0 / (kFourPi * R * R * R) : 0.0;
}

McResult mc_estimate(const MonteCarloPlan& plan,
                     const std::function<double(Vec3, double, Rng&)>& integrand) {
  const std::size_t n = plan.sample_count;
  constexpr std::size_t kBlock = 8192;
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> bsum(nblocks, 0.0), bsum2(nblocks, 0.0);
  const Rng base(plan.seed);
  parallel_for_blocked(n, kBlock, [&](std::size_t lo, std::size_t hi) {
    // One substream per block keeps the stream independent of threading.
    Rng rng = base.substream(lo / kBlock);
    std::vector<double> vals, vals2;
    vals.reserve(hi - lo);
    vals2.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
      const Vec3 v = mc_sample(plan, rng);
      const double q = mc_proposal_density(plan, v);
      const double y = integrand(v, q, rng);
      vals.push_back(y);
      vals2.push_back(y * y);
    }
    bsum[lo / kBlock] = pairwise_sum(vals);
    bsum2[lo / kBlock] = pairwise_sum(vals2);
  });
  const double s1 = pairwise_sum(bsum);
  const double s2 = pairwise_sum(bsum2);
  if (!std::isfinite(s1) || !std::isfinite(s2)) {
    fail(ErrorCode::VarianceOverflow, "mc_estimate: running variance non-finite");
  }
  McResult out;
  out.estimate = s1 / static_cast<double>(n);
  const double var = std::max(0.0, s2 / n - out.estimate * out.estimate);
  out.std_error = std::sqrt(var / static_cast<double>(n));
  return out;
}

}  // namespace boltzlab
