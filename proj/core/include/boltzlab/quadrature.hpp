#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "boltzlab/common.hpp"

namespace boltzlab {

/// Cell-centered cube [-v_max, v_max]^3 with n_per_axis cells per axis.
class VelocityGrid {
 public:
  VelocityGrid(double v_max, int n_per_axis);

  double v_max() const { return v_max_; }
  int n_per_axis() const { return n_; }
  double spacing() const { return h_; }
  double cell_volume() const { return h_ * h_ * h_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }

  double coord(int i) const { return -v_max_ + (i + 0.5) * h_; }
  Vec3 node(std::size_t idx) const {
    const int n = n_;
    const int k = static_cast<int>(idx % n);
    const int j = static_cast<int>((idx / n) % n);
    const int i = static_cast<int>(idx / (static_cast<std::size_t>(n) * n));
    return {coord(i), coord(j), coord(k)};
  }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
  }

  bool operator==(const VelocityGrid& o) const {
    return v_max_ == o.v_max_ && n_ == o.n_;
  }

  /// Fills field[i] = f(node_i) for all nodes (parallel, deterministic).
  std::vector<double> sample(const std::function<double(Vec3)>& f) const;

 private:
  double v_max_;
  int n_;
  double h_;
};

/// Midpoint rule over the truncated cube: h^3 * pairwise sum of node values.
/// Throws NonFiniteField if any value is not finite.
double integrate_velocity(const VelocityGrid& grid, const std::vector<double>& field);

/// Quadrature rule on S^2: product of Gauss-Legendre in cos(theta) and a
/// uniform rule in azimuth; exact for spherical polynomials of degree up to
/// min(2 n_theta - 1, n_phi - 1).
class SphereRule {
 public:
  SphereRule(int n_theta, int n_phi);

  const std::vector<Vec3>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  int exactness_degree() const { return exactness_; }
  std::size_t size() const { return nodes_.size(); }

  /// Returns the rule with every node rotated by the given matrix rows.
  SphereRule rotated(const Vec3& r0, const Vec3& r1, const Vec3& r2) const;

 private:
  SphereRule() = default;
  std::vector<Vec3> nodes_;
  std::vector<double> weights_;
  int exactness_ = 0;
};

/// Sum of w_i g(sigma_i); throws NonFiniteField on non-finite values.
double sphere_integrate(const SphereRule& rule, const std::function<double(Vec3)>& g);

/// Gauss-Legendre nodes/weights on [a, b].
void gauss_legendre(int n, double a, double b,
                    std::vector<double>& x, std::vector<double>& w);

enum class McProposal { Gaussian, UniformBall };

struct MonteCarloPlan {
  std::size_t sample_count = 10000;
  std::uint64_t seed = 1;
  McProposal proposal = McProposal::Gaussian;
  double ball_radius = 8.0;  // for UniformBall
};

struct McResult {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Importance-sampled estimate of E_proposal[integrand]; the integrand
/// receives the sampled point and its proposal density and must return the
/// weighted integrand value. Deterministic per seed (blocked substreams).
/// Throws VarianceOverflow if the running variance is non-finite.
McResult mc_estimate(const MonteCarloPlan& plan,
                     const std::function<double(Vec3, double, Rng&)>& integrand);

/// Proposal density of the plan at v.
double mc_proposal_density(const MonteCarloPlan& plan, Vec3 v);

/// Draws one sample from the plan's proposal.
Vec3 mc_sample(const MonteCarloPlan& plan, Rng& rng);

}  // namespace boltzlab
