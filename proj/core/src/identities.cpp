#include <cmath>

#include "boltzlab/inequality_lab.hpp"

namespace boltzlab {

namespace {

CollisionKernelSpec identity_spec(double gamma) {
  CollisionKernelSpec spec;
  spec.gamma = gamma;
  spec.angular_profile = AngularProfile::constant(1.0);
  spec.cutoff_lower = 0.5;
  spec.support_restricted = true;
  return spec;
}

double gauss3(Rng& rng, Vec3& v) {
  v = {rng.normal(), rng.normal(), rng.normal()};
  return std::pow(kTwoPi, -1.5) * std::exp(-0.5 * norm2(v));
}

// sigma uniform on the theta <= pi/2 hemisphere around khat.
Vec3 hemisphere_sigma(Rng& rng, Vec3 khat, double& cos_theta) {
  Vec3 e1, e2;
  plane_basis(khat, e1, e2);
  cos_theta = rng.uniform();  // uniform in cos over [0, 1]
  const double s = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  const double phi = rng.uniform(0.0, kTwoPi);
  return cos_theta * khat + (s * std::cos(phi)) * e1 + (s * std::sin(phi)) * e2;
}

struct TwoSided {
  McResult lhs, rhs;
};

IdentityCheck finish(const std::string& id, double gamma, const TwoSided& ts) {
  IdentityCheck out;
  out.id = id;
  out.gamma = gamma;
  out.lhs = ts.lhs.estimate;
  out.lhs_se = ts.lhs.std_error;
  out.rhs = ts.rhs.estimate;
  out.rhs_se = ts.rhs.std_error;
  const double se = std::sqrt(ts.lhs.std_error * ts.lhs.std_error +
                              ts.rhs.std_error * ts.rhs.std_error);
  out.z = se > 0.0 ? (ts.lhs.estimate - ts.rhs.estimate) / se : 0.0;
  out.pass = std::abs(out.z) <= 3.0;
  return out;
}

// Pre/post collisional swap: both slot orders of F estimated on shared
// samples; the difference carries the test statistic.
IdentityCheck identity_prepost(const MonteCarloPlan& plan, double gamma) {
  const CollisionKernelSpec spec = identity_spec(gamma);
  // Deliberately slot-asymmetric smooth F.
  auto F = [](Vec3 v, Vec3 vs, Vec3 vp, Vec3 vsp) {
    return std::exp(-0.25 * norm2(vp) - 0.125 * norm2(vsp)) *
           (1.0 + 0.5 * std::cos(v.x + 2.0 * vs.y));
  };
  const std::size_t n = plan.sample_count;
  std::vector<double> d1(n), d2(n), diff(n);
  Rng rng = Rng(plan.seed).substream(11);
  for (std::size_t i = 0; i < n; ++i) {
    Vec3 v, vs;
    const double qv = gauss3(rng, v);
    const double qs = gauss3(rng, vs);
    const Vec3 rel = v - vs;
    const double r = norm(rel);
    if (r == 0.0) { d1[i] = d2[i] = diff[i] = 0.0; continue; }
    double c = 0.0;
    const Vec3 sigma = hemisphere_sigma(rng, rel / r, c);
    const auto post = post_collision({v, vs, sigma});
    const double B = std::pow(r, gamma) * spec.angular(c);
    const double w = kTwoPi * B / (qv * qs);  // hemisphere measure 2 pi
    const double a = w * F(v, vs, post.v_prime, post.v_star_prime);
    const double b = w * F(post.v_prime, post.v_star_prime, v, vs);
    d1[i] = a;
    d2[i] = b;
    diff[i] = a - b;
  }
  auto mean_se = [&](const std::vector<double>& x) {
    McResult r;
    r.estimate = pairwise_sum(x) / x.size();
    double var = 0.0;
    for (double xi : x) var += (xi - r.estimate) * (xi - r.estimate);
    r.std_error = std::sqrt(var / x.size() / x.size());
    return r;
  };
  // z built from the paired difference (shared samples).
  const McResult m1 = mean_se(d1);
  const McResult m2 = mean_se(d2);
  const McResult md = mean_se(diff);
  IdentityCheck out;
  out.id = "prepost";
  out.gamma = gamma;
  out.lhs = m1.estimate;
  out.lhs_se = m1.std_error;
  out.rhs = m2.estimate;
  out.rhs_se = m2.std_error;
  out.z = md.std_error > 0.0 ? md.estimate / md.std_error : 0.0;
  out.pass = std::abs(out.z) <= 3.0;
  return out;
}

// Angular factor 2 pi int b(c) g(c) dc with an endpoint-singularity-absorbing
// substitution at c = 1 (used by the cos/sin half-angle weights).
double angular_factor(const CollisionKernelSpec& spec,
                      const std::function<double(double)>& g, bool singular_at_one) {
  std::vector<double> x, w;
  gauss_legendre(128, 0.0, 1.0, x, w);
  double acc = 0.0;
  const double lo = spec.support_restricted ? 0.0 : -1.0;
  if (!singular_at_one) {
    for (int i = 0; i < 128; ++i) {
      const double c = lo + (1.0 - lo) * x[i];
      acc += w[i] * (1.0 - lo) * spec.angular(c) * g(c);
    }
  } else {
    // c = 1 - u^4 clusters nodes at the singular endpoint.
    for (int i = 0; i < 128; ++i) {
      const double u = x[i];
      const double c = 1.0 - (1.0 - lo) * u * u * u * u;
      acc += w[i] * 4.0 * (1.0 - lo) * u * u * u * spec.angular(c) * g(c);
    }
  }
  return kTwoPi * acc;
}

// Regular change of variables: for fixed v*,
//   int int b B f(v') dsigma dv
//     = ||b cos^{-(3+gamma)}(theta/2)||_{L1_theta} int |u - v*|^gamma f(u) du.
IdentityCheck identity_regular(const MonteCarloPlan& plan, double gamma) {
  const CollisionKernelSpec spec = identity_spec(gamma);
  const Vec3 vstar{0.3, -0.2, 0.5};
  auto f = [](Vec3 u) { return maxwellian(u); };
  const std::size_t n = plan.sample_count;

  // LHS over (v, sigma); proposal recentred at v* with widened scale.
  MonteCarloPlan lhs_plan = plan;
  McResult lhs = mc_estimate(lhs_plan, [&](Vec3 z, double q, Rng& rng) {
    const Vec3 v = vstar + 2.0 * z;
    const double qv = q / 8.0;  // density of v under the affine map
    const Vec3 rel = v - vstar;
    const double r = norm(rel);
    if (r == 0.0) return 0.0;
    double c = 0.0;
    const Vec3 sigma = hemisphere_sigma(rng, rel / r, c);
    const auto post = post_collision({v, vstar, sigma});
    const double B = std::pow(r, gamma) * spec.angular(c);
    return kTwoPi * B * f(post.v_prime) / qv;
  });

  const double ang = angular_factor(
      spec,
      [&](double c) { return std::pow(0.5 * (1.0 + c), -0.5 * (3.0 + gamma)); },
      false);
  MonteCarloPlan rhs_plan = plan;
  rhs_plan.seed = Rng(plan.seed).substream(23).next_u64();
  McResult rhs = mc_estimate(rhs_plan, [&](Vec3 z, double q, Rng&) {
    const Vec3 u = vstar + 2.0 * z;
    const double qu = q / 8.0;
    const double r = norm(u - vstar);
    if (r == 0.0) return 0.0;
    return std::pow(r, gamma) * f(u) / qu;
  });
  rhs.estimate *= ang;
  rhs.std_error *= ang;
  (void)n;
  return finish("regular-cov", gamma, {lhs, rhs});
}

// Singular change of variables: for fixed v,
//   int int b B f(v') dsigma dv*
//     = ||b sin^{-(3+gamma)}(theta/2)||_{L1_theta} int |v - u|^gamma f(u) du.
// The angular norm is finite for gamma < -1 under the cutoff support.
IdentityCheck identity_singular(const MonteCarloPlan& plan, double gamma) {
  const CollisionKernelSpec spec = identity_spec(gamma);
  const Vec3 v{0.4, 0.1, -0.2};
  auto f = [](Vec3 u) { return maxwellian(u); };

  McResult lhs = mc_estimate(plan, [&](Vec3 z, double q, Rng& rng) {
    const Vec3 vs = v + 2.0 * z;
    const double qs = q / 8.0;
    const Vec3 rel = v - vs;
    const double r = norm(rel);
    if (r == 0.0) return 0.0;
    double c = 0.0;
    const Vec3 sigma = hemisphere_sigma(rng, rel / r, c);
    const auto post = post_collision({v, vs, sigma});
    const double B = std::pow(r, gamma) * spec.angular(c);
    return kTwoPi * B * f(post.v_prime) / qs;
  });

  const double ang = angular_factor(
      spec,
      [&](double c) { return std::pow(0.5 * (1.0 - c), -0.5 * (3.0 + gamma)); },
      true);
  MonteCarloPlan rhs_plan = plan;
  rhs_plan.seed = Rng(plan.seed).substream(29).next_u64();
  McResult rhs = mc_estimate(rhs_plan, [&](Vec3 z, double q, Rng&) {
    const Vec3 u = v + 2.0 * z;
    const double qu = q / 8.0;
    const double r = norm(v - u);
    if (r == 0.0) return 0.0;
    return std::pow(r, gamma) * f(u) / qu;
  });
  rhs.estimate *= ang;
  rhs.std_error *= ang;
  return finish("singular-cov", gamma, {lhs, rhs});
}

// Plane representation of the (v*, sigma) integral for
// F = B 1_{|v*| <= 2}: the left side integrates over (v*, sigma), the right
// side over v' and the plane w . (v' - v) = 0 with weight 4 / (|v'-v| r).
IdentityCheck identity_carleman(const MonteCarloPlan& plan, double gamma) {
  const CollisionKernelSpec spec = identity_spec(gamma);
  const Vec3 v{0.2, 0.1, -0.3};

  McResult lhs = mc_estimate(plan, [&](Vec3 z, double q, Rng& rng) {
    const Vec3 vs = v + 2.0 * z;
    const double qs = q / 8.0;
    if (norm2(vs) > 4.0) return 0.0;
    const Vec3 rel = v - vs;
    const double r = norm(rel);
    if (r == 0.0) return 0.0;
    double c = 0.0;
    hemisphere_sigma(rng, rel / r, c);
    const double B = std::pow(r, gamma) * spec.angular(c);
    return kTwoPi * B / qs;
  });

  MonteCarloPlan rhs_plan = plan;
  rhs_plan.seed = Rng(plan.seed).substream(31).next_u64();
  McResult rhs = mc_estimate(rhs_plan, [&](Vec3 z, double q, Rng& rng) {
    const Vec3 vp = v + 2.0 * z;
    const double qp = q / 8.0;
    const Vec3 axis = vp - v;
    const double d = norm(axis);
    if (d == 0.0) return 0.0;
    Vec3 e1, e2;
    plane_basis(axis, e1, e2);
    // 2-D Gaussian in the plane, scale 2.
    const double a1 = 2.0 * rng.normal(), a2 = 2.0 * rng.normal();
    const double qw = std::exp(-0.125 * (a1 * a1 + a2 * a2)) / (kTwoPi * 4.0);
    const Vec3 w = a1 * e1 + a2 * e2;
    const auto cp = carleman_transform_point(v, vp, w);
    if (norm2(cp.v_star) > 4.0) return 0.0;
    const double cos_theta = 2.0 * cp.cos_half_theta * cp.cos_half_theta - 1.0;
    const double B = std::pow(cp.r, gamma) * spec.angular(cos_theta);
    return cp.jacobian_weight * B / (qp * qw);
  });
  return finish("carleman", gamma, {lhs, rhs});
}

}  // namespace

const std::vector<std::string>& identity_ids() {
  static const std::vector<std::string> ids{"prepost", "regular-cov",
                                            "singular-cov", "carleman"};
  return ids;
}

IdentityCheck run_identity(const std::string& id, const MonteCarloPlan& plan,
                           double gamma) {
  if (id == "prepost") return identity_prepost(plan, gamma);
  if (id == "regular-cov") return identity_regular(plan, gamma);
  if (id == "singular-cov") return identity_singular(plan, gamma);
  if (id == "carleman") return identity_carleman(plan, gamma);
  fail(ErrorCode::UnknownIdentity, "no identity with id '" + id + "'");
}

}  // namespace boltzlab
