#include "boltzlab/kernel_geometry.hpp"

#include <cmath>
#include <sstream>

namespace boltzlab {

AngularProfile AngularProfile::constant(double b0) {
  std::ostringstream name;
  name << "constant(" << b0 << ")";
  return AngularProfile(name.str(), [b0](double) { return b0; });
}

AngularProfile AngularProfile::one_plus_cos() {
  return AngularProfile("one_plus_cos", [](double c) { return 1.0 + c; });
}

AngularProfile AngularProfile::cos_squared() {
  return AngularProfile("cos_squared", [](double c) { return c * c; });
}

AngularProfile AngularProfile::custom(std::string name, Fn fn) {
  return AngularProfile(std::move(name), std::move(fn));
}

void CollisionKernelSpec::validate() const {
  if (!(gamma > -3.0 && gamma <= 1.0)) {
    fail(ErrorCode::PreconditionViolated, "gamma must lie in (-3, 1]");
  }
  if (!(cutoff_lower > 0.0)) {
    fail(ErrorCode::PreconditionViolated, "cutoff constant K must be positive");
  }
  const int n = 257;
  const double lo = support_restricted ? 0.0 : -1.0;
  for (int i = 0; i < n; ++i) {
    const double c = lo + (1.0 - lo) * i / (n - 1);
    const double b = angular_profile(c);
    if (!(b >= cutoff_lower && b <= 1.0 / cutoff_lower)) {
      std::ostringstream msg;
      msg << "angular profile violates K <= b <= 1/K at cos theta = " << c;
      fail(ErrorCode::PreconditionViolated, msg.str());
    }
  }
}

double CollisionKernelSpec::angular_mass() const {
  // 2 pi * int b(c) dc over the support, Gauss-Legendre would be exact for
  // polynomials; composite Simpson keeps it simple and profile-agnostic.
  const double lo = support_restricted ? 0.0 : -1.0;
  const int n = 4096;
  const double h = (1.0 - lo) / n;
  double sum = angular(lo) + angular(1.0);
  for (int i = 1; i < n; ++i) {
    sum += angular(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  }
  return kTwoPi * sum * h / 3.0;
}

std::string CollisionKernelSpec::cache_key() const {
  std::ostringstream key;
  key << angular_profile.name() << ":g=" << gamma << ":K=" << cutoff_lower
      << ":r=" << (support_restricted ? 1 : 0);
  return key.str();
}

PostCollisionVelocities post_collision(const CollisionPair& pair) {
  const Vec3 rel = pair.v - pair.v_star;
  const double r = norm(rel);
  PostCollisionVelocities out;
  if (r == 0.0) {
    out.v_prime = pair.v;
    out.v_star_prime = pair.v_star;
    out.cos_theta = 1.0;  // identity collision by convention
    return out;
  }
  const Vec3 mid = 0.5 * (pair.v + pair.v_star);
  out.v_prime = mid + (0.5 * r) * pair.sigma;
  out.v_star_prime = mid - (0.5 * r) * pair.sigma;
  double c = dot(pair.sigma, rel) / r;
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  out.cos_theta = c;
  return out;
}

double kernel_value(const CollisionKernelSpec& spec, const CollisionPair& pair) {
  const Vec3 rel = pair.v - pair.v_star;
  const double r = norm(rel);
  if (r == 0.0) {
    if (spec.gamma < 0.0) {
      fail(ErrorCode::SingularRelativeVelocity,
           "kernel_value at v = v* with gamma < 0");
    }
    // gamma = 0: |v-v*|^0 = 1 and cos theta = 1 by convention.
    return spec.gamma == 0.0 ? spec.angular(1.0) : 0.0;
  }
  const double c = dot(pair.sigma, rel) / r;
  return std::pow(r, spec.gamma) * spec.angular(c);
}

CollisionKernelSpec symmetrized_kernel(const CollisionKernelSpec& spec) {
  if (spec.support_restricted) {
    fail(ErrorCode::AlreadySymmetrized, "kernel already restricted to theta <= pi/2");
  }
  CollisionKernelSpec out = spec;
  const AngularProfile b = spec.angular_profile;
  out.angular_profile = AngularProfile::custom(
      "sym(" + b.name() + ")",
      [b](double c) { return c < 0.0 ? 0.0 : b(c) + b(-c); });
  out.support_restricted = true;
  // The Grad bounds double under folding.
  out.cutoff_lower = 2.0 * spec.cutoff_lower;
  return out;
}

CarlemanPoint carleman_transform_point(Vec3 v, Vec3 v_prime, Vec3 w) {
  const Vec3 axis = v_prime - v;
  const double d = norm(axis);
  if (d == 0.0) {
    fail(ErrorCode::DegenerateDirection, "carleman transform requires v' != v");
  }
  const double wn = norm(w);
  if (wn > 0.0 && std::abs(dot(w, axis)) > 1e-9 * wn * d) {
    fail(ErrorCode::PreconditionViolated, "w must be orthogonal to v' - v");
  }
  CarlemanPoint out;
  out.v_star_prime = v + w;
  out.v_star = v_prime + w;
  out.r = std::sqrt(d * d + wn * wn);
  out.cos_half_theta = wn / out.r;
  out.jacobian_weight = 4.0 / (d * out.r);
  return out;
}

void plane_basis(Vec3 axis, Vec3& e1, Vec3& e2) {
  const Vec3 u = normalized(axis);
  // Start Gram-Schmidt from the coordinate axis of the largest |component|
  // of u; deterministic for reproducible plane quadratures.
  int imax = 0;
  double amax = std::abs(u.x);
  if (std::abs(u.y) > amax) { imax = 1; amax = std::abs(u.y); }
  if (std::abs(u.z) > amax) { imax = 2; }
  Vec3 seed{0.0, 0.0, 0.0};
  seed[(imax + 1) % 3] = 1.0;
  e1 = normalized(seed - dot(seed, u) * u);
  e2 = cross(u, e1);
}

}  // namespace boltzlab
