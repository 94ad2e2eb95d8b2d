#pragma once

#include <functional>
#include <memory>
#include <string>

#include "boltzlab/common.hpp"

namespace boltzlab {

/// Angular part b(cos theta) of the collision kernel. Profiles carry a name
/// and parameters so kernel caches can be keyed by content.
class AngularProfile {
 public:
  using Fn = std::function<double(double)>;

  AngularProfile() : AngularProfile(constant(1.0)) {}

  static AngularProfile constant(double b0);
  static AngularProfile one_plus_cos();      // 1 + c
  static AngularProfile cos_squared();       // c^2
  static AngularProfile custom(std::string name, Fn fn);

  double operator()(double cos_theta) const { return fn_(cos_theta); }
  const std::string& name() const { return name_; }

 private:
  AngularProfile(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}
  std::string name_;
  Fn fn_;
};

// B(v - v*, sigma) = |v - v*|^gamma b(cos theta) with Grad cutoff bounds
// K <= b <= 1/K on the support.
struct CollisionKernelSpec {
  double gamma = 0.0;
  AngularProfile angular_profile;
  double cutoff_lower = 0.5;        // K
  bool support_restricted = true;   // b vanishes for theta > pi/2

  // Validates the admissible range of gamma and the cutoff bounds on a
  // deterministic sample of angles; throws PreconditionViolated on failure.
  void validate() const;

  double angular(double cos_theta) const {
    if (support_restricted && cos_theta < 0.0) return 0.0;
    return angular_profile(cos_theta);
  }

  // Integral of b over the sphere; independent of the collision pair.
  double angular_mass() const;

  // Id string ("name:gamma:K:restricted") used in cache keys.
  std::string cache_key() const;
};

struct CollisionPair {
  Vec3 v;
  Vec3 v_star;
  Vec3 sigma;  // |sigma| = 1 within 1e-12
};

struct PostCollisionVelocities {
  Vec3 v_prime;
  Vec3 v_star_prime;
  double cos_theta = 1.0;
};

/// Elastic collision outcome: v' = (v+v*)/2 + (|v-v*|/2) sigma, and the
/// deviation cosine sigma . (v-v*)/|v-v*| (1 when v = v*).
PostCollisionVelocities post_collision(const CollisionPair& pair);

/// |v-v*|^gamma b(cos theta). Throws SingularRelativeVelocity when v = v*
/// and gamma < 0.
double kernel_value(const CollisionKernelSpec& spec, const CollisionPair& pair);

/// Folds b into (b(c) + b(-c)) 1_{c >= 0}; collision integrals of any test
/// function are unchanged. Throws AlreadySymmetrized for restricted input.
CollisionKernelSpec symmetrized_kernel(const CollisionKernelSpec& spec);

struct CarlemanPoint {
  Vec3 v_star;
  Vec3 v_star_prime;
  double r = 0.0;               // |v - v*| in the original variables
  double cos_half_theta = 0.0;  // |w| / r
  double jacobian_weight = 0.0; // 4 / (|v' - v| r)
};

/// Change of variables sending the (v*, sigma) integral to an integral over
/// v' and the plane w . (v' - v) = 0:
///   v*' = v + w,  v* = v' + w,  r = sqrt(|v'-v|^2 + |w|^2).
/// Throws DegenerateDirection when v' = v, PreconditionViolated when w is
/// not orthogonal to v' - v (tolerance 1e-9 relative).
CarlemanPoint carleman_transform_point(Vec3 v, Vec3 v_prime, Vec3 w);

/// Deterministic orthonormal basis (e1, e2) of the plane orthogonal to axis:
/// Gram-Schmidt against the coordinate axis of largest |component|.
void plane_basis(Vec3 axis, Vec3& e1, Vec3& e2);

}  // namespace boltzlab
