#include <doctest.h>

#include <cmath>

#include "boltzlab/kernel_geometry.hpp"
#include "boltzlab/quadrature.hpp"

using namespace boltzlab;

namespace {
CollisionKernelSpec make_spec(double gamma, bool restricted = true) {
  CollisionKernelSpec spec;
  spec.gamma = gamma;
  spec.angular_profile = AngularProfile::constant(1.0);
  spec.cutoff_lower = 0.5;
  spec.support_restricted = restricted;
  return spec;
}
}  // namespace

TEST_CASE("post_collision basic geometry") {
  // sigma aligned with the relative velocity: the identity collision.
  auto out = post_collision({{1, 0, 0}, {-1, 0, 0}, {1, 0, 0}});
  CHECK(out.v_prime.x == doctest::Approx(1.0));
  CHECK(out.v_star_prime.x == doctest::Approx(-1.0));
  CHECK(out.cos_theta == doctest::Approx(1.0));

  // Reversed sigma swaps the velocities.
  out = post_collision({{1, 0, 0}, {-1, 0, 0}, {-1, 0, 0}});
  CHECK(out.v_prime.x == doctest::Approx(-1.0));
  CHECK(out.v_star_prime.x == doctest::Approx(1.0));

  // Orthogonal sigma rotates the pair.
  out = post_collision({{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}});
  CHECK(out.v_prime.y == doctest::Approx(1.0));
  CHECK(out.v_prime.x == doctest::Approx(0.0));
  CHECK(out.v_star_prime.y == doctest::Approx(-1.0));
  CHECK(out.cos_theta == doctest::Approx(0.0));
}

TEST_CASE("post_collision conservation over random pairs") {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    Vec3 v{rng.normal(), rng.normal(), rng.normal()};
    Vec3 vs{2.0 * rng.normal(), rng.normal(), 0.5 * rng.normal()};
    double s[3];
    rng.unit_vector(s);
    const auto out = post_collision({v, vs, {s[0], s[1], s[2]}});
    const Vec3 dp = v + vs - out.v_prime - out.v_star_prime;
    CHECK(norm(dp) == doctest::Approx(0.0).epsilon(1e-12));
    const double e0 = norm2(v) + norm2(vs);
    const double e1 = norm2(out.v_prime) + norm2(out.v_star_prime);
    CHECK(e1 == doctest::Approx(e0).epsilon(1e-12));
  }
}

TEST_CASE("collision involution recovers the pair") {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    Vec3 v{rng.normal(), rng.normal(), rng.normal()};
    Vec3 vs{rng.normal(), rng.normal(), rng.normal()};
    double s[3];
    rng.unit_vector(s);
    const auto out = post_collision({v, vs, {s[0], s[1], s[2]}});
    // Colliding the products with sigma' = unit(v - v*) restores (v, v*).
    const Vec3 rel = v - vs;
    if (norm(rel) == 0.0) continue;
    const auto back = post_collision({out.v_prime, out.v_star_prime,
                                      normalized(rel)});
    CHECK(norm(back.v_prime - v) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(norm(back.v_star_prime - vs) == doctest::Approx(0.0).epsilon(1e-12));
    // The products with their own axis are a fixed configuration.
    const Vec3 relp = out.v_prime - out.v_star_prime;
    const auto again = post_collision({out.v_prime, out.v_star_prime,
                                       normalized(relp)});
    CHECK(norm(again.v_prime - out.v_prime) == doctest::Approx(0.0));
  }
}

TEST_CASE("kernel_value") {
  auto spec = make_spec(0.0);
  CHECK(kernel_value(spec, {{1, 0, 0}, {0, 1, 0}, {1, 0, 0}}) ==
        doctest::Approx(1.0));
  spec = make_spec(1.0);
  CHECK(kernel_value(spec, {{2, 0, 0}, {0, 0, 0}, {1, 0, 0}}) ==
        doctest::Approx(2.0));
  spec = make_spec(-1.0);
  CHECK(kernel_value(spec, {{0.5, 0, 0}, {0, 0, 0}, {1, 0, 0}}) ==
        doctest::Approx(2.0));
  CHECK_THROWS_AS(kernel_value(spec, {{1, 1, 1}, {1, 1, 1}, {1, 0, 0}}), Error);
}

TEST_CASE("kernel spec validation") {
  auto spec = make_spec(0.0);
  CHECK_NOTHROW(spec.validate());
  spec.gamma = -3.0;
  CHECK_THROWS_AS(spec.validate(), Error);
  spec = make_spec(0.0);
  spec.cutoff_lower = 1.5;  // b == 1 < K
  CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("symmetrized_kernel folds the profile") {
  auto spec = make_spec(0.0, false);
  auto sym = symmetrized_kernel(spec);
  CHECK(sym.support_restricted);
  CHECK(sym.angular(0.3) == doctest::Approx(2.0));
  CHECK(sym.angular(-0.3) == doctest::Approx(0.0));
  CHECK_THROWS_AS(symmetrized_kernel(sym), Error);

  // Even profile b(c) = c^2 folds to 2 c^2 on the hemisphere.
  spec.angular_profile = AngularProfile::cos_squared();
  spec.cutoff_lower = 1e-9;
  auto sym2 = symmetrized_kernel(spec);
  CHECK(sym2.angular(0.5) == doctest::Approx(0.5));

  // The angular mass is preserved for b(c) = 1 + c.
  CollisionKernelSpec lin = make_spec(0.0, false);
  lin.angular_profile = AngularProfile::one_plus_cos();
  lin.cutoff_lower = 1e-9;
  const double full = lin.angular_mass();
  const double folded = symmetrized_kernel(lin).angular_mass();
  CHECK(full == doctest::Approx(4.0 * kPi).epsilon(1e-9));
  CHECK(folded == doctest::Approx(full).epsilon(1e-9));
}

TEST_CASE("carleman transform point") {
  // Grazing limit w = 0.
  auto cp = carleman_transform_point({0, 0, 0}, {1, 0, 0}, {0, 0, 0});
  CHECK(cp.v_star_prime.x == doctest::Approx(0.0));
  CHECK(cp.cos_half_theta == doctest::Approx(0.0));
  CHECK(cp.r == doctest::Approx(1.0));

  // Direct substitution.
  cp = carleman_transform_point({0, 0, 0}, {1, 0, 0}, {0, 1, 0});
  CHECK(cp.v_star_prime.y == doctest::Approx(1.0));
  CHECK(cp.v_star.x == doctest::Approx(1.0));
  CHECK(cp.v_star.y == doctest::Approx(1.0));
  CHECK(cp.r == doctest::Approx(std::sqrt(2.0)));
  CHECK(cp.cos_half_theta == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(cp.jacobian_weight == doctest::Approx(4.0 / std::sqrt(2.0)));

  CHECK_THROWS_AS(carleman_transform_point({1, 2, 3}, {1, 2, 3}, {0, 1, 0}), Error);
  CHECK_THROWS_AS(carleman_transform_point({0, 0, 0}, {1, 0, 0}, {1, 1, 0}), Error);

  // Consistency with the collision parametrization: (v, v*) collide to
  // (v', v*') for some sigma on the half-angle cone.
  cp = carleman_transform_point({0.3, -0.2, 0.1}, {1.2, 0.4, -0.5}, {0, 0, 0});
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    Vec3 v{rng.normal(), rng.normal(), rng.normal()};
    Vec3 vp{rng.normal(), rng.normal(), rng.normal()};
    if (norm(vp - v) < 1e-6) continue;
    Vec3 e1, e2;
    plane_basis(vp - v, e1, e2);
    const Vec3 w = rng.normal() * e1 + rng.normal() * e2;
    const auto c = carleman_transform_point(v, vp, w);
    // r equals |v - v*| in the reconstructed pair.
    CHECK(norm(v - c.v_star) == doctest::Approx(c.r).epsilon(1e-12));
    // The reconstructed configuration satisfies the elastic laws.
    const Vec3 dp = v + c.v_star - vp - c.v_star_prime;
    CHECK(norm(dp) == doctest::Approx(0.0).epsilon(1e-12));
    const double e0 = norm2(v) + norm2(c.v_star);
    const double e1n = norm2(vp) + norm2(c.v_star_prime);
    CHECK(e1n == doctest::Approx(e0).epsilon(1e-12));
  }
}

TEST_CASE("plane basis is deterministic and orthonormal") {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    Vec3 a{rng.normal(), rng.normal(), rng.normal()};
    if (norm(a) < 1e-9) continue;
    Vec3 e1, e2;
    plane_basis(a, e1, e2);
    CHECK(std::abs(dot(e1, a)) < 1e-12 * norm(a));
    CHECK(std::abs(dot(e2, a)) < 1e-12 * norm(a));
    CHECK(std::abs(dot(e1, e2)) < 1e-12);
    CHECK(norm(e1) == doctest::Approx(1.0));
    CHECK(norm(e2) == doctest::Approx(1.0));
    Vec3 f1, f2;
    plane_basis(a, f1, f2);
    CHECK(norm(f1 - e1) == 0.0);
    CHECK(norm(f2 - e2) == 0.0);
  }
}
