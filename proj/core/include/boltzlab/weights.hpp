#pragma once

#include <optional>
#include <vector>

#include "boltzlab/quadrature.hpp"

namespace boltzlab {

/// Standard Gaussian equilibrium (2 pi)^{-3/2} exp(-|v|^2 / 2).
inline double maxwellian(Vec3 v) {
  return std::pow(kTwoPi, -1.5) * std::exp(-0.5 * norm2(v));
}
inline double maxwellian_of_norm2(double s2) {
  return std::pow(kTwoPi, -1.5) * std::exp(-0.5 * s2);
}

struct PolyWeight {
  double k = 0.0;
  double operator()(Vec3 v) const { return std::pow(bracket(v), k); }
  double log_value(double s) const { return k * std::log(bracket_of_norm(s)); }
};

struct ExpWeight {
  double k = 0.0;
  double a = 1.0;       // > 0
  double b_exp = 1.0;   // in (0, 2)

  ExpWeight(double k_, double a_, double b_) : k(k_), a(a_), b_exp(b_) {
    if (!(a > 0.0)) fail(ErrorCode::PreconditionViolated, "ExpWeight: a must be > 0");
    if (!(b_exp > 0.0 && b_exp < 2.0)) {
      fail(ErrorCode::PreconditionViolated, "ExpWeight: b_exp must lie in (0, 2)");
    }
  }
  double operator()(Vec3 v) const {
    const double br = bracket(v);
    return std::pow(br, k) * std::exp(a * std::pow(br, b_exp));
  }
  double log_value(double s) const {
    const double br = bracket_of_norm(s);
    return k * std::log(br) + a * std::pow(br, b_exp);
  }
};

/// Velocity weight attached to a norm: polynomial <v>^k, optionally times
/// exp(a <v>^b).
struct WeightContext {
  double k = 0.0;
  std::optional<double> a;
  std::optional<double> b_exp;

  double operator()(Vec3 v) const {
    if (a) return ExpWeight(k, *a, *b_exp)(v);
    return PolyWeight{k}(v);
  }
  bool grows() const { return k > 0.0 || a.has_value(); }
  std::string label() const;
};

/// Ladder of derivative weights w(|alpha|, |beta|) = <v>^{k - a|alpha| - b|beta| + c}
/// with a = 6 max(-gamma, 0), b = 7 max(-gamma, 0), c = 4b, plus the order
/// selector N (2, 3 or 4 by gamma range).
struct WeightLadder {
  double gamma = 0.0;
  double k = 0.0;

  double a() const { return 6.0 * std::max(-gamma, 0.0); }
  double b() const { return 7.0 * std::max(-gamma, 0.0); }
  double c() const { return 4.0 * b(); }
  int N() const;

  double exponent(int alpha, int beta) const {
    return k - a() * alpha - b() * beta + c();
  }
  double value(int alpha, int beta, Vec3 v) const {
    return std::pow(bracket(v), exponent(alpha, beta));
  }

  /// Derivative-order coefficients C_{|alpha|,|beta|} = eps^{2|beta| - |alpha|}
  /// with eps = 1e-2 (fixed; only the orderings are prescribed).
  static double order_coefficient(int alpha, int beta) {
    return std::pow(1e-2, 2.0 * beta - alpha);
  }
};

struct ConservedMoments {
  double mass = 0.0;
  Vec3 momentum;
  double energy = 0.0;
};

ConservedMoments conserved_moments(const VelocityGrid& grid,
                                   const std::vector<double>& field);

struct WeightedNormResult {
  double value = 0.0;
  // Outer-shell contribution to the squared norm; reported for growing
  // weights so truncation error is auditable.
  double tail_bound = 0.0;
};

WeightedNormResult norm_weighted_L2(const VelocityGrid& grid,
                                    const std::vector<double>& field,
                                    const WeightContext& weight);

/// L2(mu^{-1})-orthogonal projection onto span{mu, v_i mu, (|v|^2-3) mu/sqrt6}.
std::vector<double> projection_P(const VelocityGrid& grid,
                                 const std::vector<double>& field);

/// Relative entropy H(F) = int F ln F - mu ln mu with 0 ln 0 := 0; values in
/// [-negativity_tol, 0) are clamped to zero, anything below throws
/// NegativeDensity. Densities below 1e-300 are treated as zero.
double relative_entropy(const VelocityGrid& grid, const std::vector<double>& F,
                        double negativity_tol = 0.0);

struct CsiszarSplit {
  double quadratic_part = 0.0;  // int |F-mu|^2/(4 mu) on {|F-mu| <= mu}
  double l1_part = 0.0;         // int |F-mu|/4 on {|F-mu| >= mu}
};

CsiszarSplit entropy_csiszar_control(const VelocityGrid& grid,
                                     const std::vector<double>& F,
                                     double negativity_tol = 0.0);

// Gamma/Beta helpers, evaluated through lgamma for stability.
double beta_function(double p, double q);

/// Scalar function a (1+x)^{b/2} - (k/2) ln(1+x) used by the exponential
/// weight comparisons.
double exp_weight_scalar(double a, double b, double k, double x);

}  // namespace boltzlab
