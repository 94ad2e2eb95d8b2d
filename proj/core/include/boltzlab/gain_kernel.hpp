#pragma once

#include <memory>
#include <string>
#include <vector>

#include "boltzlab/kernel_geometry.hpp"

namespace boltzlab {

/// Tabulated gain kernel of the conjugation-free compact part: writing the
/// two gain integrals of Q(mu, .) + Q(., mu) over the plane orthogonal to
/// v' - v gives a kernel depending on s = |v|, s' = |v'| and d = |v - v'|
/// only. The table stores M(s, s', d) = d * kernel so the 1/d Carleman
/// factor stays exact; the d axis is log-spaced through xi = log(d + 1/2).
///
/// The weight-conjugated kernel is <v>^k <v'>^{-k} M / d, and
///   l_k(v, v') = <v>^k <v'>^{-k} (M/d - mu(v) m_b d^gamma).
class GainKernelTable {
 public:
  struct Params {
    double s_max = 14.5;
    int n_s = 192;
    double d_max = 29.0;
    int n_d = 320;
  };

  static std::shared_ptr<const GainKernelTable> build(
      const CollisionKernelSpec& spec, const Params& params);

  /// Loads a binary cache when present and compatible, else builds and saves.
  static std::shared_ptr<const GainKernelTable> load_or_build(
      const CollisionKernelSpec& spec, const Params& params,
      const std::string& cache_dir);

  /// Kernel value M/d by trilinear table interpolation.
  double value(double s, double sp, double d) const;

  /// Direct quadrature of the same kernel, no table (oracle for tests and
  /// the pointwise l_k accessor).
  static double direct(const CollisionKernelSpec& spec, double s, double sp,
                       double d);

  /// Plane-integral kernel with an extra log-space weight folded into the
  /// Gaussian exponent (keeps huge bracket ratios finite). folded selects
  /// b(c) + b(-c) (the two-term gain) versus the single b(c) term.
  static double direct_weighted(const CollisionKernelSpec& spec, double s,
                                double sp, double d, double extra_log,
                                bool folded);

  /// Integral of the kernel against f over the cell |delta| <= equivalent
  /// radius around v (the diagonal Carleman cell, where 1/d is integrable
  /// but not interpolable).
  static double diagonal_cell_integral(const CollisionKernelSpec& spec, double s,
                                       double cell_volume);

  const Params& params() const { return params_; }
  const std::string& spec_key() const { return spec_key_; }

  // Table coordinates (inner loops precompute indices from these).
  double ds() const { return ds_; }
  double xi0() const { return xi0_; }
  double dxi() const { return dxi_; }
  int n_s() const { return params_.n_s; }
  int n_d() const { return params_.n_d; }
  const std::vector<float>& data() const { return data_; }
  static double xi_of_d(double d) { return std::log(d + 0.5); }

 private:
  GainKernelTable() = default;

  Params params_;
  std::string spec_key_;
  double ds_ = 0.0;
  double xi0_ = 0.0;
  double dxi_ = 0.0;
  // Layout: [is][isp][id], M values (float; interpolation error dominates).
  std::vector<float> data_;
};

/// Pointwise kernel of K_k (gain minus the convolution part).
double l_k_value(const CollisionKernelSpec& spec, double k, Vec3 v, Vec3 v_prime);

/// int |l_k(v, v')| dv' over the annulus eps <v> <= |v - v'| <= <v>/eps
/// (eps = 0 means no restriction), reduced to a 2-D (d, s') quadrature.
double l_k_abs_row_integral(const CollisionKernelSpec& spec, double k, double s,
                            double eps = 0.0, double weight_exponent = 0.0);

/// Scaled modified Bessel function e^{-x} I_0(x).
double bessel_i0_scaled(double x);

}  // namespace boltzlab
