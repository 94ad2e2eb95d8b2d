#pragma once

#include <limits>
#include <memory>
#include <string>

#include "boltzlab/distribution.hpp"
#include "boltzlab/kernel_geometry.hpp"

namespace boltzlab {

/// Collision frequency nu(v) = int B mu(v*) dv* dsigma. The angular integral
/// factors out; the velocity integral reduces to a radial profile evaluated
/// by 1-D quadrature and tabulated.
class CollisionFrequency {
 public:
  CollisionFrequency(const CollisionKernelSpec& spec, double s_max);

  double of_norm(double s) const;       // nu at |v| = s (cubic table interp)
  double at(Vec3 v) const { return of_norm(norm(v)); }
  double angular_mass() const { return angular_mass_; }
  double max_value() const;

  /// Exact 1-D quadrature, bypassing the table (oracle/tests).
  static double radial_integral(double gamma, double s);

  struct Envelope { double lower = 0.0; double upper = 0.0; };
  /// Bounds of nu(v)/<v>^gamma over [0, s_max].
  Envelope comparability(int n_samples = 1024) const;

 private:
  double gamma_;
  double angular_mass_;
  double s_max_;
  std::vector<double> table_;  // nu on a uniform s-grid
  double ds_;
};

/// Options for the per-pair (v*, sigma) quadrature. The sigma rule is a
/// Gauss-Legendre x azimuth product aligned with each pair's relative
/// velocity, over the kernel's angular support.
struct PairQuadratureOptions {
  int n_theta = 32;
  int n_phi = 64;
  InterpMode interp = InterpMode::TrilinearMuFactored;
  // Pairs with |v|^2 + |v*|^2 above this skip the gain sigma-loop (the
  // collision sphere preserves that sum, so Maxwellian-enveloped integrands
  // are bounded by exp(-cut/2) there). Infinity disables the cut.
  double pair_energy_cut = std::numeric_limits<double>::infinity();
};

// ---------------------------------------------------------------------------
// Pointwise evaluators (probe-quality direct quadrature).

/// Q-(f, g)(v) = g(v) * int B f(v*) dsigma dv*.
double q_minus_at(const CollisionKernelSpec& spec, const Distribution& f,
                  const Distribution& g, Vec3 v, const PairQuadratureOptions& opt);

/// Q+(f, g)(v) = int B f(v*') g(v') dsigma dv*.
double q_plus_at(const CollisionKernelSpec& spec, const Distribution& f,
                 const Distribution& g, Vec3 v, const PairQuadratureOptions& opt);

/// Q(f, g) = Q+ - Q- with a shared pair loop (exact cancellation structure).
double q_at(const CollisionKernelSpec& spec, const Distribution& f,
            const Distribution& g, Vec3 v, const PairQuadratureOptions& opt);

/// L f (v) = Q(mu, f) + Q(f, mu) with the Maxwellian in closed form.
double linearized_L_at(const CollisionKernelSpec& spec, const Distribution& f,
                       Vec3 v, const PairQuadratureOptions& opt);

// ---------------------------------------------------------------------------
// Field evaluators.

/// Gather-form Q+(f,g), Q-(f,g) and Q(f,g) on every node of an output mask
/// (empty mask = all nodes). O(N_out * N_src * n_sigma); meant for small
/// grids and probe batteries.
struct FieldMask {
  // Node indices; empty means every node.
  std::vector<std::uint32_t> nodes;
};
Distribution q_plus_field(const CollisionKernelSpec& spec, const Distribution& f,
                          const Distribution& g, const PairQuadratureOptions& opt,
                          const FieldMask& mask = {});
Distribution q_minus_field(const CollisionKernelSpec& spec, const Distribution& f,
                           const Distribution& g, const PairQuadratureOptions& opt,
                           const FieldMask& mask = {});
Distribution q_field(const CollisionKernelSpec& spec, const Distribution& f,
                     const Distribution& g, const PairQuadratureOptions& opt,
                     const FieldMask& mask = {});

/// Scatter-form Q(f, f): loops source pairs once and deposits gain through
/// the adjoint of trilinear interpolation. Conserves mass and momentum to
/// rounding by construction; used by the time integrator.
struct ScatterOptions {
  int n_theta = 4;
  int n_phi = 8;
  int source_stride = 1;          // quadrature sublattice stride for sources
  double source_threshold = 1e-13;
  bool exploit_symmetry = true;   // cube-group reduction for invariant fields
};
Distribution q_scatter(const CollisionKernelSpec& spec, const Distribution& f,
                       const ScatterOptions& opt);

// ---------------------------------------------------------------------------
// Conjugated operators.

/// Gamma_k^{+/-}(f, f) = <v>^k Q^{+/-}(f <v>^{-k}, f <v>^{-k}) at a point.
double gamma_k_plus_at(const CollisionKernelSpec& spec, double k,
                       const Distribution& f, Vec3 v, const PairQuadratureOptions& opt);
double gamma_k_minus_at(const CollisionKernelSpec& spec, double k,
                        const Distribution& f, Vec3 v, const PairQuadratureOptions& opt);

/// Scatter-form Gamma_k(f, f) field.
Distribution gamma_k_scatter(const CollisionKernelSpec& spec, double k,
                             const Distribution& f, const ScatterOptions& opt);

/// Requires k > max{3, 3+gamma}; throws WeightTooSmall otherwise.
void require_weight(const CollisionKernelSpec& spec, double k);

// ---------------------------------------------------------------------------
// Cube-group symmetry of the cell-centered lattice (48 elements). Fields
// invariant under the group admit an exact 48-fold reduction of operator
// output loops.
class SymmetryIndex {
 public:
  explicit SymmetryIndex(const VelocityGrid& grid);

  std::size_t orbit_count() const { return reps_.size(); }
  const std::vector<std::uint32_t>& representatives() const { return reps_; }
  const std::vector<std::uint32_t>& orbit_sizes() const { return sizes_; }
  std::uint32_t orbit_of(std::size_t node) const { return orbit_[node]; }

  double max_asymmetry(const std::vector<double>& f) const;
  void symmetrize(std::vector<double>& f) const;          // snap to rep value
  void broadcast(const std::vector<double>& rep_values,
                 std::vector<double>& out) const;          // per-orbit values
  /// out := (1/48) sum_g g.out  (group average, exact for invariant inputs)
  void group_average(const VelocityGrid& grid, std::vector<double>& f) const;

 private:
  int n_;
  std::vector<std::uint32_t> orbit_;
  std::vector<std::uint32_t> reps_;
  std::vector<std::uint32_t> sizes_;
};

class GainKernelTable;  // see gain_kernel.hpp

/// Grid-bound applier for the linearized and weight-conjugated operators.
/// The gain part contracts a tabulated Carleman kernel against the field;
/// the convolution part runs through an FFT of the radial kernel; nu comes
/// from the radial table.
class LinearCollisionOperator {
 public:
  LinearCollisionOperator(const CollisionKernelSpec& spec,
                          std::shared_ptr<const VelocityGrid> grid,
                          std::shared_ptr<const GainKernelTable> table,
                          double conjugation_k, std::string cache_dir = "");
  ~LinearCollisionOperator();

  LinearCollisionOperator(const LinearCollisionOperator&) = delete;
  LinearCollisionOperator& operator=(const LinearCollisionOperator&) = delete;

  const CollisionFrequency& nu() const { return *nu_; }
  double conjugation_k() const { return k_; }

  /// K_k f = K_{2,k} f - K_{1,k} f.
  std::vector<double> apply_K(const std::vector<double>& f, bool symmetric_hint) const;
  /// L_k f = K_k f - nu f; at k = 0 this is the linearized operator L.
  std::vector<double> apply_L(const std::vector<double>& f, bool symmetric_hint) const;

  /// Relative source cut for the gain contraction.
  void set_source_threshold(double t) { source_threshold_ = t; }

 private:
  struct Impl;
  std::vector<double> gain(const std::vector<double>& f, bool symmetric_hint) const;
  std::vector<double> convolution_k1(const std::vector<double>& f) const;

  CollisionKernelSpec spec_;
  std::shared_ptr<const VelocityGrid> grid_;
  std::shared_ptr<const GainKernelTable> table_;
  double k_;
  double source_threshold_ = 1e-13;
  std::unique_ptr<CollisionFrequency> nu_;
  std::unique_ptr<SymmetryIndex> sym_;
  std::unique_ptr<Impl> impl_;
};

/// (|.|^gamma * f)(v) on the grid through zero-padded FFT; identical to the
/// direct lattice sum up to rounding, with the gamma < 0 diagonal rule.
std::vector<double> radial_kernel_convolution(const VelocityGrid& grid, double gamma,
                                              const std::vector<double>& f);

/// Projects a field onto the orthogonal complement of the discrete collision
/// invariants {mu, v_i mu, |v|^2 mu} so that mass, momentum and energy
/// moments of the result vanish exactly on the grid.
class ConservationProjector {
 public:
  explicit ConservationProjector(std::shared_ptr<const VelocityGrid> grid);
  void remove_invariant_moments(std::vector<double>& field) const;

 private:
  std::shared_ptr<const VelocityGrid> grid_;
  std::vector<std::vector<double>> basis_;   // dual basis fields
  std::vector<std::vector<double>> moments_; // phi values per node
};

}  // namespace boltzlab
