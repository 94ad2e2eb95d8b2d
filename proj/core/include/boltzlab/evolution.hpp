#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "boltzlab/collision.hpp"
#include "boltzlab/gain_kernel.hpp"

namespace boltzlab {

enum class EvolveMode { Linearized, Nonlinear };

struct EvolutionConfig {
  CollisionKernelSpec spec;
  EvolveMode mode = EvolveMode::Linearized;
  double dt = 0.05;
  double t_end = 1.0;
  std::vector<WeightContext> monitor_norms{WeightContext{}};
  ScatterOptions scatter;             // nonlinear term quadrature
  double source_threshold = 1e-12;    // linear gain source cut
  bool conservation_projection = true;
  double negativity_guard = 1e-8;     // abort when F < -guard * max mu
  std::string cache_dir = "cache";
  GainKernelTable::Params table_params;
  int monitor_stride = 1;             // record every k-th step
};

struct DecaySeries {
  std::vector<double> times;
  std::vector<std::string> norm_labels;
  std::vector<std::vector<double>> norms;       // [context][sample]
  std::vector<double> norm_tail_bound;          // per context, worst over run
  std::vector<double> mass_drift;               // relative to initial mass of F
  std::vector<double> momentum_drift;           // |p - p0|_2 / energy scale
  std::vector<double> energy_drift;             // relative
  std::vector<double> entropy;                  // H(mu + f), nonlinear mode
  bool entropy_monotone = true;
  double max_entropy_increase = 0.0;
  std::shared_ptr<const VelocityGrid> grid;
  std::vector<double> final_state;
  bool used_symmetry_reduction = false;
};

/// Explicit classical 4-stage integration of df/dt = L f (+ Q(f,f)).
/// Preconditions: dt * max nu < 1 (StabilityViolation); nonlinear mode
/// requires mu + f0 >= 0 and pre-projects P f0 = 0.
DecaySeries evolve(const EvolutionConfig& config, const Distribution& f0);

struct PicardReport {
  double contraction_window = 0.0;        // largest T with factor <= 1/2
  std::vector<double> increment_sup;      // sup-norm of iterate differences
  std::vector<double> contraction_ratios; // per iteration on the window
  double weighted_sup_initial = 0.0;      // ||<v>^k f0||_inf
  double weighted_sup_max = 0.0;          // sup over [0, T] of ||<v>^k f||_inf
  bool bound_holds = false;               // weighted_sup_max <= 2 * initial
  int iterations = 0;
  std::shared_ptr<const VelocityGrid> grid;
  std::vector<std::vector<double>> final_iterate;  // states at time nodes
  std::vector<double> time_nodes;
};

/// Fixed-point iteration of the mild form
///   f(t) = e^{-nu t} f0 + int_0^t e^{-nu (t-s)} (K_k f + Gamma_k(f,f))(s) ds
/// on [0, t_end]; reports the largest dyadic window with contraction factor
/// <= 1/2 per sweep. Throws NoContraction when even [0, dt] fails,
/// WeightTooSmall when k <= max{3, 3+gamma}.
PicardReport picard_iterate(const EvolutionConfig& config, const Distribution& f0,
                            double k, int max_iterations = 8);

enum class DecayModel { Exponential, Algebraic, StretchedExponential };

struct RateFit {
  DecayModel model = DecayModel::Exponential;
  double parameter = 0.0;   // lambda | slope | stretch exponent q
  double amplitude = 0.0;   // fitted intercept in the linearising coordinates
  double r_squared = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  int samples_used = 0;
};

/// Linear regression in the model's linearising coordinates. The window
/// drops the first 20% of samples and values below 1e3 x the truncation
/// estimate. Throws InsufficientData (< 20 usable) or DegenerateWindow.
RateFit fit_decay(const DecaySeries& series, DecayModel model,
                  std::size_t context_index = 0);

const char* decay_model_name(DecayModel model);

/// Radial Sonine-Laguerre mode S_m^{(1/2)}(|v|^2/2) mu(v); orthogonal to the
/// collision invariants for m >= 2.
double sonine_radial(int m, Vec3 v);

/// Named initial perturbations used by the CLI and the acceptance runs:
/// sonine2, sonine3-mix (Gaussian-enveloped, radial, P f0 = 0) and
/// poly-tail (radial <v>^{-tail_exponent} tail, P-projected off).
Distribution make_initial_state(std::shared_ptr<const VelocityGrid> grid,
                                const std::string& kind, double amplitude,
                                double tail_exponent = 13.5);

}  // namespace boltzlab
