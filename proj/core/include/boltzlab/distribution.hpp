#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "boltzlab/weights.hpp"

namespace boltzlab {

/// How off-node values are reconstructed. All modes use zero extension
/// outside the box. The mu-factored modes interpolate f/mu and multiply by
/// the closed-form Maxwellian, which is exact for fields of the form
/// (polynomial) * mu up to the stencil order.
enum class InterpMode {
  Trilinear,           // raw node values
  TrilinearMuFactored, // trilinear on f/mu
  TricubicMuFactored,  // 4-point cubic per axis on f/mu
};

/// Sampled distribution on a velocity grid.
class Distribution {
 public:
  Distribution(std::shared_ptr<const VelocityGrid> grid, std::vector<double> values,
               std::optional<WeightContext> weight_context = std::nullopt);

  static Distribution zero(std::shared_ptr<const VelocityGrid> grid);
  static Distribution from_function(std::shared_ptr<const VelocityGrid> grid,
                                    const std::function<double(Vec3)>& f);

  const VelocityGrid& grid() const { return *grid_; }
  std::shared_ptr<const VelocityGrid> grid_ptr() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { ratio_.reset(); return values_; }
  const std::optional<WeightContext>& weight_context() const { return weight_context_; }
  void set_weight_context(WeightContext w) { weight_context_ = std::move(w); }

  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  /// Off-node evaluation in the requested mode.
  double interpolate(Vec3 v, InterpMode mode) const;

  /// Cached f/mu node values (built on first use).
  const std::vector<double>& ratio_values() const;

  double sup_norm() const;

 private:
  std::shared_ptr<const VelocityGrid> grid_;
  std::vector<double> values_;
  std::optional<WeightContext> weight_context_;
  mutable std::shared_ptr<const std::vector<double>> ratio_;
};

/// Raw trilinear interpolation of an arbitrary node array (zero outside).
double interpolate_trilinear(const VelocityGrid& grid, const std::vector<double>& f,
                             Vec3 v);

/// 4-point-per-axis cubic interpolation (zero outside, stencil clamped at
/// the boundary).
double interpolate_tricubic(const VelocityGrid& grid, const std::vector<double>& f,
                            Vec3 v);

}  // namespace boltzlab
