#include "boltzlab/weights.hpp"

#include <cmath>
#include <sstream>

namespace boltzlab {

std::string WeightContext::label() const {
  std::ostringstream s;
  if (a) {
    s << "L2_k" << k << "_a" << *a << "_b" << *b_exp;
  } else {
    s << "L2_k" << k;
  }
  return s.str();
}

int WeightLadder::N() const {
  if (gamma > -1.5) return 2;
  if (gamma > -2.5) return 3;
  return 4;
}

ConservedMoments conserved_moments(const VelocityGrid& grid,
                                   const std::vector<double>& field) {
  if (field.size() != grid.size()) fail(ErrorCode::GridMismatch, "moments: field size");
  ConservedMoments m;
  m.mass = parallel_sum(field.size(), [&](std::size_t i) { return field[i]; }) *
           grid.cell_volume();
  for (int c = 0; c < 3; ++c) {
    m.momentum[c] = parallel_sum(field.size(), [&](std::size_t i) {
                      return grid.node(i)[c] * field[i];
                    }) * grid.cell_volume();
  }
  m.energy = parallel_sum(field.size(), [&](std::size_t i) {
               return norm2(grid.node(i)) * field[i];
             }) * grid.cell_volume();
  return m;
}

WeightedNormResult norm_weighted_L2(const VelocityGrid& grid,
                                    const std::vector<double>& field,
                                    const WeightContext& weight) {
  if (field.size() != grid.size()) fail(ErrorCode::GridMismatch, "norm: field size");
  const int n = grid.n_per_axis();
  std::vector<double> sq(field.size());
  parallel_for_blocked(field.size(), 8192, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const double w = weight(grid.node(i));
      sq[i] = field[i] * field[i] * w * w;
      if (!std::isfinite(sq[i])) {
        fail(ErrorCode::NonFiniteField, "norm_weighted_L2: non-finite integrand");
      }
    }
  });
  WeightedNormResult out;
  const double total = integrate_velocity(grid, sq);
  out.value = std::sqrt(std::max(0.0, total));
  if (weight.grows()) {
    // Outermost shell of cells as a truncation indicator.
    double shell = 0.0;
    for (std::size_t i = 0; i < sq.size(); ++i) {
      const Vec3 v = grid.node(i);
      const double edge = grid.v_max() - grid.spacing();
      if (std::abs(v.x) > edge || std::abs(v.y) > edge || std::abs(v.z) > edge) {
        shell += sq[i];
      }
    }
    out.tail_bound = shell * grid.cell_volume();
  }
  (void)n;
  return out;
}

std::vector<double> projection_P(const VelocityGrid& grid,
                                 const std::vector<double>& field) {
  if (field.size() != grid.size()) fail(ErrorCode::GridMismatch, "projection: field size");
  // Coefficients are plain moments of f against {1, v_i, (|v|^2-3)/sqrt6}.
  const ConservedMoments m = conserved_moments(grid, field);
  const double c0 = m.mass;
  const double ce = (m.energy - 3.0 * m.mass) / std::sqrt(6.0);
  std::vector<double> out(field.size());
  parallel_for_blocked(field.size(), 8192, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const Vec3 v = grid.node(i);
      const double mu = maxwellian(v);
      double p = c0 + dot(m.momentum, v) + ce * (norm2(v) - 3.0) / std::sqrt(6.0);
      out[i] = p * mu;
    }
  });
  return out;
}

namespace {
double entropy_term(double F, double mu) {
  const double a = F < 1e-300 ? 0.0 : F * std::log(F);
  const double b = mu < 1e-300 ? 0.0 : mu * std::log(mu);
  return a - b;
}
}  // namespace

double relative_entropy(const VelocityGrid& grid, const std::vector<double>& F,
                        double negativity_tol) {
  if (F.size() != grid.size()) fail(ErrorCode::GridMismatch, "entropy: field size");
  for (std::size_t i = 0; i < F.size(); ++i) {
    if (F[i] < -negativity_tol) {
      fail(ErrorCode::NegativeDensity, "relative_entropy: negative density");
    }
  }
  const double total = parallel_sum(F.size(), [&](std::size_t i) {
    const double Fi = F[i] < 0.0 ? 0.0 : F[i];
    return entropy_term(Fi, maxwellian(grid.node(i)));
  });
  return total * grid.cell_volume();
}

CsiszarSplit entropy_csiszar_control(const VelocityGrid& grid,
                                     const std::vector<double>& F,
                                     double negativity_tol) {
  if (F.size() != grid.size()) fail(ErrorCode::GridMismatch, "csiszar: field size");
  CsiszarSplit out;
  double quad = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    if (F[i] < -negativity_tol) {
      fail(ErrorCode::NegativeDensity, "entropy_csiszar_control: negative density");
    }
    const double Fi = F[i] < 0.0 ? 0.0 : F[i];
    const double mu = maxwellian(grid.node(i));
    const double d = std::abs(Fi - mu);
    if (d <= mu) {
      quad += d * d / (4.0 * mu);
    } else {
      l1 += d / 4.0;
    }
  }
  out.quadratic_part = quad * grid.cell_volume();
  out.l1_part = l1 * grid.cell_volume();
  return out;
}

double beta_function(double p, double q) {
  return std::exp(std::lgamma(p) + std::lgamma(q) - std::lgamma(p + q));
}

double exp_weight_scalar(double a, double b, double k, double x) {
  return a * std::pow(1.0 + x, 0.5 * b) - 0.5 * k * std::log1p(x);
}

}  // namespace boltzlab
