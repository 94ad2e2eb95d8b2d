#include "boltzlab/collision.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstring>
#include <limits>
#include <mutex>

#include "boltzlab/gain_kernel.hpp"

namespace boltzlab {

// ---------------------------------------------------------------------------
// Collision frequency.

double CollisionFrequency::radial_integral(double gamma, double s) {
  // R(s) = int |w|^gamma mu(v + w) dw for |v| = s, reduced to 1-D:
  //   s = 0: (2 pi)^{-3/2} 4 pi int rho^{2+gamma} e^{-rho^2/2} drho
  //   s > 0: (2 pi)^{-3/2} (2 pi / s) int rho^{1+gamma}
  //              [e^{-(rho-s)^2/2} - e^{-(rho+s)^2/2}] drho
  if (s < 1e-12) {
    return std::pow(kTwoPi, -1.5) * kFourPi *
           std::pow(2.0, 0.5 * (1.0 + gamma)) * std::tgamma(0.5 * (3.0 + gamma));
  }
  auto bracket_term = [&](double rho) {
    const double a = rho - s, b = rho + s;
    return std::pow(rho, 1.0 + gamma) *
           (std::exp(-0.5 * a * a) - std::exp(-0.5 * b * b));
  };
  double acc = 0.0;
  std::vector<double> x, w;
  // Head [0, 1]: rho = u^q absorbs the rho^{2+gamma} endpoint behaviour
  // (the bracket vanishes linearly at 0).
  const double q = std::max(1.0, 2.0 / (3.0 + gamma));
  gauss_legendre(48, 0.0, 1.0, x, w);
  for (int i = 0; i < 48; ++i) {
    const double u = x[i];
    const double rho = std::pow(u, q);
    acc += w[i] * bracket_term(rho) * q * std::pow(u, q - 1.0);
  }
  // Body [1, s + 14] in unit panels.
  const double hi = s + 14.0;
  std::vector<double> xp, wp;
  gauss_legendre(16, 0.0, 1.0, xp, wp);
  double a = 1.0;
  while (a < hi) {
    const double b = std::min(a + 1.0, hi);
    for (int i = 0; i < 16; ++i) {
      acc += wp[i] * (b - a) * bracket_term(a + (b - a) * xp[i]);
    }
    a = b;
  }
  return std::pow(kTwoPi, -1.5) * kTwoPi / s * acc;
}

CollisionFrequency::CollisionFrequency(const CollisionKernelSpec& spec, double s_max)
    : gamma_(spec.gamma), angular_mass_(spec.angular_mass()), s_max_(s_max) {
  const int n = 2048;
  table_.resize(n);
  ds_ = s_max_ / (n - 1);
  parallel_for_blocked(n, 64, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      table_[i] = angular_mass_ * radial_integral(gamma_, i * ds_);
    }
  });
}

double CollisionFrequency::of_norm(double s) const {
  if (s <= 0.0) return table_.front();
  const double f = std::min(s / ds_, static_cast<double>(table_.size() - 1.001));
  int i1 = static_cast<int>(f);
  double t = f - i1;
  const int n = static_cast<int>(table_.size());
  if (i1 < 1) { t -= (1 - i1); i1 = 1; }
  if (i1 > n - 3) { t += (i1 - (n - 3)); i1 = n - 3; }
  const double t2 = t * t, t3 = t2 * t;
  const double w0 = (-t3 + 2.0 * t2 - t) / 2.0;
  const double w1 = (3.0 * t3 - 5.0 * t2 + 2.0) / 2.0;
  const double w2 = (-3.0 * t3 + 4.0 * t2 + t) / 2.0;
  const double w3 = (t3 - t2) / 2.0;
  return w0 * table_[i1 - 1] + w1 * table_[i1] + w2 * table_[i1 + 1] + w3 * table_[i1 + 2];
}

double CollisionFrequency::max_value() const {
  double m = 0.0;
  for (double v : table_) m = std::max(m, v);
  return m;
}

CollisionFrequency::Envelope CollisionFrequency::comparability(int n_samples) const {
  Envelope env;
  env.lower = std::numeric_limits<double>::infinity();
  env.upper = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const double s = s_max_ * i / (n_samples - 1);
    const double ratio = of_norm(s) / std::pow(bracket_of_norm(s), gamma_);
    env.lower = std::min(env.lower, ratio);
    env.upper = std::max(env.upper, ratio);
  }
  return env;
}

// ---------------------------------------------------------------------------
// Pair-aligned sigma quadrature.
//
// For each pair the deviation cosine is a Gauss-Legendre node on the kernel's
// angular support, so smooth profiles integrate to rule precision and the
// loss-side angular mass matches the gain-side sum exactly.

namespace {

struct AlignedRule {
  std::vector<double> c, wc;          // cos(theta) nodes over the support
  std::vector<double> cos_phi, sin_phi;
  double w_phi = 0.0;
};

AlignedRule make_aligned_rule(const CollisionKernelSpec& spec, int n_theta, int n_phi) {
  AlignedRule rule;
  const double lo = spec.support_restricted ? 0.0 : -1.0;
  gauss_legendre(n_theta, lo, 1.0, rule.c, rule.wc);
  rule.w_phi = kTwoPi / n_phi;
  rule.cos_phi.resize(n_phi);
  rule.sin_phi.resize(n_phi);
  for (int j = 0; j < n_phi; ++j) {
    const double phi = rule.w_phi * (j + 0.5);
    rule.cos_phi[j] = std::cos(phi);
    rule.sin_phi[j] = std::sin(phi);
  }
  return rule;
}

// Angular mass of b under the rule (2 pi sum w_c b(c)); the loss term uses
// this same sum so equilibrium cancellation is exact.
double rule_angular_mass(const CollisionKernelSpec& spec, const AlignedRule& rule) {
  double m = 0.0;
  for (std::size_t i = 0; i < rule.c.size(); ++i) {
    m += rule.wc[i] * spec.angular(rule.c[i]);
  }
  return kTwoPi * m;
}

struct SourceWeights {
  // Cell measure multipliers implementing the diagonal-exclusion rule: the
  // cell at the excluded node gets 0, its face neighbours pick up 1/6 each.
  bool active = false;
  std::size_t center = 0;
  std::array<std::size_t, 6> neighbors{};
  int n_neighbors = 0;
};

SourceWeights diagonal_exclusion(const VelocityGrid& grid,
                                 const CollisionKernelSpec& spec, Vec3 v) {
  SourceWeights sw;
  if (spec.gamma >= 0.0) return sw;
  // Only exact node hits are excluded; off-node v never sees a zero distance.
  const double h = grid.spacing();
  const int n = grid.n_per_axis();
  int idx[3];
  for (int c = 0; c < 3; ++c) {
    const double x = (v[c] + grid.v_max()) / h - 0.5;
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-12 || r < 0 || r >= n) return sw;
    idx[c] = static_cast<int>(r);
  }
  sw.active = true;
  sw.center = grid.index(idx[0], idx[1], idx[2]);
  const int d[6][3] = {{1,0,0},{-1,0,0},{0,1,0},{0,-1,0},{0,0,1},{0,0,-1}};
  for (auto& dd : d) {
    const int i = idx[0] + dd[0], j = idx[1] + dd[1], k = idx[2] + dd[2];
    if (i >= 0 && i < n && j >= 0 && j < n && k >= 0 && k < n) {
      sw.neighbors[sw.n_neighbors++] = grid.index(i, j, k);
    }
  }
  return sw;
}

double cell_multiplier(const SourceWeights& sw, std::size_t node) {
  if (!sw.active) return 1.0;
  if (node == sw.center) return 0.0;
  for (int i = 0; i < sw.n_neighbors; ++i) {
    if (sw.neighbors[i] == node) return 1.0 + 1.0 / 6.0;
  }
  return 1.0;
}

void check_same_grid(const Distribution& f, const Distribution& g) {
  if (!(f.grid() == g.grid())) {
    fail(ErrorCode::GridMismatch, "distributions live on different grids");
  }
}

}  // namespace

double q_minus_at(const CollisionKernelSpec& spec, const Distribution& f,
                  const Distribution& g, Vec3 v, const PairQuadratureOptions& opt) {
  check_same_grid(f, g);
  const VelocityGrid& grid = f.grid();
  const AlignedRule rule = make_aligned_rule(spec, opt.n_theta, opt.n_phi);
  const double m_b = rule_angular_mass(spec, rule);
  const SourceWeights sw = diagonal_exclusion(grid, spec, v);
  const double loss_integral = parallel_sum(grid.size(), [&](std::size_t i) {
    const double fv = f[i];
    if (fv == 0.0) return 0.0;
    const Vec3 rel = v - grid.node(i);
    const double r2 = norm2(rel);
    if (r2 == 0.0) return spec.gamma == 0.0 ? fv : 0.0;  // excluded for gamma<0
    return std::pow(r2, 0.5 * spec.gamma) * fv * cell_multiplier(sw, i);
  });
  return g.interpolate(v, opt.interp) * m_b * loss_integral * grid.cell_volume();
}

namespace {

// Shared pair loop: gain and loss accumulated with identical pair weights.
struct PointResult {
  double gain = 0.0;
  double loss_f_integral = 0.0;  // int B f(v*) dsigma dv* / g(v)-factor form
};

template <typename GainTerm>
PointResult pair_loop_at(const CollisionKernelSpec& spec, const VelocityGrid& grid,
                         Vec3 v, const AlignedRule& rule, double m_b,
                         double pair_energy_cut,
                         const std::function<double(std::size_t)>& source_f,
                         GainTerm&& gain_term) {
  const SourceWeights sw = diagonal_exclusion(grid, spec, v);
  const std::size_t n_nodes = grid.size();
  constexpr std::size_t kBlock = 2048;
  const std::size_t nblocks = (n_nodes + kBlock - 1) / kBlock;
  std::vector<double> bgain(nblocks, 0.0), bloss(nblocks, 0.0);
  parallel_for_blocked(n_nodes, kBlock, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> gains, losses;
    gains.reserve(hi - lo);
    losses.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
      const double fv = source_f(i);
      const Vec3 vstar = grid.node(i);
      const Vec3 rel = v - vstar;
      const double r = norm(rel);
      if (r == 0.0) {
        // Identity collision: v' = v*' = v; excluded entirely for gamma < 0,
        // zero kernel for gamma > 0.
        if (spec.gamma == 0.0) {
          losses.push_back(fv);
          gains.push_back(m_b * gain_term(i, v, vstar));
        }
        continue;
      }
      const double mult = cell_multiplier(sw, i);
      if (mult == 0.0) continue;
      const double rg = std::pow(r, spec.gamma) * mult;
      losses.push_back(rg * fv);
      if (norm2(v) + norm2(vstar) > pair_energy_cut) continue;
      const Vec3 khat = rel / r;
      Vec3 e1, e2;
      plane_basis(khat, e1, e2);
      const Vec3 mid = 0.5 * (v + vstar);
      double sigma_acc = 0.0;
      for (std::size_t a = 0; a < rule.c.size(); ++a) {
        const double c = rule.c[a];
        const double b = spec.angular(c);
        if (b == 0.0) continue;
        const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        double phi_acc = 0.0;
        for (std::size_t p = 0; p < rule.cos_phi.size(); ++p) {
          const Vec3 sigma = c * khat + (s * rule.cos_phi[p]) * e1 +
                             (s * rule.sin_phi[p]) * e2;
          const Vec3 vp = mid + (0.5 * r) * sigma;
          const Vec3 vsp = mid - (0.5 * r) * sigma;
          phi_acc += gain_term(i, vp, vsp);
        }
        sigma_acc += rule.wc[a] * b * phi_acc * rule.w_phi;
      }
      gains.push_back(rg * sigma_acc);
    }
    bgain[lo / kBlock] = pairwise_sum(gains);
    bloss[lo / kBlock] = pairwise_sum(losses);
  });
  PointResult out;
  out.gain = pairwise_sum(bgain) * grid.cell_volume();
  out.loss_f_integral = pairwise_sum(bloss) * grid.cell_volume() * m_b;
  return out;
}

}  // namespace

double q_plus_at(const CollisionKernelSpec& spec, const Distribution& f,
                 const Distribution& g, Vec3 v, const PairQuadratureOptions& opt) {
  check_same_grid(f, g);
  const VelocityGrid& grid = f.grid();
  const AlignedRule rule = make_aligned_rule(spec, opt.n_theta, opt.n_phi);
  const double m_b = rule_angular_mass(spec, rule);
  auto result = pair_loop_at(
      spec, grid, v, rule, m_b, opt.pair_energy_cut,
      [&](std::size_t i) { return f[i]; },
      [&](std::size_t, Vec3 vp, Vec3 vsp) {
        return f.interpolate(vsp, opt.interp) * g.interpolate(vp, opt.interp);
      });
  return result.gain;
}

double q_at(const CollisionKernelSpec& spec, const Distribution& f,
            const Distribution& g, Vec3 v, const PairQuadratureOptions& opt) {
  check_same_grid(f, g);
  const VelocityGrid& grid = f.grid();
  const AlignedRule rule = make_aligned_rule(spec, opt.n_theta, opt.n_phi);
  const double m_b = rule_angular_mass(spec, rule);
  auto result = pair_loop_at(
      spec, grid, v, rule, m_b, opt.pair_energy_cut,
      [&](std::size_t i) { return f[i]; },
      [&](std::size_t, Vec3 vp, Vec3 vsp) {
        return f.interpolate(vsp, opt.interp) * g.interpolate(vp, opt.interp);
      });
  return result.gain - g.interpolate(v, opt.interp) * result.loss_f_integral;
}

double linearized_L_at(const CollisionKernelSpec& spec, const Distribution& f,
                       Vec3 v, const PairQuadratureOptions& opt) {
  const VelocityGrid& grid = f.grid();
  const AlignedRule rule = make_aligned_rule(spec, opt.n_theta, opt.n_phi);
  const double m_b = rule_angular_mass(spec, rule);
  // Gain of Q(mu, f) + Q(f, mu) with the Maxwellian in closed form; the two
  // loss terms are nu(v) f(v) (from the mu source integral) and
  // mu(v) * int B f(v*) (accumulated by the shared loop).
  auto gain = pair_loop_at(
      spec, grid, v, rule, m_b, opt.pair_energy_cut,
      [&](std::size_t i) { return f[i]; },
      [&](std::size_t, Vec3 vp, Vec3 vsp) {
        return maxwellian(vsp) * f.interpolate(vp, opt.interp) +
               f.interpolate(vsp, opt.interp) * maxwellian(vp);
      });
  // nu(v) through the same discrete source quadrature for exact pairing.
  auto mu_loss = pair_loop_at(
      spec, grid, v, rule, m_b, 0.0,
      [&](std::size_t i) { return maxwellian(grid.node(i)); },
      [&](std::size_t, Vec3, Vec3) { return 0.0; });
  const double fv = f.interpolate(v, opt.interp);
  const double mu_v = maxwellian(v);
  return gain.gain - mu_loss.loss_f_integral * fv - gain.loss_f_integral * mu_v;
}

// ---------------------------------------------------------------------------
// Gather-form fields.

namespace {

std::vector<std::uint32_t> full_mask(const VelocityGrid& grid) {
  std::vector<std::uint32_t> m(grid.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<std::uint32_t>(i);
  return m;
}

template <typename PointFn>
Distribution eval_on_mask(const Distribution& f, const FieldMask& mask,
                          PointFn&& point) {
  const VelocityGrid& grid = f.grid();
  std::vector<double> out(grid.size(), 0.0);
  std::vector<std::uint32_t> nodes =
      mask.nodes.empty() ? full_mask(grid) : mask.nodes;
  // Outer parallelism lives inside the point evaluators already; keep this
  // loop serial to avoid nested pools.
  for (std::uint32_t idx : nodes) {
    out[idx] = point(grid.node(idx));
  }
  return Distribution(f.grid_ptr(), std::move(out), f.weight_context());
}

}  // namespace

Distribution q_plus_field(const CollisionKernelSpec& spec, const Distribution& f,
                          const Distribution& g, const PairQuadratureOptions& opt,
                          const FieldMask& mask) {
  return eval_on_mask(f, mask, [&](Vec3 v) { return q_plus_at(spec, f, g, v, opt); });
}

Distribution q_minus_field(const CollisionKernelSpec& spec, const Distribution& f,
                           const Distribution& g, const PairQuadratureOptions& opt,
                           const FieldMask& mask) {
  return eval_on_mask(f, mask, [&](Vec3 v) { return q_minus_at(spec, f, g, v, opt); });
}

Distribution q_field(const CollisionKernelSpec& spec, const Distribution& f,
                     const Distribution& g, const PairQuadratureOptions& opt,
                     const FieldMask& mask) {
  return eval_on_mask(f, mask, [&](Vec3 v) { return q_at(spec, f, g, v, opt); });
}

// ---------------------------------------------------------------------------
// Cube-group symmetry index.

SymmetryIndex::SymmetryIndex(const VelocityGrid& grid) : n_(grid.n_per_axis()) {
  const int n = n_;
  orbit_.assign(grid.size(), 0);
  // Signed odd coordinate a = 2 i + 1 - n; canonical form sorts |a|,|b|,|c|.
  // Key = sorted absolute triple packed into 32 bits.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> keyed(grid.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        int a = std::abs(2 * i + 1 - n), b = std::abs(2 * j + 1 - n),
            c = std::abs(2 * k + 1 - n);
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        const std::uint32_t key = (static_cast<std::uint32_t>(a) << 20) |
                                  (static_cast<std::uint32_t>(b) << 10) |
                                  static_cast<std::uint32_t>(c);
        const std::size_t idx = grid.index(i, j, k);
        keyed[idx] = {key, static_cast<std::uint32_t>(idx)};
      }
    }
  }
  auto sorted = keyed;
  std::sort(sorted.begin(), sorted.end());
  std::uint32_t prev_key = sorted.empty() ? 0 : sorted[0].first + 1;
  for (const auto& [key, idx] : sorted) {
    if (key != prev_key) {
      reps_.push_back(idx);
      sizes_.push_back(0);
      prev_key = key;
    }
    orbit_[idx] = static_cast<std::uint32_t>(reps_.size() - 1);
    ++sizes_.back();
  }
}

double SymmetryIndex::max_asymmetry(const std::vector<double>& f) const {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    m = std::max(m, std::abs(f[i] - f[reps_[orbit_[i]]]));
  }
  return m;
}

void SymmetryIndex::symmetrize(std::vector<double>& f) const {
  std::vector<double> rep_vals(reps_.size());
  for (std::size_t o = 0; o < reps_.size(); ++o) rep_vals[o] = f[reps_[o]];
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = rep_vals[orbit_[i]];
}

void SymmetryIndex::broadcast(const std::vector<double>& rep_values,
                              std::vector<double>& out) const {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = rep_values[orbit_[i]];
}

void SymmetryIndex::group_average(const VelocityGrid& grid,
                                  std::vector<double>& f) const {
  (void)grid;
  std::vector<double> sums(reps_.size(), 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) sums[orbit_[i]] += f[i];
  for (std::size_t o = 0; o < sums.size(); ++o) sums[o] /= sizes_[o];
  broadcast(sums, f);
}

// ---------------------------------------------------------------------------
// Scatter-form Q(f, f).

namespace {

// Restriction of a fine field to the half-resolution cell-centered grid;
// coarse nodes sit on fine cell corners, so this is the 8-neighbour mean.
void restrict_to_coarse(const VelocityGrid& fine, const std::vector<double>& f,
                        const VelocityGrid& coarse, std::vector<double>& out) {
  const int nc = coarse.n_per_axis();
  out.assign(coarse.size(), 0.0);
  for (int i = 0; i < nc; ++i) {
    for (int j = 0; j < nc; ++j) {
      for (int k = 0; k < nc; ++k) {
        double acc = 0.0;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
              acc += f[fine.index(2 * i + a, 2 * j + b, 2 * k + c)];
        out[coarse.index(i, j, k)] = acc / 8.0;
      }
    }
  }
}

inline void scatter_trilinear(const VelocityGrid& grid, Vec3 v, double amount,
                              double* out) {
  const int n = grid.n_per_axis();
  const double h = grid.spacing();
  double t[3];
  int i0[3];
  for (int c = 0; c < 3; ++c) {
    const double x = (v[c] + grid.v_max()) / h - 0.5;
    if (x < -0.5 || x > n - 0.5) return;  // leaves the box: dropped
    const double fl = std::floor(x);
    i0[c] = static_cast<int>(fl);
    t[c] = x - fl;
  }
  for (int a = 0; a < 2; ++a) {
    const int i = i0[0] + a;
    if (i < 0 || i >= n) continue;
    const double wa = a ? t[0] : 1.0 - t[0];
    for (int b = 0; b < 2; ++b) {
      const int j = i0[1] + b;
      if (j < 0 || j >= n) continue;
      const double wb = wa * (b ? t[1] : 1.0 - t[1]);
      for (int c = 0; c < 2; ++c) {
        const int k = i0[2] + c;
        if (k < 0 || k >= n) continue;
        out[grid.index(i, j, k)] += amount * wb * (c ? t[2] : 1.0 - t[2]);
      }
    }
  }
}

}  // namespace

Distribution q_scatter(const CollisionKernelSpec& spec, const Distribution& f,
                       const ScatterOptions& opt) {
  const VelocityGrid& grid = f.grid();
  auto fine_ptr = f.grid_ptr();

  // Source representation: either the fine grid or its half-resolution
  // restriction (pair quadrature at doubled spacing).
  std::shared_ptr<const VelocityGrid> src_grid = fine_ptr;
  std::vector<double> src = f.values();
  if (opt.source_stride == 2 && grid.n_per_axis() % 2 == 0 &&
      grid.n_per_axis() >= 16) {
    auto coarse = std::make_shared<VelocityGrid>(grid.v_max(), grid.n_per_axis() / 2);
    std::vector<double> cvals;
    restrict_to_coarse(grid, f.values(), *coarse, cvals);
    src_grid = coarse;
    src = std::move(cvals);
  }

  const AlignedRule rule = make_aligned_rule(spec, opt.n_theta, opt.n_phi);
  const double m_b = rule_angular_mass(spec, rule);
  const double wcell = src_grid->cell_volume();

  // Source list above threshold.
  double fmax = 0.0;
  for (double x : src) fmax = std::max(fmax, std::abs(x));
  const double cut = opt.source_threshold * fmax;
  std::vector<std::uint32_t> sources;
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (std::abs(src[i]) > cut) sources.push_back(static_cast<std::uint32_t>(i));
  }

  // Symmetry reduction: restrict v1 to orbit representatives (weighted by
  // orbit size) and group-average the output, exact for invariant sources.
  std::unique_ptr<SymmetryIndex> sym;
  std::vector<std::uint32_t> v1_list = sources;
  std::vector<double> v1_mult(sources.size(), 1.0);
  bool symmetric = false;
  if (opt.exploit_symmetry) {
    sym = std::make_unique<SymmetryIndex>(*src_grid);
    if (sym->max_asymmetry(src) == 0.0) {
      symmetric = true;
      v1_list.clear();
      v1_mult.clear();
      for (std::uint32_t i : sources) {
        if (sym->representatives()[sym->orbit_of(i)] == i) {
          v1_list.push_back(i);
          v1_mult.push_back(static_cast<double>(sym->orbit_sizes()[sym->orbit_of(i)]));
        }
      }
    }
  }

  const std::size_t n_out = grid.size();
  const std::size_t workers = worker_count();
  std::vector<std::vector<double>> partial(workers, std::vector<double>(n_out, 0.0));
  std::atomic<std::size_t> next{0};
  const std::size_t chunk = std::max<std::size_t>(1, v1_list.size() / (8 * workers) + 1);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      double* out = partial[w].data();
      while (true) {
        const std::size_t begin = next.fetch_add(chunk);
        if (begin >= v1_list.size()) break;
        const std::size_t end = std::min(v1_list.size(), begin + chunk);
        for (std::size_t a = begin; a < end; ++a) {
          const std::uint32_t i1 = v1_list[a];
          const Vec3 v1 = src_grid->node(i1);
          const double f1 = src[i1] * v1_mult[a];
          const SourceWeights sw = diagonal_exclusion(*src_grid, spec, v1);
          for (std::uint32_t i2 : sources) {
            const Vec3 v2 = src_grid->node(i2);
            const Vec3 rel = v1 - v2;
            const double r = norm(rel);
            double pair_w = f1 * src[i2] * wcell * wcell;
            if (r == 0.0) {
              if (spec.gamma != 0.0) continue;  // excluded / zero kernel
              // Identity geometry: gain cancels loss exactly; skip.
              continue;
            }
            pair_w *= cell_multiplier(sw, i2);
            if (pair_w == 0.0) continue;
            const double rg = std::pow(r, spec.gamma);
            const Vec3 khat = rel / r;
            Vec3 e1, e2;
            plane_basis(khat, e1, e2);
            const Vec3 mid = 0.5 * (v1 + v2);
            // Loss at the v1 slot.
            scatter_trilinear(grid, v1, -pair_w * rg * m_b, out);
            for (std::size_t t = 0; t < rule.c.size(); ++t) {
              const double c = rule.c[t];
              const double b = spec.angular(c);
              if (b == 0.0) continue;
              const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
              const double wc = rule.wc[t] * b * rule.w_phi * pair_w * rg;
              for (std::size_t p = 0; p < rule.cos_phi.size(); ++p) {
                const Vec3 sigma = c * khat + (s * rule.cos_phi[p]) * e1 +
                                   (s * rule.sin_phi[p]) * e2;
                const Vec3 vp = mid + (0.5 * r) * sigma;
                scatter_trilinear(grid, vp, wc, out);
              }
            }
          }
        }
      }
    });
  }
  for (auto& t : pool) t.join();

  std::vector<double> result(n_out, 0.0);
  for (std::size_t w = 0; w < workers; ++w) {
    for (std::size_t i = 0; i < n_out; ++i) result[i] += partial[w][i];
  }
  const double inv_vol = 1.0 / grid.cell_volume();
  for (double& x : result) x *= inv_vol;
  if (symmetric) {
    SymmetryIndex out_sym(grid);
    out_sym.group_average(grid, result);
  }
  return Distribution(fine_ptr, std::move(result), f.weight_context());
}

// ---------------------------------------------------------------------------
// Conjugated operators.

void require_weight(const CollisionKernelSpec& spec, double k) {
  if (!(k > std::max(3.0, 3.0 + spec.gamma))) {
    fail(ErrorCode::WeightTooSmall, "conjugation weight must exceed max{3, 3+gamma}");
  }
}

namespace {
Distribution conjugate_down(const Distribution& f, double k) {
  std::vector<double> vals(f.size());
  const VelocityGrid& grid = f.grid();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    vals[i] = f[i] * std::pow(bracket(grid.node(i)), -k);
  }
  return Distribution(f.grid_ptr(), std::move(vals));
}
}  // namespace

double gamma_k_plus_at(const CollisionKernelSpec& spec, double k,
                       const Distribution& f, Vec3 v,
                       const PairQuadratureOptions& opt) {
  require_weight(spec, k);
  Distribution fd = conjugate_down(f, k);
  return std::pow(bracket(v), k) * q_plus_at(spec, fd, fd, v, opt);
}

double gamma_k_minus_at(const CollisionKernelSpec& spec, double k,
                        const Distribution& f, Vec3 v,
                        const PairQuadratureOptions& opt) {
  require_weight(spec, k);
  Distribution fd = conjugate_down(f, k);
  return q_minus_at(spec, fd, fd, v, opt) * std::pow(bracket(v), k);
}

Distribution gamma_k_scatter(const CollisionKernelSpec& spec, double k,
                             const Distribution& f, const ScatterOptions& opt) {
  require_weight(spec, k);
  Distribution fd = conjugate_down(f, k);
  Distribution q = q_scatter(spec, fd, opt);
  std::vector<double> vals = q.values();
  const VelocityGrid& grid = f.grid();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    vals[i] *= std::pow(bracket(grid.node(i)), k);
  }
  return Distribution(f.grid_ptr(), std::move(vals), f.weight_context());
}

// ---------------------------------------------------------------------------
// Linear operator with tabulated gain kernel + FFT convolution loss.

struct LinearCollisionOperator::Impl {
  // Per-offset table indices: xi index/fraction for the log(d + 1/2) axis,
  // 1/d, and d^gamma (for tests; the convolution itself runs through FFT).
  struct OffsetEntry {
    std::uint16_t xi_idx;
    std::uint16_t xi_frac;  // quantized /65535
    float inv_d;
  };
  std::vector<OffsetEntry> offsets;  // (2n)^3
  std::vector<std::uint32_t> sp_pack;  // per node: (s index << 16) | frac
  std::vector<float> snorm;            // per node |v|
  std::vector<double> wk_out;          // <v>^k
  std::vector<double> wk_in;           // <v>^{-k}
  std::vector<double> nu_node;         // nu at nodes
  std::vector<double> mu_node;         // mu at nodes
  std::vector<double> diag_cell;       // diagonal Carleman cell integral per s-rep

  // FFT machinery for the radial convolution.
  int nfft = 0;
  std::vector<double> kernel_hat_re;  // r2c of the radial kernel (packed complex)
  std::vector<double> kernel_hat_im;
  fftw_plan plan_fwd = nullptr;
  fftw_plan plan_bwd = nullptr;
  double* fft_in = nullptr;
  fftw_complex* fft_mid = nullptr;
  std::mutex fft_mutex;

  ~Impl() {
    if (plan_fwd) fftw_destroy_plan(plan_fwd);
    if (plan_bwd) fftw_destroy_plan(plan_bwd);
    if (fft_in) fftw_free(fft_in);
    if (fft_mid) fftw_free(fft_mid);
  }
};

LinearCollisionOperator::LinearCollisionOperator(
    const CollisionKernelSpec& spec, std::shared_ptr<const VelocityGrid> grid,
    std::shared_ptr<const GainKernelTable> table, double conjugation_k,
    std::string cache_dir)
    : spec_(spec), grid_(std::move(grid)), table_(std::move(table)),
      k_(conjugation_k), impl_(std::make_unique<Impl>()) {
  (void)cache_dir;
  const int n = grid_->n_per_axis();
  const double h = grid_->spacing();
  const double s_max = std::sqrt(3.0) * grid_->v_max() + 1e-9;
  nu_ = std::make_unique<CollisionFrequency>(spec_, s_max + 0.5);
  sym_ = std::make_unique<SymmetryIndex>(*grid_);

  // Offset table over the (2n)^3 difference lattice.
  const int m = 2 * n;
  impl_->offsets.resize(static_cast<std::size_t>(m) * m * m);
  const double xi0 = table_->xi0();
  const double dxi = table_->dxi();
  const int n_d = table_->n_d();
  parallel_for_blocked(impl_->offsets.size(), 65536, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t idx = lo; idx < hi; ++idx) {
      const int di = static_cast<int>(idx / (static_cast<std::size_t>(m) * m)) - n;
      const int dj = static_cast<int>((idx / m) % m) - n;
      const int dk = static_cast<int>(idx % m) - n;
      const double d = h * std::sqrt(double(di) * di + double(dj) * dj + double(dk) * dk);
      Impl::OffsetEntry e{};
      if (d > 0.0) {
        double fx = (GainKernelTable::xi_of_d(d) - xi0) / dxi;
        fx = std::min(std::max(fx, 0.0), n_d - 1.0001);
        e.xi_idx = static_cast<std::uint16_t>(fx);
        e.xi_frac = static_cast<std::uint16_t>((fx - e.xi_idx) * 65535.0);
        e.inv_d = static_cast<float>(1.0 / d);
      } else {
        e.xi_idx = 0;
        e.xi_frac = 0;
        e.inv_d = 0.0f;  // diagonal handled by the cell integral
      }
      impl_->offsets[idx] = e;
    }
  });

  // Per-node arrays.
  const std::size_t N = grid_->size();
  impl_->sp_pack.resize(N);
  impl_->snorm.resize(N);
  impl_->wk_out.resize(N);
  impl_->wk_in.resize(N);
  impl_->nu_node.resize(N);
  impl_->mu_node.resize(N);
  const double ds = table_->ds();
  const int n_s = table_->n_s();
  parallel_for_blocked(N, 8192, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const Vec3 v = grid_->node(i);
      const double s = norm(v);
      impl_->snorm[i] = static_cast<float>(s);
      double fs = std::min(std::max(s / ds, 0.0), n_s - 1.0001);
      const std::uint32_t is = static_cast<std::uint32_t>(fs);
      const std::uint32_t frac = static_cast<std::uint32_t>((fs - is) * 65535.0);
      impl_->sp_pack[i] = (is << 16) | frac;
      const double br = bracket_of_norm(s);
      impl_->wk_out[i] = std::pow(br, k_);
      impl_->wk_in[i] = std::pow(br, -k_);
      impl_->nu_node[i] = nu_->of_norm(s);
      impl_->mu_node[i] = maxwellian_of_norm2(s * s);
    }
  });

  // Diagonal Carleman cell per orbit representative radius.
  impl_->diag_cell.resize(sym_->orbit_count());
  parallel_for_blocked(sym_->orbit_count(), 64, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t o = lo; o < hi; ++o) {
      const double s = impl_->snorm[sym_->representatives()[o]];
      impl_->diag_cell[o] =
          GainKernelTable::diagonal_cell_integral(spec_, s, grid_->cell_volume());
    }
  });

  // FFT of the radial convolution kernel d^gamma with the diagonal rule.
  const int nf = m;
  impl_->nfft = nf;
  const std::size_t real_count = static_cast<std::size_t>(nf) * nf * nf;
  const std::size_t cplx_count = static_cast<std::size_t>(nf) * nf * (nf / 2 + 1);
  impl_->fft_in = fftw_alloc_real(real_count);
  impl_->fft_mid = fftw_alloc_complex(cplx_count);
  impl_->plan_fwd = fftw_plan_dft_r2c_3d(nf, nf, nf, impl_->fft_in, impl_->fft_mid,
                                         FFTW_ESTIMATE);
  impl_->plan_bwd = fftw_plan_dft_c2r_3d(nf, nf, nf, impl_->fft_mid, impl_->fft_in,
                                         FFTW_ESTIMATE);
  // Kernel on the circulant lattice (wrap-around indexing).
  std::memset(impl_->fft_in, 0, real_count * sizeof(double));
  for (int di = -n + 1; di < n; ++di) {
    for (int dj = -n + 1; dj < n; ++dj) {
      for (int dk = -n + 1; dk < n; ++dk) {
        const double d = h * std::sqrt(double(di) * di + double(dj) * dj + double(dk) * dk);
        double val;
        if (d == 0.0) {
          val = spec_.gamma == 0.0 ? 1.0 : 0.0;
        } else {
          val = std::pow(d, spec_.gamma);
          if (spec_.gamma < 0.0 && std::abs(di) + std::abs(dj) + std::abs(dk) == 1) {
            val *= 7.0 / 6.0;  // face neighbours absorb the excluded cell
          }
        }
        const int ii = (di + nf) % nf, jj = (dj + nf) % nf, kk = (dk + nf) % nf;
        impl_->fft_in[(static_cast<std::size_t>(ii) * nf + jj) * nf + kk] = val;
      }
    }
  }
  fftw_execute(impl_->plan_fwd);
  impl_->kernel_hat_re.resize(cplx_count);
  impl_->kernel_hat_im.resize(cplx_count);
  for (std::size_t i = 0; i < cplx_count; ++i) {
    impl_->kernel_hat_re[i] = impl_->fft_mid[i][0];
    impl_->kernel_hat_im[i] = impl_->fft_mid[i][1];
  }
}

LinearCollisionOperator::~LinearCollisionOperator() = default;

std::vector<double> LinearCollisionOperator::convolution_k1(
    const std::vector<double>& f) const {
  // (d^gamma * f)(v) on the periodic-extended lattice; zero padding to 2n
  // removes wrap-around aliasing.
  auto& im = *impl_;
  std::lock_guard<std::mutex> lock(im.fft_mutex);
  const int n = grid_->n_per_axis();
  const int nf = im.nfft;
  const std::size_t real_count = static_cast<std::size_t>(nf) * nf * nf;
  const std::size_t cplx_count = static_cast<std::size_t>(nf) * nf * (nf / 2 + 1);
  std::memset(im.fft_in, 0, real_count * sizeof(double));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double* src = f.data() + grid_->index(i, j, 0);
      double* dst = im.fft_in + (static_cast<std::size_t>(i) * nf + j) * nf;
      std::memcpy(dst, src, n * sizeof(double));
    }
  }
  fftw_execute(im.plan_fwd);
  for (std::size_t i = 0; i < cplx_count; ++i) {
    const double re = im.fft_mid[i][0], imx = im.fft_mid[i][1];
    im.fft_mid[i][0] = re * im.kernel_hat_re[i] - imx * im.kernel_hat_im[i];
    im.fft_mid[i][1] = re * im.kernel_hat_im[i] + imx * im.kernel_hat_re[i];
  }
  fftw_execute(im.plan_bwd);
  const double scale = 1.0 / real_count;
  std::vector<double> out(grid_->size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double* src = im.fft_in + (static_cast<std::size_t>(i) * nf + j) * nf;
      double* dst = out.data() + grid_->index(i, j, 0);
      for (int k = 0; k < n; ++k) dst[k] = src[k] * scale;
    }
  }
  return out;
}

std::vector<double> LinearCollisionOperator::gain(const std::vector<double>& f,
                                                  bool symmetric_hint) const {
  const auto& im = *impl_;
  const int n = grid_->n_per_axis();
  const std::size_t N = grid_->size();
  const int n_s = table_->n_s();
  const int n_d = table_->n_d();
  const float* tdata = table_->data().data();

  // Packed sources: conjugated field values with their s' table index.
  double fmax = 0.0;
  for (std::size_t i = 0; i < N; ++i) fmax = std::max(fmax, std::abs(f[i] * im.wk_in[i]));
  const double cut = source_threshold_ * fmax;
  struct Source {
    std::int16_t i, j, k;
    std::uint16_t sp_idx;
    float sp_frac;
    float val;
  };
  std::vector<Source> sources;
  sources.reserve(N / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const std::size_t idx = grid_->index(i, j, k);
        const double val = f[idx] * im.wk_in[idx];
        if (std::abs(val) <= cut) continue;
        Source s;
        s.i = static_cast<std::int16_t>(i);
        s.j = static_cast<std::int16_t>(j);
        s.k = static_cast<std::int16_t>(k);
        s.sp_idx = static_cast<std::uint16_t>(im.sp_pack[idx] >> 16);
        s.sp_frac = (im.sp_pack[idx] & 0xffff) / 65535.0f;
        s.val = static_cast<float>(val);
        sources.push_back(s);
      }
    }
  }

  const bool use_sym = symmetric_hint && sym_->max_asymmetry(f) == 0.0;
  std::vector<std::uint32_t> out_nodes;
  if (use_sym) {
    out_nodes = sym_->representatives();
  } else {
    out_nodes.resize(N);
    for (std::size_t i = 0; i < N; ++i) out_nodes[i] = static_cast<std::uint32_t>(i);
  }

  std::vector<double> rep_out(out_nodes.size(), 0.0);
  const int m = 2 * n;
  const double h3 = grid_->cell_volume();
  parallel_for_blocked(out_nodes.size(), 16, [&](std::size_t lo, std::size_t hi) {
    std::vector<float> slice(static_cast<std::size_t>(n_s) * n_d);
    for (std::size_t oi = lo; oi < hi; ++oi) {
      const std::uint32_t node = out_nodes[oi];
      const int i0 = static_cast<int>(node / (static_cast<std::size_t>(n) * n));
      const int j0 = static_cast<int>((node / n) % n);
      const int k0 = static_cast<int>(node % n);
      // Blend the two s-rows of the table into a slice for this output.
      {
        const std::uint32_t sp = im.sp_pack[node];
        const int is = static_cast<int>(sp >> 16);
        const float tfrac = (sp & 0xffff) / 65535.0f;
        const float* row0 = tdata + static_cast<std::size_t>(is) * n_s * n_d;
        const float* row1 = tdata + static_cast<std::size_t>(std::min(is + 1, n_s - 1)) * n_s * n_d;
        const float w1 = tfrac, w0 = 1.0f - tfrac;
        for (std::size_t t = 0; t < slice.size(); ++t) {
          slice[t] = w0 * row0[t] + w1 * row1[t];
        }
      }
      const int oi_off = n - i0, oj_off = n - j0, ok_off = n - k0;
      double acc = 0.0;
      const float* sl = slice.data();
      for (const auto& s : sources) {
        const std::size_t off =
            (static_cast<std::size_t>(s.i + oi_off) * m + (s.j + oj_off)) * m +
            (s.k + ok_off);
        const Impl::OffsetEntry& e = im.offsets[off];
        if (e.inv_d == 0.0f) continue;  // diagonal: handled below
        const float txi = e.xi_frac * (1.0f / 65535.0f);
        const float* b0 = sl + static_cast<std::size_t>(s.sp_idx) * n_d + e.xi_idx;
        const float* b1 = b0 + n_d;
        const float m0 = b0[0] + txi * (b0[1] - b0[0]);
        const float m1 = b1[0] + txi * (b1[1] - b1[0]);
        const float mval = m0 + s.sp_frac * (m1 - m0);
        acc += static_cast<double>(mval) * e.inv_d * s.val;
      }
      // Diagonal Carleman cell.
      acc *= h3;
      acc += im.diag_cell[sym_->orbit_of(node)] * f[node] * im.wk_in[node];
      rep_out[oi] = acc * im.wk_out[node];
    }
  });

  std::vector<double> out(N);
  if (use_sym) {
    sym_->broadcast(rep_out, out);
  } else {
    for (std::size_t i = 0; i < N; ++i) out[i] = rep_out[i];
  }
  return out;
}

std::vector<double> LinearCollisionOperator::apply_K(const std::vector<double>& f,
                                                     bool symmetric_hint) const {
  if (f.size() != grid_->size()) fail(ErrorCode::GridMismatch, "apply_K: field size");
  const auto& im = *impl_;
  std::vector<double> out = gain(f, symmetric_hint);
  // K1 part: mu(v) <v>^k m_b (d^gamma * f <v>^{-k}) h^3.
  std::vector<double> fdown(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) fdown[i] = f[i] * im.wk_in[i];
  std::vector<double> conv = convolution_k1(fdown);
  const double m_b = nu_->angular_mass();
  const double h3 = grid_->cell_volume();
  for (std::size_t i = 0; i < f.size(); ++i) {
    out[i] -= im.mu_node[i] * im.wk_out[i] * m_b * conv[i] * h3;
  }
  return out;
}

std::vector<double> LinearCollisionOperator::apply_L(const std::vector<double>& f,
                                                     bool symmetric_hint) const {
  std::vector<double> out = apply_K(f, symmetric_hint);
  const auto& im = *impl_;
  for (std::size_t i = 0; i < f.size(); ++i) out[i] -= im.nu_node[i] * f[i];
  return out;
}

std::vector<double> radial_kernel_convolution(const VelocityGrid& grid, double gamma,
                                              const std::vector<double>& f) {
  if (f.size() != grid.size()) fail(ErrorCode::GridMismatch, "convolution: field size");
  const int n = grid.n_per_axis();
  const int nf = 2 * n;
  const double h = grid.spacing();
  const std::size_t real_count = static_cast<std::size_t>(nf) * nf * nf;
  const std::size_t cplx_count = static_cast<std::size_t>(nf) * nf * (nf / 2 + 1);
  double* re = fftw_alloc_real(real_count);
  fftw_complex* mid = fftw_alloc_complex(cplx_count);
  fftw_plan fwd = fftw_plan_dft_r2c_3d(nf, nf, nf, re, mid, FFTW_ESTIMATE);
  fftw_plan bwd = fftw_plan_dft_c2r_3d(nf, nf, nf, mid, re, FFTW_ESTIMATE);

  std::vector<double> khat_re(cplx_count), khat_im(cplx_count);
  std::memset(re, 0, real_count * sizeof(double));
  for (int di = -n + 1; di < n; ++di) {
    for (int dj = -n + 1; dj < n; ++dj) {
      for (int dk = -n + 1; dk < n; ++dk) {
        const double d = h * std::sqrt(double(di) * di + double(dj) * dj + double(dk) * dk);
        double val;
        if (d == 0.0) {
          val = gamma == 0.0 ? 1.0 : 0.0;
        } else {
          val = std::pow(d, gamma);
          if (gamma < 0.0 && std::abs(di) + std::abs(dj) + std::abs(dk) == 1) {
            val *= 7.0 / 6.0;
          }
        }
        const int ii = (di + nf) % nf, jj = (dj + nf) % nf, kk = (dk + nf) % nf;
        re[(static_cast<std::size_t>(ii) * nf + jj) * nf + kk] = val;
      }
    }
  }
  fftw_execute(fwd);
  for (std::size_t i = 0; i < cplx_count; ++i) {
    khat_re[i] = mid[i][0];
    khat_im[i] = mid[i][1];
  }
  std::memset(re, 0, real_count * sizeof(double));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::memcpy(re + (static_cast<std::size_t>(i) * nf + j) * nf,
                  f.data() + grid.index(i, j, 0), n * sizeof(double));
    }
  }
  fftw_execute(fwd);
  for (std::size_t i = 0; i < cplx_count; ++i) {
    const double a = mid[i][0], b = mid[i][1];
    mid[i][0] = a * khat_re[i] - b * khat_im[i];
    mid[i][1] = a * khat_im[i] + b * khat_re[i];
  }
  fftw_execute(bwd);
  std::vector<double> out(grid.size());
  const double scale = 1.0 / static_cast<double>(real_count);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double* src = re + (static_cast<std::size_t>(i) * nf + j) * nf;
      double* dst = out.data() + grid.index(i, j, 0);
      for (int k = 0; k < n; ++k) dst[k] = src[k] * scale;
    }
  }
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(bwd);
  fftw_free(re);
  fftw_free(mid);
  return out;
}

// ---------------------------------------------------------------------------
// Conservation projector.

ConservationProjector::ConservationProjector(std::shared_ptr<const VelocityGrid> grid)
    : grid_(std::move(grid)) {
  const std::size_t N = grid_->size();
  basis_.assign(5, std::vector<double>(N));
  moments_.assign(5, std::vector<double>(N));
  for (std::size_t i = 0; i < N; ++i) {
    const Vec3 v = grid_->node(i);
    const double mu = maxwellian(v);
    basis_[0][i] = mu;
    basis_[1][i] = v.x * mu;
    basis_[2][i] = v.y * mu;
    basis_[3][i] = v.z * mu;
    basis_[4][i] = (norm2(v) - 3.0) * mu;
    moments_[0][i] = 1.0;
    moments_[1][i] = v.x;
    moments_[2][i] = v.y;
    moments_[3][i] = v.z;
    moments_[4][i] = norm2(v) - 3.0;
  }
}

void ConservationProjector::remove_invariant_moments(std::vector<double>& field) const {
  const std::size_t N = grid_->size();
  const double h3 = grid_->cell_volume();
  // Gram matrix of basis against moments (5x5), then two refinement passes.
  double G[5][5];
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      G[a][b] = h3 * parallel_sum(N, [&](std::size_t i) {
        return moments_[a][i] * basis_[b][i];
      });
    }
  }
  for (int pass = 0; pass < 2; ++pass) {
    double mvec[5];
    for (int a = 0; a < 5; ++a) {
      mvec[a] = h3 * parallel_sum(N, [&](std::size_t i) {
        return moments_[a][i] * field[i];
      });
    }
    // Solve G c = mvec by Gaussian elimination with partial pivoting.
    double A[5][6];
    for (int a = 0; a < 5; ++a) {
      for (int b = 0; b < 5; ++b) A[a][b] = G[a][b];
      A[a][5] = mvec[a];
    }
    for (int col = 0; col < 5; ++col) {
      int piv = col;
      for (int r = col + 1; r < 5; ++r) {
        if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
      }
      for (int c = 0; c < 6; ++c) std::swap(A[col][c], A[piv][c]);
      for (int r = col + 1; r < 5; ++r) {
        const double fmul = A[r][col] / A[col][col];
        for (int c = col; c < 6; ++c) A[r][c] -= fmul * A[col][c];
      }
    }
    double coef[5];
    for (int r = 4; r >= 0; --r) {
      double s = A[r][5];
      for (int c = r + 1; c < 5; ++c) s -= A[r][c] * coef[c];
      coef[r] = s / A[r][r];
    }
    parallel_for_blocked(N, 8192, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        double sub = 0.0;
        for (int a = 0; a < 5; ++a) sub += coef[a] * basis_[a][i];
        field[i] -= sub;
      }
    });
  }
}

}  // namespace boltzlab
