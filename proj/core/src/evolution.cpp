#include "boltzlab/evolution.hpp"

#include <algorithm>
#include <cmath>

namespace boltzlab {

namespace {

struct Monitors {
  double mass0 = 0.0;
  Vec3 momentum0;
  double energy0 = 0.0;
};

void record_sample(DecaySeries& series, const VelocityGrid& grid,
                   const std::vector<double>& f, double t,
                   const std::vector<WeightContext>& contexts,
                   const Monitors& m0, bool nonlinear, double negativity_tol) {
  series.times.push_back(t);
  for (std::size_t c = 0; c < contexts.size(); ++c) {
    const auto r = norm_weighted_L2(grid, f, contexts[c]);
    series.norms[c].push_back(r.value);
    series.norm_tail_bound[c] = std::max(series.norm_tail_bound[c], r.tail_bound);
  }
  // Moments of F = mu + f drift only through f (the Maxwellian part is
  // constant), so track them on f against the initial totals.
  const ConservedMoments mf = conserved_moments(grid, f);
  const double esc = std::max(1.0, std::abs(m0.energy0));
  series.mass_drift.push_back(std::abs(mf.mass - m0.mass0) /
                              std::max(1e-300, std::abs(1.0 + m0.mass0)));
  const Vec3 dp = mf.momentum - m0.momentum0;
  series.momentum_drift.push_back(norm(dp) / esc);
  series.energy_drift.push_back(std::abs(mf.energy - m0.energy0) / esc);
  if (nonlinear) {
    std::vector<double> F(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      F[i] = maxwellian(grid.node(i)) + f[i];
    }
    const double H = relative_entropy(grid, F, negativity_tol);
    if (!series.entropy.empty()) {
      const double rise = H - series.entropy.back();
      if (rise > 1e-10) series.entropy_monotone = false;
      series.max_entropy_increase = std::max(series.max_entropy_increase, rise);
    }
    series.entropy.push_back(H);
  }
}

void check_finite(const std::vector<double>& f) {
  for (double x : f) {
    if (!std::isfinite(x)) fail(ErrorCode::NonFinite, "evolution state non-finite");
  }
}

}  // namespace

DecaySeries evolve(const EvolutionConfig& config, const Distribution& f0) {
  config.spec.validate();
  auto grid = f0.grid_ptr();
  const std::size_t N = grid->size();
  const bool nonlinear = config.mode == EvolveMode::Nonlinear;

  GainKernelTable::Params tp = config.table_params;
  tp.s_max = std::max(tp.s_max, std::sqrt(3.0) * grid->v_max() + 0.5);
  auto table = GainKernelTable::load_or_build(config.spec, tp, config.cache_dir);
  LinearCollisionOperator op(config.spec, grid, table, 0.0, config.cache_dir);
  op.set_source_threshold(config.source_threshold);

  if (!(config.dt > 0.0) || !(config.t_end > 0.0)) {
    fail(ErrorCode::PreconditionViolated, "dt and t_end must be positive");
  }
  const double numax = op.nu().max_value();
  if (config.dt * numax >= 1.0) {
    fail(ErrorCode::StabilityViolation,
         "dt * max nu = " + std::to_string(config.dt * numax) + " >= 1");
  }

  std::vector<double> f = f0.values();
  double mu_max = 0.0;
  std::vector<double> mu_node(N);
  for (std::size_t i = 0; i < N; ++i) {
    mu_node[i] = maxwellian(grid->node(i));
    mu_max = std::max(mu_max, mu_node[i]);
  }
  if (nonlinear) {
    for (std::size_t i = 0; i < N; ++i) {
      if (mu_node[i] + f[i] < -config.negativity_guard * mu_max) {
        fail(ErrorCode::NegativeDensity, "mu + f0 < 0");
      }
    }
    // P f0 = 0 enforced by pre-projection.
    const std::vector<double> pf = projection_P(*grid, f);
    for (std::size_t i = 0; i < N; ++i) f[i] -= pf[i];
  }

  // Cube-symmetric data runs the 48-fold reduced operator loops.
  SymmetryIndex sym(*grid);
  double fsup = 0.0;
  for (double x : f) fsup = std::max(fsup, std::abs(x));
  bool symmetric = sym.max_asymmetry(f) <= 1e-12 * std::max(fsup, 1e-300);
  if (symmetric) sym.symmetrize(f);

  ConservationProjector projector(grid);

  DecaySeries series;
  series.grid = grid;
  series.used_symmetry_reduction = symmetric;
  series.norm_labels.reserve(config.monitor_norms.size());
  for (const auto& c : config.monitor_norms) series.norm_labels.push_back(c.label());
  series.norms.assign(config.monitor_norms.size(), {});
  series.norm_tail_bound.assign(config.monitor_norms.size(), 0.0);

  Monitors m0;
  {
    const ConservedMoments mf = conserved_moments(*grid, f);
    m0.mass0 = mf.mass;
    m0.momentum0 = mf.momentum;
    m0.energy0 = mf.energy + 3.0;  // energy of F = mu + f (mu contributes 3)
  }
  const double negativity_tol = config.negativity_guard * mu_max;

  auto rhs = [&](const std::vector<double>& state) {
    std::vector<double> out = op.apply_L(state, symmetric);
    if (nonlinear) {
      Distribution fs(grid, state);
      Distribution q = q_scatter(config.spec, fs, config.scatter);
      for (std::size_t i = 0; i < N; ++i) out[i] += q[i];
    }
    if (config.conservation_projection) {
      projector.remove_invariant_moments(out);
    }
    if (symmetric) sym.symmetrize(out);
    return out;
  };

  record_sample(series, *grid, f, 0.0, config.monitor_norms, m0, nonlinear,
                negativity_tol);

  const int n_steps = static_cast<int>(std::ceil(config.t_end / config.dt - 1e-12));
  for (int step = 0; step < n_steps; ++step) {
    const double t = step * config.dt;
    const double dt = std::min(config.dt, config.t_end - t);
    const std::vector<double> k1 = rhs(f);
    std::vector<double> tmp(N);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = f[i] + 0.5 * dt * k1[i];
    const std::vector<double> k2 = rhs(tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = f[i] + 0.5 * dt * k2[i];
    const std::vector<double> k3 = rhs(tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = f[i] + dt * k3[i];
    const std::vector<double> k4 = rhs(tmp);
    for (std::size_t i = 0; i < N; ++i) {
      f[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    check_finite(f);
    if (nonlinear) {
      for (std::size_t i = 0; i < N; ++i) {
        if (mu_node[i] + f[i] < -negativity_tol) {
          fail(ErrorCode::NegativeDensity,
               "F dropped below the negativity guard at t = " + std::to_string(t + dt));
        }
      }
    }
    if ((step + 1) % config.monitor_stride == 0 || step + 1 == n_steps) {
      record_sample(series, *grid, f, t + dt, config.monitor_norms, m0, nonlinear,
                    negativity_tol);
    }
  }
  series.final_state = std::move(f);
  return series;
}

PicardReport picard_iterate(const EvolutionConfig& config, const Distribution& f0,
                            double k, int max_iterations) {
  require_weight(config.spec, k);
  auto grid = f0.grid_ptr();
  const std::size_t N = grid->size();

  GainKernelTable::Params tp = config.table_params;
  tp.s_max = std::max(tp.s_max, std::sqrt(3.0) * grid->v_max() + 0.5);
  auto table = GainKernelTable::load_or_build(config.spec, tp, config.cache_dir);
  LinearCollisionOperator op(config.spec, grid, table, k, config.cache_dir);
  op.set_source_threshold(config.source_threshold);

  std::vector<double> wk(N), nu(N);
  double w_sup0 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    wk[i] = std::pow(bracket(grid->node(i)), k);
    nu[i] = op.nu().at(grid->node(i));
    w_sup0 = std::max(w_sup0, std::abs(wk[i] * f0[i]));
  }
  if (!std::isfinite(w_sup0)) {
    fail(ErrorCode::NonFiniteField, "picard: weighted initial sup non-finite");
  }

  const int M = std::max(2, static_cast<int>(std::round(config.t_end / config.dt)));
  const double dt = config.t_end / M;
  std::vector<double> times(M + 1);
  for (int j = 0; j <= M; ++j) times[j] = j * dt;

  // State per time node; start from the pure relaxation flow.
  std::vector<std::vector<double>> cur(M + 1, std::vector<double>(N));
  for (int j = 0; j <= M; ++j) {
    for (std::size_t i = 0; i < N; ++i) {
      cur[j][i] = std::exp(-nu[i] * times[j]) * f0[i];
    }
  }

  const bool symmetric = SymmetryIndex(*grid).max_asymmetry(f0.values()) == 0.0;

  PicardReport report;
  report.grid = grid;
  report.time_nodes = times;
  report.weighted_sup_initial = w_sup0;

  std::vector<std::vector<double>> prev_increment_by_node;  // sup per time node
  std::vector<double> prev_inc;
  for (int m = 0; m < max_iterations; ++m) {
    // G(t_j) = K_k f(t_j) + Gamma_k(f, f)(t_j).
    std::vector<std::vector<double>> G(M + 1);
    for (int j = 0; j <= M; ++j) {
      G[j] = op.apply_K(cur[j], symmetric);
      Distribution fj(grid, cur[j]);
      Distribution gj = gamma_k_scatter(config.spec, k, fj, config.scatter);
      for (std::size_t i = 0; i < N; ++i) G[j][i] += gj[i];
    }
    // Duhamel by trapezoid on the shared time grid.
    std::vector<std::vector<double>> next(M + 1, std::vector<double>(N));
    next[0] = f0.values();
    for (int j = 1; j <= M; ++j) {
      for (std::size_t i = 0; i < N; ++i) {
        const double decay_t = std::exp(-nu[i] * times[j]);
        double acc = decay_t * f0[i];
        for (int l = 0; l <= j; ++l) {
          const double w = (l == 0 || l == j) ? 0.5 * dt : dt;
          acc += w * std::exp(-nu[i] * (times[j] - times[l])) * G[l][i];
        }
        next[j][i] = acc;
      }
    }
    // Sup-norm increments per time node.
    std::vector<double> inc(M + 1, 0.0);
    for (int j = 0; j <= M; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        s = std::max(s, std::abs(next[j][i] - cur[j][i]));
      }
      inc[j] = s;
    }
    double inc_sup = *std::max_element(inc.begin(), inc.end());
    report.increment_sup.push_back(inc_sup);
    if (!prev_inc.empty()) {
      double prev_sup = *std::max_element(prev_inc.begin(), prev_inc.end());
      report.contraction_ratios.push_back(
          prev_sup > 0.0 ? inc_sup / prev_sup : 0.0);
    }
    prev_increment_by_node.push_back(inc);
    prev_inc = inc;
    cur.swap(next);
    report.iterations = m + 1;
    if (inc_sup == 0.0) break;
  }

  // Largest dyadic window [0, T] on which every consecutive sweep contracted
  // by a factor <= 1/2 (measured on sup over nodes within the window).
  double window = 0.0;
  for (int half = 0;; ++half) {
    const int j_hi = M >> half;
    if (j_hi < 1) break;
    bool ok = true;
    for (std::size_t m = 1; m < prev_increment_by_node.size(); ++m) {
      double num = 0.0, den = 0.0;
      for (int j = 0; j <= j_hi; ++j) {
        num = std::max(num, prev_increment_by_node[m][j]);
        den = std::max(den, prev_increment_by_node[m - 1][j]);
      }
      if (den > 0.0 && num > 0.5 * den + 1e-300) {
        ok = false;
        break;
      }
    }
    if (ok) {
      window = times[j_hi];
      break;
    }
  }
  if (window == 0.0) {
    fail(ErrorCode::NoContraction, "no contraction even on the first step");
  }
  report.contraction_window = window;

  // Weighted sup bound over the contraction window, final iterate.
  double wmax = 0.0;
  const int j_win = static_cast<int>(std::round(window / dt));
  for (int j = 0; j <= j_win; ++j) {
    for (std::size_t i = 0; i < N; ++i) {
      wmax = std::max(wmax, std::abs(wk[i] * cur[j][i]));
    }
  }
  report.weighted_sup_max = wmax;
  report.bound_holds = wmax <= 2.0 * w_sup0 + 1e-300;
  report.final_iterate = std::move(cur);
  return report;
}

const char* decay_model_name(DecayModel model) {
  switch (model) {
    case DecayModel::Exponential: return "exponential";
    case DecayModel::Algebraic: return "algebraic";
    case DecayModel::StretchedExponential: return "stretched-exponential";
  }
  return "unknown";
}

double sonine_radial(int m, Vec3 v) {
  const double x = 0.5 * norm2(v);
  const double alpha = 0.5;
  double l0 = 1.0, l1 = 1.0 + alpha - x;
  if (m == 0) return l0 * maxwellian(v);
  for (int k = 1; k < m; ++k) {
    const double l2 = ((2.0 * k + 1.0 + alpha - x) * l1 - (k + alpha) * l0) / (k + 1.0);
    l0 = l1;
    l1 = l2;
  }
  return l1 * maxwellian(v);
}

Distribution make_initial_state(std::shared_ptr<const VelocityGrid> grid,
                                const std::string& kind, double amplitude,
                                double tail_exponent) {
  std::function<double(Vec3)> fn;
  bool project = false;
  if (kind == "sonine2") {
    fn = [amplitude](Vec3 v) { return amplitude * sonine_radial(2, v); };
  } else if (kind == "sonine3-mix") {
    fn = [amplitude](Vec3 v) {
      return amplitude * (sonine_radial(2, v) + 0.4 * sonine_radial(3, v));
    };
  } else if (kind == "poly-tail") {
    const double q = tail_exponent;
    fn = [amplitude, q](Vec3 v) {
      const double br = bracket(v);
      // Smooth radial bump with a polynomial tail; invariants projected off.
      return amplitude * std::pow(br, -q) * (1.0 - 2.0 / (br * br));
    };
    project = true;
  } else {
    fail(ErrorCode::ConfigError, "unknown initial state kind '" + kind + "'");
  }
  Distribution f0 = Distribution::from_function(grid, fn);
  if (project) {
    const std::vector<double> pf = projection_P(*grid, f0.values());
    std::vector<double> vals = f0.values();
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] -= pf[i];
    f0 = Distribution(grid, std::move(vals));
  }
  // Exact lattice-symmetric start (radial samples may differ at rounding
  // level across permuted nodes).
  SymmetryIndex sym(*grid);
  std::vector<double> vals = f0.values();
  sym.symmetrize(vals);
  return Distribution(grid, std::move(vals));
}

}  // namespace boltzlab
