#include <cmath>
#include <sstream>

#include "boltzlab/inequality_lab.hpp"
#include "boltzlab/weights.hpp"

namespace boltzlab {

namespace {

// ---------------------------------------------------------------------------
// Shared evaluation helpers.

std::vector<double> probe_radii() {
  // Log-spaced |v| in [0, 64], concentrated where the <v>^gamma and
  // <v>^{gamma-2} envelopes cross.
  std::vector<double> s{0.0};
  const int n = 22;
  for (int i = 0; i < n; ++i) {
    s.push_back(0.25 * std::pow(64.0 / 0.25, static_cast<double>(i) / (n - 1)));
  }
  return s;
}

double pow_bracket(double s, double e) { return std::pow(bracket_of_norm(s), e); }

// Closed-form inner integral int_a^b u <u>^{-k} du.
double shell_mass(double a, double b, double k) {
  const double pa = std::pow(1.0 + a * a, 1.0 - 0.5 * k);
  const double pb = std::pow(1.0 + b * b, 1.0 - 0.5 * k);
  return (pa - pb) / (k - 2.0);
}

// int |v - v*|^gamma <v*>^{-k} dv* by the bipolar reduction, optionally
// restricted to the annulus complement {d < eps <v>  or  d > <v>/eps}.
double soft_mass_integral(double gamma, double k, double s, double eps) {
  const double br = bracket_of_norm(s);
  const double d_lo = eps > 0.0 ? eps * br : 0.0;
  const double d_hi = eps > 0.0 ? br / eps : std::numeric_limits<double>::infinity();
  auto in_domain = [&](double d) {
    if (eps <= 0.0) return true;
    return d < d_lo || d > d_hi;
  };
  if (s < 1e-12) {
    // Spherical: int 4 pi d^{gamma+2} <d>^{-k} dd over the domain.
    std::vector<double> x, w;
    gauss_legendre(400, 0.0, 1.0, x, w);
    // Map [0,1] -> [0, inf) by d = t/(1-t).
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double t = x[i];
      if (t >= 1.0) continue;
      const double d = t / (1.0 - t);
      const double jac = 1.0 / ((1.0 - t) * (1.0 - t));
      if (!in_domain(d)) continue;
      acc += w[i] * kFourPi * std::pow(d, gamma + 2.0) *
             std::pow(1.0 + d * d, -0.5 * k) * jac;
    }
    return acc;
  }
  auto integrand = [&](double d) {
    if (!in_domain(d)) return 0.0;
    return std::pow(d, gamma + 1.0) * shell_mass(std::abs(s - d), s + d, k);
  };
  // Head [0, 1] with a power substitution absorbing d^{gamma+2} behaviour,
  // then unit panels until the tail is negligible.
  double acc = 0.0;
  std::vector<double> x, w;
  gauss_legendre(48, 0.0, 1.0, x, w);
  const double q = std::max(1.0, 2.0 / (3.0 + gamma));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = x[i];
    const double d = std::pow(u, q);
    acc += w[i] * integrand(d) * q * std::pow(u, q - 1.0);
  }
  std::vector<double> xp, wp;
  gauss_legendre(24, 0.0, 1.0, xp, wp);
  double a = 1.0;
  while (true) {
    const double b = a * 1.6 + 0.5;
    double piece = 0.0;
    for (std::size_t i = 0; i < xp.size(); ++i) {
      piece += wp[i] * (b - a) * integrand(a + (b - a) * xp[i]);
    }
    acc += piece;
    a = b;
    if (a > 2.0 * s + 60.0 && std::abs(piece) < 1e-16 * (1.0 + std::abs(acc))) break;
    if (a > 2.0 * s + 400.0) break;
  }
  return acc * kTwoPi / s;
}

CollisionKernelSpec hemisphere_spec(double gamma) {
  CollisionKernelSpec spec;
  spec.gamma = gamma;
  spec.angular_profile = AngularProfile::constant(1.0);
  spec.cutoff_lower = 0.5;
  spec.support_restricted = true;
  return spec;
}

// Generic 2-D bipolar integral int K(d, s') dv' at |v| = s, where
// K includes any 1/d Carleman factor:
//   int K dv' = (2 pi / s) int dd int ds' s' d K(d, s')      (s > 0)
//   int K dv' = 4 pi int dd d^2 K(d, d)                      (s = 0).
template <typename Kernel>
double bipolar_integral(double s, double sp_max, Kernel&& kernel) {
  if (s < 1e-12) {
    std::vector<double> x, w;
    gauss_legendre(24, 0.0, 1.0, x, w);
    double acc = 0.0;
    std::vector<double> panels{1e-8, 0.05, 0.2, 0.6, 1.5, 3.0, 6.0};
    while (panels.back() < sp_max) panels.push_back(panels.back() * 1.7);
    for (std::size_t p = 0; p + 1 < panels.size(); ++p) {
      const double a = panels[p], b = std::min(panels[p + 1], sp_max);
      if (b <= a) continue;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = a + (b - a) * x[i];
        acc += w[i] * (b - a) * kFourPi * d * d * kernel(d, d);
      }
    }
    return acc;
  }
  const double d_max = s + sp_max;
  std::vector<double> panels{1e-8, 0.01, 0.05, 0.2, 0.6, 1.5, 3.0};
  while (panels.back() < d_max) panels.push_back(panels.back() * 1.6 + 0.4);
  std::vector<double> xd, wd, xs, ws;
  gauss_legendre(16, 0.0, 1.0, xd, wd);
  gauss_legendre(32, 0.0, 1.0, xs, ws);
  double acc = 0.0;
  for (std::size_t p = 0; p + 1 < panels.size(); ++p) {
    const double a = panels[p], b = std::min(panels[p + 1], d_max);
    if (b <= a) continue;
    for (std::size_t i = 0; i < xd.size(); ++i) {
      const double d = a + (b - a) * xd[i];
      const double wi = wd[i] * (b - a);
      const double sp_lo = std::abs(s - d);
      const double sp_hi = std::min(s + d, sp_max);
      if (sp_hi <= sp_lo) continue;
      double inner = 0.0;
      for (std::size_t j = 0; j < xs.size(); ++j) {
        const double sp = sp_lo + (sp_hi - sp_lo) * xs[j];
        inner += ws[j] * sp * kernel(d, sp);
      }
      acc += wi * d * inner * (sp_hi - sp_lo);
    }
  }
  return acc * kTwoPi / s;
}

// Smooth battery fields: Maxwellian-enveloped random cubics plus optional
// polynomial tails.
struct BatteryField {
  Distribution dist;
  std::string name;
};

std::vector<BatteryField> battery(std::shared_ptr<const VelocityGrid> grid,
                                  std::uint64_t seed, int count, bool heavy_tails) {
  std::vector<BatteryField> out;
  Rng rng(seed);
  for (int b = 0; b < count; ++b) {
    double c[10];
    for (double& x : c) x = rng.uniform(-1.0, 1.0);
    const bool heavy = heavy_tails && (b % 2 == 1);
    auto fn = [c, heavy](Vec3 v) {
      const double p = 1.0 + 0.5 * (c[0] * v.x + c[1] * v.y + c[2] * v.z) +
                       0.25 * (c[3] * v.x * v.y + c[4] * v.y * v.z + c[5] * v.x * v.x) +
                       0.1 * (c[6] * v.x * v.x * v.z + c[7] * v.y * v.y * v.y);
      const double env = heavy ? std::pow(bracket(v), -6.0)
                               : std::exp(-0.35 * norm2(v));
      return p * env * (1.0 + 0.2 * c[8]);
    };
    std::ostringstream name;
    name << (heavy ? "tail" : "gauss") << b;
    out.push_back({Distribution::from_function(grid, fn), name.str()});
  }
  return out;
}

double l2_weighted(const VelocityGrid& grid, const std::vector<double>& f, double l) {
  WeightContext w;
  w.k = l;
  return norm_weighted_L2(grid, f, w).value;
}

double l1_norm(const VelocityGrid& grid, const std::vector<double>& f) {
  return parallel_sum(f.size(), [&](std::size_t i) { return std::abs(f[i]); }) *
         grid.cell_volume();
}

double sup_weighted(const VelocityGrid& grid, const std::vector<double>& f, double l) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    m = std::max(m, std::abs(f[i]) * pow_bracket(norm(grid.node(i)), l));
  }
  return m;
}

// H^m_l norm with central-difference gradients (m <= 2).
double sobolev_norm(const VelocityGrid& grid, const std::vector<double>& f, int m,
                    double l) {
  double total = 0.0;
  const double w2 = l2_weighted(grid, f, l);
  total += w2 * w2;
  const int n = grid.n_per_axis();
  const double inv2h = 1.0 / (2.0 * grid.spacing());
  auto get = [&](int i, int j, int k) {
    if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n) return 0.0;
    return f[grid.index(i, j, k)];
  };
  if (m >= 1) {
    std::vector<double> g(f.size());
    for (int d = 0; d < 3; ++d) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            const int ii = i + (d == 0), jj = j + (d == 1), kk = k + (d == 2);
            const int im = i - (d == 0), jm = j - (d == 1), km = k - (d == 2);
            g[grid.index(i, j, k)] = (get(ii, jj, kk) - get(im, jm, km)) * inv2h;
          }
        }
      }
      const double gn = l2_weighted(grid, g, l);
      total += gn * gn;
    }
  }
  if (m >= 2) {
    std::vector<double> g(f.size());
    const double invh2 = 1.0 / (grid.spacing() * grid.spacing());
    for (int d = 0; d < 3; ++d) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          for (int k = 0; k < n; ++k) {
            const int ii = i + (d == 0), jj = j + (d == 1), kk = k + (d == 2);
            const int im = i - (d == 0), jm = j - (d == 1), km = k - (d == 2);
            g[grid.index(i, j, k)] =
                (get(ii, jj, kk) - 2.0 * get(i, j, k) + get(im, jm, km)) * invh2;
          }
        }
      }
      const double gn = l2_weighted(grid, g, l);
      total += gn * gn;
    }
  }
  return std::sqrt(total);
}

std::shared_ptr<const VelocityGrid> lab_grid(const LabContext& ctx, int cap = 96) {
  return std::make_shared<VelocityGrid>(ctx.v_max, std::min(ctx.grid_n, cap));
}

// ---------------------------------------------------------------------------
// Entry evaluators.

std::vector<ProbeGroup> eval_l25(const LabContext& ctx) {
  // Three variants of the weak convolution bound, each on its gamma range.
  struct Variant {
    double gamma;
    const char* name;
    int which;  // 0: L1/L2, 1: L1/L3, 2: L1/Linf
  };
  const Variant variants[] = {{-1.0, "L2", 0}, {-1.5, "L3", 1}, {-2.5, "Linf", 2}};
  auto grid = lab_grid(ctx, 48);
  auto fields = battery(grid, ctx.seed + 25, 4, true);
  std::vector<ProbeGroup> groups;
  for (const auto& var : variants) {
    ProbeGroup g;
    g.param = var.gamma;
    g.param_name = std::string("gamma:") + var.name;
    for (const auto& bf : fields) {
      std::vector<double> absf(bf.dist.size());
      for (std::size_t i = 0; i < absf.size(); ++i) absf[i] = std::abs(bf.dist[i]);
      const auto conv = radial_kernel_convolution(*grid, var.gamma, absf);
      double sup = 0.0;
      for (double x : conv) sup = std::max(sup, x);
      sup *= grid->cell_volume();
      const double l1 = l1_norm(*grid, absf);
      double rhs = 0.0;
      if (var.which == 0) {
        rhs = std::pow(l1, 1.0 + 2.0 * var.gamma / 3.0) *
              std::pow(l2_weighted(*grid, absf, 0.0), -2.0 * var.gamma / 3.0);
      } else if (var.which == 1) {
        double l3 = std::cbrt(parallel_sum(absf.size(), [&](std::size_t i) {
                      return absf[i] * absf[i] * absf[i];
                    }) * grid->cell_volume());
        rhs = std::pow(l1, 1.0 + var.gamma / 2.0) * std::pow(l3, -var.gamma / 2.0);
      } else {
        double linf = 0.0;
        for (double x : absf) linf = std::max(linf, x);
        rhs = std::pow(l1, 1.0 + var.gamma / 3.0) * std::pow(linf, -var.gamma / 3.0);
      }
      ProbeSample s;
      s.location = static_cast<double>(&bf - fields.data());
      s.lhs = sup;
      s.basis = {rhs};
      g.samples.push_back(std::move(s));
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<ProbeGroup> eval_l26(const LabContext& ctx) {
  const double gammas[] = {-1.0, -2.5};
  auto grid = lab_grid(ctx, 40);
  auto fields = battery(grid, ctx.seed + 26, 4, false);
  std::vector<ProbeGroup> groups;
  for (double gamma : gammas) {
    ProbeGroup g;
    g.param = gamma;
    g.param_name = "gamma";
    const int order = gamma > -2.0 ? 1 : 2;
    for (std::size_t a = 0; a < fields.size(); ++a) {
      for (std::size_t b = a + 1; b < fields.size(); ++b) {
        const auto& f = fields[a].dist;
        const auto& gg = fields[b].dist;
        std::vector<double> f2(f.size()), g2(gg.size());
        for (std::size_t i = 0; i < f2.size(); ++i) {
          f2[i] = f[i] * f[i];
          g2[i] = gg[i] * gg[i];
        }
        const auto conv = radial_kernel_convolution(*grid, gamma, f2);
        const double R = parallel_sum(g2.size(), [&](std::size_t i) {
                           return conv[i] * g2[i];
                         }) * grid->cell_volume() * grid->cell_volume();
        double best = std::numeric_limits<double>::infinity();
        for (int m = 0; m <= order; ++m) {
          const int nn = order - m;
          const double t1 = sobolev_norm(*grid, f.values(), m, 0.5 * gamma) *
                            sobolev_norm(*grid, gg.values(), nn, 2.0);
          const double t2 = sobolev_norm(*grid, f.values(), m, 2.0) *
                            sobolev_norm(*grid, gg.values(), nn, 0.5 * gamma);
          best = std::min({best, t1 * t1, t2 * t2});
        }
        ProbeSample s;
        s.location = static_cast<double>(a * fields.size() + b);
        s.lhs = R;
        s.basis = {best};
        g.samples.push_back(std::move(s));
      }
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<ProbeGroup> eval_l27(const LabContext& ctx) {
  std::vector<ProbeGroup> groups;
  for (double k : {6.0, 10.0}) {
    ProbeGroup g;
    g.param = k;
    g.param_name = "k";
    Rng rng(ctx.seed + 27);
    const int n = 20000 * ctx.resolution_scale;
    for (int i = 0; i < n; ++i) {
      Vec3 v{3.0 * rng.normal(), 3.0 * rng.normal(), 3.0 * rng.normal()};
      Vec3 vs{3.0 * rng.normal(), 3.0 * rng.normal(), 3.0 * rng.normal()};
      const Vec3 rel = v - vs;
      const double r = norm(rel);
      if (r == 0.0) continue;
      double sig[3];
      rng.unit_vector(sig);
      Vec3 sigma{sig[0], sig[1], sig[2]};
      if (dot(sigma, rel) < 0.0) sigma = -1.0 * sigma;  // hemisphere support
      const auto post = post_collision({v, vs, sigma});
      const double sin_half2 = 0.5 * (1.0 - post.cos_theta);
      const double sin_half = std::sqrt(std::max(0.0, sin_half2));
      const double lhs = std::abs(pow_bracket(norm(post.v_prime), k) -
                                  std::pow(sin_half, k) * pow_bracket(norm(vs), k));
      ProbeSample smp;
      smp.location = norm(v);
      smp.lhs = lhs;
      smp.basis = {sin_half2 * pow_bracket(norm(vs), k - 1.0) * bracket(v),
                   pow_bracket(norm(v), k)};
      g.samples.push_back(std::move(smp));
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<ProbeGroup> eval_l28(const LabContext& ctx) {
  const double gammas[] = {-2.0, -1.0, 0.5};
  auto grid = lab_grid(ctx, 40);
  auto fields = battery(grid, ctx.seed + 28, 4, true);
  std::vector<ProbeGroup> groups;
  for (double gamma : gammas) {
    ProbeGroup g;
    g.param = gamma;
    g.param_name = "gamma";
    const double l = std::max(gamma + 2.0, 1.5);
    for (std::size_t a = 0; a < fields.size(); ++a) {
      for (std::size_t b = 0; b < fields.size(); ++b) {
        if (a == b) continue;
        std::vector<double> fa(fields[a].dist.size()), fb(fields[b].dist.size());
        for (std::size_t i = 0; i < fa.size(); ++i) {
          fa[i] = std::abs(fields[a].dist[i]);
          fb[i] = std::abs(fields[b].dist[i]);
        }
        const auto conv = radial_kernel_convolution(*grid, gamma, fa);
        const double lhs = parallel_sum(fb.size(), [&](std::size_t i) {
                             return conv[i] * fb[i];
                           }) * grid->cell_volume() * grid->cell_volume();
        ProbeSample s;
        s.location = static_cast<double>(a * fields.size() + b);
        s.lhs = lhs;
        s.basis = {l2_weighted(*grid, fa, l) * l2_weighted(*grid, fb, l)};
        g.samples.push_back(std::move(s));
      }
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<ProbeGroup> eval_l29(const LabContext& ctx) {
  (void)ctx;
  const double gamma = 0.0;
  std::vector<ProbeGroup> groups;
  for (double k : {8.0, 16.0, 32.0, 64.0}) {
    ProbeGroup g;
    g.param = k;
    g.param_name = "k";
    for (double s : probe_radii()) {
      ProbeSample smp;
      smp.location = s;
      smp.lhs = soft_mass_integral(gamma, k, s, 0.0);
      smp.basis = {pow_bracket(s, gamma), pow_bracket(s, gamma - 2.0)};
      g.samples.push_back(std::move(smp));
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

// Post-collision double-bracket ratio: the sigma integral reduces exactly
// to 1-D because the integrand is symmetric in v' <-> v*' and both brackets
// depend on sigma only through sigma . mid.
double l211_integral(double gamma, double k, double s) {
  const Vec3 v{0.0, 0.0, s};
  std::vector<double> xc, wc;
  gauss_legendre(48, -1.0, 1.0, xc, wc);
  std::vector<double> xa, wa;
  gauss_legendre(32, -1.0, 1.0, xa, wa);
  std::vector<double> xr, wr;
  gauss_legendre(12, 0.0, 1.0, xr, wr);
  std::vector<double> panels{1e-8, 0.05, 0.2, 0.6, 1.5, 3.0};
  const double rho_max = 4.0 * s + 80.0;
  while (panels.back() < rho_max) panels.push_back(panels.back() * 1.6 + 0.4);
  double acc = 0.0;
  for (std::size_t p = 0; p + 1 < panels.size(); ++p) {
    const double a = panels[p], b = std::min(panels[p + 1], rho_max);
    if (b <= a) continue;
    for (std::size_t ir = 0; ir < xr.size(); ++ir) {
      const double rho = a + (b - a) * xr[ir];
      const double wrho = wr[ir] * (b - a) * std::pow(rho, gamma + 2.0);
      double alpha_acc = 0.0;
      for (std::size_t ia = 0; ia < xa.size(); ++ia) {
        const double ca = xa[ia];
        const double sa = std::sqrt(std::max(0.0, 1.0 - ca * ca));
        const Vec3 vstar{rho * sa, 0.0, s + rho * ca};
        const Vec3 mid = 0.5 * (v + vstar);
        const double A = 1.0 + norm2(mid) + 0.25 * rho * rho;
        const double B = rho * norm(mid);
        // (1/2) full-sphere reduction of the hemisphere integral.
        double cacc = 0.0;
        for (std::size_t ic = 0; ic < xc.size(); ++ic) {
          const double c = xc[ic];
          const double lg = k * (std::log(bracket(v)) -
                                 0.5 * std::log(A + B * c) -
                                 0.5 * std::log(A - B * c));
          cacc += wc[ic] * std::exp(lg);
        }
        alpha_acc += wa[ia] * 0.5 * kTwoPi * cacc;
      }
      acc += wrho * kTwoPi * alpha_acc;
    }
  }
  return acc;
}

std::vector<ProbeGroup> eval_l211(const LabContext& ctx) {
  (void)ctx;
  std::vector<ProbeGroup> groups;
  // Hard-potential sweep carries the 1/k refinement claim.
  for (double k : {8.0, 16.0, 32.0}) {
    ProbeGroup g;
    g.param = k;
    g.param_name = "k (gamma=0.5)";
    for (double s : probe_radii()) {
      ProbeSample smp;
      smp.location = s;
      smp.lhs = l211_integral(0.5, k, s);
      smp.basis = {pow_bracket(s, 0.5)};
      g.samples.push_back(std::move(smp));
    }
    groups.push_back(std::move(g));
  }
  {
    // Soft-potential uniform bound (param 0 keeps the group out of the
    // scaling regression).
    ProbeGroup g;
    g.param = 0.0;
    g.param_name = "k=20 (gamma=-1)";
    for (double s : probe_radii()) {
      ProbeSample smp;
      smp.location = s;
      smp.lhs = l211_integral(-1.0, 20.0, s);
      smp.basis = {pow_bracket(s, -1.0)};
      g.samples.push_back(std::move(smp));
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<ProbeGroup> eval_l212(const LabContext& ctx) {
  (void)ctx;
  std::vector<ProbeGroup> groups;
  struct Case { double gamma, a, b; };
  const Case cases[] = {{0.0, 0.5, 1.0}, {0.0, 1.0, 1.0}, {-1.0, 1.0, 0.5}};
  for (const auto& cs : cases) {
    ProbeGroup g;
    g.param = cs.b;
    std::ostringstream pn;
    pn << "gamma=" << cs.gamma << ",a=" << cs.a << ",b=" << cs.b;
    g.param_name = pn.str();
    const double envelope_exp = cs.gamma - cs.b * (cs.gamma + 3.0) / 4.0;
    const auto spec = hemisphere_spec(cs.gamma);
    for (double s : probe_radii()) {
      const double brs = bracket_of_norm(s);
      ProbeSample smp;
      smp.location = s;
      // exp(a<v>^b - a<v'>^b) e^{-|v*'|^2/2} through the plane kernel
      // (e^{-|v*'|^2/2} = (2 pi)^{3/2} mu); single-term profile.
      smp.lhs = std::pow(kTwoPi, 1.5) *
                bipolar_integral(s, 3.0 * s + 80.0, [&](double d, double sp) {
                  const double lg = cs.a * (std::pow(brs, cs.b) -
                                            std::pow(bracket_of_norm(sp), cs.b));
                  return GainKernelTable::direct_weighted(spec, s, sp, d, lg,
                                                          false);
                });
      smp.basis = {pow_bracket(s, envelope_exp)};
      g.samples.push_back(std::move(smp));
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

bool l212_tail_exponent_check(const std::vector<ProbeGroup>& groups, std::string& diag) {
  // Envelope exponent from the tail of each group vs gamma - b(gamma+3)/4.
  std::ostringstream out;
  bool ok = true;
  for (const auto& g : groups) {
    std::vector<double> xs, ys;
    for (const auto& s : g.samples) {
      if (s.location >= 8.0 && s.lhs > 0.0) {
        xs.push_back(std::log(bracket_of_norm(s.location)));
        // basis[0] already carries the claimed exponent; fit the residual.
        ys.push_back(std::log(s.lhs));
      }
    }
    if (xs.size() < 3) { ok = false; continue; }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) { mx += xs[i]; my += ys[i]; }
    mx /= xs.size();
    my /= ys.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double fitted = sxy / sxx;
    // Recover the claimed exponent from the basis definition.
    double claimed = 0.0;
    {
      const auto& s0 = g.samples.front();
      const auto& s1 = g.samples.back();
      claimed = std::log(s1.basis[0] / s0.basis[0]) /
                std::log(bracket_of_norm(s1.location) / bracket_of_norm(s0.location));
    }
    const double tol = 0.25 * std::max(0.5, std::abs(claimed));
    if (std::abs(fitted - claimed) > tol) ok = false;
    out << g.param_name << ": exponent " << fitted << " vs " << claimed << "; ";
  }
  diag = out.str();
  return ok;
}

std::vector<ProbeGroup> eval_l61(const LabContext& ctx) {
  (void)ctx;
  std::vector<ProbeGroup> groups;
  const double k = 20.0;
  for (double eps : {0.2, 0.1, 0.05, 0.025}) {
    ProbeGroup g;
    g.param = eps;
    g.param_name = "eps";
    for (double s : probe_radii()) {
      ProbeSample smp;
      smp.location = s;
      smp.lhs = soft_mass_integral(0.0, k, s, eps);
      smp.basis = {pow_bracket(s, 0.0)};
      g.samples.push_back(std::move(smp));
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

bool strictly_decreasing_in_param(const std::vector<GroupFit>& groups,
                                  std::string& diag, const std::string& name_match) {
  // Groups arrive in registration order; check C(eps) decreases with eps.
  std::vector<std::pair<double, double>> pts;
  for (const auto& g : groups) {
    pts.emplace_back(g.param, g.constants.empty() ? 0.0 : g.constants[0]);
  }
  (void)name_match;
  std::ostringstream out;
  out << "C(eps):";
  bool ok = true;
  // Registration order is decreasing eps; constants must strictly decrease.
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!(pts[i + 1].second < pts[i].second)) ok = false;
  }
  for (const auto& [e, c] : pts) out << " " << e << "->" << c;
  diag = out.str();
  return ok;
}

std::vector<ProbeGroup> eval_l62(const LabContext& ctx) {
  (void)ctx;
  std::vector<ProbeGroup> groups;
  const double gamma = 0.0;
  const auto spec = hemisphere_spec(gamma);
  for (double k : {8.0, 16.0, 32.0, 64.0}) {
    ProbeGroup g;
    g.param = k;
    g.param_name = "k";
    for (double s : probe_radii()) {
      const double lbs = std::log(bracket_of_norm(s));
      ProbeSample smp;
      smp.location = s;
      smp.lhs = std::pow(kTwoPi, 1.5) *
                bipolar_integral(s, 3.0 * s + 80.0, [&](double d, double sp) {
                  const double lg = k * (lbs - std::log(bracket_of_norm(sp)));
                  return GainKernelTable::direct_weighted(spec, s, sp, d, lg,
                                                          false);
                });
      smp.basis = {pow_bracket(s, gamma), pow_bracket(s, gamma - 2.0)};
      g.samples.push_back(std::move(smp));
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<ProbeGroup> eval_l63(const LabContext& ctx) {
  std::vector<ProbeGroup> groups;
  (void)ctx;
  // Unrestricted mass, decreasing trend in k.
  for (double k : {10.0, 20.0, 40.0}) {
    ProbeGroup g;
    g.param = k;
    g.param_name = "k";
    const auto spec = hemisphere_spec(0.0);
    for (double s : {0.0, 1.0, 3.0, 8.0, 20.0}) {
      ProbeSample smp;
      smp.location = s;
      smp.lhs = l_k_abs_row_integral(spec, k, s, 0.0, 0.0);
      smp.basis = {pow_bracket(s, 0.0), pow_bracket(s, -2.0)};
      g.samples.push_back(std::move(smp));
    }
    groups.push_back(std::move(g));
  }
  // Weighted variant <v'>^{-2}.
  {
    ProbeGroup g;
    g.param = 0.0;
    g.param_name = "weighted k=20";
    const auto spec = hemisphere_spec(0.0);
    for (double s : {0.0, 1.0, 3.0, 8.0, 20.0}) {
      ProbeSample smp;
      smp.location = s;
      smp.lhs = l_k_abs_row_integral(spec, 20.0, s, 0.0, -2.0);
      smp.basis = {pow_bracket(s, -2.0)};
      g.samples.push_back(std::move(smp));
    }
    groups.push_back(std::move(g));
  }
  // Annulus-excluded smallness sweeps for both gamma regimes.
  for (double gamma : {0.0, -1.0}) {
    for (double eps : {0.2, 0.1, 0.05, 0.025}) {
      ProbeGroup g;
      g.param = eps;
      std::ostringstream pn;
      pn << "eps@gamma=" << gamma;
      g.param_name = pn.str();
      const auto spec = hemisphere_spec(gamma);
      for (double s : {0.0, 1.0, 3.0, 8.0}) {
        ProbeSample smp;
        smp.location = s;
        smp.lhs = l_k_abs_row_integral(spec, 20.0, s, eps, 0.0);
        smp.basis = {pow_bracket(s, gamma)};
        g.samples.push_back(std::move(smp));
      }
      groups.push_back(std::move(g));
    }
  }
  return groups;
}

bool l63_checks(const std::vector<GroupFit>& groups, std::string& diag) {
  std::ostringstream out;
  bool ok = true;
  // k-groups first (3), then weighted (1), then 2 x 4 eps-groups.
  if (groups.size() < 12) { diag = "missing groups"; return false; }
  if (!(groups[1].constants[0] < groups[0].constants[0] &&
        groups[2].constants[0] < groups[1].constants[0])) {
    ok = false;
    out << "k-trend violated; ";
  }
  for (int block = 0; block < 2; ++block) {
    const std::size_t base = 4 + block * 4;
    out << (block == 0 ? "C(eps,g=0):" : " C(eps,g=-1):");
    for (std::size_t i = base; i + 1 < base + 4; ++i) {
      if (!(groups[i + 1].constants[0] < groups[i].constants[0])) ok = false;
    }
    for (std::size_t i = base; i < base + 4; ++i) {
      out << " " << groups[i].constants[0];
    }
  }
  diag = out.str();
  return ok;
}

std::vector<ProbeGroup> eval_l65(const LabContext& ctx) {
  std::vector<ProbeGroup> groups;
  auto grid = lab_grid(ctx, 32);
  auto fields = battery(grid, ctx.seed + 65, 3, true);
  const double gamma = -1.0;
  const double k = 5.0;
  const auto spec = hemisphere_spec(gamma);
  PairQuadratureOptions opt;
  opt.n_theta = ctx.sphere_n_theta;
  opt.n_phi = ctx.sphere_n_phi;
  CollisionFrequency nu(spec, std::sqrt(3.0) * ctx.v_max + 1.0);
  for (double p : {1.05, 1.1, 1.2}) {
    ProbeGroup g;
    g.param = p;
    g.param_name = "p";
    for (double alpha : {0.0, 2.0}) {
      for (const auto& bf : fields) {
        const double sup_a = sup_weighted(*grid, bf.dist.values(), alpha);
        const double sup_0 = sup_weighted(*grid, bf.dist.values(), 0.0);
        const double sup_1 = sup_weighted(*grid, bf.dist.values(), 1.0);
        const double l1 = l1_norm(*grid, bf.dist.values());
        const double e_mid = (p + 1.0) / (2.0 * p);
        const double e_l1 = (p - 1.0) / (2.0 * p);
        for (double s : {0.0, 1.5, 4.0}) {
          const Vec3 v{0.0, 0.0, s};
          const double env_minus =
              nu.of_norm(s) * sup_a * std::pow(sup_0, e_mid) * std::pow(l1, e_l1);
          const double env_plus =
              nu.of_norm(s) * sup_a * std::pow(sup_1, e_mid) * std::pow(l1, e_l1);
          const double wa = pow_bracket(s, alpha);
          ProbeSample sm, sp;
          sm.location = s;
          sm.lhs = std::abs(wa * gamma_k_minus_at(spec, k, bf.dist, v, opt));
          sm.basis = {env_minus};
          sp.location = s;
          sp.lhs = std::abs(wa * gamma_k_plus_at(spec, k, bf.dist, v, opt));
          sp.basis = {env_plus};
          g.samples.push_back(std::move(sm));
          g.samples.push_back(std::move(sp));
        }
      }
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<ProbeGroup> eval_l71(const LabContext& ctx) {
  (void)ctx;
  struct Pair { double l1, l2; };
  const Pair pairs[] = {{0.5, 1.0}, {1.0, 3.0}, {2.0, 2.5}};
  std::vector<ProbeGroup> groups;
  for (const auto& pr : pairs) {
    ProbeGroup g;
    g.param = pr.l2 - pr.l1;
    g.param_name = "lambda2-lambda1";
    for (double t = 0.25; t <= 12.0; t *= 1.4) {
      // Simpson quadrature of the convolution integral.
      const int n = 512;
      const double h = t / n;
      double acc = 0.0;
      for (int i = 0; i <= n; ++i) {
        const double s = i * h;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * std::exp(-pr.l1 * (t - s)) * std::exp(-pr.l2 * s);
      }
      acc *= h / 3.0;
      ProbeSample smp;
      smp.location = t;
      smp.lhs = acc;
      smp.basis = {std::exp(-pr.l1 * t) / (pr.l2 - pr.l1)};
      g.samples.push_back(std::move(smp));
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

double scan_sup_poly_exp(double k, double a, double x_max) {
  // Dense log scan + golden-section refinement of x^k e^{-a x}.
  double best_x = x_max, best = std::pow(x_max, k) * std::exp(-a * x_max);
  const int n = 4000;
  for (int i = 0; i <= n; ++i) {
    const double x = x_max * std::pow(1e-6, 1.0 - static_cast<double>(i) / n);
    const double y = std::pow(x, k) * std::exp(-a * x);
    if (y > best) { best = y; best_x = x; }
  }
  double lo = best_x / 1.05, hi = std::min(x_max, best_x * 1.05);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
  for (int it = 0; it < 80; ++it) {
    auto fv = [&](double x) { return std::pow(x, k) * std::exp(-a * x); };
    if (fv(c) > fv(d)) { hi = d; } else { lo = c; }
    c = hi - phi * (hi - lo);
    d = lo + phi * (hi - lo);
  }
  const double x = 0.5 * (lo + hi);
  return std::max(best, std::pow(x, k) * std::exp(-a * x));
}

std::vector<ProbeGroup> eval_l74(const LabContext& ctx) {
  (void)ctx;
  std::vector<ProbeGroup> groups;
  for (double k : {1.0, 2.0, 5.0}) {
    ProbeGroup g;
    g.param = k;
    g.param_name = "k";
    for (double a : {0.5, 1.0, 2.0, 4.0}) {
      ProbeSample smp;
      smp.location = a;
      smp.lhs = scan_sup_poly_exp(k, a, 32.0);
      smp.basis = {std::pow(1.0 + a, -k)};
      g.samples.push_back(std::move(smp));
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<ProbeGroup> eval_l75(const LabContext& ctx) {
  (void)ctx;
  std::vector<ProbeGroup> groups;
  for (double r : {0.3, 0.7}) {
    ProbeGroup g;
    g.param = r;
    g.param_name = "r";
    for (double nu : {0.05, 0.2, 1.0, 5.0}) {
      for (double t = 0.5; t <= 40.0; t *= 1.7) {
        const int n = 2048;
        const double h = t / n;
        double acc = 0.0;
        for (int i = 0; i <= n; ++i) {
          const double s = i * h;
          const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
          acc += w * std::exp(-nu * (t - s)) * nu * std::pow(1.0 + s, -r);
        }
        acc *= h / 3.0;
        ProbeSample smp;
        smp.location = t;
        smp.lhs = acc;
        smp.basis = {std::pow(1.0 + t, -r)};
        g.samples.push_back(std::move(smp));
      }
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<ProbeGroup> eval_l77(const LabContext& ctx) {
  std::vector<ProbeGroup> groups;
  auto grid = lab_grid(ctx, 32);
  auto fields = battery(grid, ctx.seed + 77, 4, false);
  const double gamma = -1.0, k = 5.0;
  const auto spec = hemisphere_spec(gamma);
  ScatterOptions sopt;
  sopt.source_stride = 1;
  for (double l : {2.0, 3.0}) {
    ProbeGroup g;
    g.param = l;
    g.param_name = "l";
    for (const auto& bf : fields) {
      Distribution gk = gamma_k_scatter(spec, k, bf.dist, sopt);
      const double lhs = l2_weighted(*grid, gk.values(), l);
      const double basis = l2_weighted(*grid, bf.dist.values(), 0.0) *
                           std::pow(l2_weighted(*grid, bf.dist.values(), l),
                                    1.0 + gamma / 3.0) *
                           std::pow(sup_weighted(*grid, bf.dist.values(), l),
                                    -gamma / 3.0);
      ProbeSample smp;
      smp.location = static_cast<double>(&bf - fields.data());
      smp.lhs = lhs;
      smp.basis = {basis};
      g.samples.push_back(std::move(smp));
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<ProbeGroup> eval_l215(const LabContext& ctx) {
  std::vector<ProbeGroup> groups;
  struct Case { double k, a, b; };
  const Case cases[] = {{6.0, 1.0, 1.0}, {10.0, 0.5, 1.5}, {3.0, 2.0, 0.5}};
  for (const auto& cs : cases) {
    ProbeGroup g;
    g.param = cs.k;
    std::ostringstream pn;
    pn << "k=" << cs.k << ",a=" << cs.a << ",b=" << cs.b;
    g.param_name = pn.str();
    Rng rng(ctx.seed + 215);
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
      const double c = std::pow(10.0, rng.uniform(-2.0, 4.0));
      const double d = std::pow(10.0, rng.uniform(-2.0, 4.0));
      const double lo = std::min(c, d), hi = std::max(c, d);
      const double f_c = exp_weight_scalar(cs.a, cs.b, cs.k, lo);
      const double f_d = exp_weight_scalar(cs.a, cs.b, cs.k, hi);
      const double f_cd = exp_weight_scalar(cs.a, cs.b, cs.k, c + d);
      ProbeSample s1;  // monotone-defect bound f(c) <= f(d) + C for c <= d
      s1.location = lo;
      s1.lhs = std::max(0.0, f_c - f_d);
      s1.basis = {1.0};
      ProbeSample s2;  // subadditivity defect
      s2.location = c + d;
      s2.lhs = std::max(0.0, f_cd - exp_weight_scalar(cs.a, cs.b, cs.k, c) -
                                 exp_weight_scalar(cs.a, cs.b, cs.k, d));
      s2.basis = {1.0};
      g.samples.push_back(std::move(s1));
      g.samples.push_back(std::move(s2));
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<ProbeGroup> eval_l216(const LabContext& ctx) {
  std::vector<ProbeGroup> groups;
  struct Case { double k, a, b; };
  const Case cases[] = {{4.0, 0.5, 1.0}, {8.0, 1.0, 0.5}, {2.0, 0.25, 1.5}};
  for (const auto& cs : cases) {
    ProbeGroup g;
    g.param = cs.k;
    std::ostringstream pn;
    pn << "k=" << cs.k << ",a=" << cs.a << ",b=" << cs.b;
    g.param_name = pn.str();
    Rng rng(ctx.seed + 216);
    const int n = static_cast<int>(ctx.mc_samples);
    for (int i = 0; i < n; ++i) {
      Vec3 v{4.0 * rng.normal(), 4.0 * rng.normal(), 4.0 * rng.normal()};
      Vec3 vs{4.0 * rng.normal(), 4.0 * rng.normal(), 4.0 * rng.normal()};
      const Vec3 rel = v - vs;
      const double r = norm(rel);
      if (r == 0.0) continue;
      double sig[3];
      rng.unit_vector(sig);
      Vec3 sigma{sig[0], sig[1], sig[2]};
      if (dot(sigma, rel) < 0.0) sigma = -1.0 * sigma;
      const auto post = post_collision({v, vs, sigma});
      const double log_lhs =
          cs.a * (std::pow(bracket(v), cs.b) - std::pow(bracket(post.v_prime), cs.b) -
                  std::pow(bracket(post.v_star_prime), cs.b));
      const double log_basis =
          cs.k * (std::log(bracket(v)) - std::log(bracket(vs)) -
                  std::log(bracket(post.v_star_prime)));
      ProbeSample smp;
      smp.location = norm(v);
      smp.lhs = std::exp(log_lhs);
      smp.basis = {std::exp(log_basis)};
      g.samples.push_back(std::move(smp));
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<ProbeGroup> eval_beta(const LabContext& ctx) {
  (void)ctx;
  std::vector<ProbeGroup> groups;
  for (double p : {0.5, 1.0, 2.0}) {
    ProbeGroup g;
    g.param = p;
    g.param_name = "p";
    for (double q : {10.0, 100.0, 1000.0, 10000.0}) {
      ProbeSample smp;
      smp.location = q;
      smp.lhs = beta_function(p, q) * std::pow(q, p);
      smp.basis = {1.0};
      g.samples.push_back(std::move(smp));
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

bool beta_bracket_check(const std::vector<ProbeGroup>& groups, std::string& diag) {
  std::ostringstream out;
  bool ok = true;
  for (const auto& g : groups) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& s : g.samples) {
      lo = std::min(lo, s.lhs);
      hi = std::max(hi, s.lhs);
    }
    if (!(lo > 0.0) || hi / lo > 4.0) ok = false;
    out << "p=" << g.param << " in [" << lo << ", " << hi << "]; ";
  }
  diag = out.str();
  return ok;
}

std::vector<ProbeGroup> eval_coercivity(const LabContext& ctx) {
  (void)ctx;
  // || b sin^2(theta/2) (1 - sin^{k-4}(theta/2)) ||_{L1_theta} over the
  // hemisphere; positivity is what the spectral-gap sign argument needs.
  std::vector<ProbeGroup> groups;
  const auto spec = hemisphere_spec(0.0);
  ProbeGroup g;
  g.param = 0.0;
  g.param_name = "k";
  for (double k : {4.5, 6.0, 10.0, 20.0}) {
    std::vector<double> x, w;
    gauss_legendre(256, 0.0, 1.0, x, w);  // cos(theta) over the support
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double c = x[i];
      const double sin_half2 = 0.5 * (1.0 - c);
      const double sin_half = std::sqrt(sin_half2);
      acc += w[i] * spec.angular(c) * sin_half2 *
             (1.0 - std::pow(sin_half, k - 4.0));
    }
    acc *= kTwoPi;
    ProbeSample smp;
    smp.location = k;
    smp.lhs = acc;
    smp.basis = {1.0};
    g.samples.push_back(std::move(smp));
  }
  groups.push_back(std::move(g));
  return groups;
}

bool coercivity_positive(const std::vector<ProbeGroup>& groups, std::string& diag) {
  bool ok = true;
  std::ostringstream out;
  for (const auto& s : groups.front().samples) {
    if (!(s.lhs > 0.0)) ok = false;
    out << "k=" << s.location << ": " << s.lhs << "; ";
  }
  diag = out.str();
  return ok;
}

}  // namespace

const std::vector<BoundRegistryEntry>& bound_registry() {
  static const std::vector<BoundRegistryEntry> registry = [] {
    std::vector<BoundRegistryEntry> r;
    r.push_back({"L2.5", "weak convolution bound (three norm variants)",
                 "the following estimate holds",
                 {"L1^theta L2/L3/Linf product"}, std::nullopt, eval_l25, {}, {}});
    r.push_back({"L2.6", "double integral against Sobolev products",
                 "\\int\\int|v-v_*|^\\gamma|f(v_*)|^2|g(v)|^2",
                 {"min over m+n splits"}, std::nullopt, eval_l26, {}, {}});
    r.push_back({"L2.7", "bracket expansion remainders",
                 "\\langle v'\\rangle^k = sin^k(theta/2)\\langle v_*\\rangle^k + R_1 + R_2",
                 {"sin^2(theta/2)<v*>^{k-1}<v>", "<v>^k"}, std::nullopt, eval_l27,
                 {}, {}});
    r.push_back({"L2.8", "convolution pairing with l = max{gamma+2, 3/2}",
                 "with l = max{\\gamma+2, 3/2}", {"||g||_{L2_l}||f||_{L2_l}"},
                 std::nullopt, eval_l28, {}, {}});
    // The closed-form oracle for this integral gives leading-constant decay
    // k^{-3/2} (Beta-ratio law), which the scaling claim records; the paper
    // states the weaker c/k envelope.
    r.push_back({"L2.9", "soft mass integral against <v*>^{-k}",
                 "c/k \\langle v \\rangle^\\gamma + C_k \\langle v \\rangle^{\\gamma-2}",
                 {"<v>^gamma", "<v>^{gamma-2}"}, ScalingClaim{"k", -1.5},
                 eval_l29, {}, {}});
    r.push_back({"L2.11", "post-collision bracket ratio",
                 "can prove a stronger estimate", {"<v>^gamma"},
                 ScalingClaim{"k", -1.0}, eval_l211, {}, {}});
    r.push_back({"L2.12", "exponential-weight gain bound",
                 "\\langle v\\rangle^{\\gamma - b(\\gamma+3)/4}",
                 {"<v>^{gamma-b(gamma+3)/4}"}, std::nullopt, eval_l212, {},
                 l212_tail_exponent_check});
    r.push_back({"L6.1", "annulus-excluded loss integral",
                 "lim_{\\epsilon\\to 0} C_{k,\\epsilon} = 0", {"<v>^gamma"},
                 std::nullopt, eval_l61,
                 [](const std::vector<GroupFit>& g, std::string& d) {
                   return strictly_decreasing_in_param(g, d, "eps");
                 },
                 {}});
    r.push_back({"L6.2", "Maxwellian-weighted gain ratio",
                 "c/k^{(\\gamma+3)/4} \\langle v \\rangle^\\gamma",
                 {"<v>^gamma", "<v>^{gamma-2}"},
                 ScalingClaim{"k", -0.75}, eval_l62, {}, {}});
    r.push_back({"L6.3", "kernel mass bounds",
                 "\\int|l_k(v,v')| dv' \\le", {"<v>^gamma", "<v>^{gamma-2}"},
                 std::nullopt, eval_l63, l63_checks, {}});
    r.push_back({"L6.5", "conjugated bilinear pointwise envelopes",
                 "C\\nu(v)\\|\\langle v\\rangle^\\alpha f(s)\\|",
                 {"nu(v) norm product"}, std::nullopt, eval_l65, {}, {}});
    r.push_back({"L7.1", "convolution of semigroups",
                 "convolution of semigroups", {"e^{-l1 t}/(l2-l1)"}, std::nullopt,
                 eval_l71, {}, {}});
    r.push_back({"L7.4", "polynomial-exponential sup",
                 "x^k e^{-ax}", {"(1+a)^{-k}"}, std::nullopt, eval_l74, {}, {}});
    r.push_back({"L7.5", "relaxation-weighted algebraic convolution",
                 "C_r (1+t)^{-r}", {"(1+t)^{-r}"}, std::nullopt, eval_l75, {}, {}});
    r.push_back({"L7.7", "conjugated bilinear L2 envelope",
                 "\\|f\\|_{L^2}\\|\\langle v\\rangle^l f\\|^{1+\\gamma/3}",
                 {"L2/weighted-L2/Linf interpolation"}, std::nullopt, eval_l77,
                 {}, {}});
    r.push_back({"L2.15", "scalar exponential-weight subadditivity",
                 "f(c+d) \\le f(c)+f(d)+C", {"1"}, std::nullopt, eval_l215, {}, {}});
    r.push_back({"L2.16", "exponential/polynomial weight triangle bound",
                 "for some constant C_{k,a,b}", {"<v>^k/(<v*>^k<v*'>^k)"},
                 std::nullopt, eval_l216, {}, {}});
    r.push_back({"Beta", "Beta function asymptotics",
                 "Beta and Gamma functions fulfill", {"1"}, std::nullopt,
                 eval_beta, {}, beta_bracket_check});
    r.push_back({"Coercivity", "angular positivity behind the spectral gap",
                 "sin^2(\\theta/2)(1 - sin^{k-4}(\\theta/2)) > 0", {"1"},
                 std::nullopt, eval_coercivity, {}, coercivity_positive});
    return r;
  }();
  return registry;
}

}  // namespace boltzlab
