#include "boltzlab/gain_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "boltzlab/weights.hpp"

namespace boltzlab {

double bessel_i0_scaled(double x) {
  // Abramowitz & Stegun 9.8.1 / 9.8.2 rational fits, |error| < 2e-7.
  const double ax = std::abs(x);
  if (ax < 3.75) {
    const double t = x / 3.75, t2 = t * t;
    const double i0 = 1.0 + t2 * (3.5156229 + t2 * (3.0899424 + t2 * (1.2067492 +
                      t2 * (0.2659732 + t2 * (0.0360768 + t2 * 0.0045813)))));
    return std::exp(-ax) * i0;
  }
  const double t = 3.75 / ax;
  const double p = 0.39894228 + t * (0.01328592 + t * (0.00225319 + t * (-0.00157565 +
                   t * (0.00916281 + t * (-0.02057706 + t * (0.02635537 +
                   t * (-0.01647633 + t * 0.00392377)))))));
  return p / std::sqrt(ax);
}

namespace {

// Geometry of the plane integral for the pair (|v| = s, |v'| = sp, |v-v'| = d):
// component of v along v'-v and the in-plane remainder.
struct PlaneGeometry {
  double v_perp2 = 0.0;
  double s_par = 0.0;
};

PlaneGeometry plane_geometry(double s, double sp, double d) {
  PlaneGeometry g;
  const double vdotu = (sp * sp - s * s - d * d) / (2.0 * d);
  g.v_perp2 = vdotu * vdotu;
  g.s_par = std::sqrt(std::max(0.0, s * s - g.v_perp2));
  return g;
}

double effective_profile(const CollisionKernelSpec& spec, double c, bool folded) {
  // Both gain integrals fold into one plane integral with b(c) + b(-c).
  if (!folded) return spec.angular(c);
  return spec.angular(c) + spec.angular(-c);
}

// Radial integrand of the plane integral at in-plane radius rho.
inline double rho_integrand(const CollisionKernelSpec& spec, double d,
                            double s_par, double rho, bool folded) {
  const double r2 = d * d + rho * rho;
  const double c = (rho * rho - d * d) / r2;
  const double b = effective_profile(spec, c, folded);
  if (b == 0.0) return 0.0;
  const double dev = rho - s_par;
  return rho * std::pow(r2, 0.5 * (spec.gamma - 1.0)) * b *
         std::exp(-0.5 * dev * dev) * bessel_i0_scaled(rho * s_par);
}

struct GaussRule {
  std::vector<double> x, w;
};

const GaussRule& gl32() {
  static const GaussRule rule = [] {
    GaussRule r;
    gauss_legendre(32, 0.0, 1.0, r.x, r.w);
    return r;
  }();
  return rule;
}

// Integrates the rho integrand over [a, b] with a 32-point rule.
double integrate_piece(const CollisionKernelSpec& spec, double d, double s_par,
                       double a, double b, bool folded) {
  if (b <= a) return 0.0;
  const GaussRule& r = gl32();
  double acc = 0.0;
  const double len = b - a;
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    acc += r.w[i] * rho_integrand(spec, d, s_par, a + len * r.x[i], folded);
  }
  return acc * len;
}

double plane_integral(const CollisionKernelSpec& spec, double d, double s_par,
                      bool folded = true) {
  // The Gaussian factor concentrates mass in |rho - s_par| <= 13; the
  // profile may kink at rho = d (support edge), so d is a breakpoint.
  const double lo = std::max(0.0, s_par - 13.0);
  const double hi = s_par + 13.0;
  double pts[5];
  int npts = 0;
  pts[npts++] = lo;
  if (d > lo && d < hi) pts[npts++] = d;
  if (s_par > lo && s_par < hi) pts[npts++] = s_par;
  pts[npts++] = hi;
  std::sort(pts, pts + npts);
  double acc = 0.0;
  for (int i = 0; i + 1 < npts; ++i) {
    // Split long pieces for resolution of the Gaussian width.
    const double a = pts[i], b = pts[i + 1];
    const int sub = std::max(1, static_cast<int>(std::ceil((b - a) / 6.5)));
    for (int j = 0; j < sub; ++j) {
      acc += integrate_piece(spec, d, s_par, a + (b - a) * j / sub,
                             a + (b - a) * (j + 1) / sub, folded);
    }
  }
  return acc;
}

}  // namespace

double GainKernelTable::direct(const CollisionKernelSpec& spec, double s,
                               double sp, double d) {
  return direct_weighted(spec, s, sp, d, 0.0, true);
}

double GainKernelTable::direct_weighted(const CollisionKernelSpec& spec, double s,
                                        double sp, double d, double extra_log,
                                        bool folded) {
  if (d <= 0.0) {
    fail(ErrorCode::DegenerateDirection, "gain kernel requires v' != v");
  }
  const PlaneGeometry g = plane_geometry(s, sp, d);
  const double amp = std::exp(extra_log - 0.5 * g.v_perp2);
  if (amp == 0.0) return 0.0;
  const double M = 4.0 * std::pow(kTwoPi, -0.5) * amp *
                   plane_integral(spec, d, g.s_par, folded);
  return M / d;
}

double GainKernelTable::diagonal_cell_integral(const CollisionKernelSpec& spec,
                                               double s, double cell_volume) {
  // Equal-volume sphere around the diagonal; substitution rho = R u^2
  // absorbs the d^{gamma+1} endpoint behaviour of soft kernels.
  const double R = std::cbrt(cell_volume * 3.0 / kFourPi);
  const GaussRule& r = gl32();
  double acc = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    const double u = r.x[i];
    const double rho = R * u * u;
    if (rho <= 0.0) continue;
    const double M = rho * direct(spec, s, s, rho);  // = M(s, s, rho)
    acc += r.w[i] * rho * M * 2.0 * R * u;
  }
  return kFourPi * acc;
}

std::shared_ptr<const GainKernelTable> GainKernelTable::build(
    const CollisionKernelSpec& spec, const Params& params) {
  auto table = std::shared_ptr<GainKernelTable>(new GainKernelTable());
  table->params_ = params;
  table->spec_key_ = spec.cache_key();
  table->ds_ = params.s_max / (params.n_s - 1);
  const double d_min = 0.02;
  table->xi0_ = xi_of_d(d_min);
  table->dxi_ = (xi_of_d(params.d_max) - table->xi0_) / (params.n_d - 1);
  table->data_.assign(static_cast<std::size_t>(params.n_s) * params.n_s * params.n_d,
                      0.0f);

  const int n_s = params.n_s, n_d = params.n_d;
  parallel_for_blocked(static_cast<std::size_t>(n_s) * n_s, 8,
                       [&](std::size_t lo, std::size_t hi) {
    for (std::size_t row = lo; row < hi; ++row) {
      const int is = static_cast<int>(row / n_s);
      const int isp = static_cast<int>(row % n_s);
      const double s = is * table->ds_;
      const double sp = isp * table->ds_;
      float* out = table->data_.data() + row * n_d;
      for (int id = 0; id < n_d; ++id) {
        const double d = std::exp(table->xi0_ + id * table->dxi_) - 0.5;
        if (d <= 0.0) { out[id] = 0.0f; continue; }
        const PlaneGeometry g = plane_geometry(s, sp, d);
        const double M = 4.0 * std::pow(kTwoPi, -0.5) *
                         std::exp(-0.5 * g.v_perp2) *
                         plane_integral(spec, d, g.s_par);
        out[id] = static_cast<float>(M);
      }
    }
  });
  return table;
}

double GainKernelTable::value(double s, double sp, double d) const {
  if (d <= 0.0) return 0.0;
  const int n_s = params_.n_s, n_d = params_.n_d;
  auto clampf = [](double x, double hi) { return x < 0.0 ? 0.0 : (x > hi ? hi : x); };
  const double fs = clampf(s / ds_, n_s - 1.001);
  const double fp = clampf(sp / ds_, n_s - 1.001);
  const double fd = clampf((xi_of_d(d) - xi0_) / dxi_, n_d - 1.001);
  const int is = static_cast<int>(fs), ip = static_cast<int>(fp), id = static_cast<int>(fd);
  const double ts = fs - is, tp = fp - ip, td = fd - id;
  const float* base = data_.data();
  auto at = [&](int a, int b, int c) {
    return static_cast<double>(base[(static_cast<std::size_t>(a) * n_s + b) * n_d + c]);
  };
  double acc = 0.0;
  for (int a = 0; a < 2; ++a) {
    const double wa = a ? ts : 1.0 - ts;
    for (int b = 0; b < 2; ++b) {
      const double wb = b ? tp : 1.0 - tp;
      for (int c = 0; c < 2; ++c) {
        const double wc = c ? td : 1.0 - td;
        acc += wa * wb * wc * at(is + a, ip + b, id + c);
      }
    }
  }
  return acc / d;
}

namespace {
constexpr std::uint32_t kCacheMagic = 0x424c4b54;  // "BLKT"
constexpr std::uint32_t kCacheVersion = 1;
}  // namespace

std::shared_ptr<const GainKernelTable> GainKernelTable::load_or_build(
    const CollisionKernelSpec& spec, const Params& params,
    const std::string& cache_dir) {
  namespace fs = std::filesystem;
  std::string path;
  if (!cache_dir.empty()) {
    std::error_code ec;
    fs::create_directories(cache_dir, ec);
    // Key the file name by content; collisions are caught by the header.
    std::size_t h = std::hash<std::string>{}(spec.cache_key());
    char buf[64];
    std::snprintf(buf, sizeof buf, "gain_%016zx_%d_%d.bin", h, params.n_s, params.n_d);
    path = cache_dir + "/" + buf;
    std::ifstream in(path, std::ios::binary);
    if (in) {
      std::uint32_t magic = 0, version = 0;
      std::uint32_t key_len = 0;
      in.read(reinterpret_cast<char*>(&magic), 4);
      in.read(reinterpret_cast<char*>(&version), 4);
      double gamma = 0.0, conj_k = 0.0;
      in.read(reinterpret_cast<char*>(&gamma), 8);
      in.read(reinterpret_cast<char*>(&conj_k), 8);
      Params p;
      std::uint64_t seed = 0;
      in.read(reinterpret_cast<char*>(&p), sizeof p);
      in.read(reinterpret_cast<char*>(&seed), 8);
      in.read(reinterpret_cast<char*>(&key_len), 4);
      std::string key(key_len, '\0');
      in.read(key.data(), key_len);
      if (in && magic == kCacheMagic && version == kCacheVersion &&
          gamma == spec.gamma && key == spec.cache_key() &&
          p.s_max == params.s_max && p.n_s == params.n_s &&
          p.d_max == params.d_max && p.n_d == params.n_d) {
        auto table = std::shared_ptr<GainKernelTable>(new GainKernelTable());
        table->params_ = params;
        table->spec_key_ = key;
        table->ds_ = params.s_max / (params.n_s - 1);
        table->xi0_ = xi_of_d(0.02);
        table->dxi_ = (xi_of_d(params.d_max) - table->xi0_) / (params.n_d - 1);
        const std::size_t count =
            static_cast<std::size_t>(params.n_s) * params.n_s * params.n_d;
        table->data_.resize(count);
        in.read(reinterpret_cast<char*>(table->data_.data()),
                static_cast<std::streamsize>(count * sizeof(float)));
        if (in) return table;
      }
    }
  }
  auto table = build(spec, params);
  if (!path.empty()) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (out) {
      const std::uint32_t magic = kCacheMagic, version = kCacheVersion;
      const double gamma = spec.gamma, conj_k = 0.0;
      const std::uint64_t seed = 0;  // deterministic build, no sampling
      const std::string& key = table->spec_key();
      const std::uint32_t key_len = static_cast<std::uint32_t>(key.size());
      out.write(reinterpret_cast<const char*>(&magic), 4);
      out.write(reinterpret_cast<const char*>(&version), 4);
      out.write(reinterpret_cast<const char*>(&gamma), 8);
      out.write(reinterpret_cast<const char*>(&conj_k), 8);
      out.write(reinterpret_cast<const char*>(&params), sizeof params);
      out.write(reinterpret_cast<const char*>(&seed), 8);
      out.write(reinterpret_cast<const char*>(&key_len), 4);
      out.write(key.data(), key_len);
      out.write(reinterpret_cast<const char*>(table->data().data()),
                static_cast<std::streamsize>(table->data().size() * sizeof(float)));
    }
  }
  return table;
}

double l_k_value(const CollisionKernelSpec& spec, double k, Vec3 v, Vec3 v_prime) {
  const double d = norm(v - v_prime);
  if (d == 0.0) {
    fail(ErrorCode::DegenerateDirection, "l_k is singular on the diagonal");
  }
  const double s = norm(v), sp = norm(v_prime);
  const double gain = GainKernelTable::direct(spec, s, sp, d);
  const double conv = maxwellian_of_norm2(s * s) * spec.angular_mass() *
                      std::pow(d, spec.gamma);
  return std::pow(bracket_of_norm(s), k) * std::pow(bracket_of_norm(sp), -k) *
         (gain - conv);
}

double l_k_abs_row_integral(const CollisionKernelSpec& spec, double k, double s,
                            double eps, double weight_exponent) {
  // Bipolar reduction: int f(|v'|, |v-v'|) dv' =
  //   (2 pi / s) int_0^inf int_{|s-d|}^{s+d} s' d f(s', d) ds' dd   (s > 0).
  const double br = bracket_of_norm(s);
  const double d_lo_cut = eps > 0.0 ? eps * br : 0.0;
  const double d_hi_cut = eps > 0.0 ? br / eps : std::numeric_limits<double>::infinity();
  const double sp_max = std::max(s + 40.0, 4.0 * s);
  const double d_max = s + sp_max;
  auto kernel_abs = [&](double d, double sp) {
    const bool excluded = (d < d_lo_cut || d > d_hi_cut);
    if (eps > 0.0 ? !excluded : false) return 0.0;
    const double gain = GainKernelTable::direct(spec, s, sp, d);
    const double conv = maxwellian_of_norm2(s * s) * spec.angular_mass() *
                        std::pow(d, spec.gamma);
    double val = std::abs(gain - conv) * std::pow(bracket_of_norm(s), k) *
                 std::pow(bracket_of_norm(sp), -k);
    if (weight_exponent != 0.0) {
      val *= std::pow(bracket_of_norm(sp), weight_exponent);
    }
    return val;
  };
  if (s <= 1e-12) {
    // Row at the origin: spherical symmetry, s' = d.
    std::vector<double> xd, wd;
    gauss_legendre(400, 1e-6, d_max, xd, wd);
    double acc = 0.0;
    for (std::size_t i = 0; i < xd.size(); ++i) {
      acc += wd[i] * kFourPi * xd[i] * xd[i] * kernel_abs(xd[i], xd[i]);
    }
    return acc;
  }
  // d-panels refined near 0 (kernel singularity) by geometric subdivision.
  std::vector<double> panels{1e-6, 0.01, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0};
  while (panels.back() < d_max) panels.push_back(std::min(d_max, panels.back() * 1.8));
  double acc = 0.0;
  std::vector<double> xdp, wdp;
  gauss_legendre(24, 0.0, 1.0, xdp, wdp);
  std::vector<double> xsp, wsp;
  gauss_legendre(32, 0.0, 1.0, xsp, wsp);
  for (std::size_t p = 0; p + 1 < panels.size(); ++p) {
    const double a = panels[p], b = std::min(panels[p + 1], d_max);
    if (b <= a) continue;
    for (std::size_t i = 0; i < xdp.size(); ++i) {
      const double d = a + (b - a) * xdp[i];
      const double wi = wdp[i] * (b - a);
      const double sp_lo = std::abs(s - d);
      const double sp_hi = std::min(s + d, sp_max);
      if (sp_hi <= sp_lo) continue;
      double inner = 0.0;
      for (std::size_t j = 0; j < xsp.size(); ++j) {
        const double sp = sp_lo + (sp_hi - sp_lo) * xsp[j];
        inner += wsp[j] * sp * kernel_abs(d, sp);
      }
      inner *= (sp_hi - sp_lo);
      acc += wi * d * inner;
    }
  }
  return acc * kTwoPi / s;
}

}  // namespace boltzlab
