#include "boltzlab/common.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>

namespace boltzlab {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularRelativeVelocity: return "SingularRelativeVelocity";
    case ErrorCode::AlreadySymmetrized: return "AlreadySymmetrized";
    case ErrorCode::DegenerateDirection: return "DegenerateDirection";
    case ErrorCode::NonFiniteField: return "NonFiniteField";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::WeightTooSmall: return "WeightTooSmall";
    case ErrorCode::VarianceOverflow: return "VarianceOverflow";
    case ErrorCode::NegativeDensity: return "NegativeDensity";
    case ErrorCode::StabilityViolation: return "StabilityViolation";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NoContraction: return "NoContraction";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DegenerateWindow: return "DegenerateWindow";
    case ErrorCode::UnknownIdentity: return "UnknownIdentity";
    case ErrorCode::UnknownEntry: return "UnknownEntry";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

std::size_t worker_count() {
  static const std::size_t n = [] {
    if (const char* env = std::getenv("BOLTZLAB_THREADS")) {
      long v = std::atol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return static_cast<std::size_t>(hc > 0 ? hc : 1);
  }();
  return n;
}

void parallel_for_blocked(std::size_t n, std::size_t block,
                          const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  if (block == 0) block = 1;
  const std::size_t nblocks = (n + block - 1) / block;
  const std::size_t workers = std::min(worker_count(), nblocks);
  if (workers <= 1) {
    for (std::size_t b = 0; b < nblocks; ++b) {
      fn(b * block, std::min(n, (b + 1) * block));
    }
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<std::size_t> next{0};
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        std::size_t b = next.fetch_add(1);
        if (b >= nblocks) break;
        fn(b * block, std::min(n, (b + 1) * block));
      }
    });
  }
  for (auto& t : pool) t.join();
}

double pairwise_sum(const double* data, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

double pairwise_sum(const std::vector<double>& data) {
  return pairwise_sum(data.data(), data.size());
}

double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& fn) {
  if (n == 0) return 0.0;
  constexpr std::size_t kBlock = 4096;
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks, 0.0);
  parallel_for_blocked(n, kBlock, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> buf;
    buf.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) buf.push_back(fn(i));
    partial[lo / kBlock] = pairwise_sum(buf);
  });
  return pairwise_sum(partial);
}

Rng Rng::substream(std::uint64_t id) const {
  // splitmix64 step on (seed ^ id) gives decorrelated stream seeds.
  std::uint64_t z = state_ ^ (0xbf58476d1ce4e5b9ull * (id + 1));
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return Rng(z ^ (z >> 31));
}

std::uint64_t Rng::next_u64() {
  // splitmix64: tiny state, full 64-bit period over the counter.
  state_ += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = kTwoPi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

void Rng::unit_vector(double out[3]) {
  const double c = uniform(-1.0, 1.0);
  const double phi = uniform(0.0, kTwoPi);
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  out[0] = s * std::cos(phi);
  out[1] = s * std::sin(phi);
  out[2] = c;
}

}  // namespace boltzlab
