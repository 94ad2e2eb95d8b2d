#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace boltzlab {

// Error taxonomy shared by all modules. Numeric preconditions surface as
// typed exceptions so callers (and the CLI) can map them to exit codes.
enum class ErrorCode {
  SingularRelativeVelocity,
  AlreadySymmetrized,
  DegenerateDirection,
  NonFiniteField,
  GridMismatch,
  WeightTooSmall,
  VarianceOverflow,
  NegativeDensity,
  StabilityViolation,
  NonFinite,
  NoContraction,
  InsufficientData,
  DegenerateWindow,
  UnknownIdentity,
  UnknownEntry,
  PreconditionViolated,
  ConfigError,
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

// ---------------------------------------------------------------------------
// Deterministic parallelism.
//
// Work is split into fixed-size blocks; block results are combined in index
// order, so numeric output does not depend on the worker count.

std::size_t worker_count();

// Runs fn(begin, end) over disjoint index ranges.
void parallel_for_blocked(std::size_t n, std::size_t block,
                          const std::function<void(std::size_t, std::size_t)>& fn);

// Pairwise summation in a fixed order; deterministic and O(log n) error.
double pairwise_sum(const double* data, std::size_t n);
double pairwise_sum(const std::vector<double>& data);

// Sum of fn(i) for i in [0, n), blocked pairwise, deterministic, parallel.
double parallel_sum(std::size_t n, const std::function<double(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Seeded RNG with explicitly coded distributions so that streams are
// reproducible bit-for-bit for a given seed.

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

  // Derives an independent stream; used to decouple identity-check sides.
  Rng substream(std::uint64_t id) const;

  std::uint64_t next_u64();
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  double normal();                        // standard normal, Box-Muller
  void unit_vector(double out[3]);        // uniform on the unit sphere

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int i) { return (&x)[i]; }
  double operator[](int i) const { return (&x)[i]; }
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
inline Vec3 operator*(Vec3 a, double s) { return s * a; }
inline Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
inline Vec3& operator+=(Vec3& a, Vec3 b) { a = a + b; return a; }
inline Vec3& operator-=(Vec3& a, Vec3 b) { a = a - b; return a; }

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm2(Vec3 a) { return dot(a, a); }
inline double norm(Vec3 a) { return std::sqrt(norm2(a)); }
inline Vec3 normalized(Vec3 a) { return a / norm(a); }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// <v> = sqrt(1 + |v|^2)
inline double bracket(Vec3 v) { return std::sqrt(1.0 + norm2(v)); }
inline double bracket_of_norm(double s) { return std::sqrt(1.0 + s * s); }

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kFourPi = 4.0 * kPi;

}  // namespace boltzlab
