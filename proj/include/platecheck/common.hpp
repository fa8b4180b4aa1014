#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace platecheck {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Error categories surfaced by the library. Every throw site maps to one.
enum class Errc {
  invalid_argument,
  boundary_proximity,
  irregular_value,
  inconsistency,
  invalid_test_function,
  empty_region,
  singular_parametrization,
  unsupported_mesh,
  invariant_violation,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, double value = 0.0)
      : std::runtime_error(what), code_(code), value_(value) {}

  Errc code() const noexcept { return code_; }
  /// Numeric payload, e.g. the boundary margin for boundary_proximity.
  double value() const noexcept { return value_; }

 private:
  Errc code_;
  double value_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what, double value = 0.0) {
  throw Error(code, what, value);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(Errc::invalid_argument, what);
}

/// Deterministic 64-bit generator with a portable double conversion.
/// std::uniform_real_distribution is implementation-defined, so reports
/// would not be byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9E3779B97F4A7C15ULL) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [0,1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::uint64_t state_;
};

/// Uniformly distributed rotation (Shoemake quaternion method).
Mat3 random_rotation(Rng& rng);

/// Number of worker threads: PLATECHECK_THREADS when set and positive,
/// otherwise hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0,n). Each index is visited exactly once; writes
/// to distinct slots are race-free, so results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace platecheck
