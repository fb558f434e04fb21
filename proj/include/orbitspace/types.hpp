#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace orbitspace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A point in the ambient chart of a model manifold.
using Point = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Error hierarchy. Everything derives from std::runtime_error so callers can
// catch broadly; the suite runner records what() into the report.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input outside the domain of an operation (point off manifold, empty region).
struct DomainError : Error {
  using Error::Error;
};

/// Graph-based distance could not connect the two points.
struct UnreachableError : Error {
  using Error::Error;
};

/// Valid input that this implementation does not handle.
struct UnsupportedError : Error {
  using Error::Error;
};

/// Structural validation of a user-supplied object failed.
struct ValidationError : Error {
  using Error::Error;
};

/// Angle reduced to [0, 2*pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Signed angle difference reduced to (-pi, pi].
inline double angle_delta(double a, double b) {
  double d = std::fmod(a - b, kTwoPi);
  if (d > kPi) d -= kTwoPi;
  if (d <= -kPi) d += kTwoPi;
  return d;
}

/// Deterministic uniform sampler. The engine output sequence is fixed by the
/// standard; the conversion to doubles is done here so results do not depend
/// on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }
  double normal() {
    // Box-Muller, one value per call.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace orbitspace
