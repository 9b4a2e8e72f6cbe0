#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Core>

#include "minslam/errors.hpp"

namespace minslam {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline void require_finite(double a, const char* what = "angle") {
  if (!std::isfinite(a)) {
    throw InvalidArgument(std::string(what) + " must be finite");
  }
}

// Representative of `a` in [-pi, pi). Remainder based, so exact for large |a|.
inline double wrap(double a) {
  require_finite(a);
  double r = std::fmod(a + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  r -= kPi;
  // fmod can land exactly on the excluded endpoint after the shift back.
  if (r >= kPi) r -= kTwoPi;
  return r;
}

// Element of SO(2). Constructed only from an angle, so the orthogonality invariant holds.
class Rot2 {
 public:
  explicit Rot2(double angle) {
    require_finite(angle);
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    m_ << c, -s, s, c;
  }

  const Eigen::Matrix2d& matrix() const { return m_; }
  Rot2 inverse() const { return Rot2(m_.transpose()); }
  Rot2 operator*(const Rot2& other) const { return Rot2(Eigen::Matrix2d(m_ * other.m_)); }
  Eigen::Vector2d operator*(const Eigen::Vector2d& v) const { return m_ * v; }
  double angle() const { return std::atan2(m_(1, 0), m_(0, 0)); }

 private:
  explicit Rot2(const Eigen::Matrix2d& m) : m_(m) {}
  Eigen::Matrix2d m_;
};

inline Rot2 rot2(double a) { return Rot2(a); }

// Shortest arc between two headings, in [0, pi].
inline double geodesic_err(double a, double b) {
  require_finite(a);
  require_finite(b);
  return std::abs(wrap(a - b));
}

// ||R(a) - R(b)||_F^2 = 4 (1 - cos(a - b)).
inline double chordal_err_sq(double a, double b) {
  require_finite(a);
  require_finite(b);
  return 4.0 * (1.0 - std::cos(a - b));
}

// Reduced decision variable (phi1, phi2).
struct AnglePair {
  double phi1 = 0.0;
  double phi2 = 0.0;

  Eigen::Vector2d vec() const { return {phi1, phi2}; }
  static AnglePair from(const Eigen::Vector2d& v) { return {v(0), v(1)}; }

  friend AnglePair operator+(const AnglePair& a, const AnglePair& b) {
    return {a.phi1 + b.phi1, a.phi2 + b.phi2};
  }
  friend bool operator==(const AnglePair&, const AnglePair&) = default;
};

// max(|wrap(a1 - b1)|, |wrap(a2 - b2)|): distance on the torus under the max-norm.
inline double wrapped_max_distance(const AnglePair& a, const AnglePair& b) {
  return std::max(std::abs(wrap(a.phi1 - b.phi1)), std::abs(wrap(a.phi2 - b.phi2)));
}

}  // namespace minslam
