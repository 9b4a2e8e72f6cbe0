#pragma once

#include <cmath>

#include "minslam/angle.hpp"
#include "minslam/problem.hpp"

// Angle-only parts of the two cost functions. Both are 2pi-periodic in each coordinate.

namespace minslam {

// phi12 - (phi2 - phi1), unwrapped.
inline double xi(const MeasurementSet& ms, const AnglePair& phi) {
  return ms.phi12 - (phi.phi2 - phi.phi1);
}

// Geodesic angular cost: sum of squared wrapped residuals over sigma^2.
// On the fundamental square the first and last wraps are the identity.
inline double f_phi(const MeasurementSet& ms, const AnglePair& phi, double sigma_phi) {
  const double r01 = wrap(ms.phi01 - phi.phi1);
  const double r12 = wrap(xi(ms, phi));
  const double r02 = wrap(ms.phi02 - phi.phi2);
  return (r01 * r01 + r12 * r12 + r02 * r02) / (sigma_phi * sigma_phi);
}

inline double f_phi(const MeasurementSet& ms, const AnglePair& phi) {
  return f_phi(ms, phi, ms.sigma);
}

// Chordal angular cost, (2/sigma^2) (3 - cos(phi01 - phi1) - cos(phi02 - phi2) - cos(xi)).
inline double g_phi(const MeasurementSet& ms, const AnglePair& phi, double sigma_phi) {
  return 2.0 / (sigma_phi * sigma_phi) *
         (3.0 - std::cos(ms.phi01 - phi.phi1) - std::cos(ms.phi02 - phi.phi2) -
          std::cos(xi(ms, phi)));
}

inline double g_phi(const MeasurementSet& ms, const AnglePair& phi) {
  return g_phi(ms, phi, ms.sigma);
}

}  // namespace minslam
