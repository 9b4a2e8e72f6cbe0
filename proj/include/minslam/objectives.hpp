#pragma once

#include <cmath>

#include <Eigen/Core>

#include "minslam/angle.hpp"
#include "minslam/chordal.hpp"
#include "minslam/geodesic.hpp"
#include "minslam/optimizer.hpp"
#include "minslam/reduction.hpp"

// Cost-and-gradient callables of the reduced problems, in the form `minimize` consumes.

namespace minslam {

struct GradientF {
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  bool on_boundary = false;
};

inline constexpr double kKinkTol = 1e-12;

// Gradient of the active smooth piece of f. On the kink |wrap(xi)| = pi the piece is chosen by
// the region rule (xi = -pi belongs to R_1, xi = +pi to R_-1) and the boundary flag is set.
inline GradientF gradient_of_f(const ReducedModel& model, const AnglePair& phi) {
  const MeasurementSet& ms = model.measurements;
  const double w = 2.0 / (model.sigma_phi * model.sigma_phi);
  const double r01 = wrap(ms.phi01 - phi.phi1);
  const double r02 = wrap(ms.phi02 - phi.phi2);
  const double x = xi(ms, phi);
  double rx = wrap(x);
  GradientF out;
  if (std::abs(kPi - std::abs(rx)) <= kKinkTol) {
    out.on_boundary = true;
    rx = x < 0.0 ? kPi : -kPi;
  }
  out.grad = {2.0 * model.a0 * std::sin(phi.phi1 - model.theta0) + w * (-r01 + rx),
              w * (-r02 - rx)};
  return out;
}

inline Eigen::Vector2d gradient_of_g(const ReducedModel& model, const AnglePair& phi) {
  return jacobian_g(model, phi);
}

// Callable for `minimize` over the geodesic cost f.
struct GeodesicObjective {
  const ReducedModel* model;
  Evaluation operator()(const AnglePair& phi) const {
    const GradientF g = gradient_of_f(*model, phi);
    return {reduced_geodesic(*model, phi), g.grad, g.on_boundary};
  }
};

// Callable for `minimize` over the chordal cost g.
struct ChordalObjective {
  const ReducedModel* model;
  Evaluation operator()(const AnglePair& phi) const {
    return {reduced_chordal(*model, phi), gradient_of_g(*model, phi), false};
  }
};

}  // namespace minslam
