#pragma once

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "minslam/angle.hpp"
#include "minslam/angular_cost.hpp"
#include "minslam/errors.hpp"
#include "minslam/gls.hpp"
#include "minslam/problem.hpp"

// Closed-form elimination of the translations. For fixed phi1 the position cost is a
// weighted linear least-squares problem in P = [p1; p2], whose optimum is
//
//   F_p*(phi1) = c0 - 2 a0 cos(phi1 - theta0).
//
// What remains are two cost functions of the headings only, f (geodesic) and g (chordal).

namespace minslam {

using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix64d = Eigen::Matrix<double, 6, 4>;

// Positions as a 4-vector [p1; p2].
using Positions = Eigen::Vector4d;

// Maps P = [p1; p2] to the stacked predicted translations [p1; p2 - p1; p2].
inline Matrix64d position_design_matrix() {
  Matrix64d a = Matrix64d::Zero();
  a.block<2, 2>(0, 0) = Eigen::Matrix2d::Identity();
  a.block<2, 2>(2, 0) = -Eigen::Matrix2d::Identity();
  a.block<2, 2>(2, 2) = Eigen::Matrix2d::Identity();
  a.block<2, 2>(4, 2) = Eigen::Matrix2d::Identity();
  return a;
}

// blockdiag(R(phi), R(phi), R(phi)).
inline Matrix6d block_rotation(double phi) {
  const Eigen::Matrix2d r = rot2(phi).matrix();
  Matrix6d m = Matrix6d::Zero();
  for (int i = 0; i < 3; ++i) m.block<2, 2>(2 * i, 2 * i) = r;
  return m;
}

struct ReducedModel {
  double c0 = 0.0;
  double a0 = 0.0;
  double theta0 = 0.0;
  Matrix6d q6 = Matrix6d::Zero();
  Vector6d z0 = Vector6d::Zero();
  Vector6d z1 = Vector6d::Zero();
  MeasurementSet measurements;
  // Kept apart so position and heading noise can differ; both default to measurements.sigma.
  double sigma_p = 1.0;
  double sigma_phi = 1.0;
  // (A^T C^-1 A)^-1 A^T C^-1, the map from the stacked target to P*.
  Eigen::Matrix<double, 4, 6> solve_map = Eigen::Matrix<double, 4, 6>::Zero();
};

// Stacked target [p01; R(phi1) p12; p02] that A P should reproduce.
inline Vector6d position_target(const ReducedModel& model, double phi1) {
  return model.z0 + block_rotation(phi1) * model.z1;
}

// Direct evaluation of the translation residuals, sum_ij |p_ij - R_i^T (p_j - p_i)|^2 / sigma^2.
inline double position_cost(const MeasurementSet& ms, const Positions& p, double phi1,
                            double sigma_p) {
  const Eigen::Vector2d p1 = p.head<2>();
  const Eigen::Vector2d p2 = p.tail<2>();
  const Eigen::Vector2d r01 = ms.p01 - p1;
  const Eigen::Vector2d r12 = ms.p12 - rot2(phi1).matrix().transpose() * (p2 - p1);
  const Eigen::Vector2d r02 = ms.p02 - p2;
  return (r01.squaredNorm() + r12.squaredNorm() + r02.squaredNorm()) / (sigma_p * sigma_p);
}

inline double position_cost(const MeasurementSet& ms, const Positions& p, double phi1) {
  return position_cost(ms, p, phi1, ms.sigma);
}

inline ReducedModel build_reduced_model(const MeasurementSet& ms) {
  validate(ms);
  ReducedModel m;
  m.measurements = ms;
  m.sigma_p = ms.sigma;
  m.sigma_phi = ms.sigma;

  m.z0.segment<2>(0) = ms.p01;
  m.z0.segment<2>(4) = ms.p02;
  m.z1.segment<2>(2) = ms.p12;

  const Matrix64d a = position_design_matrix();
  const Matrix6d c = (m.sigma_p * m.sigma_p) * Matrix6d::Identity();
  m.q6 = gls_projector(a, c);

  const Matrix6d c_inv = c.inverse();
  const Eigen::Matrix4d normal = a.transpose() * c_inv * a;
  m.solve_map = normal.llt().solve(a.transpose() * c_inv);

  // F_p*(phi1) = |z0 + Rbar(phi1) z1|_Q^2. Q commutes with Rbar, so the only phi1 dependence
  // is the cross term 2 z0^T Q Rbar(phi1) z1 = 2 (cos(phi1) alpha + sin(phi1) beta).
  const double alpha = m.z0.dot(m.q6 * m.z1);
  const double beta = m.z0.dot(m.q6 * block_rotation(kPi / 2.0) * m.z1);
  m.c0 = m.z0.dot(m.q6 * m.z0) + m.z1.dot(m.q6 * m.z1);
  m.a0 = std::hypot(alpha, beta);
  const double scale = std::max({1.0, m.c0, m.z0.squaredNorm() + m.z1.squaredNorm()});
  if (!(m.a0 > 1e-12 * scale)) {
    throw DegenerateProblem("position measurements give a0 = 0; the reduction is degenerate");
  }
  m.theta0 = std::atan2(-beta, -alpha);
  return m;
}

// F_p*(phi1) in closed form.
inline double position_cost_star(const ReducedModel& model, double phi1) {
  return model.c0 - 2.0 * model.a0 * std::cos(phi1 - model.theta0);
}

// Optimal positions for a fixed heading of pose 1.
inline Positions positions_star(const ReducedModel& model, double phi1) {
  return model.solve_map * position_target(model, phi1);
}

// Full 6-dof geodesic cost F(P, Phi).
inline double full_geodesic_cost(const MeasurementSet& ms, const Positions& p,
                                 const AnglePair& phi) {
  return position_cost(ms, p, phi.phi1) + f_phi(ms, phi);
}

// Full 6-dof chordal cost G(P, Phi); angular part from the rotation matrices themselves.
inline double full_chordal_cost(const MeasurementSet& ms, const Positions& p,
                                const AnglePair& phi) {
  const Eigen::Matrix2d r1 = rot2(phi.phi1).matrix();
  const Eigen::Matrix2d r2 = rot2(phi.phi2).matrix();
  const double s2 = ms.sigma * ms.sigma;
  const double e01 = (rot2(ms.phi01).matrix() - r1).squaredNorm();
  const double e12 = (r1 * rot2(ms.phi12).matrix() - r2).squaredNorm();
  const double e02 = (rot2(ms.phi02).matrix() - r2).squaredNorm();
  return position_cost(ms, p, phi.phi1) + (e01 + e12 + e02) / (2.0 * s2);
}

// f(Phi) = F(P*(phi1), Phi).
inline double reduced_geodesic(const ReducedModel& model, const AnglePair& phi) {
  return position_cost_star(model, phi.phi1) + f_phi(model.measurements, phi, model.sigma_phi);
}

// g(Phi) = G(P*(phi1), Phi).
inline double reduced_chordal(const ReducedModel& model, const AnglePair& phi) {
  return position_cost_star(model, phi.phi1) + g_phi(model.measurements, phi, model.sigma_phi);
}

}  // namespace minslam
