#pragma once

#include <cmath>
#include <random>
#include <string>

#include <Eigen/Core>

#include "minslam/angle.hpp"
#include "minslam/errors.hpp"

namespace minslam {

// Poses 1 and 2. Pose 0 sits at the origin with zero heading and is not stored.
struct GroundTruth {
  Eigen::Vector2d p1{1.0, 0.0};
  Eigen::Vector2d p2{1.0, 1.0};
  double phi1 = 0.0;
  double phi2 = 0.0;

  AnglePair angles() const { return {phi1, phi2}; }
};

// Relative measurements between the three poses; every channel has std-dev sigma.
struct MeasurementSet {
  Eigen::Vector2d p01 = Eigen::Vector2d::Zero();
  Eigen::Vector2d p12 = Eigen::Vector2d::Zero();
  Eigen::Vector2d p02 = Eigen::Vector2d::Zero();
  double phi01 = 0.0;
  double phi12 = 0.0;
  double phi02 = 0.0;
  double sigma = 1.0;
};

// How a total orientation mismatch is spread over (phi01, phi12, phi02).
enum class MismatchSplit { Thirds, Phi12 };

inline std::string to_string(MismatchSplit s) { return s == MismatchSplit::Thirds ? "thirds" : "phi12"; }

inline MismatchSplit mismatch_split_from_string(const std::string& s) {
  if (s == "thirds") return MismatchSplit::Thirds;
  if (s == "phi12") return MismatchSplit::Phi12;
  throw InvalidProblem("unknown mismatch split '" + s + "' (expected thirds or phi12)");
}

struct BenchmarkProblem {
  GroundTruth ground_truth;
  double epsilon = 0.0;
  MismatchSplit split = MismatchSplit::Thirds;
  MeasurementSet measurements;
  std::string label;
};

inline constexpr double kCoincidenceTol = 1e-12;

inline void validate(const GroundTruth& gt) {
  for (double a : {gt.phi1, gt.phi2, gt.p1.x(), gt.p1.y(), gt.p2.x(), gt.p2.y()}) {
    if (!std::isfinite(a)) throw InvalidProblem("ground truth contains a non-finite value");
  }
  if (gt.p1.norm() <= kCoincidenceTol) throw InvalidProblem("pose 1 coincides with pose 0");
  if (gt.p2.norm() <= kCoincidenceTol) throw InvalidProblem("pose 2 coincides with pose 0");
  if ((gt.p2 - gt.p1).norm() <= kCoincidenceTol) {
    throw InvalidProblem("pose 2 coincides with pose 1");
  }
}

inline void validate(const MeasurementSet& ms) {
  if (!(ms.sigma > 0.0) || !std::isfinite(ms.sigma)) {
    throw InvalidProblem("sigma must be a positive finite number");
  }
  for (double a : {ms.phi01, ms.phi12, ms.phi02, ms.p01.x(), ms.p01.y(), ms.p12.x(), ms.p12.y(),
                   ms.p02.x(), ms.p02.y()}) {
    if (!std::isfinite(a)) throw InvalidProblem("measurement contains a non-finite value");
  }
  if (ms.p01.norm() <= kCoincidenceTol) throw InvalidProblem("measurement p01 is zero");
  if (ms.p12.norm() <= kCoincidenceTol) throw InvalidProblem("measurement p12 is zero");
  if (ms.p02.norm() <= kCoincidenceTol) throw InvalidProblem("measurement p02 is zero");
}

// Noise-free measurements: p_ij = R(phi_i)^T (p_j - p_i), phi_ij = phi_j - phi_i.
inline MeasurementSet measurements_from_ground_truth(const GroundTruth& gt, double sigma = 1.0) {
  validate(gt);
  MeasurementSet ms;
  ms.p01 = gt.p1;
  ms.p12 = rot2(gt.phi1).matrix().transpose() * (gt.p2 - gt.p1);
  ms.p02 = gt.p2;
  ms.phi01 = gt.phi1;
  ms.phi12 = gt.phi2 - gt.phi1;
  ms.phi02 = gt.phi2;
  ms.sigma = sigma;
  validate(ms);
  return ms;
}

// Spreads a total orientation mismatch eps over the three angle measurements as
// (+eps/3, +eps/3, -eps/3) so that phi01 + phi12 - phi02 grows by exactly eps.
inline MeasurementSet apply_orientation_mismatch(const MeasurementSet& ms, double eps,
                                                 MismatchSplit split = MismatchSplit::Thirds) {
  require_finite(eps, "epsilon");
  MeasurementSet out = ms;
  if (split == MismatchSplit::Phi12) {
    // phi01 stays consistent with the positions, so theta0 == phi01 is preserved.
    out.phi12 += eps;
    return out;
  }
  const double third = eps / 3.0;
  out.phi01 += third;
  out.phi12 += third;
  out.phi02 -= third;
  return out;
}

// wrap(phi01 + phi12 - phi02).
inline double mismatch(const MeasurementSet& ms) { return wrap(ms.phi01 + ms.phi12 - ms.phi02); }

// Unwrapped phi01 + phi12 - phi02.
inline double raw_mismatch(const MeasurementSet& ms) { return ms.phi01 + ms.phi12 - ms.phi02; }

inline BenchmarkProblem make_problem(const GroundTruth& gt, double epsilon, double sigma,
                                     std::string label = "custom",
                                     MismatchSplit split = MismatchSplit::Thirds) {
  BenchmarkProblem bp;
  bp.ground_truth = gt;
  bp.epsilon = epsilon;
  bp.split = split;
  bp.measurements =
      apply_orientation_mismatch(measurements_from_ground_truth(gt, sigma), epsilon, split);
  bp.label = std::move(label);
  return bp;
}

// The three example problems: ground-truth headings and mismatch per benchmark id,
// positions and sigma supplied by the caller.
inline BenchmarkProblem benchmark_problem(int id, const Eigen::Vector2d& p1 = {1.0, 0.0},
                                          const Eigen::Vector2d& p2 = {1.0, 1.0},
                                          double sigma = 1.0) {
  GroundTruth gt;
  gt.p1 = p1;
  gt.p2 = p2;
  double eps = 0.0;
  switch (id) {
    case 1:
      gt.phi1 = kPi / 12.0;
      gt.phi2 = kPi / 6.0;
      eps = 0.0;
      break;
    case 2:
      gt.phi1 = kPi / 2.0;
      gt.phi2 = kPi / 2.0;
      eps = 0.1;
      break;
    case 3:
      gt.phi1 = -kPi / 4.0;
      gt.phi2 = -kPi / 2.0;
      eps = kPi / 2.0;
      break;
    default:
      throw InvalidArgument("unknown benchmark id " + std::to_string(id) + " (expected 1, 2 or 3)");
  }
  return make_problem(gt, eps, sigma, "benchmark-" + std::to_string(id));
}

// Random nondegenerate ground truth: positions in [-3, 3]^2 at least 0.3 apart from each other
// and from the origin, headings uniform in [-pi, pi).
template <class Rng>
GroundTruth random_ground_truth(Rng& rng) {
  std::uniform_real_distribution<double> pos(-3.0, 3.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  GroundTruth gt;
  do {
    gt.p1 = {pos(rng), pos(rng)};
    gt.p2 = {pos(rng), pos(rng)};
  } while (gt.p1.norm() < 0.3 || gt.p2.norm() < 0.3 || (gt.p2 - gt.p1).norm() < 0.3);
  gt.phi1 = ang(rng);
  gt.phi2 = ang(rng);
  return gt;
}

}  // namespace minslam
