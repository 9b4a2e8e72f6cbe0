#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "minslam/angular_cost.hpp"
#include "minslam/chordal.hpp"
#include "minslam/errors.hpp"
#include "minslam/geodesic.hpp"
#include "minslam/gls.hpp"
#include "minslam/objectives.hpp"
#include "minslam/problem.hpp"
#include "minslam/reduction.hpp"

// Named invariant checks run against a single problem. Checks whose hypotheses the problem does
// not meet are reported as skipped.

namespace minslam {

enum class CheckStatus { Pass, Fail, Skipped };

inline std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass:
      return "pass";
    case CheckStatus::Fail:
      return "fail";
    case CheckStatus::Skipped:
      return "skipped";
  }
  return "?";
}

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Skipped;
  std::string detail;
};

struct VerifyReport {
  std::string label;
  std::vector<CheckResult> checks;

  bool ok() const {
    return std::none_of(checks.begin(), checks.end(),
                        [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
  }
  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

struct VerifyOptions {
  std::uint64_t seed = 20240917;
  int random_points = 1000;
  int position_probes = 200;
};

// Positions consistent with the measured heading of pose 1, the hypothesis of theta0 == phi01.
inline bool positions_consistent(const BenchmarkProblem& bp) {
  return std::abs(wrap(bp.measurements.phi01 - bp.ground_truth.phi1)) < 1e-12;
}

inline bool perfect_measurements(const BenchmarkProblem& bp) {
  return positions_consistent(bp) && std::abs(mismatch(bp.measurements)) < 1e-12;
}

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(3);
  ss << std::scientific << v;
  return ss.str();
}

inline CheckResult pass(std::string name, std::string detail = {}) {
  return {std::move(name), CheckStatus::Pass, std::move(detail)};
}
inline CheckResult fail(std::string name, std::string detail) {
  return {std::move(name), CheckStatus::Fail, std::move(detail)};
}
inline CheckResult skip(std::string name, std::string why) {
  return {std::move(name), CheckStatus::Skipped, std::move(why)};
}

inline AnglePair random_in_square(const MeasurementSet& ms, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-kPi, kPi);
  return {ms.phi01 + u(rng), ms.phi02 + u(rng)};
}

// Distance of Phi from every kink of f: the square's edges and |xi| = pi (mod 2 pi).
inline double kink_distance(const MeasurementSet& ms, const AnglePair& phi) {
  const double d1 = kPi - std::abs(wrap(phi.phi1 - ms.phi01));
  const double d2 = kPi - std::abs(wrap(phi.phi2 - ms.phi02));
  const double d3 = kPi - std::abs(wrap(xi(ms, phi)));
  return std::min({d1, d2, d3});
}

}  // namespace detail

// ---------------------------------------------------------------------------------------------
// Individual checks

inline CheckResult check_theta0(const ReducedModel& model, const BenchmarkProblem& bp) {
  const std::string name = "theta0_equals_phi01";
  if (!positions_consistent(bp)) return detail::skip(name, "phi01 inconsistent with positions");
  const double err = std::abs(wrap(model.theta0 - model.measurements.phi01));
  if (err < 1e-9) return detail::pass(name, "|wrap(theta0 - phi01)| = " + detail::fmt(err));
  return detail::fail(name, "|wrap(theta0 - phi01)| = " + detail::fmt(err));
}

inline CheckResult check_projector(const ReducedModel& model) {
  const std::string name = "gls_projector";
  const Matrix64d a = position_design_matrix();
  const Matrix6d c = (model.sigma_p * model.sigma_p) * Matrix6d::Identity();
  const double annihilate = (model.q6 * a).norm();
  const double symmetric = (model.q6 - model.q6.transpose()).norm();
  const double idempotent = (model.q6 * c * model.q6 - model.q6).norm();
  const double worst = std::max({annihilate, symmetric, idempotent});
  const std::string d = "|QA| = " + detail::fmt(annihilate) + ", |QCQ - Q| = " +
                        detail::fmt(idempotent);
  return worst <= 1e-10 ? detail::pass(name, d) : detail::fail(name, d);
}

inline CheckResult check_reduction(const ReducedModel& model, const VerifyOptions& opts) {
  const std::string name = "reduction_consistency";
  const MeasurementSet& ms = model.measurements;
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  double worst = 0.0;
  int beaten = 0;
  for (int i = 0; i < opts.random_points; ++i) {
    const AnglePair phi = detail::random_in_square(ms, rng);
    const Positions p_star = positions_star(model, phi.phi1);
    worst = std::max(worst, std::abs(position_cost(ms, p_star, phi.phi1) -
                                     position_cost_star(model, phi.phi1)));
    worst = std::max(worst, std::abs(reduced_geodesic(model, phi) -
                                     full_geodesic_cost(ms, p_star, phi)));
    worst = std::max(worst, std::abs(reduced_chordal(model, phi) -
                                     full_chordal_cost(ms, p_star, phi)));
    if (i < opts.position_probes) {
      const double best = position_cost(ms, p_star, phi.phi1);
      Positions probe = p_star;
      for (int k = 0; k < 4; ++k) probe(k) += noise(rng);
      if (position_cost(ms, probe, phi.phi1) < best - 1e-12) ++beaten;
    }
  }
  const std::string d = "max |reduced - full| = " + detail::fmt(worst) + ", probes beating P* = " +
                        std::to_string(beaten);
  return worst <= 1e-9 && beaten == 0 ? detail::pass(name, d) : detail::fail(name, d);
}

inline CheckResult check_nesting(const ReducedModel& model, const VerifyOptions& opts) {
  const std::string name = "nested_minimization";
  const MeasurementSet& ms = model.measurements;
  const OneDModel od = build_one_d_model(model);
  std::mt19937_64 rng(opts.seed + 1);
  std::normal_distribution<double> noise(0.0, 1.0);
  double violation = 0.0;
  for (int i = 0; i < opts.random_points; ++i) {
    const AnglePair phi = detail::random_in_square(ms, rng);
    for (RegionId k : kAllRegions) {
      violation = std::max(violation, f_1k(model, od, phi.phi1, k) - f_k(model, phi, k));
    }
    if (std::abs(wrap(xi(ms, phi))) < kPi - 1e-9) {
      const RegionId k = region_of(ms, phi);
      violation = std::max(violation, reduced_geodesic(model, phi) - f_k(model, phi, k));
    }
    Positions p = positions_star(model, phi.phi1);
    for (int c = 0; c < 4; ++c) p(c) += noise(rng);
    violation = std::max(violation, reduced_geodesic(model, phi) - full_geodesic_cost(ms, p, phi));
  }
  const std::string d = "max violation = " + detail::fmt(violation);
  return violation <= 1e-9 ? detail::pass(name, d) : detail::fail(name, d);
}

inline CheckResult check_gap(const ReducedModel& model, const BenchmarkProblem& bp) {
  const std::string name = "local_region_gap";
  if (!perfect_measurements(bp)) return detail::skip(name, "needs perfect measurements");
  const MeasurementSet& ms = model.measurements;
  const OneDModel od = build_one_d_model(model);
  const double s2 = model.sigma_phi * model.sigma_phi;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double x = ms.phi01 - kPi + kPi * i / 99.0;
    const double gap = f_1k(model, od, x, RegionId::Zero) - f_1k(model, od, x, RegionId::Plus);
    worst = std::max(worst, std::abs(gap + (kTwoPi / s2) * (kPi + x - ms.phi01)));
  }
  // No minimizer of f in R+-1: every sampled point there costs more than the global minimum.
  const double global = reduced_geodesic(model, {ms.phi01, ms.phi02});
  double min_outside = std::numeric_limits<double>::infinity();
  const int n = 200;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const AnglePair phi{ms.phi01 - kPi + kTwoPi * (c + 0.5) / n,
                          ms.phi02 - kPi + kTwoPi * (r + 0.5) / n};
      if (region_of(ms, phi) != RegionId::Zero) {
        min_outside = std::min(min_outside, reduced_geodesic(model, phi));
      }
    }
  }
  const std::string d = "max formula error = " + detail::fmt(worst) +
                        ", min f over R+-1 minus global = " + detail::fmt(min_outside - global);
  return worst <= 1e-9 && min_outside > global ? detail::pass(name, d) : detail::fail(name, d);
}

inline CheckResult check_convexity_1d(const ReducedModel& model, const BenchmarkProblem& bp) {
  const std::string name = "one_d_convexity";
  if (!positions_consistent(bp)) return detail::skip(name, "phi01 inconsistent with positions");
  const OneDModel od = build_one_d_model(model);
  const double c = model.measurements.phi01;
  double lowest = std::numeric_limits<double>::infinity();
  for (int i = 1; i < 1000; ++i) {
    const double x = c - kPi / 2.0 + kPi * i / 1000.0;
    for (RegionId k : kAllRegions) lowest = std::min(lowest, f_1k_second(model, od, x, k));
  }
  const std::string d = "min f''_{1,k} on the central half = " + detail::fmt(lowest);
  return lowest > 0.0 ? detail::pass(name, d) : detail::fail(name, d);
}

// Each catalog entry is a strict local minimum of f: stationary in 1D and no lower at
// 1e-4 neighbours.
inline CheckResult check_geodesic_catalog(const ReducedModel& model) {
  const std::string name = "geodesic_catalog_minima";
  const OneDModel od = build_one_d_model(model);
  const auto cat = geodesic_minima_catalog(model);
  if (cat.empty()) return detail::fail(name, "catalog is empty");
  double worst_grad = 0.0;
  bool probes_ok = true;
  for (const auto& m : cat) {
    worst_grad = std::max(worst_grad, std::abs(f_1k_prime(model, od, m.phi.phi1, m.region)));
    if (!(m.second_derivative_1d > 0.0)) probes_ok = false;
    for (int d = 0; d < 8; ++d) {
      const double a = kTwoPi * d / 8.0;
      const AnglePair q{m.phi.phi1 + 1e-4 * std::cos(a), m.phi.phi2 + 1e-4 * std::sin(a)};
      if (reduced_geodesic(model, q) < m.cost - 1e-12) probes_ok = false;
    }
  }
  const std::string d = std::to_string(cat.size()) + " minima, max |f'| = " +
                        detail::fmt(worst_grad);
  return worst_grad < 1e-8 && probes_ok ? detail::pass(name, d) : detail::fail(name, d);
}

inline CheckResult check_geodesic_structure(const ReducedModel& model, const BenchmarkProblem& bp) {
  const std::string name = "geodesic_two_local_minima";
  if (!perfect_measurements(bp)) return detail::skip(name, "needs perfect measurements");
  const MeasurementSet& ms = model.measurements;
  const auto cat = geodesic_minima_catalog(model);
  int globals = 0, plus = 0, minus = 0;
  bool global_ok = true;
  for (const auto& m : cat) {
    if (m.is_global) {
      ++globals;
      global_ok = global_ok && m.region == RegionId::Zero && m.cost < 1e-9 &&
                  wrapped_max_distance(m.phi, {ms.phi01, ms.phi02}) < 1e-8;
    } else if (m.region == RegionId::Plus) {
      ++plus;
    } else if (m.region == RegionId::Minus) {
      ++minus;
    }
  }
  const std::string d = "global " + std::to_string(globals) + ", local R1 " +
                        std::to_string(plus) + ", local R-1 " + std::to_string(minus) + ", case " +
                        to_string(curvature_case(model));
  return globals == 1 && global_ok && plus >= 1 && minus >= 1 ? detail::pass(name, d)
                                                              : detail::fail(name, d);
}

inline CheckResult check_chordal_perfect(const ReducedModel& model, const BenchmarkProblem& bp) {
  const std::string name = "chordal_eleven_critical_points";
  if (!perfect_measurements(bp)) return detail::skip(name, "needs perfect measurements");
  const MeasurementSet& ms = model.measurements;
  const auto pts = critical_points_perfect(model);
  const double w = 2.0 / (model.sigma_phi * model.sigma_phi);
  Eigen::Matrix2d h_expected;
  h_expected << 2.0 * model.a0 + 2.0 * w, -w, -w, 2.0 * w;
  const double eta = std::acos(-1.0 / (2.0 * chordal_b0(model)));
  int mins = 0, maxs = 0, boundary = 0;
  bool ok = pts.size() == 11;
  double worst_grad = 0.0;
  for (const auto& p : pts) {
    worst_grad = std::max(worst_grad, p.grad_norm);
    switch (p.kind) {
      case CriticalKind::Min:
        ++mins;
        ok = ok && wrapped_max_distance(p.phi, {ms.phi01, ms.phi02}) < 1e-12 &&
             (p.hessian - h_expected).cwiseAbs().maxCoeff() < 1e-8;
        break;
      case CriticalKind::Max:
        ++maxs;
        ok = ok && std::abs(std::abs(wrap(p.phi.phi2 - ms.phi02)) - eta) < 1e-8;
        break;
      default:
        if (p.on_boundary) ++boundary;
        break;
    }
  }
  ok = ok && mins == 1 && maxs == 2 && boundary == 8 && worst_grad < 1e-8;
  // Independent cross-check by Newton enumeration.
  const auto num = critical_points_numeric(model);
  bool matched = num.size() == pts.size();
  for (const auto& p : pts) {
    const bool hit = std::any_of(num.begin(), num.end(), [&](const CriticalPoint& q) {
      return wrapped_max_distance(p.phi, q.phi) < 1e-8 && p.kind == q.kind;
    });
    matched = matched && hit;
  }
  const std::string d = std::to_string(pts.size()) + " points: " + std::to_string(mins) +
                        " min, " + std::to_string(maxs) + " max, " + std::to_string(boundary) +
                        " boundary; numeric " + std::to_string(num.size()) +
                        (matched ? " (agrees)" : " (disagrees)");
  return ok && matched ? detail::pass(name, d) : detail::fail(name, d);
}

inline CheckResult check_chordal_eps_pi(const ReducedModel& model, const BenchmarkProblem& bp) {
  const std::string name = "chordal_twin_minima";
  const MeasurementSet& ms = model.measurements;
  if (std::abs(std::abs(mismatch(ms)) - kPi) > 1e-9 || !positions_consistent(bp)) {
    return detail::skip(name, "needs a mismatch of pi with phi01 consistent with positions");
  }
  const auto pts = critical_points_eps_pi(model);
  const double eta_min = std::acos(1.0 / (2.0 * chordal_b0(model)));
  std::vector<CriticalPoint> mins = minima_only(pts);
  bool ok = mins.size() == 2 && std::abs(mins[0].cost - mins[1].cost) < 1e-9;
  for (const auto& m : mins) {
    ok = ok && std::abs(std::abs(wrap(ms.phi02 - m.phi.phi2)) - eta_min) < 1e-9;
  }
  for (const auto& p : pts) {
    if (p.origin == "eta=0") ok = ok && p.hessian.determinant() < 0.0;
    if (p.origin == "eta=pi") ok = ok && p.kind != CriticalKind::Min;
  }
  const auto num_mins = minima_only(critical_points_numeric(model));
  ok = ok && num_mins.size() == 2;
  const std::string d = std::to_string(mins.size()) + " minima" +
                        (mins.size() == 2 ? ", cost gap " +
                                                detail::fmt(std::abs(mins[0].cost - mins[1].cost))
                                          : std::string()) +
                        ", numeric minima " + std::to_string(num_mins.size());
  return ok ? detail::pass(name, d) : detail::fail(name, d);
}

inline CheckResult check_derivatives(const ReducedModel& model, const VerifyOptions& opts) {
  const std::string name = "derivative_oracles";
  const MeasurementSet& ms = model.measurements;
  std::mt19937_64 rng(opts.seed + 2);
  auto g = [&](const Eigen::Vector2d& x) { return reduced_chordal(model, AnglePair::from(x)); };
  auto f = [&](const Eigen::Vector2d& x) { return reduced_geodesic(model, AnglePair::from(x)); };
  double worst_j = 0.0, worst_h = 0.0, worst_f = 0.0;
  for (int i = 0; i < opts.random_points; ++i) {
    const AnglePair phi = detail::random_in_square(ms, rng);
    const Eigen::Vector2d x = phi.vec();
    const double h = 1e-6;
    Eigen::Vector2d fd_j, fd_f;
    for (int c = 0; c < 2; ++c) {
      Eigen::Vector2d e = Eigen::Vector2d::Zero();
      e(c) = h;
      fd_j(c) = (g(x + e) - g(x - e)) / (2.0 * h);
      fd_f(c) = (f(x + e) - f(x - e)) / (2.0 * h);
    }
    const Eigen::Vector2d j = jacobian_g(model, phi);
    worst_j = std::max(worst_j, (j - fd_j).norm() / std::max(1.0, j.norm()));
    if (detail::kink_distance(ms, phi) > 1e-3) {
      const Eigen::Vector2d gf = gradient_of_f(model, phi).grad;
      worst_f = std::max(worst_f, (gf - fd_f).norm() / std::max(1.0, gf.norm()));
    }
    if (i < 20) {
      const double hh = 1e-4;
      Eigen::Matrix2d fd_h;
      for (int c = 0; c < 2; ++c) {
        Eigen::Vector2d e = Eigen::Vector2d::Zero();
        e(c) = hh;
        fd_h.col(c) = (jacobian_g(model, AnglePair::from(x + e)) -
                       jacobian_g(model, AnglePair::from(x - e))) /
                      (2.0 * hh);
      }
      const Eigen::Matrix2d hs = hessian_g(model, phi);
      worst_h = std::max(worst_h, (hs - fd_h).norm() / std::max(1.0, hs.norm()));
    }
  }
  const std::string d = "rel. err J " + detail::fmt(worst_j) + ", H " + detail::fmt(worst_h) +
                        ", grad f " + detail::fmt(worst_f);
  return worst_j < 1e-5 && worst_h < 1e-4 && worst_f < 1e-5 ? detail::pass(name, d)
                                                            : detail::fail(name, d);
}

// ---------------------------------------------------------------------------------------------

inline VerifyReport verify_problem(const BenchmarkProblem& bp, const VerifyOptions& opts = {}) {
  VerifyReport report;
  report.label = bp.label;
  ReducedModel model;
  try {
    validate(bp.ground_truth);
    validate(bp.measurements);
    model = build_reduced_model(bp.measurements);
    report.checks.push_back(detail::pass("problem_validity"));
  } catch (const Error& e) {
    report.checks.push_back(detail::fail("problem_validity", e.what()));
    return report;
  }
  const std::vector<std::function<CheckResult()>> checks{
      [&] { return check_theta0(model, bp); },
      [&] { return check_projector(model); },
      [&] { return check_reduction(model, opts); },
      [&] { return check_nesting(model, opts); },
      [&] { return check_gap(model, bp); },
      [&] { return check_convexity_1d(model, bp); },
      [&] { return check_geodesic_catalog(model); },
      [&] { return check_geodesic_structure(model, bp); },
      [&] { return check_chordal_perfect(model, bp); },
      [&] { return check_chordal_eps_pi(model, bp); },
      [&] { return check_derivatives(model, opts); },
  };
  for (const auto& run : checks) {
    try {
      report.checks.push_back(run());
    } catch (const std::exception& e) {
      report.checks.push_back({"exception", CheckStatus::Fail, e.what()});
    }
  }
  return report;
}

inline nlohmann::json to_json(const VerifyReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"status", to_string(c.status)}, {"detail", c.detail}});
  }
  return {{"label", r.label}, {"ok", r.ok()}, {"checks", checks}};
}

}  // namespace minslam
