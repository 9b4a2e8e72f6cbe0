#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "minslam/angle.hpp"
#include "minslam/angular_cost.hpp"
#include "minslam/errors.hpp"
#include "minslam/geodesic.hpp"
#include "minslam/parallel.hpp"
#include "minslam/problem.hpp"
#include "minslam/reduction.hpp"

// Critical points of the chordal cost
//
//   g(Phi) = c0 - 2 a0 cos(phi1 - theta0)
//            + (2 / sigma^2) (3 - cos(phi01 - phi1) - cos(phi02 - phi2) - cos(xi)).
//
// Closed forms exist for consistent measurements and for a mismatch of pi; any other mismatch
// is handled by Newton's method on the gradient from a grid of seeds.

namespace minslam {

enum class CriticalKind { Min, Max, Saddle, Indefinite };

inline std::string to_string(CriticalKind k) {
  switch (k) {
    case CriticalKind::Min:
      return "MIN";
    case CriticalKind::Max:
      return "MAX";
    case CriticalKind::Saddle:
      return "SADDLE";
    case CriticalKind::Indefinite:
      return "INDEFINITE";
  }
  return "?";
}

struct CriticalPoint {
  AnglePair phi;
  double cost = 0.0;
  CriticalKind kind = CriticalKind::Indefinite;
  Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
  double grad_norm = 0.0;
  bool on_boundary = false;
  // Which branch of the closed-form solution produced the point, e.g. "eta=0"; empty for
  // numerically found points.
  std::string origin;
};

inline Eigen::Vector2d jacobian_g(const ReducedModel& model, const AnglePair& phi) {
  const MeasurementSet& ms = model.measurements;
  const double w = 2.0 / (model.sigma_phi * model.sigma_phi);
  const double x = xi(ms, phi);
  return {2.0 * model.a0 * std::sin(phi.phi1 - model.theta0) +
              w * (-std::sin(ms.phi01 - phi.phi1) + std::sin(x)),
          w * (-std::sin(ms.phi02 - phi.phi2) - std::sin(x))};
}

inline Eigen::Matrix2d hessian_g(const ReducedModel& model, const AnglePair& phi) {
  const MeasurementSet& ms = model.measurements;
  const double w = 2.0 / (model.sigma_phi * model.sigma_phi);
  const double cx = std::cos(xi(ms, phi));
  Eigen::Matrix2d h;
  h(0, 0) = 2.0 * model.a0 * std::cos(phi.phi1 - model.theta0) +
            w * (std::cos(ms.phi01 - phi.phi1) + cx);
  h(0, 1) = -w * cx;
  h(1, 0) = h(0, 1);
  h(1, 1) = w * (std::cos(ms.phi02 - phi.phi2) + cx);
  return h;
}

inline constexpr double kEigenZeroTol = 1e-10;

inline CriticalKind classify(const Eigen::Matrix2d& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h, Eigen::EigenvaluesOnly);
  const Eigen::Vector2d ev = es.eigenvalues();
  if (ev.minCoeff() > kEigenZeroTol) return CriticalKind::Min;
  if (ev.maxCoeff() < -kEigenZeroTol) return CriticalKind::Max;
  if (ev.minCoeff() < -kEigenZeroTol && ev.maxCoeff() > kEigenZeroTol) {
    return CriticalKind::Saddle;
  }
  return CriticalKind::Indefinite;
}

// b0 = a0 sigma^2 + 1; reduces to a0 + 1 for unit noise.
inline double chordal_b0(const ReducedModel& model) {
  return model.a0 * model.sigma_phi * model.sigma_phi + 1.0;
}

inline constexpr double kBoundaryTol = 1e-9;

inline bool on_square_boundary(const MeasurementSet& ms, const AnglePair& phi) {
  return std::abs(std::abs(phi.phi1 - ms.phi01) - kPi) <= kBoundaryTol ||
         std::abs(std::abs(phi.phi2 - ms.phi02) - kPi) <= kBoundaryTol;
}

inline CriticalPoint make_critical_point(const ReducedModel& model, const AnglePair& phi,
                                         std::string origin = {}) {
  CriticalPoint cp;
  cp.phi = phi;
  cp.cost = reduced_chordal(model, phi);
  cp.hessian = hessian_g(model, phi);
  cp.kind = classify(cp.hessian);
  cp.grad_norm = jacobian_g(model, phi).norm();
  cp.on_boundary = on_square_boundary(model.measurements, phi);
  cp.origin = std::move(origin);
  return cp;
}

namespace detail {

// Point wrapped into S with coordinates within 1e-9 of the edge snapped exactly onto it.
inline AnglePair snap_into_square(const MeasurementSet& ms, const AnglePair& phi) {
  double u = wrap(phi.phi1 - ms.phi01);
  double v = wrap(phi.phi2 - ms.phi02);
  if (std::abs(std::abs(u) - kPi) <= kBoundaryTol) u = -kPi;
  if (std::abs(std::abs(v) - kPi) <= kBoundaryTol) v = -kPi;
  return {ms.phi01 + u, ms.phi02 + v};
}

// All copies of a wrapped point on the closed square (edge points appear twice, corners four
// times).
inline std::vector<AnglePair> closed_square_copies(const MeasurementSet& ms, const AnglePair& p) {
  std::vector<double> us{p.phi1 - ms.phi01};
  std::vector<double> vs{p.phi2 - ms.phi02};
  if (std::abs(std::abs(us[0]) - kPi) <= kBoundaryTol) us = {-kPi, kPi};
  if (std::abs(std::abs(vs[0]) - kPi) <= kBoundaryTol) vs = {-kPi, kPi};
  std::vector<AnglePair> out;
  for (double u : us) {
    for (double v : vs) out.push_back({ms.phi01 + u, ms.phi02 + v});
  }
  return out;
}

inline bool lex_less(const MeasurementSet& ms, const AnglePair& a, const AnglePair& b) {
  const double au = a.phi1 - ms.phi01, bu = b.phi1 - ms.phi01;
  if (au != bu) return au < bu;
  return (a.phi2 - ms.phi02) < (b.phi2 - ms.phi02);
}

struct Candidate {
  AnglePair phi;
  std::string origin;
};

// Deduplicate modulo 2pi, expand onto the closed square, evaluate and sort.
inline std::vector<CriticalPoint> finalize(const ReducedModel& model,
                                           std::vector<Candidate> candidates,
                                           double dedup_tol) {
  const MeasurementSet& ms = model.measurements;
  std::vector<Candidate> unique;
  for (auto& c : candidates) {
    c.phi = snap_into_square(ms, c.phi);
    const bool seen = std::any_of(unique.begin(), unique.end(), [&](const Candidate& u) {
      return wrapped_max_distance(u.phi, c.phi) < dedup_tol;
    });
    if (!seen) unique.push_back(c);
  }
  std::vector<CriticalPoint> out;
  for (const auto& c : unique) {
    for (const AnglePair& p : closed_square_copies(ms, c.phi)) {
      out.push_back(make_critical_point(model, p, c.origin));
    }
  }
  std::sort(out.begin(), out.end(), [&](const CriticalPoint& a, const CriticalPoint& b) {
    return lex_less(ms, a.phi, b.phi);
  });
  return out;
}

inline void require_theta0_aligned(const ReducedModel& model) {
  if (std::abs(wrap(model.theta0 - model.measurements.phi01)) > 1e-9) {
    throw PreconditionError(
        "closed-form critical points need theta0 == phi01 (consistent position measurements)");
  }
}

}  // namespace detail

// The eleven critical points of g on the closed square for consistent measurements: the unique
// minimum at (phi01, phi02), two maxima and eight boundary saddles.
inline std::vector<CriticalPoint> critical_points_perfect(const ReducedModel& model) {
  const MeasurementSet& ms = model.measurements;
  if (std::abs(mismatch(ms)) > 1e-9) {
    throw PreconditionError("critical_points_perfect requires zero orientation mismatch");
  }
  detail::require_theta0_aligned(model);
  const double b0 = chordal_b0(model);

  std::vector<detail::Candidate> cands;
  for (double du : {0.0, kPi}) {
    for (double dv : {0.0, kPi}) {
      cands.push_back({{ms.phi01 + du, ms.phi02 + dv},
                       du == 0.0 && dv == 0.0 ? "eta=0" : "sin(eta)=0"});
    }
  }
  // Second branch of J = 0: phi1 = 2 phi2 - phi02 - phi12 with cos(eta) = -1 / (2 b0).
  const double eta = std::acos(-1.0 / (2.0 * b0));
  for (double s : {1.0, -1.0}) {
    const double phi2 = ms.phi02 - s * eta;
    cands.push_back({{2.0 * phi2 - ms.phi02 - ms.phi12, phi2},
                     s > 0 ? "eta=+acos(-1/2b0)" : "eta=-acos(-1/2b0)"});
  }
  return detail::finalize(model, std::move(cands), 1e-6);
}

// Critical points of g on the closed square for a mismatch of pi. The two minima sit at
// eta = phi02 - phi2 = +-acos(1 / (2 b0)) and have equal cost.
inline std::vector<CriticalPoint> critical_points_eps_pi(const ReducedModel& model) {
  const MeasurementSet& ms = model.measurements;
  if (std::abs(std::abs(mismatch(ms)) - kPi) > 1e-9) {
    throw PreconditionError("critical_points_eps_pi requires an orientation mismatch of pi");
  }
  detail::require_theta0_aligned(model);
  const double b0 = chordal_b0(model);
  const double eta_min = std::acos(1.0 / (2.0 * b0));

  std::vector<detail::Candidate> cands;
  auto first_branch = [&](double eta, std::string origin) {
    const double phi2 = ms.phi02 - eta;
    cands.push_back({{2.0 * phi2 - ms.phi02 - ms.phi12, phi2}, std::move(origin)});
  };
  first_branch(eta_min, "eta=+acos(1/2b0)");
  first_branch(-eta_min, "eta=-acos(1/2b0)");
  first_branch(0.0, "eta=0");
  first_branch(kPi, "eta=pi");
  // xi = pi + eta: phi1 = pi + phi02 - phi12, any phi2 with sin(eta) = 0.
  for (double eta : {0.0, kPi}) {
    cands.push_back({{kPi + ms.phi02 - ms.phi12, ms.phi02 - eta},
                     eta == 0.0 ? "xi=pi+eta,eta=0" : "xi=pi+eta,eta=pi"});
  }
  return detail::finalize(model, std::move(cands), 1e-6);
}

struct NumericCriticalOptions {
  int seeds_per_axis = 64;
  double grad_tol = 1e-10;
  int max_iterations = 200;
  int max_halvings = 50;
  double dedup_tol = 1e-6;
  unsigned workers = 0;
};

// Newton's method on the gradient of g from a grid of seeds over S; works for any mismatch.
inline std::vector<CriticalPoint> critical_points_numeric(const ReducedModel& model,
                                                          const NumericCriticalOptions& opts = {}) {
  const MeasurementSet& ms = model.measurements;
  const int n = opts.seeds_per_axis;
  const std::size_t total = static_cast<std::size_t>(n) * n;
  std::vector<std::optional<AnglePair>> found(total);

  parallel_for(
      total,
      [&](std::size_t idx) {
        const int i = static_cast<int>(idx / n);
        const int j = static_cast<int>(idx % n);
        Eigen::Vector2d x{ms.phi01 - kPi + (i + 0.5) * kTwoPi / n,
                          ms.phi02 - kPi + (j + 0.5) * kTwoPi / n};
        Eigen::Vector2d grad = jacobian_g(model, AnglePair::from(x));
        double merit = grad.norm();
        for (int it = 0; it < opts.max_iterations && merit >= opts.grad_tol; ++it) {
          const Eigen::Matrix2d h = hessian_g(model, AnglePair::from(x));
          Eigen::FullPivLU<Eigen::Matrix2d> lu(h);
          const Eigen::Vector2d step = lu.isInvertible() ? Eigen::Vector2d(-lu.solve(grad))
                                                         : Eigen::Vector2d(-grad);
          double t = 1.0;
          bool improved = false;
          for (int half = 0; half <= opts.max_halvings; ++half, t *= 0.5) {
            const Eigen::Vector2d trial = x + t * step;
            const Eigen::Vector2d g_trial = jacobian_g(model, AnglePair::from(trial));
            if (g_trial.norm() < merit) {
              x = trial;
              grad = g_trial;
              merit = g_trial.norm();
              improved = true;
              break;
            }
          }
          if (!improved) break;
        }
        if (merit < opts.grad_tol) found[idx] = AnglePair::from(x);
      },
      opts.workers);

  std::vector<detail::Candidate> cands;
  for (const auto& f : found) {
    if (f) cands.push_back({*f, {}});
  }
  // Seed order is fixed, but sort anyway so the representative kept by deduplication does not
  // depend on it.
  for (auto& c : cands) c.phi = detail::snap_into_square(ms, c.phi);
  std::stable_sort(cands.begin(), cands.end(), [&](const auto& a, const auto& b) {
    return detail::lex_less(ms, a.phi, b.phi);
  });
  return detail::finalize(model, std::move(cands), opts.dedup_tol);
}

inline std::vector<CriticalPoint> minima_only(const std::vector<CriticalPoint>& pts) {
  std::vector<CriticalPoint> out;
  std::copy_if(pts.begin(), pts.end(), std::back_inserter(out),
               [](const CriticalPoint& p) { return p.kind == CriticalKind::Min; });
  return out;
}

}  // namespace minslam
