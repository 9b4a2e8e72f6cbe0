#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "minslam/angle.hpp"
#include "minslam/errors.hpp"

namespace minslam {

struct MinimizeOptions {
  double grad_tol = 1e-6;
  double step_tol = 1e-10;
  int max_iter = 500;
  double initial_hessian_scale = 1.0;
  // Armijo constant and backtracking limits.
  double sufficient_decrease = 1e-4;
  int max_backtracks = 60;
  // Length cap on the first trial step, taken before any curvature information exists.
  double max_first_step = 0.0;
  // Rescale the initial inverse Hessian by s^T y / y^T y before the first update.
  bool scale_initial_hessian = false;
  bool record_history = false;
};

inline void validate(const MinimizeOptions& o) {
  if (!(o.grad_tol > 0.0 && o.step_tol > 0.0 && o.max_iter > 0 && o.initial_hessian_scale > 0.0)) {
    throw ConfigError("minimizer tolerances, iteration limit and Hessian scale must be positive");
  }
}

enum class Termination { GradTol, StepTol, MaxIter, LineSearchFail };

inline std::string to_string(Termination t) {
  switch (t) {
    case Termination::GradTol:
      return "GRAD_TOL";
    case Termination::StepTol:
      return "STEP_TOL";
    case Termination::MaxIter:
      return "MAX_ITER";
    case Termination::LineSearchFail:
      return "LINE_SEARCH_FAIL";
  }
  return "?";
}

// Value of an objective at a point. `on_boundary` marks points where the objective is not
// differentiable and `grad` is a one-sided gradient.
struct Evaluation {
  double cost = 0.0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  bool on_boundary = false;
};

using Objective = std::function<Evaluation(const AnglePair&)>;

struct MinimizeResult {
  AnglePair phi;
  double cost = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  Termination termination = Termination::MaxIter;
  // Condition number of the final BFGS curvature model; absent when no update was made.
  std::optional<double> hessian_condition_estimate;
  std::vector<double> cost_history;
};

namespace detail {

inline bool finite(const Evaluation& e) { return std::isfinite(e.cost) && e.grad.allFinite(); }

}  // namespace detail

// BFGS on the inverse Hessian with Armijo backtracking. Costs are monotone non-increasing and
// the returned point is the last (and best) accepted iterate.
template <class Fn>
MinimizeResult minimize(Fn&& objective, const AnglePair& phi0, const MinimizeOptions& opts = {}) {
  validate(opts);
  MinimizeResult res;
  Eigen::Vector2d x = phi0.vec();
  Evaluation cur = objective(phi0);
  res.phi = phi0;
  res.cost = cur.cost;
  res.grad_norm = cur.grad.norm();
  if (!detail::finite(cur)) {
    res.termination = Termination::LineSearchFail;
    return res;
  }
  if (opts.record_history) res.cost_history.push_back(cur.cost);

  Eigen::Matrix2d inv_h = opts.initial_hessian_scale * Eigen::Matrix2d::Identity();
  bool updated = false;
  auto finish = [&](Termination t) {
    res.phi = AnglePair::from(x);
    res.cost = cur.cost;
    res.grad_norm = cur.grad.norm();
    res.termination = t;
    if (updated) {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(inv_h, Eigen::EigenvaluesOnly);
      const Eigen::Vector2d ev = es.eigenvalues().cwiseAbs();
      if (ev.minCoeff() > 0.0) res.hessian_condition_estimate = ev.maxCoeff() / ev.minCoeff();
    }
    // A kink stalls the line search or the step; either way the run did not converge.
    if (t == Termination::StepTol && cur.on_boundary && res.grad_norm > opts.grad_tol) {
      res.termination = Termination::LineSearchFail;
    }
    return res;
  };

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if (cur.grad.norm() <= opts.grad_tol) return finish(Termination::GradTol);

    Eigen::Vector2d dir = -inv_h * cur.grad;
    double slope = cur.grad.dot(dir);
    if (!(slope < 0.0)) {
      inv_h = opts.initial_hessian_scale * Eigen::Matrix2d::Identity();
      dir = -inv_h * cur.grad;
      slope = cur.grad.dot(dir);
    }

    double t = 1.0;
    if (!updated && opts.max_first_step > 0.0 && dir.norm() > opts.max_first_step) {
      t = opts.max_first_step / dir.norm();
    }
    bool accepted = false;
    Eigen::Vector2d x_new;
    Evaluation next;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt, t *= 0.5) {
      x_new = x + t * dir;
      next = objective(AnglePair::from(x_new));
      if (detail::finite(next) && next.cost <= cur.cost + opts.sufficient_decrease * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) return finish(Termination::LineSearchFail);

    const Eigen::Vector2d s = x_new - x;
    const Eigen::Vector2d y = next.grad - cur.grad;
    x = x_new;
    cur = next;
    res.iterations = iter + 1;
    if (opts.record_history) res.cost_history.push_back(cur.cost);

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!updated && opts.scale_initial_hessian) {
        inv_h = (sy / y.squaredNorm()) * Eigen::Matrix2d::Identity();
      }
      const double rho = 1.0 / sy;
      const Eigen::Matrix2d v = Eigen::Matrix2d::Identity() - rho * s * y.transpose();
      inv_h = v * inv_h * v.transpose() + rho * s * s.transpose();
      updated = true;
    }
    if (s.norm() < opts.step_tol) {
      if (cur.grad.norm() <= opts.grad_tol) return finish(Termination::GradTol);
      return finish(Termination::StepTol);
    }
  }
  if (cur.grad.norm() <= opts.grad_tol) return finish(Termination::GradTol);
  return finish(Termination::MaxIter);
}

}  // namespace minslam
