#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/LU>

#include "minslam/errors.hpp"

namespace minslam {

struct GlsSolution {
  Eigen::VectorXd x_star;
  double cost_star = 0.0;
  // C^-1 - C^-1 A (A^T C^-1 A)^-1 A^T C^-1; the cost at the optimum is b^T q b.
  Eigen::MatrixXd q;
};

// Projector-like matrix of the weighted least-squares problem min |Ax - b|_C^2.
inline Eigen::MatrixXd gls_projector(const Eigen::MatrixXd& a, const Eigen::MatrixXd& c) {
  if (c.rows() != c.cols() || c.rows() != a.rows()) {
    throw SingularProblem("covariance must be square and match the rows of A");
  }
  if (!c.isApprox(c.transpose(), 1e-12)) throw SingularProblem("covariance is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> c_llt(c);
  if (c_llt.info() != Eigen::Success) throw SingularProblem("covariance is not positive definite");
  const Eigen::MatrixXd c_inv = c_llt.solve(Eigen::MatrixXd::Identity(c.rows(), c.cols()));
  const Eigen::MatrixXd normal = a.transpose() * c_inv * a;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
  lu.setThreshold(1e-12);
  if (a.cols() > a.rows() || lu.rank() < a.cols()) {
    throw SingularProblem("design matrix does not have full column rank");
  }
  const Eigen::MatrixXd q = c_inv - c_inv * a * lu.solve(a.transpose() * c_inv);
  return 0.5 * (q + q.transpose());
}

// Unique minimizer of |Ax - b|_C^2 for full-column-rank A and SPD C.
inline GlsSolution gls_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                             const Eigen::MatrixXd& c) {
  if (b.size() != a.rows()) throw SingularProblem("b must have one entry per row of A");
  GlsSolution sol;
  sol.q = gls_projector(a, c);
  const Eigen::MatrixXd c_inv = c.llt().solve(Eigen::MatrixXd::Identity(c.rows(), c.cols()));
  const Eigen::MatrixXd normal = a.transpose() * c_inv * a;
  sol.x_star = normal.llt().solve(a.transpose() * c_inv * b);
  sol.cost_star = b.dot(sol.q * b);
  return sol;
}

// |r|_C^2 = r^T C^-1 r.
inline double mahalanobis_sq(const Eigen::VectorXd& r, const Eigen::MatrixXd& c) {
  return r.dot(c.llt().solve(r));
}

}  // namespace minslam
