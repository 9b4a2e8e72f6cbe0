#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "minslam/angle.hpp"
#include "minslam/angular_cost.hpp"
#include "minslam/errors.hpp"
#include "minslam/problem.hpp"
#include "minslam/reduction.hpp"

// Minima of the geodesic cost f(Phi).
//
// On the fundamental square S = [phi01 - pi, phi01 + pi] x [phi02 - pi, phi02 + pi] the
// wrapped heading residual splits S into three regions R_k, k in {-1, 0, 1}, on each of which
// wrap(xi) = xi + 2 k pi and f coincides with a smooth surrogate f_k. Every f_k is quadratic
// in phi2, so eliminating phi2 leaves three one-dimensional functions f_{1,k}(phi1); scanning
// their derivatives enumerates every minimum of f on S.

namespace minslam {

enum class RegionId : int { Minus = -1, Zero = 0, Plus = 1 };

inline int index(RegionId r) { return static_cast<int>(r); }

inline RegionId region_from_index(int k) {
  if (k < -1 || k > 1) throw InvalidArgument("region index must be -1, 0 or 1");
  return static_cast<RegionId>(k);
}

inline constexpr RegionId kAllRegions[] = {RegionId::Minus, RegionId::Zero, RegionId::Plus};

inline constexpr double kSquareTol = 1e-12;

inline bool in_square(const MeasurementSet& ms, const AnglePair& phi, double tol = kSquareTol) {
  return std::abs(phi.phi1 - ms.phi01) <= kPi + tol && std::abs(phi.phi2 - ms.phi02) <= kPi + tol;
}

// Representative of phi inside S (coordinates wrapped relative to the square's centre).
inline AnglePair wrap_into_square(const MeasurementSet& ms, const AnglePair& phi) {
  return {ms.phi01 + wrap(phi.phi1 - ms.phi01), ms.phi02 + wrap(phi.phi2 - ms.phi02)};
}

// Region of S containing phi. Points with xi = -pi belong to R_1 and xi = +pi to R_-1,
// which keeps R_0 open.
inline RegionId region_of(const MeasurementSet& ms, const AnglePair& phi) {
  if (!in_square(ms, phi)) {
    throw OutOfDomain("point lies outside the fundamental square; wrap it first");
  }
  const double x = xi(ms, phi);
  int k = 0;
  if (x <= -kPi) {
    k = 1;
  } else if (x >= kPi) {
    k = -1;
  }
  const double shifted = x + 2.0 * k * kPi;
  if (shifted < -kPi - 1e-9 || shifted > kPi + 1e-9) {
    throw OutOfDomain("orientation mismatch too large for the three-region split");
  }
  return static_cast<RegionId>(k);
}

// Smooth surrogate of f_phi valid on R_k (defined everywhere).
inline double f_phi_k(const MeasurementSet& ms, const AnglePair& phi, RegionId k,
                      double sigma_phi) {
  const double r01 = ms.phi01 - phi.phi1;
  const double r12 = xi(ms, phi) + 2.0 * index(k) * kPi;
  const double r02 = ms.phi02 - phi.phi2;
  return (r01 * r01 + r12 * r12 + r02 * r02) / (sigma_phi * sigma_phi);
}

inline double f_phi_k(const MeasurementSet& ms, const AnglePair& phi, RegionId k) {
  return f_phi_k(ms, phi, k, ms.sigma);
}

// Two-dimensional surrogate f_k = F_p* + F_{phi,k}.
inline double f_k(const ReducedModel& model, const AnglePair& phi, RegionId k) {
  return position_cost_star(model, phi.phi1) +
         f_phi_k(model.measurements, phi, k, model.sigma_phi);
}

// Heading-only least-squares data of the surrogate: F_{phi,k} = |A2 phi2 + Z_k + A1 phi1|^2
// under covariance sigma^2 I.
struct OneDModel {
  Eigen::Vector3d a1{-1.0, 1.0, 0.0};
  Eigen::Vector3d a2{0.0, -1.0, -1.0};
  Eigen::Vector3d z0{0.0, 0.0, 0.0};
  Eigen::Matrix3d q2 = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d c_phi = Eigen::Matrix3d::Identity();

  Eigen::Vector3d zk(RegionId k) const {
    Eigen::Vector3d z = z0;
    z(1) += 2.0 * index(k) * kPi;
    return z;
  }
};

inline OneDModel build_one_d_model(const ReducedModel& model) {
  OneDModel od;
  const MeasurementSet& ms = model.measurements;
  od.z0 = {ms.phi01, ms.phi12, ms.phi02};
  od.c_phi = (model.sigma_phi * model.sigma_phi) * Eigen::Matrix3d::Identity();
  od.q2 = gls_projector(od.a2, od.c_phi);
  return od;
}

// argmin over phi2 of F_{phi,k}(phi1, .).
inline double phi2_star_k(const ReducedModel& model, double phi1, RegionId k) {
  const MeasurementSet& ms = model.measurements;
  return 0.5 * (phi1 + 2.0 * index(k) * kPi + ms.phi12 + ms.phi02);
}

inline double f_1k(const ReducedModel& model, const OneDModel& od, double phi1, RegionId k) {
  const Eigen::Vector3d r = od.zk(k) + od.a1 * phi1;
  return position_cost_star(model, phi1) + r.dot(od.q2 * r);
}

inline double f_1k_prime(const ReducedModel& model, const OneDModel& od, double phi1,
                         RegionId k) {
  const Eigen::Vector3d r = od.zk(k) + od.a1 * phi1;
  return 2.0 * model.a0 * std::sin(phi1 - model.theta0) + 2.0 * r.dot(od.q2 * od.a1);
}

inline double f_1k_second(const ReducedModel& model, const OneDModel& od, double phi1,
                          RegionId /*k*/) {
  return 2.0 * model.a0 * std::cos(phi1 - model.theta0) + 2.0 * od.a1.dot(od.q2 * od.a1);
}

inline double f_1k(const ReducedModel& model, double phi1, RegionId k) {
  return f_1k(model, build_one_d_model(model), phi1, k);
}
inline double f_1k_prime(const ReducedModel& model, double phi1, RegionId k) {
  return f_1k_prime(model, build_one_d_model(model), phi1, k);
}
inline double f_1k_second(const ReducedModel& model, double phi1, RegionId k) {
  return f_1k_second(model, build_one_d_model(model), phi1, k);
}

enum class CurvatureCase { A, B };

inline std::string to_string(CurvatureCase c) { return c == CurvatureCase::A ? "a" : "b"; }

// "a" when 3 / (2 a0 sigma^2) >= 1 (f''_{1,k} > 0 everywhere), "b" otherwise.
inline CurvatureCase curvature_case(const ReducedModel& model) {
  const double ratio = 3.0 / (2.0 * model.a0 * model.sigma_phi * model.sigma_phi);
  return ratio >= 1.0 ? CurvatureCase::A : CurvatureCase::B;
}

struct GeodesicMinimum {
  AnglePair phi;
  double cost = 0.0;
  RegionId region = RegionId::Zero;
  bool is_global = false;
  double second_derivative_1d = 0.0;
  bool on_boundary = false;
};

struct RootScanOptions {
  int grid_points = 2000;
  double bisection_tol = 1e-12;
  // Lifted points closer than this to a region boundary are flagged as boundary minima.
  double region_margin = 1e-9;
};

namespace detail {

template <class Fn>
double bisect(Fn&& fn, double lo, double hi, double tol) {
  double flo = fn(lo);
  for (int i = 0; i < 200 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = fn(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Minima of f_{1,k} on [phi01 - pi, phi01 + pi] lifted to Phi and kept when they lie in R_k.
inline std::vector<GeodesicMinimum> enumerate_1d_minima(const ReducedModel& model, RegionId k,
                                                        const RootScanOptions& opts = {}) {
  const MeasurementSet& ms = model.measurements;
  const OneDModel od = build_one_d_model(model);
  auto fp = [&](double x) { return f_1k_prime(model, od, x, k); };

  const double lo = ms.phi01 - kPi;
  const double hi = ms.phi01 + kPi;
  const int n = std::max(opts.grid_points, 2);
  std::vector<double> roots;
  double x_prev = lo;
  double d_prev = fp(lo);
  for (int i = 1; i < n; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1);
    const double d = fp(x);
    // A minimum is where f' crosses from negative to non-negative.
    if (d_prev < 0.0 && d >= 0.0) {
      roots.push_back(d == 0.0 ? x : detail::bisect(fp, x_prev, x, opts.bisection_tol));
    }
    x_prev = x;
    d_prev = d;
  }

  std::vector<GeodesicMinimum> out;
  for (double r : roots) {
    GeodesicMinimum m;
    m.phi = {r, phi2_star_k(model, r, k)};
    m.region = k;
    m.second_derivative_1d = f_1k_second(model, od, r, k);
    if (!(m.second_derivative_1d > 0.0)) continue;
    if (!in_square(ms, m.phi)) continue;
    const double x = xi(ms, m.phi);
    bool inside = false;
    switch (k) {
      case RegionId::Plus:
        inside = x < -kPi - opts.region_margin;
        m.on_boundary = std::abs(x + kPi) <= opts.region_margin;
        break;
      case RegionId::Minus:
        inside = x > kPi + opts.region_margin;
        m.on_boundary = std::abs(x - kPi) <= opts.region_margin;
        break;
      case RegionId::Zero:
        inside = std::abs(x) < kPi - opts.region_margin;
        m.on_boundary = std::abs(std::abs(x) - kPi) <= opts.region_margin;
        break;
    }
    if (!inside && !m.on_boundary) continue;
    m.cost = reduced_geodesic(model, m.phi);
    // On a region boundary f follows the neighbouring surrogate on one side, so the 1D
    // minimum is only kept if f itself does not decrease nearby.
    if (m.on_boundary) {
      bool local_min = true;
      for (int d = 0; d < 16 && local_min; ++d) {
        const double a = kTwoPi * d / 16.0;
        const AnglePair q{m.phi.phi1 + 1e-6 * std::cos(a), m.phi.phi2 + 1e-6 * std::sin(a)};
        local_min = reduced_geodesic(model, q) >= m.cost - 1e-13;
      }
      if (!local_min) continue;
    }
    out.push_back(m);
  }
  std::sort(out.begin(), out.end(),
            [](const GeodesicMinimum& a, const GeodesicMinimum& b) { return a.cost < b.cost; });
  return out;
}

// All minima of f on S, sorted by cost; the cheapest (and any tied within 1e-9) marked global.
inline std::vector<GeodesicMinimum> geodesic_minima_catalog(const ReducedModel& model,
                                                            const RootScanOptions& opts = {}) {
  std::vector<GeodesicMinimum> all;
  for (RegionId k : kAllRegions) {
    auto part = enumerate_1d_minima(model, k, opts);
    all.insert(all.end(), part.begin(), part.end());
  }
  std::sort(all.begin(), all.end(),
            [](const GeodesicMinimum& a, const GeodesicMinimum& b) { return a.cost < b.cost; });
  if (!all.empty()) {
    const double best = all.front().cost;
    for (auto& m : all) m.is_global = m.cost <= best + 1e-9;
  }
  return all;
}

}  // namespace minslam
