#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "test_util.hpp"

using namespace minslam;

namespace {

BenchmarkProblem eps_pi_problem(const GroundTruth& gt, double sigma = 1.0) {
  return make_problem(gt, kPi, sigma, "eps-pi", MismatchSplit::Phi12);
}

int count_kind(const std::vector<CriticalPoint>& pts, CriticalKind k) {
  return static_cast<int>(
      std::count_if(pts.begin(), pts.end(), [&](const CriticalPoint& p) { return p.kind == k; }));
}

}  // namespace

TEST(ChordalCost, MatchesFrobeniusDefinition) {
  std::mt19937_64 rng(fixture::kSeed);
  const MeasurementSet ms = benchmark_problem(2).measurements;
  for (int i = 0; i < 100; ++i) {
    const AnglePair phi = fixture::random_point(ms, rng);
    const double frob = 0.5 * (chordal_err_sq(ms.phi01, phi.phi1) +
                               chordal_err_sq(phi.phi1 + ms.phi12, phi.phi2) +
                               chordal_err_sq(ms.phi02, phi.phi2));
    EXPECT_NEAR(g_phi(ms, phi), frob, 1e-12);
    EXPECT_LE(g_phi(ms, phi), 12.0 + 1e-12);
  }
  const MeasurementSet perfect = benchmark_problem(1).measurements;
  EXPECT_NEAR(g_phi(perfect, {perfect.phi01, perfect.phi02}), 0.0, 1e-15);
  // All three cosines at -1: phi1 and phi2 opposite their measurements, xi = pi.
  MeasurementSet odd = perfect;
  odd.phi12 += kPi;
  EXPECT_NEAR(g_phi(odd, {odd.phi01 + kPi, odd.phi02 + kPi}), 12.0, 1e-12);
}

TEST(ChordalDerivatives, MatchFiniteDifferences) {
  std::mt19937_64 rng(fixture::kSeed);
  for (int t = 0; t < 10; ++t) {
    const auto bp = make_problem(random_ground_truth(rng), 0.5 * t, 0.6 + 0.1 * t);
    const ReducedModel m = build_reduced_model(bp.measurements);
    auto g = [&](double a, double b) { return reduced_chordal(m, {a, b}); };
    for (int i = 0; i < 100; ++i) {
      const AnglePair p = fixture::random_point(bp.measurements, rng);
      const double h = 1e-6;
      const Eigen::Vector2d fd{(g(p.phi1 + h, p.phi2) - g(p.phi1 - h, p.phi2)) / (2 * h),
                               (g(p.phi1, p.phi2 + h) - g(p.phi1, p.phi2 - h)) / (2 * h)};
      const Eigen::Vector2d j = jacobian_g(m, p);
      EXPECT_LT((j - fd).norm() / std::max(1.0, j.norm()), 1e-5);
      if (i < 20) {
        const double hh = 1e-4;
        Eigen::Matrix2d fdh;
        fdh.col(0) = (jacobian_g(m, {p.phi1 + hh, p.phi2}) - jacobian_g(m, {p.phi1 - hh, p.phi2})) / (2 * hh);
        fdh.col(1) = (jacobian_g(m, {p.phi1, p.phi2 + hh}) - jacobian_g(m, {p.phi1, p.phi2 - hh})) / (2 * hh);
        const Eigen::Matrix2d hs = hessian_g(m, p);
        EXPECT_LT((hs - fdh).norm() / std::max(1.0, hs.norm()), 1e-4);
        EXPECT_EQ(hs(0, 1), hs(1, 0));
      }
    }
  }
}

TEST(ChordalDerivatives, SecondComponentVanishesOnBranch) {
  std::mt19937_64 rng(fixture::kSeed);
  for (double eps : {0.0, 0.4, kPi}) {
    const auto bp = make_problem(random_ground_truth(rng), eps, 1.0);
    const MeasurementSet& ms = bp.measurements;
    const ReducedModel m = build_reduced_model(ms);
    for (int i = 0; i < 100; ++i) {
      const double phi2 = fixture::random_point(ms, rng).phi2;
      EXPECT_NEAR(jacobian_g(m, {2.0 * phi2 - ms.phi02 - ms.phi12, phi2})(1), 0.0, 1e-12);
    }
  }
}

TEST(ChordalDerivatives, HessianAtPerfectMinimum) {
  const auto bp = benchmark_problem(1);
  const ReducedModel m = build_reduced_model(bp.measurements);
  const AnglePair gt{bp.measurements.phi01, bp.measurements.phi02};
  EXPECT_LT(jacobian_g(m, gt).norm(), 1e-15);
  Eigen::Matrix2d expected;
  expected << m.a0 + 2.0, -1.0, -1.0, 2.0;
  EXPECT_LE((hessian_g(m, gt) - 2.0 * expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Classify, SignPatterns) {
  EXPECT_EQ(classify(Eigen::Matrix2d::Identity()), CriticalKind::Min);
  EXPECT_EQ(classify(-Eigen::Matrix2d::Identity()), CriticalKind::Max);
  EXPECT_EQ(classify(Eigen::Vector2d(1.0, -1.0).asDiagonal()), CriticalKind::Saddle);
  EXPECT_EQ(classify(Eigen::Vector2d(1.0, 0.0).asDiagonal()), CriticalKind::Indefinite);
}

TEST(PerfectCriticalPoints, ElevenOnClosedSquare) {
  const auto bp = benchmark_problem(1);
  const MeasurementSet& ms = bp.measurements;
  const ReducedModel m = build_reduced_model(ms);
  const auto pts = critical_points_perfect(m);
  ASSERT_EQ(pts.size(), 11u);
  EXPECT_EQ(count_kind(pts, CriticalKind::Min), 1);
  EXPECT_EQ(count_kind(pts, CriticalKind::Max), 2);
  const double eta = std::acos(-1.0 / (2.0 * chordal_b0(m)));
  std::vector<double> max_costs;
  int boundary = 0;
  for (const auto& p : pts) {
    EXPECT_LT(p.grad_norm, 1e-10);
    EXPECT_TRUE(in_square(ms, p.phi, 1e-12));
    if (p.kind == CriticalKind::Min) {
      EXPECT_NEAR(p.cost, 0.0, 1e-9);
      EXPECT_LT(wrapped_max_distance(p.phi, {ms.phi01, ms.phi02}), 1e-12);
    } else if (p.kind == CriticalKind::Max) {
      EXPECT_NEAR(std::abs(wrap(p.phi.phi2 - ms.phi02)), eta, 1e-9);
      EXPECT_FALSE(p.on_boundary);
      max_costs.push_back(p.cost);
    } else {
      EXPECT_TRUE(p.on_boundary);
      ++boundary;
    }
  }
  EXPECT_EQ(boundary, 8);
  ASSERT_EQ(max_costs.size(), 2u);
  EXPECT_NEAR(max_costs[0], max_costs[1], 1e-9);
}

TEST(PerfectCriticalPoints, RequiresZeroMismatch) {
  EXPECT_THROW(critical_points_perfect(build_reduced_model(benchmark_problem(2).measurements)),
               PreconditionError);
}

TEST(NumericCriticalPoints, ReproducePerfectSetOnRandomProblems) {
  std::mt19937_64 rng(fixture::kSeed);
  for (int t = 0; t < 10; ++t) {
    const auto bp = fixture::random_perfect_problem(rng, t % 2 ? 1.0 : 0.8);
    const ReducedModel m = build_reduced_model(bp.measurements);
    const auto analytic = critical_points_perfect(m);
    const auto numeric = critical_points_numeric(m);
    ASSERT_EQ(numeric.size(), analytic.size());
    for (const auto& a : analytic) {
      const auto near = std::min_element(numeric.begin(), numeric.end(), [&](auto& x, auto& y) {
        return wrapped_max_distance(a.phi, x.phi) < wrapped_max_distance(a.phi, y.phi);
      });
      EXPECT_LT(wrapped_max_distance(a.phi, near->phi), 1e-8);
      EXPECT_EQ(a.kind, near->kind);
    }
    const auto mins = minima_only(numeric);
    ASSERT_EQ(mins.size(), 1u);
    EXPECT_LT(wrapped_max_distance(mins[0].phi, {bp.measurements.phi01, bp.measurements.phi02}),
              1e-8);
  }
}

TEST(NumericCriticalPoints, SmallMismatchKeepsOneMinimum) {
  const auto mins =
      minima_only(critical_points_numeric(build_reduced_model(benchmark_problem(2).measurements)));
  EXPECT_EQ(mins.size(), 1u);
}

TEST(NumericCriticalPoints, DeterministicAcrossWorkerCounts) {
  const ReducedModel m = build_reduced_model(benchmark_problem(3).measurements);
  NumericCriticalOptions one, four;
  one.workers = 1;
  four.workers = 4;
  const auto a = critical_points_numeric(m, one);
  const auto b = critical_points_numeric(m, four);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].phi, b[i].phi);
}

TEST(EpsPiCriticalPoints, TwinMinima) {
  std::mt19937_64 rng(fixture::kSeed);
  for (int t = 0; t < 5; ++t) {
    const auto bp = eps_pi_problem(random_ground_truth(rng));
    const MeasurementSet& ms = bp.measurements;
    const ReducedModel m = build_reduced_model(ms);
    const double b0 = chordal_b0(m);
    const auto pts = critical_points_eps_pi(m);
    const auto mins = minima_only(pts);
    ASSERT_EQ(mins.size(), 2u);
    EXPECT_NEAR(mins[0].cost, mins[1].cost, 1e-9);
    EXPECT_GT(wrapped_max_distance(mins[0].phi, mins[1].phi), 1e-3);
    Eigen::Matrix2d half_h;
    half_h << b0, -1.0 / (2.0 * b0), -1.0 / (2.0 * b0), 1.0 / b0;
    for (const auto& mn : mins) {
      EXPECT_NEAR(std::abs(wrap(ms.phi02 - mn.phi.phi2)), std::acos(1.0 / (2.0 * b0)), 1e-12);
      EXPECT_LE((mn.hessian - 2.0 * half_h).cwiseAbs().maxCoeff(), 1e-9);
      EXPECT_LT(mn.grad_norm, 1e-10);
    }
    for (const auto& p : pts) {
      EXPECT_LT(p.grad_norm, 1e-10);
      if (p.origin == "eta=0") EXPECT_LT(p.hessian.determinant(), 0.0);
      if (p.origin == "eta=pi") EXPECT_LT(p.hessian.trace(), 0.0);
    }
    const auto num_mins = minima_only(critical_points_numeric(m));
    ASSERT_EQ(num_mins.size(), 2u);
    for (const auto& nm : num_mins) {
      EXPECT_TRUE(std::any_of(mins.begin(), mins.end(), [&](const CriticalPoint& a) {
        return wrapped_max_distance(a.phi, nm.phi) < 1e-8;
      }));
    }
    // Audit grid: no sampled point undercuts the claimed global minima.
    double grid_min = std::numeric_limits<double>::infinity();
    for (int r = 0; r < 200; ++r) {
      for (int c = 0; c < 200; ++c) {
        grid_min = std::min(grid_min, reduced_chordal(m, {ms.phi01 - kPi + kTwoPi * c / 199.0,
                                                          ms.phi02 - kPi + kTwoPi * r / 199.0}));
      }
    }
    EXPECT_GE(grid_min - mins[0].cost, -1e-9);
  }
}

TEST(EpsPiCriticalPoints, RequiresMismatchOfPi) {
  EXPECT_THROW(critical_points_eps_pi(build_reduced_model(benchmark_problem(1).measurements)),
               PreconditionError);
  GroundTruth gt;
  // The thirds split moves phi01 away from theta0.
  EXPECT_THROW(critical_points_eps_pi(build_reduced_model(make_problem(gt, kPi, 1.0).measurements)),
               PreconditionError);
}
