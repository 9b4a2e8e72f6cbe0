#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "minslam/angle.hpp"
#include "minslam/chordal.hpp"
#include "minslam/errors.hpp"
#include "minslam/geodesic.hpp"
#include "minslam/objectives.hpp"
#include "minslam/optimizer.hpp"
#include "minslam/parallel.hpp"
#include "minslam/problem.hpp"
#include "minslam/reduction.hpp"

// Region-of-attraction experiment: every point of a uniform grid over S is used as an initial
// condition, and the minimizer's end point is matched to a known minimum by location.

namespace minslam {

enum class CostKind { Geodesic, Chordal };

inline std::string to_string(CostKind k) { return k == CostKind::Geodesic ? "geodesic" : "chordal"; }

inline CostKind cost_kind_from_string(const std::string& s) {
  if (s == "geodesic") return CostKind::Geodesic;
  if (s == "chordal") return CostKind::Chordal;
  throw ConfigError("unknown cost kind '" + s + "' (expected geodesic or chordal)");
}

// Placement of the grid_n points per axis over [centre - pi, centre + pi].
//   Inclusive:   uniform spacing including both edges (edges coincide under periodicity and
//                carry the nonsmooth / saddle offsets 0 and +-pi).
//   CellCentres: midpoints of grid_n equal cells; each torus point sampled once, never an edge.
enum class GridPoints { Inclusive, CellCentres };

inline std::string to_string(GridPoints g) {
  return g == GridPoints::Inclusive ? "inclusive" : "cell-centres";
}

inline GridPoints grid_points_from_string(const std::string& s) {
  if (s == "inclusive") return GridPoints::Inclusive;
  if (s == "cell-centres") return GridPoints::CellCentres;
  throw ConfigError("unknown grid points '" + s + "' (expected inclusive or cell-centres)");
}

inline double grid_coordinate(double centre, int i, int n,
                              GridPoints g = GridPoints::Inclusive) {
  if (g == GridPoints::Inclusive) {
    if (n < 2) throw ConfigError("inclusive grid needs at least 2 points per axis");
    return centre - kPi + kTwoPi * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return centre - kPi + kTwoPi * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
}

struct SweepConfig {
  int grid_n = 500;
  CostKind cost_kind = CostKind::Geodesic;
  double match_tol = 1e-3;
  GridPoints grid_points = GridPoints::Inclusive;
  MinimizeOptions minimize_options;
  unsigned workers = 0;
};

// Integer code: 0 = GLOBAL, i >= 1 = LOCAL(i) (catalog index), -1 = FAILED.
struct BasinLabel {
  enum class Tag : std::int8_t { Global, Local, Failed };
  Tag tag = Tag::Failed;
  int index = -1;

  static BasinLabel global() { return {Tag::Global, 0}; }
  static BasinLabel local(int i) { return {Tag::Local, i}; }
  static BasinLabel failed() { return {Tag::Failed, -1}; }

  int code() const {
    switch (tag) {
      case Tag::Global:
        return 0;
      case Tag::Local:
        return index;
      case Tag::Failed:
        return -1;
    }
    return -1;
  }
  static BasinLabel from_code(int c) {
    if (c == 0) return global();
    if (c > 0) return local(c);
    return failed();
  }
  friend bool operator==(const BasinLabel&, const BasinLabel&) = default;
};

// A minimum used for basin matching, from either cost's catalog.
struct CatalogEntry {
  AnglePair phi;
  double cost = 0.0;
  bool is_global = false;
  std::string description;
};

// Diagnostics of a grid point whose end point matched no catalog minimum.
struct FailureRecord {
  int row = 0;
  int col = 0;
  AnglePair start;
  AnglePair end;
  double cost = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  Termination termination = Termination::MaxIter;
  std::optional<double> hessian_condition;
};

struct SweepResult {
  int grid_n = 0;
  // Row-major, rows index phi2 and columns index phi1.
  std::vector<BasinLabel> labels;
  std::vector<CatalogEntry> catalog;
  std::vector<FailureRecord> failures;
  double pct_global = 0.0;
  double pct_local = 0.0;
  double pct_failed = 0.0;
  SweepConfig config;
  BenchmarkProblem problem;

  const BasinLabel& at(int row, int col) const { return labels[row * grid_n + col]; }
};

inline std::vector<CatalogEntry> geodesic_catalog_entries(const ReducedModel& model) {
  std::vector<CatalogEntry> out;
  for (const auto& m : geodesic_minima_catalog(model)) {
    out.push_back({m.phi, m.cost, m.is_global, "R" + std::to_string(index(m.region))});
  }
  return out;
}

inline std::vector<CatalogEntry> chordal_catalog_entries(const ReducedModel& model) {
  std::vector<CriticalPoint> mins = minima_only(critical_points_numeric(model));
  // Interior minima never sit on the boundary, so no closed-square duplicates occur here.
  std::sort(mins.begin(), mins.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) { return a.cost < b.cost; });
  std::vector<CatalogEntry> out;
  const double best = mins.empty() ? 0.0 : mins.front().cost;
  for (const auto& m : mins) out.push_back({m.phi, m.cost, m.cost <= best + 1e-9, "MIN"});
  return out;
}

inline void recompute_percentages(SweepResult& r) {
  std::size_t g = 0, l = 0, f = 0;
  for (const auto& lab : r.labels) {
    switch (lab.tag) {
      case BasinLabel::Tag::Global:
        ++g;
        break;
      case BasinLabel::Tag::Local:
        ++l;
        break;
      case BasinLabel::Tag::Failed:
        ++f;
        break;
    }
  }
  const double total = static_cast<double>(r.labels.size());
  r.pct_global = 100.0 * static_cast<double>(g) / total;
  r.pct_local = 100.0 * static_cast<double>(l) / total;
  r.pct_failed = 100.0 * static_cast<double>(f) / total;
}

inline SweepResult run_sweep(const BenchmarkProblem& problem, const SweepConfig& cfg) {
  if (cfg.grid_n < 2) throw ConfigError("grid_n must be at least 2");
  if (!(cfg.match_tol > 0.0)) throw ConfigError("match_tol must be positive");
  validate(cfg.minimize_options);

  const ReducedModel model = build_reduced_model(problem.measurements);
  const MeasurementSet& ms = model.measurements;

  SweepResult res;
  res.grid_n = cfg.grid_n;
  res.config = cfg;
  res.problem = problem;
  res.catalog = cfg.cost_kind == CostKind::Geodesic ? geodesic_catalog_entries(model)
                                                    : chordal_catalog_entries(model);
  if (res.catalog.empty()) throw ConfigError("no minima catalog available for this problem");
  for (std::size_t a = 0; a < res.catalog.size(); ++a) {
    for (std::size_t b = a + 1; b < res.catalog.size(); ++b) {
      if (cfg.match_tol >= 0.5 * wrapped_max_distance(res.catalog[a].phi, res.catalog[b].phi)) {
        throw ConfigError("match_tol must be below half the separation of catalog minima");
      }
    }
  }

  const int n = cfg.grid_n;
  res.labels.assign(static_cast<std::size_t>(n) * n, BasinLabel::failed());
  std::vector<std::vector<FailureRecord>> row_failures(n);

  auto run_row = [&](std::size_t row_idx) {
    const int row = static_cast<int>(row_idx);
    const GeodesicObjective geo{&model};
    const ChordalObjective cho{&model};
    for (int col = 0; col < n; ++col) {
      const AnglePair start{grid_coordinate(ms.phi01, col, n, cfg.grid_points),
                            grid_coordinate(ms.phi02, row, n, cfg.grid_points)};
      const MinimizeResult mr = cfg.cost_kind == CostKind::Geodesic
                                    ? minimize(geo, start, cfg.minimize_options)
                                    : minimize(cho, start, cfg.minimize_options);
      const AnglePair end = wrap_into_square(ms, mr.phi);
      int best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < res.catalog.size(); ++c) {
        const double d = wrapped_max_distance(end, res.catalog[c].phi);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      BasinLabel label = BasinLabel::failed();
      if (best >= 0 && best_d <= cfg.match_tol) {
        label = res.catalog[best].is_global ? BasinLabel::global() : BasinLabel::local(best);
      } else {
        row_failures[row].push_back({row, col, start, end, mr.cost, mr.grad_norm, mr.iterations,
                                     mr.termination, mr.hessian_condition_estimate});
      }
      res.labels[static_cast<std::size_t>(row) * n + col] = label;
    }
  };
  parallel_for(static_cast<std::size_t>(n), run_row, cfg.workers);

  for (auto& rf : row_failures) res.failures.insert(res.failures.end(), rf.begin(), rf.end());
  recompute_percentages(res);
  return res;
}

struct SweepSummary {
  std::string label;
  std::string cost_kind;
  double epsilon = 0.0;
  double pct_global = 0.0;
  double pct_local = 0.0;
  double pct_failed = 0.0;
  std::size_t catalog_size = 0;
  int grid_n = 0;
};

inline SweepSummary summarize(const SweepResult& r) {
  return {r.problem.label, to_string(r.config.cost_kind), r.problem.epsilon, r.pct_global,
          r.pct_local,     r.pct_failed,                  r.catalog.size(),  r.grid_n};
}

}  // namespace minslam
