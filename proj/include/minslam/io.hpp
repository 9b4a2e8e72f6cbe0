#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "minslam/chordal.hpp"
#include "minslam/errors.hpp"
#include "minslam/geodesic.hpp"
#include "minslam/problem.hpp"
#include "minslam/reduction.hpp"
#include "minslam/sweep.hpp"
#include "minslam/version.hpp"

// File formats: problem definitions (JSON), label grids and surfaces (CSV with '#' metadata
// lines), sweep summaries and critical-point reports (JSON).

namespace minslam {

using json = nlohmann::json;

class IoError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------------------------
// Problem definition

inline json problem_to_json(const BenchmarkProblem& bp) {
  const GroundTruth& gt = bp.ground_truth;
  return json{{"ground_truth",
               {{"p1", {gt.p1.x(), gt.p1.y()}},
                {"p2", {gt.p2.x(), gt.p2.y()}},
                {"phi1", gt.phi1},
                {"phi2", gt.phi2}}},
              {"epsilon", bp.epsilon},
              {"sigma", bp.measurements.sigma},
              {"mismatch_split", to_string(bp.split)}};
}

namespace detail {

inline std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size() && i < offset; ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

inline Eigen::Vector2d read_vec2(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 2) {
    throw InvalidProblem(std::string("'") + key + "' must be a two-element array");
  }
  return {v.at(0).get<double>(), v.at(1).get<double>()};
}

}  // namespace detail

inline BenchmarkProblem problem_from_json(const json& j, std::string label = "file") {
  try {
    const json& g = j.at("ground_truth");
    GroundTruth gt;
    gt.p1 = detail::read_vec2(g, "p1");
    gt.p2 = detail::read_vec2(g, "p2");
    gt.phi1 = g.at("phi1").get<double>();
    gt.phi2 = g.at("phi2").get<double>();
    const double eps = j.at("epsilon").get<double>();
    const double sigma = j.value("sigma", 1.0);
    const MismatchSplit split =
        mismatch_split_from_string(j.value("mismatch_split", std::string("thirds")));
    return make_problem(gt, eps, sigma, std::move(label), split);
  } catch (const json::exception& e) {
    throw InvalidProblem(std::string("malformed problem definition: ") + e.what());
  }
}

// Parses a problem file; syntax errors report the line number.
inline BenchmarkProblem problem_from_string(const std::string& text, std::string label = "file") {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidProblem("problem JSON parse error at line " +
                         std::to_string(detail::line_of_offset(text, e.byte)) + ": " + e.what());
  }
  return problem_from_json(j, std::move(label));
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline BenchmarkProblem read_problem_file(const std::filesystem::path& path) {
  return problem_from_string(read_text_file(path), path.stem().string());
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

inline void write_problem_file(const std::filesystem::path& path, const BenchmarkProblem& bp) {
  write_text_file(path, problem_to_json(bp).dump(2) + "\n");
}

// ---------------------------------------------------------------------------------------------
// Provenance

// FNV-1a over the canonical JSON of the problem definition.
inline std::string problem_hash(const BenchmarkProblem& bp) {
  const std::string canon = problem_to_json(bp).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

inline std::string provenance_line(const BenchmarkProblem& bp, const std::string& config) {
  return "# minslam " + std::string(kVersion) + " problem=" + problem_hash(bp) + " label=" +
         bp.label + " config=" + config;
}

inline json provenance_json(const BenchmarkProblem& bp, const json& config) {
  return {{"tool", "minslam"},
          {"version", kVersion},
          {"problem_hash", problem_hash(bp)},
          {"config", config}};
}

inline std::string format_double(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

// ---------------------------------------------------------------------------------------------
// Sweep grids and summaries

inline json sweep_config_json(const SweepConfig& cfg) {
  const MinimizeOptions& o = cfg.minimize_options;
  return {{"grid_n", cfg.grid_n},
          {"cost_kind", to_string(cfg.cost_kind)},
          {"match_tol", cfg.match_tol},
          {"grid_points", to_string(cfg.grid_points)},
          {"minimizer",
           {{"method", "bfgs-armijo"},
            {"grad_tol", o.grad_tol},
            {"step_tol", o.step_tol},
            {"max_iter", o.max_iter},
            {"initial_hessian_scale", o.initial_hessian_scale},
            {"max_first_step", o.max_first_step},
            {"scale_initial_hessian", o.scale_initial_hessian}}}};
}

// Label grid as CSV: a provenance line, an axis line, then grid_n rows (phi2 ascending) of
// grid_n integer codes (phi1 ascending).
inline std::string grid_to_csv(const SweepResult& r) {
  const MeasurementSet& ms = r.problem.measurements;
  const int n = r.grid_n;
  std::ostringstream out;
  out << provenance_line(r.problem, sweep_config_json(r.config).dump()) << "\n";
  out << "# grid_n=" << n << " rows=phi2 cols=phi1 points=" << to_string(r.config.grid_points)
      << " phi1_min=" << format_double(ms.phi01 - kPi)
      << " phi1_max=" << format_double(ms.phi01 + kPi)
      << " phi2_min=" << format_double(ms.phi02 - kPi)
      << " phi2_max=" << format_double(ms.phi02 + kPi) << "\n";
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      if (col) out << ',';
      out << r.at(row, col).code();
    }
    out << '\n';
  }
  return out.str();
}

inline void export_grid(const SweepResult& r, const std::filesystem::path& path) {
  write_text_file(path, grid_to_csv(r));
}

struct LabelGrid {
  int grid_n = 0;
  std::vector<BasinLabel> labels;
};

inline LabelGrid grid_from_csv(const std::string& text) {
  LabelGrid g;
  std::istringstream in(text);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string cell;
    std::size_t cols = 0;
    while (std::getline(ls, cell, ',')) {
      try {
        g.labels.push_back(BasinLabel::from_code(std::stoi(cell)));
      } catch (const std::exception&) {
        throw IoError("bad label '" + cell + "' in grid row " + std::to_string(rows + 1));
      }
      ++cols;
    }
    if (rows == 0) g.grid_n = static_cast<int>(cols);
    if (static_cast<int>(cols) != g.grid_n) throw IoError("ragged label grid");
    ++rows;
  }
  if (static_cast<int>(rows) != g.grid_n) throw IoError("label grid is not square");
  return g;
}

inline LabelGrid import_grid(const std::filesystem::path& path) {
  return grid_from_csv(read_text_file(path));
}

inline json measurements_json(const MeasurementSet& ms) {
  return {{"p01", {ms.p01.x(), ms.p01.y()}},
          {"p12", {ms.p12.x(), ms.p12.y()}},
          {"p02", {ms.p02.x(), ms.p02.y()}},
          {"phi01", ms.phi01},
          {"phi12", ms.phi12},
          {"phi02", ms.phi02},
          {"sigma", ms.sigma}};
}

inline json summary_json(const SweepResult& r) {
  const SweepSummary s = summarize(r);
  json catalog = json::array();
  for (std::size_t i = 0; i < r.catalog.size(); ++i) {
    const CatalogEntry& c = r.catalog[i];
    catalog.push_back({{"index", i},
                       {"phi", {c.phi.phi1, c.phi.phi2}},
                       {"cost", c.cost},
                       {"is_global", c.is_global},
                       {"description", c.description}});
  }
  json failures = json::array();
  for (const FailureRecord& f : r.failures) {
    json jf{{"row", f.row},
            {"col", f.col},
            {"start", {f.start.phi1, f.start.phi2}},
            {"end", {f.end.phi1, f.end.phi2}},
            {"cost", f.cost},
            {"grad_norm", f.grad_norm},
            {"iterations", f.iterations},
            {"termination", to_string(f.termination)}};
    jf["hessian_condition"] = f.hessian_condition ? json(*f.hessian_condition) : json(nullptr);
    failures.push_back(jf);
  }
  const MeasurementSet& ms = r.problem.measurements;
  return {{"provenance", provenance_json(r.problem, sweep_config_json(r.config))},
          {"label", s.label},
          {"cost_kind", s.cost_kind},
          {"epsilon", s.epsilon},
          {"grid_n", s.grid_n},
          {"pct_global", s.pct_global},
          {"pct_local", s.pct_local},
          {"pct_failed", s.pct_failed},
          {"catalog_size", s.catalog_size},
          {"catalog", catalog},
          {"failures", failures},
          {"problem", problem_to_json(r.problem)},
          {"measurements", measurements_json(ms)},
          {"square",
           {{"phi1", {ms.phi01 - kPi, ms.phi01 + kPi}}, {"phi2", {ms.phi02 - kPi, ms.phi02 + kPi}}}}};
}

inline void export_summary(const SweepResult& r, const std::filesystem::path& path) {
  write_text_file(path, summary_json(r).dump(2) + "\n");
}

// ---------------------------------------------------------------------------------------------
// Curves and surfaces

// f_{1,k} for k = -1, 0, 1 on `points` evenly spaced phi1 values spanning [phi01 - pi, phi01 + pi].
inline std::string profile_1d_csv(const BenchmarkProblem& bp, int points = 2001) {
  if (points < 2) throw ConfigError("profile needs at least two points");
  const ReducedModel model = build_reduced_model(bp.measurements);
  const OneDModel od = build_one_d_model(model);
  const double c = bp.measurements.phi01;
  std::ostringstream out;
  out << provenance_line(bp, "{\"points\":" + std::to_string(points) + "}") << "\n";
  out << "phi1,f_1_km1,f_1_k0,f_1_kp1\n";
  for (int i = 0; i < points; ++i) {
    const double x = c - kPi + kTwoPi * i / (points - 1);
    out << format_double(x) << ',' << format_double(f_1k(model, od, x, RegionId::Minus)) << ','
        << format_double(f_1k(model, od, x, RegionId::Zero)) << ','
        << format_double(f_1k(model, od, x, RegionId::Plus)) << '\n';
  }
  return out.str();
}

enum class SurfaceKind { FPhi, F, GPhi, G };

inline SurfaceKind surface_kind_from_string(const std::string& s) {
  if (s == "F_phi") return SurfaceKind::FPhi;
  if (s == "f") return SurfaceKind::F;
  if (s == "G_phi") return SurfaceKind::GPhi;
  if (s == "g") return SurfaceKind::G;
  throw ConfigError("unknown surface '" + s + "' (expected F_phi, f, G_phi or g)");
}

inline std::string to_string(SurfaceKind k) {
  switch (k) {
    case SurfaceKind::FPhi:
      return "F_phi";
    case SurfaceKind::F:
      return "f";
    case SurfaceKind::GPhi:
      return "G_phi";
    case SurfaceKind::G:
      return "g";
  }
  return "?";
}

inline double evaluate_surface(const ReducedModel& model, SurfaceKind kind, const AnglePair& phi) {
  switch (kind) {
    case SurfaceKind::FPhi:
      return f_phi(model.measurements, phi, model.sigma_phi);
    case SurfaceKind::F:
      return reduced_geodesic(model, phi);
    case SurfaceKind::GPhi:
      return g_phi(model.measurements, phi, model.sigma_phi);
    case SurfaceKind::G:
      return reduced_chordal(model, phi);
  }
  return 0.0;
}

// n x n samples over the closed square, edges included: entry (row, col) is at
// phi1 = phi01 - pi + 2 pi col / (n - 1), phi2 = phi02 - pi + 2 pi row / (n - 1).
inline Eigen::MatrixXd sample_surface(const BenchmarkProblem& bp, SurfaceKind kind, int n) {
  if (n < 2) throw ConfigError("surface needs n >= 2");
  const ReducedModel model = build_reduced_model(bp.measurements);
  const MeasurementSet& ms = model.measurements;
  Eigen::MatrixXd m(n, n);
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      const AnglePair phi{ms.phi01 - kPi + kTwoPi * col / (n - 1),
                          ms.phi02 - kPi + kTwoPi * row / (n - 1)};
      m(row, col) = evaluate_surface(model, kind, phi);
    }
  }
  return m;
}

inline std::string surface_csv(const BenchmarkProblem& bp, SurfaceKind kind, int n) {
  const Eigen::MatrixXd m = sample_surface(bp, kind, n);
  const MeasurementSet& ms = bp.measurements;
  std::ostringstream out;
  out << provenance_line(bp, "{\"surface\":\"" + to_string(kind) + "\",\"n\":" +
                                 std::to_string(n) + "}")
      << "\n";
  out << "# surface=" << to_string(kind) << " n=" << n << " rows=phi2 cols=phi1 points=inclusive"
      << " phi1_min=" << format_double(ms.phi01 - kPi)
      << " phi1_max=" << format_double(ms.phi01 + kPi)
      << " phi2_min=" << format_double(ms.phi02 - kPi)
      << " phi2_max=" << format_double(ms.phi02 + kPi) << "\n";
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      if (col) out << ',';
      out << format_double(m(row, col));
    }
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------------------------
// Reports

inline json critical_points_json(const std::vector<CriticalPoint>& pts) {
  json arr = json::array();
  for (const auto& p : pts) {
    json jp{{"phi", {p.phi.phi1, p.phi.phi2}},
            {"kind", to_string(p.kind)},
            {"cost", p.cost},
            {"grad_norm", p.grad_norm},
            {"on_boundary", p.on_boundary},
            // Full Hessian of g, leading factor 2 kept.
            {"hessian", {{p.hessian(0, 0), p.hessian(0, 1)}, {p.hessian(1, 0), p.hessian(1, 1)}}}};
    if (!p.origin.empty()) jp["origin"] = p.origin;
    arr.push_back(jp);
  }
  return arr;
}

inline json geodesic_minima_json(const std::vector<GeodesicMinimum>& mins) {
  json arr = json::array();
  for (const auto& m : mins) {
    arr.push_back({{"phi", {m.phi.phi1, m.phi.phi2}},
                   {"cost", m.cost},
                   {"region", index(m.region)},
                   {"is_global", m.is_global},
                   {"second_derivative_1d", m.second_derivative_1d},
                   {"on_boundary", m.on_boundary}});
  }
  return arr;
}

}  // namespace minslam
