#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "minslam/minslam.hpp"

namespace fs = std::filesystem;
using namespace minslam;

namespace {

struct ProblemOptions {
  std::string source = "1";
  std::vector<double> p1;
  std::vector<double> p2;
  std::optional<double> sigma;
  std::optional<double> epsilon;
  std::optional<std::string> split;
};

bool is_builtin_id(const std::string& s) { return s == "1" || s == "2" || s == "3"; }

BenchmarkProblem load_problem(const std::string& source, const ProblemOptions& o) {
  BenchmarkProblem bp = is_builtin_id(source) ? benchmark_problem(std::stoi(source))
                                              : read_problem_file(source);
  GroundTruth gt = bp.ground_truth;
  if (!o.p1.empty()) gt.p1 = {o.p1[0], o.p1[1]};
  if (!o.p2.empty()) gt.p2 = {o.p2[0], o.p2[1]};
  const double sigma = o.sigma.value_or(bp.measurements.sigma);
  const double eps = o.epsilon.value_or(bp.epsilon);
  const MismatchSplit split = o.split ? mismatch_split_from_string(*o.split) : bp.split;
  return make_problem(gt, eps, sigma, bp.label, split);
}

void add_problem_options(CLI::App* cmd, ProblemOptions& o) {
  cmd->add_option("--problem", o.source, "Builtin benchmark id (1-3) or problem JSON path")
      ->capture_default_str();
  cmd->add_option("--p1", o.p1, "Ground-truth position of pose 1 (x y)")->expected(2);
  cmd->add_option("--p2", o.p2, "Ground-truth position of pose 2 (x y)")->expected(2);
  cmd->add_option("--sigma", o.sigma, "Measurement standard deviation")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--epsilon", o.epsilon, "Total orientation mismatch (rad)");
  cmd->add_option("--split", o.split, "Mismatch distribution: thirds or phi12")
      ->check(CLI::IsMember({"thirds", "phi12"}));
}

void write_output(const fs::path& path, const std::string& text) {
  write_text_file(path, text);
  std::cout << "wrote " << path.string() << "\n";
}

json analysis_json(const BenchmarkProblem& bp) {
  const ReducedModel model = build_reduced_model(bp.measurements);
  json chordal = critical_points_json(minima_only(critical_points_numeric(model)));
  return {{"provenance", provenance_json(bp, json::object())},
          {"problem", problem_to_json(bp)},
          {"measurements", measurements_json(bp.measurements)},
          {"c0", model.c0},
          {"a0", model.a0},
          {"theta0", model.theta0},
          {"theta0_minus_phi01", wrap(model.theta0 - bp.measurements.phi01)},
          {"epsilon", bp.epsilon},
          {"mismatch", mismatch(bp.measurements)},
          {"curvature_case", to_string(curvature_case(model))},
          {"chordal_b0", chordal_b0(model)},
          {"geodesic_minima", geodesic_minima_json(geodesic_minima_catalog(model))},
          {"chordal_minima", chordal}};
}

void print_analysis(const json& a) {
  std::cout << std::setprecision(10);
  std::cout << "problem        " << a["provenance"]["problem_hash"].get<std::string>() << "\n"
            << "c0             " << a["c0"].get<double>() << "\n"
            << "a0             " << a["a0"].get<double>() << "\n"
            << "theta0         " << a["theta0"].get<double>() << "\n"
            << "theta0 - phi01 " << a["theta0_minus_phi01"].get<double>() << "\n"
            << "epsilon        " << a["epsilon"].get<double>() << "\n"
            << "case           " << a["curvature_case"].get<std::string>() << "\n";
  std::cout << "geodesic minima (" << a["geodesic_minima"].size() << ")\n";
  for (const auto& m : a["geodesic_minima"]) {
    std::cout << "  R" << m["region"].get<int>() << "  phi = [" << m["phi"][0].get<double>()
              << ", " << m["phi"][1].get<double>() << "]  cost = " << m["cost"].get<double>()
              << (m["is_global"].get<bool>() ? "  global" : "") << "\n";
  }
  std::cout << "chordal minima (" << a["chordal_minima"].size() << ")\n";
  for (const auto& m : a["chordal_minima"]) {
    std::cout << "  phi = [" << m["phi"][0].get<double>() << ", " << m["phi"][1].get<double>()
              << "]  cost = " << m["cost"].get<double>() << "\n";
  }
}

int run_verify(const std::vector<std::string>& sources, const ProblemOptions& o,
               const std::string& out) {
  std::vector<BenchmarkProblem> problems;
  if (sources.empty()) {
    for (int id = 1; id <= 3; ++id) problems.push_back(load_problem(std::to_string(id), o));
    BenchmarkProblem pi = benchmark_problem(1);
    problems.push_back(make_problem(pi.ground_truth, kPi, pi.measurements.sigma, "eps-pi",
                                    MismatchSplit::Phi12));
  } else {
    for (const auto& s : sources) problems.push_back(load_problem(s, o));
  }
  json all = json::array();
  bool ok = true;
  for (const auto& bp : problems) {
    const VerifyReport r = verify_problem(bp);
    ok = ok && r.ok();
    std::cout << "[" << (r.ok() ? "PASS" : "FAIL") << "] " << r.label << "\n";
    for (const auto& c : r.checks) {
      std::cout << "  " << std::left << std::setw(8) << to_string(c.status) << std::setw(32)
                << c.name << c.detail << "\n";
    }
    all.push_back(to_json(r));
  }
  if (!out.empty()) write_output(fs::path(out) / "verify.json", json{{"ok", ok}, {"reports", all}}.dump(2) + "\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minslam: three-pose planar pose-graph laboratory"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1, 1);

  ProblemOptions po;
  std::string out = "out";

  auto* analyze = app.add_subcommand("analyze", "Reduction constants and minima catalogs");
  add_problem_options(analyze, po);
  std::string analyze_out;
  analyze->add_option("--out", analyze_out, "Directory for analysis.json");

  auto* profile = app.add_subcommand("profile-1d", "Sample the three 1D costs f_{1,k}");
  add_problem_options(profile, po);
  profile->add_option("--out", out, "Output directory")->capture_default_str();
  int points = 2001;
  profile->add_option("--points", points, "Samples over [phi01 - pi, phi01 + pi]")
      ->capture_default_str()
      ->check(CLI::Range(2, 1000000));

  auto* surface = app.add_subcommand("surface", "Sample a cost surface over the square");
  add_problem_options(surface, po);
  surface->add_option("--out", out, "Output directory")->capture_default_str();
  std::string which = "f";
  int surface_n = 201;
  surface->add_option("--which", which, "F_phi, f, G_phi or g")
      ->capture_default_str()
      ->check(CLI::IsMember({"F_phi", "f", "G_phi", "g"}));
  surface->add_option("-n,--n", surface_n, "Samples per axis")
      ->capture_default_str()
      ->check(CLI::Range(2, 100000));

  auto* critical = app.add_subcommand("critical-points", "Critical points of g and minima of f");
  add_problem_options(critical, po);
  critical->add_option("--out", out, "Output directory")->capture_default_str();
  int seeds = 64;
  critical->add_option("--seeds", seeds, "Newton seeds per axis")
      ->capture_default_str()
      ->check(CLI::Range(2, 4096));

  auto* sweep = app.add_subcommand("sweep", "Region-of-attraction grid sweep");
  add_problem_options(sweep, po);
  sweep->add_option("--out", out, "Output directory")->capture_default_str();
  SweepConfig cfg;
  std::string cost = "geodesic";
  sweep->add_option("--grid-n", cfg.grid_n, "Grid points per axis")
      ->capture_default_str()
      ->check(CLI::Range(2, 100000));
  sweep->add_option("--cost", cost, "geodesic or chordal")
      ->capture_default_str()
      ->check(CLI::IsMember({"geodesic", "chordal"}));
  std::string grid_points = "inclusive";
  sweep->add_option("--grid-points", grid_points, "inclusive or cell-centres")
      ->capture_default_str()
      ->check(CLI::IsMember({"inclusive", "cell-centres"}));
  sweep->add_option("--match-tol", cfg.match_tol, "Max-norm distance for basin matching")
      ->capture_default_str();
  sweep->add_option("--grad-tol", cfg.minimize_options.grad_tol, "Gradient-norm stop")
      ->capture_default_str();
  sweep->add_option("--step-tol", cfg.minimize_options.step_tol, "Step-length stop")
      ->capture_default_str();
  sweep->add_option("--max-iter", cfg.minimize_options.max_iter, "Iteration limit")
      ->capture_default_str();
  sweep->add_option("--initial-hessian-scale", cfg.minimize_options.initial_hessian_scale,
                    "Initial inverse Hessian = scale * I")
      ->capture_default_str();
  sweep->add_option("--max-first-step", cfg.minimize_options.max_first_step,
                    "Cap on the first step length (0 = none)")
      ->capture_default_str();
  sweep->add_flag("--scale-initial-hessian", cfg.minimize_options.scale_initial_hessian,
                  "Rescale the initial inverse Hessian after the first step");
  sweep->add_option("--workers", cfg.workers, "Worker threads (0 = hardware)")
      ->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Run the invariant checks");
  std::vector<std::string> verify_sources;
  verify->add_option("--problem", verify_sources,
                     "Problems to check (default: benchmarks 1-3 and a mismatch-pi problem)");
  verify->add_option("--p1", po.p1, "Ground-truth position of pose 1 (x y)")->expected(2);
  verify->add_option("--p2", po.p2, "Ground-truth position of pose 2 (x y)")->expected(2);
  verify->add_option("--sigma", po.sigma, "Measurement standard deviation")
      ->check(CLI::PositiveNumber);
  std::string verify_out;
  verify->add_option("--out", verify_out, "Directory for verify.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) return run_verify(verify_sources, po, verify_out);

    const BenchmarkProblem bp = load_problem(po.source, po);
    const fs::path dir(out);

    if (*analyze) {
      const json a = analysis_json(bp);
      print_analysis(a);
      if (!analyze_out.empty()) write_output(fs::path(analyze_out) / "analysis.json", a.dump(2) + "\n");
    } else if (*profile) {
      write_output(dir / "profile_1d.csv", profile_1d_csv(bp, points));
    } else if (*surface) {
      write_output(dir / ("surface_" + which + ".csv"),
                   surface_csv(bp, surface_kind_from_string(which), surface_n));
    } else if (*critical) {
      const ReducedModel model = build_reduced_model(bp.measurements);
      NumericCriticalOptions nco;
      nco.seeds_per_axis = seeds;
      json report{{"provenance", provenance_json(bp, {{"seeds", seeds}})},
                  {"chordal_b0", chordal_b0(model)},
                  {"chordal_numeric", critical_points_json(critical_points_numeric(model, nco))},
                  {"geodesic_minima", geodesic_minima_json(geodesic_minima_catalog(model))}};
      try {
        report["chordal_analytic"] = critical_points_json(critical_points_perfect(model));
      } catch (const PreconditionError&) {
        try {
          report["chordal_analytic"] = critical_points_json(critical_points_eps_pi(model));
        } catch (const PreconditionError&) {
          report["chordal_analytic"] = nullptr;
        }
      }
      write_output(dir / "critical_points.json", report.dump(2) + "\n");
    } else if (*sweep) {
      cfg.cost_kind = cost_kind_from_string(cost);
      cfg.grid_points = grid_points_from_string(grid_points);
      const SweepResult r = run_sweep(bp, cfg);
      write_output(dir / ("grid_" + cost + ".csv"), grid_to_csv(r));
      write_output(dir / ("summary_" + cost + ".json"), summary_json(r).dump(2) + "\n");
      std::cout << std::fixed << std::setprecision(4) << bp.label << " " << cost
                << ": global " << r.pct_global << "%  local " << r.pct_local << "%  failed "
                << r.pct_failed << "%\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
