// Command-line front end: single solves, convergence sweeps with
// order-of-convergence fits, and quadrature verification.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "irm/convergence.hpp"
#include "irm/nlp.hpp"
#include "irm/problems.hpp"
#include "irm/sweep.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitQuadUnverified = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitUsage = 64;

constexpr double kQuadTolFactor = 1e-10;

struct SolveArgs {
  std::string problem;
  int n_intervals = 0;  // 0: benchmark default
  double phi = -1.0;    // <0: benchmark default
  int deg_state = 0;
  int deg_control = -1;
  int quad_order = 0;
  bool flexible = false;
  std::string config_path;
  std::string out_prefix = "irmesh_out";
  std::string log_path;
  double rel_tol = 0.0;  // 0: solver default
  int max_inner = 0;     // 0: solver default
  int max_outer = 0;     // 0: solver default
  int lbfgs_memory = 0;  // 0: solver default
};

void add_solve_options(CLI::App* cmd, SolveArgs& args) {
  cmd->add_option("--problem,-p", args.problem, "benchmark problem name")
      ->required();
  cmd->add_option("-N,--intervals", args.n_intervals, "mesh interval count");
  cmd->add_option("--phi", args.phi, "mesh flexibility parameter in [0,1)");
  cmd->add_option("-a,--deg-state", args.deg_state, "state polynomial degree");
  cmd->add_option("-b,--deg-control", args.deg_control,
                  "control polynomial degree");
  cmd->add_option("-Q,--quad-order", args.quad_order,
                  "quadrature order (0 selects deg-state + 3)");
  cmd->add_flag("--flexible", args.flexible,
                "include interior mesh nodes as decision variables");
  cmd->add_option("--config", args.config_path,
                  "key=value configuration file (overrides IRMESH_CONFIG)");
  cmd->add_option("--out,-o", args.out_prefix, "output path prefix");
  cmd->add_option("--log", args.log_path, "NLP iteration log file");
  cmd->add_option("--rel-tol", args.rel_tol, "NLP relative KKT tolerance");
  cmd->add_option("--max-inner", args.max_inner,
                  "quasi-Newton iterations per outer step");
  cmd->add_option("--max-outer", args.max_outer,
                  "augmented-Lagrangian outer iterations");
  cmd->add_option("--lbfgs-memory", args.lbfgs_memory,
                  "curvature pairs kept by the quasi-Newton step");
}

irm::SolverOptions solver_options(const SolveArgs& args) {
  irm::SolverOptions opts;
  opts.log_path = args.log_path;
  if (args.rel_tol > 0.0) opts.rel_tol = args.rel_tol;
  if (args.max_inner > 0) opts.max_inner = args.max_inner;
  if (args.max_outer > 0) opts.max_outer = args.max_outer;
  if (args.lbfgs_memory > 0) opts.lbfgs_memory = args.lbfgs_memory;
  return opts;
}

irm::Config load_config(const SolveArgs& args) {
  std::string path = args.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("IRMESH_CONFIG")) path = env;
  }
  if (path.empty()) {
    const std::string guess = "configs/" + args.problem + ".cfg";
    if (std::filesystem::exists(guess)) path = guess;
  }
  return path.empty() ? irm::Config{} : irm::Config::from_file(path);
}

irm::MeshConfig mesh_from_args(const irm::BenchmarkCase& bc,
                               const SolveArgs& args) {
  irm::MeshConfig m = bc.default_mesh;
  if (args.n_intervals > 0) m.n_intervals = args.n_intervals;
  if (args.phi >= 0.0) m.phi = args.phi;
  if (args.deg_state > 0) m.deg_state = args.deg_state;
  if (args.deg_control >= 0) m.deg_control = args.deg_control;
  if (args.quad_order > 0) m.quad_order = args.quad_order;
  m.flexible = args.flexible;
  return m;
}

nlohmann::json report_json(const irm::SolveReport& rep) {
  nlohmann::json j;
  j["eps_r"] = rep.eps_r;
  j["eps_q"] = rep.eps_q;
  j["iterations"] = rep.nlp_iterations;
  j["wall_time_s"] = rep.wall_time_s;
  j["status"] = irm::to_string(rep.status);
  j["mesh"] = std::vector<double>(rep.mesh.data(),
                                  rep.mesh.data() + rep.mesh.size());
  return j;
}

int run_solve(const SolveArgs& args) {
  const irm::BenchmarkCase bc =
      irm::make_benchmark(args.problem, load_config(args));
  const irm::MeshConfig mesh = mesh_from_args(bc, args);
  const irm::TranscribedNlp nlp(bc.problem, bc.boundary, mesh);

  const irm::DrivenSolve run =
      irm::run_cold_solve(nlp, solver_options(args), kQuadTolFactor);

  irm::write_trajectory_csv(nlp.extract_trajectory(run.nlp.z),
                       args.out_prefix + "_trajectory.csv");
  irm::write_mesh_file(run.report.mesh, args.out_prefix + "_mesh.txt");
  std::ofstream(args.out_prefix + "_report.json")
      << report_json(run.report).dump(2) << "\n";

  std::cout << args.problem << ": status=" << to_string(run.report.status)
            << " eps_r=" << run.report.eps_r << " eps_q=" << run.report.eps_q
            << " iterations=" << run.report.nlp_iterations << "\n";
  switch (run.report.status) {
    case irm::SolveStatus::converged: return kExitOk;
    case irm::SolveStatus::quadrature_unverified: return kExitQuadUnverified;
    default: return kExitNotConverged;
  }
}

int run_converge(const SolveArgs& args, std::vector<int> n_list, int fit_floor,
                 int repeats) {
  const irm::Config cfg = load_config(args);
  const irm::BenchmarkCase bc = irm::make_benchmark(args.problem, cfg);
  SolveArgs sa = args;
  sa.n_intervals = 0;  // sweep_benchmark owns N
  irm::SweepResult sweep = irm::sweep_benchmark(
      bc, mesh_from_args(bc, sa), n_list, solver_options(args), repeats,
      kQuadTolFactor, [](const irm::ConvergenceRow& row) {
        std::cout << row.scheme << " N=" << row.n << " eps_r=" << row.eps_r
                  << " status=" << row.status << " t=" << row.wall_time_s
                  << "s\n";
      });
  std::vector<irm::ConvergenceRow>& rows = sweep.rows;
  normalize_wall_times(rows);
  write_convergence_csv(rows, args.out_prefix + "_convergence.csv");

  const double horizon = bc.problem.tf - bc.problem.t0;
  nlohmann::json fits;
  for (const std::string scheme : {"fixed", "flexible"}) {
    const irm::OrderFit fit = fit_order(rows, scheme, horizon, fit_floor);
    fits[scheme] = {{"p", fit.p},
                    {"log_k", fit.log_k},
                    {"r_squared", fit.r_squared},
                    {"points", fit.points}};
    std::cout << scheme << ": fitted order p=" << fit.p
              << " (R^2=" << fit.r_squared << ", " << fit.points
              << " points)\n";
  }
  std::ofstream(args.out_prefix + "_fits.json") << fits.dump(2) << "\n";
  return kExitOk;
}

int run_check_quad(const SolveArgs& args, int multiplier) {
  const irm::BenchmarkCase bc =
      irm::make_benchmark(args.problem, load_config(args));
  const irm::MeshConfig mesh = mesh_from_args(bc, args);
  const irm::TranscribedNlp nlp(bc.problem, bc.boundary, mesh);
  const irm::DrivenSolve run =
      irm::run_cold_solve(nlp, solver_options(args), kQuadTolFactor,
                          multiplier);
  const double tol = kQuadTolFactor * std::max(1.0, run.report.eps_r);
  std::cout << args.problem << ": eps_q=" << run.report.eps_q
            << " (tolerance " << tol << ", multiplier " << multiplier
            << ")\n";
  return run.report.eps_q <= tol ? kExitOk : kExitQuadUnverified;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integrated-residual solver for DAE feasibility problems on "
               "fixed or flexible time meshes"};
  app.require_subcommand(1);
  unsigned seed = 0;
  app.add_option("--seed", seed,
                 "seed for randomized checks (core solves are deterministic)");

  SolveArgs solve_args;
  CLI::App* solve_cmd =
      app.add_subcommand("solve", "solve one problem instance");
  add_solve_options(solve_cmd, solve_args);

  SolveArgs conv_args;
  std::vector<int> n_list;
  int fit_floor = 5;
  int repeats = 5;
  CLI::App* conv_cmd = app.add_subcommand(
      "converge", "sweep N for fixed and flexible meshes and fit orders");
  add_solve_options(conv_cmd, conv_args);
  conv_cmd->add_option("--N-list", n_list, "interval counts to sweep")
      ->required()
      ->delimiter(',');
  conv_cmd->add_option("--fit-floor", fit_floor, "smallest N used in the fit");
  conv_cmd->add_option("--repeats", repeats, "timing repetitions per solve");

  SolveArgs quad_args;
  int multiplier = 2;
  CLI::App* quad_cmd = app.add_subcommand(
      "check-quad", "verify quadrature accuracy of a solve at higher order");
  add_solve_options(quad_cmd, quad_args);
  quad_cmd->add_option("--multiplier", multiplier,
                       "quadrature order multiplier for the check");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return run_solve(solve_args);
    if (conv_cmd->parsed()) return run_converge(conv_args, n_list, fit_floor,
                                                repeats);
    if (quad_cmd->parsed()) return run_check_quad(quad_args, multiplier);
  } catch (const std::out_of_range& e) {
    std::cerr << e.what() << "\n";
    std::cerr << "known problems:";
    for (const auto& n : irm::benchmark_names()) std::cerr << " " << n;
    std::cerr << "\nusage: " << argv[0]
              << " solve --problem <name> [options]\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
