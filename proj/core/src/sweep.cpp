#include "irm/sweep.hpp"

#include <utility>

namespace irm {
namespace {

// Better of two driven solves: converged beats non-converged, then lower
// residual wins.
const DrivenSolve& better_run(const DrivenSolve& a, const DrivenSolve& b) {
  const bool ca = a.report.status == SolveStatus::converged;
  const bool cb = b.report.status == SolveStatus::converged;
  if (ca != cb) return ca ? a : b;
  return a.report.eps_r <= b.report.eps_r ? a : b;
}

ConvergenceRow to_row(const std::string& scheme, int n, const DrivenSolve& run,
                      double mean_time) {
  ConvergenceRow row;
  row.scheme = scheme;
  row.n = n;
  row.eps_r = run.report.eps_r;
  row.eps_q = run.report.eps_q;
  row.iterations = run.report.nlp_iterations;
  row.status = to_string(run.report.status);
  row.wall_time_s = mean_time;
  return row;
}

}  // namespace

Eigen::VectorXd embed_fixed_solution(const TranscribedNlp& flex,
                                     const TranscribedNlp& fixed,
                                     const Eigen::VectorXd& zf) {
  const DecisionLayout& lf = fixed.layout();
  const DecisionLayout& lx = flex.layout();
  Eigen::VectorXd z = flex.cold_start();
  for (int d = 0; d < lf.n_x; ++d) {
    for (int node = 0; node < lf.state_nodes(); ++node) {
      const int vf = lf.state_var[lf.state_slot(d, node)];
      const int vx = lx.state_var[lx.state_slot(d, node)];
      if (vf >= 0 && vx >= 0) z[vx] = zf[vf];
    }
  }
  for (int d = 0; d < lf.n_u; ++d) {
    for (int i = 0; i < lf.n_intervals; ++i) {
      for (int j = 0; j <= lf.deg_control; ++j) {
        z[lx.control_index(d, i, j)] = zf[lf.control_index(d, i, j)];
      }
    }
  }
  return z;
}

SweepResult sweep_benchmark(
    const BenchmarkCase& bc, MeshConfig base, const std::vector<int>& n_list,
    const SolverOptions& opts, int repeats, double quad_tol_factor,
    const std::function<void(const ConvergenceRow&)>& on_row) {
  SweepResult out;
  std::vector<ConvergenceRow> flex_rows;
  std::vector<SolveReport> flex_reports;
  for (const int n : n_list) {
    MeshConfig mc = base;
    mc.n_intervals = n;
    mc.flexible = false;
    const TranscribedNlp nlp_fixed(bc.problem, bc.boundary, mc);
    const Eigen::VectorXd z_fixed = bc.initial_guess
                                        ? bc.initial_guess(nlp_fixed)
                                        : nlp_fixed.cold_start();
    double total_time = 0.0;
    DrivenSolve fixed_run;
    for (int rep = 0; rep < repeats; ++rep) {
      DrivenSolve run =
          run_solve_from(nlp_fixed, z_fixed, opts, quad_tol_factor);
      total_time += run.report.wall_time_s;
      if (rep == 0) fixed_run = std::move(run);
    }
    out.rows.push_back(to_row("fixed", n, fixed_run, total_time / repeats));
    out.reports.push_back(fixed_run.report);
    if (on_row) on_row(out.rows.back());

    mc.flexible = true;
    const TranscribedNlp nlp_flex(bc.problem, bc.boundary, mc);
    const Eigen::VectorXd z_guess = bc.initial_guess
                                        ? bc.initial_guess(nlp_flex)
                                        : nlp_flex.cold_start();
    const Eigen::VectorXd z_embed =
        embed_fixed_solution(nlp_flex, nlp_fixed, fixed_run.nlp.z);
    total_time = 0.0;
    DrivenSolve flex_run;
    for (int rep = 0; rep < repeats; ++rep) {
      DrivenSolve run =
          run_solve_from(nlp_flex, z_guess, opts, quad_tol_factor);
      total_time += run.report.wall_time_s;
      if (run.report.status != SolveStatus::converged ||
          run.report.eps_r > fixed_run.report.eps_r) {
        const DrivenSolve fallback =
            run_solve_from(nlp_flex, z_embed, opts, quad_tol_factor);
        total_time += fallback.report.wall_time_s;
        run = better_run(run, fallback);
      }
      if (rep == 0) flex_run = std::move(run);
    }
    flex_rows.push_back(to_row("flexible", n, flex_run, total_time / repeats));
    flex_reports.push_back(flex_run.report);
    if (on_row) on_row(flex_rows.back());
  }
  out.rows.insert(out.rows.end(), flex_rows.begin(), flex_rows.end());
  out.reports.insert(out.reports.end(), flex_reports.begin(),
                     flex_reports.end());
  return out;
}

}  // namespace irm
