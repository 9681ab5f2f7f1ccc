#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "irm/nlp.hpp"
#include "irm/problems.hpp"

namespace {

// Transcribing "xdot = 0, x(0) = c" with degree-1 states over one interval
// yields an unconstrained least-squares problem in the free node values;
// used to exercise the solver on a transparent objective.
irm::TranscribedNlp tiny_nlp(double c) {
  irm::DynamicsProblem p;
  p.n_x = 1;
  p.n_f = 1;
  p.t0 = 0.0;
  p.tf = 1.0;
  irm::set_dynamics(p, [](auto xd, auto, auto, const auto&, auto out) {
    out[0] = xd[0];
  });
  irm::BoundaryValues bv;
  bv.x0 = Eigen::VectorXd::Constant(1, c);
  irm::MeshConfig mc{.n_intervals = 2, .phi = 0.0, .deg_state = 1,
                     .deg_control = 0, .quad_order = 3, .flexible = false};
  return irm::build(p, bv, mc);
}

}  // namespace

TEST_CASE("solver drives an unconstrained quadratic to its minimum") {
  auto nlp = tiny_nlp(2.5);
  irm::SolverOptions opts;
  auto sol = irm::solve(nlp, nlp.cold_start(), opts);
  CHECK(sol.status == irm::NlpStatus::converged);
  // The only zero-residual interpolant is the constant x = 2.5.
  auto tr = nlp.extract_trajectory(sol.z);
  for (double t : {0.0, 0.3, 0.8, 1.0}) {
    CHECK(tr.state(t)[0] == doctest::Approx(2.5).epsilon(1e-6));
  }
  CHECK(nlp.objective(sol.z) <= 1e-12);
  CHECK(sol.kkt_residual <= opts.rel_tol * std::max(1.0, sol.objective));
}

TEST_CASE("solver respects inequality constraints through the path rows") {
  // Block move with a tight torque bound forces active path constraints at
  // the solution; verify feasibility within constraint_tol.
  auto bench = irm::block_move(irm::Config::from_string("u_max=4.5\n"));
  irm::MeshConfig mc = bench.default_mesh;
  mc.n_intervals = 6;
  auto nlp = irm::build(bench.problem, bench.boundary, mc);
  irm::SolverOptions opts;
  opts.max_inner = 2000;
  opts.lbfgs_memory = 50;
  auto sol = irm::solve(nlp, nlp.cold_start(), opts);
  Eigen::VectorXd g(nlp.num_ineq());
  nlp.eval_ineq(sol.z, g);
  CHECK(g.maxCoeff() <= opts.constraint_tol * 10.0);
  CHECK(sol.constraint_violation <= opts.constraint_tol * 10.0);
}

TEST_CASE("non-finite start is rejected") {
  auto nlp = tiny_nlp(1.0);
  Eigen::VectorXd z0 = nlp.cold_start();
  z0[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(irm::solve(nlp, z0), std::invalid_argument);
}

TEST_CASE("iteration cap returns best iterate with max_iter status") {
  auto bench = irm::block_move();
  auto nlp = irm::build(bench.problem, bench.boundary, bench.default_mesh);
  irm::SolverOptions opts;
  opts.max_outer = 1;
  opts.max_inner = 3;
  auto sol = irm::solve(nlp, nlp.cold_start(), opts);
  CHECK(sol.status == irm::NlpStatus::max_iter);
  CHECK(sol.iterations <= 3);
  CHECK(std::isfinite(sol.objective));
}

TEST_CASE("structured iteration log is written when requested") {
  auto nlp = tiny_nlp(1.0);
  irm::SolverOptions opts;
  opts.log_path = "test_nlp_log_tmp.csv";
  auto sol = irm::solve(nlp, nlp.cold_start(), opts);
  CHECK(sol.status == irm::NlpStatus::converged);
  std::ifstream log(opts.log_path);
  REQUIRE(log.good());
  std::string header;
  std::getline(log, header);
  CHECK(header.find("iteration") != std::string::npos);
  CHECK(header.find("objective") != std::string::npos);
  CHECK(header.find("violation") != std::string::npos);
  CHECK(header.find("step") != std::string::npos);
  std::string row;
  CHECK(std::getline(log, row));  // at least one iteration row
  log.close();
  std::remove(opts.log_path.c_str());
}

TEST_CASE("run_cold_solve flags an undersized quadrature order") {
  auto bench = irm::exp_decay();
  irm::MeshConfig mc = bench.default_mesh;
  mc.quad_order = 1;  // far below what a degree-3 squared residual needs
  mc.n_intervals = 5;
  auto nlp = irm::build(bench.problem, bench.boundary, mc);
  auto run = irm::run_cold_solve(nlp);
  CHECK(run.report.status == irm::SolveStatus::quadrature_unverified);
  CHECK(run.report.eps_q > 1e-10 * std::max(1.0, run.report.eps_r));
}

TEST_CASE("run_cold_solve verifies a well-resolved solve") {
  auto bench = irm::exp_decay();
  irm::MeshConfig mc = bench.default_mesh;
  mc.n_intervals = 10;
  auto nlp = irm::build(bench.problem, bench.boundary, mc);
  auto run = irm::run_cold_solve(nlp);
  CHECK(run.report.status == irm::SolveStatus::converged);
  CHECK(run.report.eps_q <= 1e-10 * std::max(1.0, run.report.eps_r));
  CHECK(run.report.eps_r < 1e-8);
  CHECK(run.report.wall_time_s > 0.0);
  CHECK(run.report.mesh.size() == 11);
}
