#include <doctest.h>

#include <cmath>

#include "irm/initialization.hpp"
#include "irm/nlp.hpp"
#include "irm/problems.hpp"

namespace {

// Double integrator x1' = x2, x2' = u on [0, 1], semi-explicit rows.
irm::DynamicsProblem double_integrator() {
  irm::DynamicsProblem p;
  p.name = "double_integrator";
  p.n_x = 2;
  p.n_u = 1;
  p.n_f = 2;
  p.t0 = 0.0;
  p.tf = 1.0;
  irm::set_dynamics(p, [](auto xd, auto x, auto u, const auto& /*t*/,
                          auto out) {
    out[0] = xd[0] - x[1];
    out[1] = xd[1] - u[0];
  });
  return p;
}

irm::SwitchingControl one_switch(double s, int sign = 1) {
  irm::SwitchingControl c;
  c.amplitude = 1.0;
  c.initial_sign = {sign};
  c.switch_times = {{s}};
  return c;
}

}  // namespace

TEST_CASE("switching control evaluation and interior switch collection") {
  irm::SwitchingControl c;
  c.amplitude = 2.0;
  c.initial_sign = {1, -1};
  c.switch_times = {{0.25, 0.75}, {0.5}};
  CHECK(c.eval(0.0)[0] == doctest::Approx(2.0));
  CHECK(c.eval(0.0)[1] == doctest::Approx(-2.0));
  CHECK(c.eval(0.3)[0] == doctest::Approx(-2.0));
  CHECK(c.eval(0.8)[0] == doctest::Approx(2.0));
  CHECK(c.eval(0.6)[1] == doctest::Approx(2.0));

  const auto sw = c.interior_switches(0.0, 1.0);
  REQUIRE(sw.size() == 3);
  CHECK(sw[0] == doctest::Approx(0.25));
  CHECK(sw[1] == doctest::Approx(0.5));
  CHECK(sw[2] == doctest::Approx(0.75));

  // Switches at or outside the horizon are not interior; near-duplicates
  // merge into one.
  irm::SwitchingControl d;
  d.amplitude = 1.0;
  d.initial_sign = {1};
  d.switch_times = {{0.0, 0.4, 0.4 + 1e-12, 1.0}};
  CHECK(d.interior_switches(0.0, 1.0).size() == 1);
}

TEST_CASE("simulate_switching matches the exponential decay solution") {
  const irm::BenchmarkCase bc = irm::exp_decay();
  irm::SwitchingControl none;  // no control channels
  Eigen::VectorXd x0(1);
  x0[0] = 1.0;
  const auto traj = irm::simulate_switching(bc.problem, none, x0, 2000);
  CHECK(traj.ts.front() == doctest::Approx(bc.problem.t0));
  CHECK(traj.ts.back() == doctest::Approx(bc.problem.tf));
  for (double t : {0.0, 0.7, 1.9, 3.0}) {
    // Off-grid queries interpolate linearly between RK4 samples, so the
    // accuracy between nodes is O(h^2), not the RK4 order.
    CHECK(traj.state(t)[0] == doctest::Approx(std::exp(-t)).epsilon(1e-6));
  }
}

TEST_CASE("simulate_switching integrates exactly across a control switch") {
  // Bang-bang double integrator with the switch at 0.5: x1(1) = 1/4,
  // x2(1) = 0 by piecewise integration by hand.
  const auto p = double_integrator();
  const auto traj = irm::simulate_switching(p, one_switch(0.5),
                                            Eigen::VectorXd::Zero(2), 500);
  CHECK(traj.xs.back()[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(traj.xs.back()[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("terminal_miss is the squared distance to the pinned endpoint") {
  const auto p = double_integrator();
  irm::BoundaryValues b;
  b.x0 = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd xf(2);
  xf << 0.0, 0.0;
  b.xf = xf;
  // x(1) = (1/4, 0), so the miss against the origin is (1/4)^2.
  CHECK(irm::terminal_miss(p, b, one_switch(0.5), 500) ==
        doctest::Approx(0.0625).epsilon(1e-10));
}

TEST_CASE("refine_switch_times recovers the analytic switch point") {
  const auto p = double_integrator();
  irm::BoundaryValues b;
  b.x0 = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd xf(2);
  xf << 0.25, 0.0;  // reachable exactly with the switch at 0.5
  b.xf = xf;
  const auto refined =
      irm::refine_switch_times(p, b, one_switch(0.3), 500, 2000);
  CHECK(refined.switch_times[0][0] == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(irm::terminal_miss(p, b, refined, 500) < 1e-10);
}

TEST_CASE("best_switching_control finds a feasible bang-bang pattern") {
  const auto p = double_integrator();
  irm::BoundaryValues b;
  b.x0 = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd xf(2);
  xf << 0.25, 0.0;
  b.xf = xf;
  const auto c = irm::best_switching_control(p, b, 1.0, 1);
  CHECK(irm::terminal_miss(p, b, c, 2000) < 1e-9);
}

TEST_CASE("event_aligned_mesh falls back to uniform without events") {
  const Eigen::VectorXd mesh = irm::event_aligned_mesh(0.0, 1.0, 4, 0.5, {});
  REQUIRE(mesh.size() == 5);
  for (int i = 0; i <= 4; ++i) CHECK(mesh[i] == doctest::Approx(0.25 * i));
}

TEST_CASE("event_aligned_mesh places nodes exactly on feasible events") {
  const Eigen::VectorXd mesh =
      irm::event_aligned_mesh(0.0, 1.0, 4, 0.5, {0.3});
  REQUIRE(mesh.size() == 5);
  bool hit = false;
  for (int i = 0; i <= 4; ++i) {
    if (std::abs(mesh[i] - 0.3) < 1e-12) hit = true;
  }
  CHECK(hit);
  const double lo = 0.5 * 0.25, hi = 1.5 * 0.25;
  for (int i = 0; i < 4; ++i) {
    const double len = mesh[i + 1] - mesh[i];
    CHECK(len >= lo);
    CHECK(len <= hi);
  }
}

TEST_CASE("event_aligned_mesh respects bounds when events are infeasible") {
  // Two events closer together than the minimum interval width: only one can
  // receive a node, and every interval must stay inside the bounds.
  const Eigen::VectorXd mesh =
      irm::event_aligned_mesh(0.0, 1.0, 4, 0.2, {0.5, 0.55});
  REQUIRE(mesh.size() == 5);
  CHECK(mesh[0] == doctest::Approx(0.0));
  CHECK(mesh[4] == doctest::Approx(1.0));
  const double lo = 0.8 * 0.25, hi = 1.2 * 0.25;
  for (int i = 0; i < 4; ++i) {
    const double len = mesh[i + 1] - mesh[i];
    CHECK(len >= lo - 1e-12);
    CHECK(len <= hi + 1e-12);
  }
}

TEST_CASE("event_aligned_mesh bound property over random event sets") {
  std::srand(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + std::rand() % 10;
    const double phi = 0.1 + 0.8 * (std::rand() % 100) / 100.0;
    std::vector<double> events;
    const int m = std::rand() % 5;
    for (int j = 0; j < m; ++j) {
      events.push_back(2.0 * (std::rand() % 1000) / 1000.0);
    }
    const Eigen::VectorXd mesh =
        irm::event_aligned_mesh(0.0, 2.0, n, phi, events);
    REQUIRE(mesh.size() == n + 1);
    CHECK(mesh[0] == doctest::Approx(0.0));
    CHECK(mesh[n] == doctest::Approx(2.0));
    const double hbar = 2.0 / n;
    for (int i = 0; i < n; ++i) {
      const double len = mesh[i + 1] - mesh[i];
      CHECK(len >= (1.0 - phi) * hbar - 1e-12);
      CHECK(len <= (1.0 + phi) * hbar + 1e-12);
    }
  }
}

TEST_CASE("interpolate_decision reproduces the simulated trajectory") {
  const irm::BenchmarkCase bc = irm::exp_decay();
  irm::SwitchingControl none;
  Eigen::VectorXd x0(1);
  x0[0] = 1.0;
  const auto traj = irm::simulate_switching(bc.problem, none, x0, 4000);

  irm::MeshConfig mc = bc.default_mesh;
  mc.n_intervals = 4;
  mc.flexible = true;
  const irm::TranscribedNlp nlp(bc.problem, bc.boundary, mc);
  Eigen::VectorXd nodes(5);
  nodes << 0.0, 0.8, 1.5, 2.3, 3.0;
  const Eigen::VectorXd z0 = irm::interpolate_decision(nlp, traj, none, nodes);

  // Mesh block carries the requested interior nodes.
  const auto& lay = nlp.layout();
  for (int i = 1; i < 4; ++i) {
    CHECK(z0[lay.mesh_index(i)] == doctest::Approx(nodes[i]));
  }
  // The seeded trajectory is close to the exact solution, so its normalized
  // residual is already small before any optimization.
  CHECK(nlp.eps_r_of(z0) < 1e-6);
  CHECK(irm::solve(nlp, z0).iterations < irm::solve(nlp, nlp.cold_start()).iterations);
}
