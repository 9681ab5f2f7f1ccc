#include "irm/problems.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "irm/initialization.hpp"

namespace irm {
namespace {

// Integral of sqrt((c t)^2 + eps^2) dt from 0 to T: the work accumulated
// over a bang phase where |u x2| grows linearly as c t.
double ramp_work(double c, double eps, double T) {
  const double cT = c * T;
  return 0.5 * T * std::hypot(cT, eps) +
         eps * eps / (2.0 * c) * std::asinh(cT / eps);
}

}  // namespace

BenchmarkCase exp_decay(const Config& cfg) {
  const double t_final = cfg.get_double("t_final").value_or(3.0);
  BenchmarkCase bc;
  auto& p = bc.problem;
  p.name = "exp_decay";
  p.n_x = 1;
  p.n_u = 0;
  p.n_f = 1;
  p.t0 = 0.0;
  p.tf = t_final;
  set_dynamics(p, [](auto xd, auto x, auto /*u*/, const auto& /*t*/, auto out) {
    out[0] = xd[0] + x[0];
  });
  bc.boundary.x0 = Eigen::VectorXd::Ones(1);
  bc.default_mesh = MeshConfig{.n_intervals = 10,
                               .phi = 0.5,
                               .deg_state = 3,
                               .deg_control = 0,
                               .quad_order = 6,
                               .flexible = false};
  bc.ref_state = [](double t) {
    return Eigen::VectorXd::Constant(1, std::exp(-t));
  };
  return bc;
}

double block_move_switch_time(double u_max) {
  if (u_max < 4.0) {
    throw std::invalid_argument(
        "block_move: u_max < 4 leaves no real switch time");
  }
  return 0.5 * (1.0 - std::sqrt(1.0 - 4.0 / u_max));
}

double block_move_work(double u_max) {
  const double ts = block_move_switch_time(u_max);
  return u_max * u_max * ts * ts;
}

double block_move_smoothed_work(double u_max, double smoothing_eps) {
  const double ts = block_move_switch_time(u_max);
  return 2.0 * ramp_work(u_max * u_max, smoothing_eps, ts) +
         smoothing_eps * (1.0 - 2.0 * ts);
}

BenchmarkCase block_move(const Config& cfg) {
  const double u_max = cfg.get_double("u_max").value_or(8.0);
  const double eps = cfg.get_double("smoothing_eps").value_or(1e-6);
  const double ts = block_move_switch_time(u_max);

  BenchmarkCase bc;
  auto& p = bc.problem;
  p.name = "block_move";
  p.n_x = 3;  // position, velocity, accumulated work
  p.n_u = 1;
  p.n_f = 3;
  p.n_g = 2;
  p.t0 = 0.0;
  p.tf = 1.0;
  set_dynamics(p, [eps](auto xd, auto x, auto u, const auto& /*t*/, auto out) {
    out[0] = xd[0] - x[1];
    out[1] = xd[1] - u[0];
    out[2] = xd[2] - smooth_abs(u[0] * x[1], eps);
  });
  set_path(p, [u_max](auto /*xd*/, auto /*x*/, auto u, const auto& /*t*/,
                      auto out) {
    out[0] = u[0] - u_max;
    out[1] = -u[0] - u_max;
  });
  bc.boundary.x0 = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd xf(3);
  xf << 1.0, 0.0, block_move_smoothed_work(u_max, eps);
  bc.boundary.xf = xf;
  bc.default_mesh = MeshConfig{.n_intervals = 8,
                               .phi = 0.5,
                               .deg_state = 2,
                               .deg_control = 1,
                               .quad_order = 0,
                               .flexible = false};
  bc.event_times = {ts, 1.0 - ts};

  bc.ref_state = [u_max, eps, ts](double t) {
    Eigen::VectorXd x(3);
    const double v = u_max * ts;  // coast velocity
    const double c = u_max * u_max;
    if (t <= ts) {
      x[0] = 0.5 * u_max * t * t;
      x[1] = u_max * t;
      x[2] = ramp_work(c, eps, t);
    } else if (t <= 1.0 - ts) {
      x[0] = 0.5 * u_max * ts * ts + v * (t - ts);
      x[1] = v;
      x[2] = ramp_work(c, eps, ts) + eps * (t - ts);
    } else {
      const double s = t - (1.0 - ts);  // time into the braking phase
      x[0] = 1.0 - 0.5 * u_max * (ts - s) * (ts - s);
      x[1] = v - u_max * s;
      x[2] = block_move_smoothed_work(u_max, eps) -
             ramp_work(c, eps, ts - s);
    }
    return x;
  };
  bc.ref_control = [u_max, ts](double t) {
    double u = 0.0;
    if (t < ts) u = u_max;
    if (t > 1.0 - ts) u = -u_max;
    return Eigen::VectorXd::Constant(1, u);
  };
  return bc;
}

BenchmarkCase satellite(const Config& cfg) {
  const std::vector<std::string> required = {"inertia_xx", "inertia_yy",
                                             "inertia_zz"};
  const double ixx = cfg.require_double("inertia_xx", required);
  const double iyy = cfg.require_double("inertia_yy", required);
  const double izz = cfg.require_double("inertia_zz", required);
  const double u_max = cfg.get_double("u_max").value_or(50.0);
  const double t_final = cfg.get_double("t_final").value_or(28.630408);
  const double rot_deg = cfg.get_double("rotation_deg").value_or(150.0);

  BenchmarkCase bc;
  auto& p = bc.problem;
  p.name = "satellite";
  p.n_x = 7;  // quaternion (vector first, scalar last) + body rates
  p.n_u = 3;
  p.n_f = 8;  // 7 differential rows + unit-norm algebraic row
  p.n_g = 6;
  p.t0 = 0.0;
  p.tf = t_final;
  set_dynamics(p, [ixx, iyy, izz](auto xd, auto x, auto u, const auto& /*t*/,
                                  auto out) {
    const auto& q1 = x[0];
    const auto& q2 = x[1];
    const auto& q3 = x[2];
    const auto& q4 = x[3];
    const auto& w1 = x[4];
    const auto& w2 = x[5];
    const auto& w3 = x[6];
    out[0] = xd[0] - 0.5 * (w1 * q4 - w2 * q3 + w3 * q2);
    out[1] = xd[1] - 0.5 * (w1 * q3 + w2 * q4 - w3 * q1);
    out[2] = xd[2] - 0.5 * (-w1 * q2 + w2 * q1 + w3 * q4);
    out[3] = xd[3] - 0.5 * (-w1 * q1 - w2 * q2 - w3 * q3);
    out[4] = xd[4] - (u[0] + (iyy - izz) * w2 * w3) / ixx;
    out[5] = xd[5] - (u[1] + (izz - ixx) * w3 * w1) / iyy;
    out[6] = xd[6] - (u[2] + (ixx - iyy) * w1 * w2) / izz;
    out[7] = q1 * q1 + q2 * q2 + q3 * q3 + q4 * q4 - 1.0;
  });
  set_path(p, [u_max](auto /*xd*/, auto /*x*/, auto u, const auto& /*t*/,
                      auto out) {
    out[0] = u[0] - u_max;
    out[1] = -u[0] - u_max;
    out[2] = u[1] - u_max;
    out[3] = -u[1] - u_max;
    out[4] = u[2] - u_max;
    out[5] = -u[2] - u_max;
  });

  const double half_angle = 0.5 * rot_deg * std::numbers::pi / 180.0;
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(7);
  x0[3] = 1.0;  // identity attitude, at rest
  Eigen::VectorXd xf = Eigen::VectorXd::Zero(7);
  xf[0] = std::sin(half_angle);
  xf[3] = std::cos(half_angle);
  bc.boundary.x0 = x0;
  bc.boundary.xf = xf;
  bc.default_mesh = MeshConfig{.n_intervals = 15,
                               .phi = 0.5,
                               .deg_state = 4,
                               .deg_control = 1,
                               .quad_order = 7,
                               .flexible = false};
  // No closed-form solution; the torque switch times are found numerically
  // by the shooting seed below, not published as reference data.

  // Start-point hook: the time-optimal maneuver is bang-bang on all three
  // torque channels, and a cold start stalls in the single-axis subspace
  // (u2 = u3 = 0 is invariant under the solver's descent, but rate-limited
  // single-axis slewing cannot finish inside the horizon). A shooting-refined
  // switching control escapes that basin; the expensive search runs once and
  // is reused for every mesh built from this case.
  struct SeedCache {
    bool ready = false;
    SwitchingControl control;
    SimulatedTrajectory trajectory;
    std::vector<double> switches;
    std::vector<double> weights;
  };
  auto cache = std::make_shared<SeedCache>();
  const DynamicsProblem prob = bc.problem;
  const BoundaryValues bounds = bc.boundary;
  bc.initial_guess = [prob, bounds, u_max, ixx, iyy, izz,
                      cache](const TranscribedNlp& nlp) {
    if (!cache->ready) {
      cache->control = best_switching_control(prob, bounds, u_max, 2);
      cache->trajectory =
          simulate_switching(prob, cache->control, *bounds.x0, 20000);
      const std::array<double, 3> inertia = {ixx, iyy, izz};
      for (int j = 0; j < cache->control.num_channels(); ++j) {
        for (double s : cache->control.switch_times[j]) {
          if (s <= prob.t0 || s >= prob.tf) continue;
          cache->switches.push_back(s);
          // A missed switch costs residual ~ (step height / inertia)^2.
          cache->weights.push_back(std::pow(2.0 * u_max / inertia[j], 2));
        }
      }
      cache->ready = true;
    }
    const MeshConfig& mc = nlp.mesh_config();
    Eigen::VectorXd nodes;
    if (mc.flexible) {
      nodes = event_aligned_mesh(prob.t0, prob.tf, mc.n_intervals, mc.phi,
                                 cache->switches, cache->weights);
    } else {
      nodes = Eigen::VectorXd::LinSpaced(mc.n_intervals + 1, prob.t0, prob.tf);
    }
    return interpolate_decision(nlp, cache->trajectory, cache->control, nodes);
  };
  return bc;
}

std::vector<std::string> benchmark_names() {
  return {"exp_decay", "block_move", "satellite"};
}

BenchmarkCase make_benchmark(const std::string& name, const Config& cfg) {
  if (name == "exp_decay") return exp_decay(cfg);
  if (name == "block_move") return block_move(cfg);
  if (name == "satellite") return satellite(cfg);
  throw std::out_of_range("unknown benchmark: " + name);
}

}  // namespace irm
