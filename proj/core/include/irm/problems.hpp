#ifndef IRMESH_PROBLEMS_HPP_
#define IRMESH_PROBLEMS_HPP_

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "irm/config.hpp"
#include "irm/problem.hpp"
#include "irm/transcription.hpp"

namespace irm {

/// A built-in problem with boundary data, a sensible default mesh, and
/// analytic reference trajectories where they exist.
struct BenchmarkCase {
  DynamicsProblem problem;
  BoundaryValues boundary;
  MeshConfig default_mesh;
  std::function<Eigen::VectorXd(double)> ref_state;    // null when unknown
  std::function<Eigen::VectorXd(double)> ref_control;  // null when unknown
  std::vector<double> event_times;  // discontinuity locations, if known
  /// Optional problem-specific start point for the given transcription;
  /// null means cold start. Expensive precomputation (e.g. a shooting-based
  /// seed trajectory) is cached inside the callable across invocations.
  std::function<Eigen::VectorXd(const TranscribedNlp&)> initial_guess;
};

/// xdot = -x on [0, t_final], x(0) = 1; reference x(t) = exp(-t).
/// Config keys (all optional): t_final (default 3).
BenchmarkCase exp_decay(const Config& cfg = {});

/// Minimum-work block move posed as a feasibility problem: the work state is
/// pinned at its analytic optimum so the bang-off-bang control is the
/// target. Config keys: u_max (default 8), smoothing_eps (default 1e-6).
/// Throws std::invalid_argument when u_max < 4 (no real switch time).
BenchmarkCase block_move(const Config& cfg = {});

/// Bang-off-bang switch time t* = (1 - sqrt(1 - 4/u_max)) / 2.
double block_move_switch_time(double u_max);
/// Analytic minimum work u_max^2 t*^2 (unsmoothed).
double block_move_work(double u_max);
/// Work integral of the smoothed profile; this is what the work state is
/// pinned to (differs from block_move_work by less than smoothing_eps).
double block_move_smoothed_work(double u_max, double smoothing_eps);

/// Rigid-spacecraft reorientation as a quaternion DAE: 7 differential
/// equations plus the unit-norm algebraic row. Rest-to-rest 150 degree
/// rotation about body axis 1, fixed horizon at the known minimum time.
/// Required config keys: inertia_xx, inertia_yy, inertia_zz. Optional:
/// u_max (50), t_final (28.630408), rotation_deg (150).
/// Throws std::runtime_error listing missing required keys.
BenchmarkCase satellite(const Config& cfg);

std::vector<std::string> benchmark_names();
/// Factory by registered name; throws std::out_of_range for unknown names.
BenchmarkCase make_benchmark(const std::string& name, const Config& cfg);

}  // namespace irm

#endif  // IRMESH_PROBLEMS_HPP_
