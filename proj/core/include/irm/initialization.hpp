#ifndef IRMESH_INITIALIZATION_HPP_
#define IRMESH_INITIALIZATION_HPP_

#include <Eigen/Core>
#include <vector>

#include "irm/problem.hpp"
#include "irm/transcription.hpp"

namespace irm {

/// Piecewise-constant control: channel j holds sign(j) * amplitude and flips
/// sign at each of its switch times. Used to seed solves of problems whose
/// residual minimizers ride the control bounds (bang-bang structure).
struct SwitchingControl {
  double amplitude = 1.0;
  std::vector<int> initial_sign;                  // +1 or -1 per channel
  std::vector<std::vector<double>> switch_times;  // sorted, per channel

  int num_channels() const { return static_cast<int>(initial_sign.size()); }
  Eigen::VectorXd eval(double t) const;
  /// All switch times strictly inside (t0, tf), sorted, with near-duplicate
  /// times (within tol) merged.
  std::vector<double> interior_switches(double t0, double tf,
                                        double tol = 1e-9) const;
};

/// Dense state samples from an explicit integration; state(t) interpolates
/// linearly between stored samples.
struct SimulatedTrajectory {
  std::vector<double> ts;               // strictly increasing
  std::vector<Eigen::VectorXd> xs;      // one state per time
  Eigen::VectorXd state(double t) const;
};

/// RK4 integration of the differential rows of the problem under the given
/// switching control. Row r of F must have semi-explicit form xd_r - f_r for
/// r < n_x (algebraic rows beyond n_x are ignored). Integration restarts at
/// every control switch so each RK4 span sees smooth dynamics; `steps` sets
/// the total step budget, distributed over the smooth spans by length.
SimulatedTrajectory simulate_switching(const DynamicsProblem& problem,
                                       const SwitchingControl& control,
                                       const Eigen::VectorXd& x0, int steps);

/// Sum of squared mismatches between the integrated terminal state and the
/// pinned terminal boundary values.
double terminal_miss(const DynamicsProblem& problem,
                     const BoundaryValues& boundary,
                     const SwitchingControl& control, int steps);

/// Nelder-Mead refinement of all switch times (initial signs and amplitude
/// fixed) to minimize terminal_miss at the problem's fixed final time.
SwitchingControl refine_switch_times(const DynamicsProblem& problem,
                                     const BoundaryValues& boundary,
                                     SwitchingControl seed, int sim_steps = 600,
                                     int max_evals = 1200);

/// Enumerates all 2^n_u initial-sign patterns with `switches_per_channel`
/// uniformly seeded switch times, refines each coarsely, then re-refines the
/// best pattern; returns the control with the smallest terminal miss.
SwitchingControl best_switching_control(const DynamicsProblem& problem,
                                        const BoundaryValues& boundary,
                                        double amplitude,
                                        int switches_per_channel = 2);

/// An (n+1)-node mesh on [t0, tf] whose nodes land exactly on as many of the
/// event times as the flexible-mesh interval bounds (1 +- phi) hbar permit.
/// Subsets of events are enumerated; a subset is kept when every segment
/// between consecutive kept events splits into sub-intervals with lengths
/// inside the bounds and the counts sum to n. Dropped events pull the nearest
/// interior node as close as the bounds allow. `weights` (default uniform)
/// scores candidate meshes by weighted event-to-nearest-node distance.
Eigen::VectorXd event_aligned_mesh(double t0, double tf, int n, double phi,
                                   std::vector<double> events,
                                   std::vector<double> weights = {});

/// Decision vector for `nlp` holding the simulated states interpolated onto
/// the state supports of `nodes`, the switching control sampled at the
/// control supports (samples nudged toward the interval midpoint so interval
/// ownership, not the node itself, decides the side of a switch), and the
/// interior nodes themselves when the mesh is flexible.
Eigen::VectorXd interpolate_decision(const TranscribedNlp& nlp,
                                     const SimulatedTrajectory& trajectory,
                                     const SwitchingControl& control,
                                     const Eigen::VectorXd& nodes);

}  // namespace irm

#endif  // IRMESH_INITIALIZATION_HPP_
