#ifndef IRMESH_TRANSCRIPTION_HPP_
#define IRMESH_TRANSCRIPTION_HPP_

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

#include "irm/basis.hpp"
#include "irm/problem.hpp"
#include "irm/quadrature.hpp"

namespace irm {

/// Discretisation parameters: N intervals, state/control polynomial degrees,
/// quadrature order and mesh flexibility.
struct MeshConfig {
  int n_intervals = 1;   // N >= 1
  double phi = 0.0;      // flexibility, in [0, 1); ignored when !flexible
  int deg_state = 3;     // a >= 1
  int deg_control = 0;   // b >= 0
  int quad_order = 0;    // Q; 0 selects the default a + 3
  bool flexible = false;

  int effective_quad_order() const {
    return quad_order > 0 ? quad_order : deg_state + 3;
  }
};

/// Flat decision-vector layout. State nodal values are shared across
/// interval boundaries (continuity by construction) and pinned boundary
/// values are eliminated rather than constrained.
struct DecisionLayout {
  int n_x = 0, n_u = 0;
  int n_intervals = 0;
  int deg_state = 1, deg_control = 0;
  bool flexible = false;

  // Per state dimension, N*a + 1 shared nodal slots: variable index or -1.
  std::vector<int> state_var;
  std::vector<double> state_pin;  // pinned value where state_var == -1
  int control_offset = 0;         // controls: dense block, always free
  int mesh_offset = 0;            // N - 1 interior nodes when flexible
  int total = 0;

  int state_nodes() const { return n_intervals * deg_state + 1; }
  int state_slot(int dim, int node) const { return dim * state_nodes() + node; }
  int control_index(int dim, int interval, int j) const {
    return control_offset +
           dim * n_intervals * (deg_control + 1) +
           interval * (deg_control + 1) + j;
  }
  int mesh_index(int interior_node) const {  // interior_node in [1, N-1]
    return mesh_offset + interior_node - 1;
  }
};

/// Piecewise-polynomial solution: continuous state, possibly discontinuous
/// control. Control evaluation at interior nodes is right-continuous; the
/// left limit is available separately.
struct Trajectory {
  Eigen::VectorXd nodes;  // strictly increasing, length N + 1
  int n_x = 0, n_u = 0;
  int deg_control = 0;
  std::vector<SupportSet> state_supports;
  std::vector<Eigen::MatrixXd> state_values;    // per interval, n_x x (a+1)
  std::vector<SupportSet> control_supports;     // empty when deg_control == 0
  std::vector<Eigen::MatrixXd> control_values;  // per interval, n_u x (b+1)

  int num_intervals() const { return static_cast<int>(nodes.size()) - 1; }
  int interval_of(double t, bool from_left = false) const;
  Eigen::VectorXd state(double t) const;
  Eigen::VectorXd state_deriv(double t) const;
  Eigen::VectorXd control(double t, bool from_left = false) const;
};

enum class SolveStatus {
  converged,
  max_iter,
  infeasible_constraints,
  quadrature_unverified,
};

std::string to_string(SolveStatus s);

struct SolveReport {
  double eps_r = 0.0;
  double eps_q = 0.0;
  int nlp_iterations = 0;
  double wall_time_s = 0.0;
  Eigen::VectorXd mesh;
  SolveStatus status = SolveStatus::max_iter;
  double constraint_violation = 0.0;
};

/// Uniform time mesh t_i = t0 + i (tf - t0) / N, length N + 1.
Eigen::VectorXd uniform_mesh(double t0, double tf, int n_intervals);

/// The finite NLP produced from a problem and a mesh: quadrature-discretised
/// integrated-residual objective, path/boundary/mesh constraints, and the
/// derivative structure the solver consumes. Read-only during a solve.
class TranscribedNlp {
 public:
  TranscribedNlp(DynamicsProblem problem, BoundaryValues boundary,
                 MeshConfig mesh);

  const DynamicsProblem& problem() const { return problem_; }
  const MeshConfig& mesh_config() const { return mesh_; }
  const DecisionLayout& layout() const { return layout_; }

  /// Zero state/control blocks, uniform mesh block.
  Eigen::VectorXd cold_start() const;

  double objective(Eigen::Ref<const Eigen::VectorXd> z) const;
  void objective_gradient(Eigen::Ref<const Eigen::VectorXd> z,
                          Eigen::Ref<Eigen::VectorXd> grad) const;

  int num_ineq() const { return num_ineq_; }
  int num_eq() const { return problem_.n_e; }
  void eval_ineq(Eigen::Ref<const Eigen::VectorXd> z,
                 Eigen::Ref<Eigen::VectorXd> out) const;
  void eval_eq(Eigen::Ref<const Eigen::VectorXd> z,
               Eigen::Ref<Eigen::VectorXd> out) const;
  /// grad += J_ineq(z)^T v
  void add_ineq_jtv(Eigen::Ref<const Eigen::VectorXd> z,
                    Eigen::Ref<const Eigen::VectorXd> v,
                    Eigen::Ref<Eigen::VectorXd> grad) const;
  /// grad += J_eq(z)^T v
  void add_eq_jtv(Eigen::Ref<const Eigen::VectorXd> z,
                  Eigen::Ref<const Eigen::VectorXd> v,
                  Eigen::Ref<Eigen::VectorXd> grad) const;

  /// Realized mesh nodes (from z when flexible, else the uniform mesh).
  Eigen::VectorXd mesh_nodes(Eigen::Ref<const Eigen::VectorXd> z) const;
  /// True when node ordering holds with every interval length positive.
  bool mesh_ordered(Eigen::Ref<const Eigen::VectorXd> z) const;
  /// With flexible phi == 0 the feasible mesh is the uniform point; this
  /// resets the mesh block to it. No-op otherwise.
  void project_mesh(Eigen::Ref<Eigen::VectorXd> z) const;
  /// Mesh variable gradient components are masked when phi == 0 (the mesh
  /// block is pinned by projection).
  bool mesh_pinned() const { return mesh_.flexible && mesh_.phi == 0.0; }

  /// Diagonal of the Gauss-Newton Hessian approximation of the objective,
  /// 2 sum_k w_k sum_r (dF_r/dz_j)^2. Used to precondition the solver.
  void objective_gn_diagonal(Eigen::Ref<const Eigen::VectorXd> z,
                             Eigen::Ref<Eigen::VectorXd> out) const;
  /// out_j += sum_r w_r (dg_r/dz_j)^2 over inequality rows with w_r != 0.
  void add_ineq_gn_diagonal(Eigen::Ref<const Eigen::VectorXd> z,
                            Eigen::Ref<const Eigen::VectorXd> w,
                            Eigen::Ref<Eigen::VectorXd> out) const;
  /// out_j += sum_r w_r (dh_r/dz_j)^2 over equality rows.
  void add_eq_gn_diagonal(Eigen::Ref<const Eigen::VectorXd> z,
                          Eigen::Ref<const Eigen::VectorXd> w,
                          Eigen::Ref<Eigen::VectorXd> out) const;

  /// Normalized integrated residual: objective / ((tf - t0) * N_F).
  double eps_r_of(Eigen::Ref<const Eigen::VectorXd> z) const;
  /// Quadrature error of the normalized residual: the change in eps_r when
  /// the quadrature order is raised from Q to multiplier*Q on the same z.
  double quadrature_error(Eigen::Ref<const Eigen::VectorXd> z,
                          int multiplier = 2) const;

  Trajectory extract_trajectory(Eigen::Ref<const Eigen::VectorXd> z) const;

 private:
  template <class View>
  typename View::Scalar interval_objective(const View& zv, int interval,
                                           const QuadratureRule& rule) const;
  template <class View>
  void interval_gn_lanes(const View& zv, int interval,
                         const QuadratureRule& rule, double* lanes) const;
  template <class View>
  void path_rows_at(const View& zv, int interval, int support,
                    std::span<typename View::Scalar> out) const;
  template <class View>
  void boundary_states(const View& zv,
                       std::vector<typename View::Scalar>& x0,
                       std::vector<typename View::Scalar>& xf) const;
  template <class View>
  typename View::Scalar node_time(const View& zv, int node) const;

  double objective_with_rule(Eigen::Ref<const Eigen::VectorXd> z,
                             const QuadratureRule& rule) const;

  const std::vector<int>& interval_deps(int interval) const;

  DynamicsProblem problem_;
  BoundaryValues boundary_;
  MeshConfig mesh_;
  DecisionLayout layout_;

  Eigen::VectorXd uniform_nodes_;       // N + 1
  Eigen::VectorXd state_ref_;           // LGL nodes, degree a
  Eigen::VectorXd state_ref_w_;         // barycentric weights on [-1, 1]
  Eigen::VectorXd control_ref_;         // LGL nodes, degree b (b >= 1)
  Eigen::VectorXd control_ref_w_;
  Eigen::VectorXd union_ref_;           // union of state/control supports
  int quad_order_ = 0;

  int num_path_rows_ = 0;
  int num_mesh_rows_ = 0;
  int num_ineq_ = 0;
  std::vector<std::vector<int>> interval_deps_;  // free vars per interval
  std::vector<int> boundary_deps_;               // free boundary state vars
};

/// Convenience factory mirroring the (problem, boundary, mesh) contract.
inline TranscribedNlp build(DynamicsProblem p, BoundaryValues bv, MeshConfig m) {
  return TranscribedNlp(std::move(p), std::move(bv), std::move(m));
}

/// CSV export: header t,x1..,u1.., M uniform samples per interval plus both
/// one-sided control limits at interior nodes. Values use 17 significant
/// digits.
void write_trajectory_csv(const Trajectory& traj, const std::string& path,
                          int samples_per_interval = 20);

/// Plain text, one node per line.
void write_mesh_file(const Eigen::VectorXd& nodes, const std::string& path);

}  // namespace irm

#endif  // IRMESH_TRANSCRIPTION_HPP_
