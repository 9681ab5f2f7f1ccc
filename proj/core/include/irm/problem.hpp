#ifndef IRMESH_PROBLEM_HPP_
#define IRMESH_PROBLEM_HPP_

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "irm/dual.hpp"

namespace irm {

/// Dynamics-shaped callable: out = F(xdot, x, u, t).
template <class S>
using DaeFn = std::function<void(std::span<const S> xdot, std::span<const S> x,
                                 std::span<const S> u, const S& t,
                                 std::span<S> out)>;

/// Boundary callable: out = Psi(x(t0), x(tf), t0, tf).
template <class S>
using BoundaryFn = std::function<void(std::span<const S> x0,
                                      std::span<const S> xf, double t0,
                                      double tf, std::span<S> out)>;

/// The continuous feasibility problem: find (x, u) on [t0, tf] with
/// F(xdot, x, u, t) = 0, G(xdot, x, u, t) <= 0 componentwise, and boundary
/// relations Psi_E = 0, Psi_I <= 0. Immutable once built; callables are
/// stored in both a real and a dual-number instantiation so the same
/// definition serves evaluation and differentiation.
struct DynamicsProblem {
  int n_x = 0;  // differential states
  int n_u = 0;  // algebraic / control variables
  int n_f = 0;  // rows of F
  int n_g = 0;  // rows of G
  int n_e = 0;  // rows of Psi_E
  int n_i = 0;  // rows of Psi_I
  double t0 = 0.0;
  double tf = 0.0;
  std::string name;

  DaeFn<double> dynamics;
  DaeFn<Dual> dynamics_dual;
  DaeFn<double> path;
  DaeFn<Dual> path_dual;
  BoundaryFn<double> boundary_eq;
  BoundaryFn<Dual> boundary_eq_dual;
  BoundaryFn<double> boundary_ineq;
  BoundaryFn<Dual> boundary_ineq_dual;

  template <class S>
  const DaeFn<S>& dyn() const {
    if constexpr (std::is_same_v<S, double>) return dynamics;
    else return dynamics_dual;
  }
  template <class S>
  const DaeFn<S>& path_fn() const {
    if constexpr (std::is_same_v<S, double>) return path;
    else return path_dual;
  }
};

/// Installs a scalar-generic callable as both instantiations.
template <class P, class F>
void set_dynamics(P& p, F f) {
  p.dynamics = f;
  p.dynamics_dual = f;
}
template <class P, class F>
void set_path(P& p, F f) {
  p.path = f;
  p.path_dual = f;
}
template <class P, class F>
void set_boundary_eq(P& p, F f) {
  p.boundary_eq = f;
  p.boundary_eq_dual = f;
}
template <class P, class F>
void set_boundary_ineq(P& p, F f) {
  p.boundary_ineq = f;
  p.boundary_ineq_dual = f;
}

/// Endpoint state values pinned directly into the decision vector.
struct BoundaryValues {
  std::optional<Eigen::VectorXd> x0;
  std::optional<Eigen::VectorXd> xf;
};

struct ValidationReport {
  bool valid = true;
  std::vector<std::string> issues;   // fatal inconsistencies
  std::vector<std::string> warnings; // e.g. non-finite probe output
};

/// Probes all callables with zero vectors at t0 and checks declared
/// dimensions against actual output lengths.
ValidationReport validate(const DynamicsProblem& p);

}  // namespace irm

#endif  // IRMESH_PROBLEM_HPP_
