#ifndef IRMESH_NLP_HPP_
#define IRMESH_NLP_HPP_

#include <Eigen/Core>
#include <string>

#include "irm/transcription.hpp"

namespace irm {

struct SolverOptions {
  double rel_tol = 1e-8;        // gradient tolerance, relative to max(1, |f|)
  int max_outer = 50;           // augmented-Lagrangian iterations
  int max_inner = 500;          // quasi-Newton iterations per outer step
  double initial_penalty = 10.0;
  double penalty_growth = 10.0;
  double constraint_tol = 1e-8;
  int lbfgs_memory = 10;
  std::string log_path;         // structured per-iteration log when nonempty
};

enum class NlpStatus { converged, max_iter, infeasible };

struct NlpSolution {
  Eigen::VectorXd z;
  Eigen::VectorXd lambda_eq;
  Eigen::VectorXd lambda_ineq;
  NlpStatus status = NlpStatus::max_iter;
  int iterations = 0;         // total inner iterations
  double kkt_residual = 0.0;  // inf-norm of the Lagrangian gradient
  double objective = 0.0;
  double constraint_violation = 0.0;
};

/// Augmented-Lagrangian solve of the transcribed NLP from z0.
/// Throws std::invalid_argument when the objective is not finite at z0 or
/// the z0 mesh block is degenerate. Returns the best iterate found when the
/// iteration limits are reached.
NlpSolution solve(const TranscribedNlp& nlp, Eigen::VectorXd z0,
                  const SolverOptions& opts = {});

struct DrivenSolve {
  NlpSolution nlp;
  SolveReport report;
};

/// Solve from a caller-supplied start point plus the raised-order quadrature
/// check. Wall time covers the NLP solve only. A converged solve whose
/// quadrature error exceeds quad_tol_factor * max(1, eps_r) is reported
/// quadrature-unverified.
DrivenSolve run_solve_from(const TranscribedNlp& nlp, Eigen::VectorXd z0,
                           const SolverOptions& opts = {},
                           double quad_tol_factor = 1e-10,
                           int quad_multiplier = 2);

/// run_solve_from starting at the all-zeros decision vector.
DrivenSolve run_cold_solve(const TranscribedNlp& nlp,
                           const SolverOptions& opts = {},
                           double quad_tol_factor = 1e-10,
                           int quad_multiplier = 2);

}  // namespace irm

#endif  // IRMESH_NLP_HPP_
