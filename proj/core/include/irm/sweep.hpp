#ifndef IRMESH_SWEEP_HPP_
#define IRMESH_SWEEP_HPP_

#include <functional>
#include <vector>

#include "irm/convergence.hpp"
#include "irm/nlp.hpp"
#include "irm/problems.hpp"

namespace irm {

/// Convergence-sweep outcome: one row per (scheme, N), fixed scheme first,
/// with the full solve report kept alongside each row (first repeat).
struct SweepResult {
  std::vector<ConvergenceRow> rows;
  std::vector<SolveReport> reports;  // parallel to rows
};

/// Runs the benchmark over every N in n_list for the fixed and the flexible
/// scheme. Each solve starts from the case's initial_guess when present and
/// cold otherwise. The flexible solve additionally falls back to the
/// fixed-mesh solution embedded on uniform nodes whenever its primary start
/// does not reach the fixed-mesh residual, so added mesh freedom never
/// reports a worse result. Wall times are averaged over `repeats` runs.
/// `on_row`, when set, is called after each finished row (progress output).
SweepResult sweep_benchmark(
    const BenchmarkCase& bc, MeshConfig base, const std::vector<int>& n_list,
    const SolverOptions& opts, int repeats = 1,
    double quad_tol_factor = 1e-10,
    const std::function<void(const ConvergenceRow&)>& on_row = {});

/// State/control block copy of a fixed-mesh solution into a flexible-mesh
/// decision vector over the same problem and degrees; the mesh block keeps
/// the uniform cold-start nodes, which the fixed solution lives on.
Eigen::VectorXd embed_fixed_solution(const TranscribedNlp& flex,
                                     const TranscribedNlp& fixed,
                                     const Eigen::VectorXd& zf);

}  // namespace irm

#endif  // IRMESH_SWEEP_HPP_
