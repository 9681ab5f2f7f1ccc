#ifndef IRMESH_CONVERGENCE_HPP_
#define IRMESH_CONVERGENCE_HPP_

#include <string>
#include <vector>

namespace irm {

/// One solved (scheme, N) pair in a convergence sweep.
struct ConvergenceRow {
  std::string scheme;  // "fixed" or "flexible"
  int n = 0;
  double eps_r = 0.0;
  double eps_q = 0.0;
  double wall_time_s = 0.0;
  double wall_time_norm = 0.0;
  int iterations = 0;
  std::string status;
};

/// Least-squares fit of log(eps_r) = log K + p log((tf - t0) / N) over
/// converged rows with N >= fit_floor.
struct OrderFit {
  double p = 0.0;
  double log_k = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

OrderFit fit_order(const std::vector<ConvergenceRow>& rows,
                   const std::string& scheme, double horizon, int fit_floor);

/// Fills wall_time_norm = wall_time_s / max over all rows.
void normalize_wall_times(std::vector<ConvergenceRow>& rows);

/// CSV with header scheme,N,eps_r,eps_q,wall_time_s,wall_time_norm,
/// iterations,status; 17 significant digits, no footer.
void write_convergence_csv(const std::vector<ConvergenceRow>& rows,
                           const std::string& path);
std::vector<ConvergenceRow> read_convergence_csv(const std::string& path);

}  // namespace irm

#endif  // IRMESH_CONVERGENCE_HPP_
