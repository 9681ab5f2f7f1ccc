#include "irm/nlp.hpp"

#include <cmath>
#include <cstdio>
#include <chrono>
#include <deque>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace irm {
namespace {

struct AlState {
  double value = 0.0;
  double objective = 0.0;
  double violation = 0.0;  // inf-norm of eq residuals and positive ineq parts
  bool valid = false;
};

// Augmented Lagrangian with first-order multiplier handling of inequalities
// through the positive-part form.
class AlFunction {
 public:
  AlFunction(const TranscribedNlp& nlp, const Eigen::VectorXd& lambda_eq,
             const Eigen::VectorXd& lambda_ineq, double penalty)
      : nlp_(nlp),
        lambda_eq_(lambda_eq),
        lambda_ineq_(lambda_ineq),
        mu_(penalty),
        h_(nlp.num_eq()),
        g_(nlp.num_ineq()) {}

  AlState eval(const Eigen::VectorXd& z) {
    AlState st;
    if (!nlp_.mesh_ordered(z)) return st;  // invalid trial point
    st.objective = nlp_.objective(z);
    if (!std::isfinite(st.objective)) return st;
    double val = st.objective;
    if (h_.size() > 0) {
      nlp_.eval_eq(z, h_);
      val += lambda_eq_.dot(h_) + 0.5 * mu_ * h_.squaredNorm();
      st.violation = std::max(st.violation, h_.cwiseAbs().maxCoeff());
    }
    if (g_.size() > 0) {
      nlp_.eval_ineq(z, g_);
      for (Eigen::Index r = 0; r < g_.size(); ++r) {
        // Positive-part term (max(0, lambda + mu g)^2 - lambda^2) / (2 mu),
        // expanded on the active branch to avoid cancellation when lambda
        // is large and g is near zero.
        if (lambda_ineq_[r] + mu_ * g_[r] > 0.0) {
          val += lambda_ineq_[r] * g_[r] + 0.5 * mu_ * g_[r] * g_[r];
        } else {
          val -= 0.5 * lambda_ineq_[r] * lambda_ineq_[r] / mu_;
        }
        st.violation = std::max(st.violation, g_[r]);
      }
      st.violation = std::max(st.violation, 0.0);
    }
    st.value = val;
    st.valid = std::isfinite(val);
    return st;
  }

  void gradient(const Eigen::VectorXd& z, Eigen::VectorXd& grad) {
    nlp_.objective_gradient(z, grad);
    if (h_.size() > 0) {
      nlp_.eval_eq(z, h_);
      Eigen::VectorXd w = lambda_eq_ + mu_ * h_;
      nlp_.add_eq_jtv(z, w, grad);
    }
    if (g_.size() > 0) {
      nlp_.eval_ineq(z, g_);
      Eigen::VectorXd w = (lambda_ineq_ + mu_ * g_).cwiseMax(0.0);
      nlp_.add_ineq_jtv(z, w, grad);
    }
    if (nlp_.mesh_pinned()) {
      const auto& lay = nlp_.layout();
      for (int i = 1; i < lay.n_intervals; ++i) grad[lay.mesh_index(i)] = 0.0;
    }
  }

  // Diagonal Gauss-Newton model of the augmented-Lagrangian Hessian,
  // floored away from zero; used as the quasi-Newton seed matrix.
  void preconditioner(const Eigen::VectorXd& z, Eigen::VectorXd& d) {
    nlp_.objective_gn_diagonal(z, d);
    if (h_.size() > 0) {
      nlp_.eval_eq(z, h_);
      const Eigen::VectorXd w = Eigen::VectorXd::Constant(h_.size(), mu_);
      nlp_.add_eq_gn_diagonal(z, w, d);
    }
    if (g_.size() > 0) {
      nlp_.eval_ineq(z, g_);
      Eigen::VectorXd w(g_.size());
      for (Eigen::Index r = 0; r < g_.size(); ++r) {
        w[r] = (lambda_ineq_[r] + mu_ * g_[r] > 0.0) ? mu_ : 0.0;
      }
      nlp_.add_ineq_gn_diagonal(z, w, d);
    }
    const double floor = std::max(1e-12 * d.maxCoeff(), 1e-12);
    d = d.cwiseMax(floor);
  }

 private:
  const TranscribedNlp& nlp_;
  const Eigen::VectorXd& lambda_eq_;
  const Eigen::VectorXd& lambda_ineq_;
  double mu_;
  Eigen::VectorXd h_, g_;
};

struct LbfgsMemory {
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;  // (s, y)
  int capacity = 10;

  void push(Eigen::VectorXd s, Eigen::VectorXd y) {
    if (static_cast<int>(pairs.size()) == capacity) pairs.pop_front();
    pairs.emplace_back(std::move(s), std::move(y));
  }
  void clear() { pairs.clear(); }

  Eigen::VectorXd direction(const Eigen::VectorXd& grad,
                            const Eigen::VectorXd& precond) const {
    Eigen::VectorXd q = grad;
    const int m = static_cast<int>(pairs.size());
    std::vector<double> alpha(m), rho(m);
    for (int i = m - 1; i >= 0; --i) {
      const auto& [s, y] = pairs[i];
      rho[i] = 1.0 / y.dot(s);
      alpha[i] = rho[i] * s.dot(q);
      q -= alpha[i] * y;
    }
    q = q.cwiseQuotient(precond);
    if (m > 0) {
      const auto& [s, y] = pairs.back();
      q *= s.dot(y) / y.dot(y.cwiseQuotient(precond));
    }
    for (int i = 0; i < m; ++i) {
      const auto& [s, y] = pairs[i];
      const double beta = rho[i] * y.dot(q);
      q += (alpha[i] - beta) * s;
    }
    return -q;
  }
};

constexpr double kSufficientDecrease = 1e-4;
constexpr double kBacktrackFactor = 0.5;
constexpr int kMaxBacktracks = 40;

}  // namespace

NlpSolution solve(const TranscribedNlp& nlp, Eigen::VectorXd z0,
                  const SolverOptions& opts) {
  if (z0.size() != nlp.layout().total) {
    throw std::invalid_argument("solve: z0 length does not match layout");
  }
  nlp.project_mesh(z0);
  if (!nlp.mesh_ordered(z0)) {
    throw std::invalid_argument("solve: z0 mesh block is degenerate");
  }
  if (!std::isfinite(nlp.objective(z0))) {
    throw std::invalid_argument("solve: objective not finite at z0");
  }

  std::ofstream log;
  if (!opts.log_path.empty()) {
    log.open(opts.log_path);
    if (log.is_open()) log << "iteration,objective,violation,step\n";
  }
  const auto log_line = [&](int it, double f, double viol, double step) {
    if (!log.is_open()) return;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", it, f, viol,
                  step);
    log << buf;
  };

  const int n = static_cast<int>(z0.size());
  NlpSolution sol;
  sol.lambda_eq = Eigen::VectorXd::Zero(nlp.num_eq());
  sol.lambda_ineq = Eigen::VectorXd::Zero(nlp.num_ineq());
  sol.z = z0;

  double mu = opts.initial_penalty;
  double prev_viol = std::numeric_limits<double>::infinity();
  Eigen::VectorXd z = std::move(z0);
  Eigen::VectorXd grad(n), grad_new(n);

  double best_score = std::numeric_limits<double>::infinity();
  const auto consider_best = [&](const Eigen::VectorXd& cand, double f,
                                 double viol) {
    // Prefer feasibility, then objective.
    const double score =
        std::max(viol - opts.constraint_tol, 0.0) * 1e6 + f;
    if (score < best_score) {
      best_score = score;
      sol.z = cand;
      sol.objective = f;
      sol.constraint_violation = viol;
    }
  };

  bool kkt_ok = false;
  AlState st;
  const Eigen::VectorXd identity_scale = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd precond = identity_scale;
  // Hybrid scaling: start with the identity metric for the global phase and
  // switch to the Gauss-Newton diagonal once progress stalls (see below).
  bool use_precond = false;
  LbfgsMemory mem;
  mem.capacity = opts.lbfgs_memory;
  bool al_changed = true;  // multipliers or penalty differ from last pass
  bool pc_init = false;
  double stag_ref = std::numeric_limits<double>::infinity();
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    AlFunction al(nlp, sol.lambda_eq, sol.lambda_ineq, mu);
    st = al.eval(z);
    if (!st.valid) break;
    al.gradient(z, grad);
    if (use_precond && (!pc_init || al_changed)) {
      al.preconditioner(z, precond);
      pc_init = true;
    }
    if (al_changed) {
      // The merit function changed, so curvature pairs are stale.
      mem.clear();
    }
    int failures = 0;
    kkt_ok = false;

    for (int it = 0; it < opts.max_inner; ++it) {
      const double gnorm = grad.cwiseAbs().maxCoeff();
      sol.kkt_residual = gnorm;
      if (!use_precond && sol.iterations > 0 && sol.iterations % 200 == 0) {
        // Identity scaling drives the global phase; once it stops making
        // headway on the merit value, the Gauss-Newton diagonal takes over
        // to sort out the differently-scaled variable blocks.
        if (st.value > stag_ref - 1e-3 * std::abs(stag_ref)) {
          use_precond = true;
          al.preconditioner(z, precond);
          mem.clear();
        }
        stag_ref = st.value;
      }
      if (gnorm <= opts.rel_tol * std::max(1.0, std::abs(st.objective))) {
        kkt_ok = true;
        break;
      }
      Eigen::VectorXd dir = mem.direction(grad, precond);
      double slope = dir.dot(grad);
      if (!(slope < 0.0)) {
        mem.clear();
        dir = -grad.cwiseQuotient(precond);
        slope = dir.dot(grad);
      }
      // Cap the first trial so one step never moves further than the
      // current iterate scale; backtracking handles the rest.
      const double trust = std::max(1.0, z.cwiseAbs().maxCoeff());
      double step = std::min(1.0, trust / dir.cwiseAbs().maxCoeff());
      // Absolute slack at the rounding floor of the merit value, so a
      // predicted decrease below double precision does not read as a stall.
      const double noise = 1e-15 * std::max(1.0, std::abs(st.value));
      AlState trial;
      Eigen::VectorXd z_trial;
      bool accepted = false;
      for (int bt = 0; bt < kMaxBacktracks; ++bt) {
        z_trial = z + step * dir;
        nlp.project_mesh(z_trial);
        trial = al.eval(z_trial);
        if (trial.valid &&
            trial.value <=
                st.value + kSufficientDecrease * step * slope + noise) {
          accepted = true;
          break;
        }
        step *= kBacktrackFactor;
      }
      ++sol.iterations;
      if (!accepted) {
        ++failures;
        mem.clear();
        if (failures == 1) {
          if (!use_precond) {
            use_precond = true;  // switch to the scaled metric and retry
          }
          al.preconditioner(z, precond);
          continue;
        }
        break;
      }
      failures = 0;
      al.gradient(z_trial, grad_new);
      Eigen::VectorXd s = z_trial - z;
      Eigen::VectorXd y = grad_new - grad;
      const double sy = s.dot(y);
      if (sy > 1e-12 * s.norm() * y.norm()) {
        mem.push(std::move(s), std::move(y));
      }
      z = std::move(z_trial);
      st = trial;
      grad = grad_new;
      if (use_precond && sol.iterations % 64 == 0) {
        al.preconditioner(z, precond);
      }
      log_line(sol.iterations, st.objective, st.violation, step);
    }

    consider_best(z, st.objective, st.violation);

    if (nlp.num_eq() == 0 && nlp.num_ineq() == 0) {
      sol.status = kkt_ok ? NlpStatus::converged : NlpStatus::max_iter;
      break;
    }
    if (kkt_ok && st.violation <= opts.constraint_tol) {
      sol.status = NlpStatus::converged;
      break;
    }

    // First-order multiplier update.
    al_changed = false;
    if (nlp.num_eq() > 0) {
      Eigen::VectorXd h(nlp.num_eq());
      nlp.eval_eq(z, h);
      Eigen::VectorXd next = sol.lambda_eq + mu * h;
      if (next != sol.lambda_eq) al_changed = true;
      sol.lambda_eq = std::move(next);
    }
    if (nlp.num_ineq() > 0) {
      Eigen::VectorXd g(nlp.num_ineq());
      nlp.eval_ineq(z, g);
      Eigen::VectorXd next = (sol.lambda_ineq + mu * g).cwiseMax(0.0);
      if (next != sol.lambda_ineq) al_changed = true;
      sol.lambda_ineq = std::move(next);
    }
    if (st.violation > opts.constraint_tol &&
        st.violation > 0.25 * prev_viol) {
      mu *= opts.penalty_growth;
      al_changed = true;
    }
    prev_viol = st.violation;
  }

  if (sol.status != NlpStatus::converged) {
    sol.status = (st.valid && st.violation > opts.constraint_tol && kkt_ok)
                     ? NlpStatus::infeasible
                     : NlpStatus::max_iter;
  }
  if (sol.status == NlpStatus::converged) {
    sol.z = z;
    sol.objective = st.objective;
    sol.constraint_violation = st.violation;
  }
  return sol;
}

}  // namespace irm

namespace irm {

DrivenSolve run_solve_from(const TranscribedNlp& nlp, Eigen::VectorXd z0,
                           const SolverOptions& opts, double quad_tol_factor,
                           int quad_multiplier) {
  DrivenSolve out;
  const auto t_start = std::chrono::steady_clock::now();
  out.nlp = solve(nlp, std::move(z0), opts);
  const auto t_end = std::chrono::steady_clock::now();

  out.report.wall_time_s =
      std::chrono::duration<double>(t_end - t_start).count();
  out.report.nlp_iterations = out.nlp.iterations;
  out.report.eps_r = nlp.eps_r_of(out.nlp.z);
  out.report.eps_q = nlp.quadrature_error(out.nlp.z, quad_multiplier);
  out.report.mesh = nlp.mesh_nodes(out.nlp.z);
  out.report.constraint_violation = out.nlp.constraint_violation;
  switch (out.nlp.status) {
    case NlpStatus::converged:
      out.report.status =
          out.report.eps_q <= quad_tol_factor * std::max(1.0, out.report.eps_r)
              ? SolveStatus::converged
              : SolveStatus::quadrature_unverified;
      break;
    case NlpStatus::infeasible:
      out.report.status = SolveStatus::infeasible_constraints;
      break;
    case NlpStatus::max_iter:
      out.report.status = SolveStatus::max_iter;
      break;
  }
  return out;
}

DrivenSolve run_cold_solve(const TranscribedNlp& nlp, const SolverOptions& opts,
                           double quad_tol_factor, int quad_multiplier) {
  return run_solve_from(nlp, nlp.cold_start(), opts, quad_tol_factor,
                        quad_multiplier);
}

}  // namespace irm
