#include "irm/initialization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "irm/basis.hpp"

namespace irm {

Eigen::VectorXd SwitchingControl::eval(double t) const {
  Eigen::VectorXd u(num_channels());
  for (int j = 0; j < num_channels(); ++j) {
    int sign = initial_sign[j];
    for (double s : switch_times[j]) {
      if (t >= s) sign = -sign;
    }
    u[j] = sign * amplitude;
  }
  return u;
}

std::vector<double> SwitchingControl::interior_switches(double t0, double tf,
                                                        double tol) const {
  const double eps = tol * (tf - t0);
  std::vector<double> all;
  for (const auto& channel : switch_times) {
    for (double s : channel) {
      if (s > t0 + eps && s < tf - eps) all.push_back(s);
    }
  }
  std::sort(all.begin(), all.end());
  std::vector<double> merged;
  for (double s : all) {
    if (merged.empty() || s - merged.back() > eps) merged.push_back(s);
  }
  return merged;
}

Eigen::VectorXd SimulatedTrajectory::state(double t) const {
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  int k = static_cast<int>(it - ts.begin()) - 1;
  k = std::min(std::max(k, 0), static_cast<int>(ts.size()) - 2);
  const double w = (t - ts[k]) / (ts[k + 1] - ts[k]);
  return (1.0 - w) * xs[k] + w * xs[k + 1];
}

namespace {

// Explicit right-hand side recovered from the semi-explicit residual rows:
// row r reads xd_r - f_r, so f_r = -F_r at xd = 0.
void rhs(const DynamicsProblem& p, const Eigen::VectorXd& x,
         const Eigen::VectorXd& u, double t, Eigen::VectorXd& dx,
         Eigen::VectorXd& xd_zero, std::vector<double>& out) {
  p.dynamics({xd_zero.data(), static_cast<size_t>(p.n_x)},
             {x.data(), static_cast<size_t>(p.n_x)},
             {u.data(), static_cast<size_t>(p.n_u)}, t, out);
  for (int r = 0; r < p.n_x; ++r) dx[r] = -out[r];
}

}  // namespace

SimulatedTrajectory simulate_switching(const DynamicsProblem& problem,
                                       const SwitchingControl& control,
                                       const Eigen::VectorXd& x0, int steps) {
  if (x0.size() != problem.n_x) {
    throw std::invalid_argument("simulate_switching: x0 length != n_x");
  }
  // Smooth spans between consecutive switches; RK4 never straddles one.
  std::vector<double> marks = {problem.t0};
  for (double s : control.interior_switches(problem.t0, problem.tf)) {
    marks.push_back(s);
  }
  marks.push_back(problem.tf);

  SimulatedTrajectory traj;
  traj.ts.push_back(problem.t0);
  traj.xs.push_back(x0);
  Eigen::VectorXd x = x0, xd_zero = Eigen::VectorXd::Zero(problem.n_x);
  Eigen::VectorXd k1(problem.n_x), k2(problem.n_x), k3(problem.n_x),
      k4(problem.n_x), xt(problem.n_x);
  std::vector<double> out(problem.n_f);
  const double horizon = problem.tf - problem.t0;
  for (size_t m = 0; m + 1 < marks.size(); ++m) {
    const double span = marks[m + 1] - marks[m];
    const int n = std::max(2, static_cast<int>(std::ceil(steps * span /
                                                         horizon)));
    const double h = span / n;
    // Sample the control once inside the span so the double sign flip of a
    // fully merged switch pair cannot leak into the stage evaluations.
    const Eigen::VectorXd u = control.eval(marks[m] + 0.5 * h);
    for (int i = 0; i < n; ++i) {
      const double t = marks[m] + i * h;
      rhs(problem, x, u, t, k1, xd_zero, out);
      xt = x + 0.5 * h * k1;
      rhs(problem, xt, u, t + 0.5 * h, k2, xd_zero, out);
      xt = x + 0.5 * h * k2;
      rhs(problem, xt, u, t + 0.5 * h, k3, xd_zero, out);
      xt = x + h * k3;
      rhs(problem, xt, u, t + h, k4, xd_zero, out);
      x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      traj.ts.push_back(marks[m] + (i + 1) * h);
      traj.xs.push_back(x);
    }
  }
  return traj;
}

double terminal_miss(const DynamicsProblem& problem,
                     const BoundaryValues& boundary,
                     const SwitchingControl& control, int steps) {
  if (!boundary.x0 || !boundary.xf) {
    throw std::invalid_argument(
        "terminal_miss: both boundary endpoints must be pinned");
  }
  const SimulatedTrajectory traj =
      simulate_switching(problem, control, *boundary.x0, steps);
  return (traj.xs.back() - *boundary.xf).squaredNorm();
}

namespace {

SwitchingControl control_from_params(const SwitchingControl& shape,
                                     const Eigen::VectorXd& v, double t0,
                                     double tf) {
  SwitchingControl c = shape;
  int k = 0;
  for (auto& channel : c.switch_times) {
    for (double& s : channel) {
      s = std::min(tf, std::max(t0, v[k++]));
    }
    std::sort(channel.begin(), channel.end());
  }
  return c;
}

// Standard Nelder-Mead on f over R^n from simplex seed x0, x0 + delta e_i.
Eigen::VectorXd nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x0, double delta,
                            int max_evals) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  int evals = 0;
  for (int i = 0; i <= n; ++i) {
    if (i > 0) xs[i][i - 1] += delta;
    fs[i] = f(xs[i]);
    ++evals;
  }
  std::vector<int> ord(n + 1);
  while (evals < max_evals) {
    for (int i = 0; i <= n; ++i) ord[i] = i;
    std::sort(ord.begin(), ord.end(),
              [&](int a, int b) { return fs[a] < fs[b]; });
    const int best = ord[0], worst = ord[n], second = ord[n - 1];
    if (std::abs(fs[worst] - fs[best]) <=
        1e-14 * std::max(1.0, std::abs(fs[best]))) {
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i) {
      if (i != worst) centroid += xs[i];
    }
    centroid /= n;
    const Eigen::VectorXd xr = centroid + (centroid - xs[worst]);
    const double fr = f(xr);
    ++evals;
    if (fr < fs[best]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - xs[worst]);
      const double fe = f(xe);
      ++evals;
      if (fe < fr) {
        xs[worst] = xe;
        fs[worst] = fe;
      } else {
        xs[worst] = xr;
        fs[worst] = fr;
      }
    } else if (fr < fs[second]) {
      xs[worst] = xr;
      fs[worst] = fr;
    } else {
      const Eigen::VectorXd xc =
          centroid + 0.5 * ((fr < fs[worst] ? xr : xs[worst]) - centroid);
      const double fc = f(xc);
      ++evals;
      if (fc < std::min(fr, fs[worst])) {
        xs[worst] = xc;
        fs[worst] = fc;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          xs[i] = xs[best] + 0.5 * (xs[i] - xs[best]);
          fs[i] = f(xs[i]);
          ++evals;
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= n; ++i) {
    if (fs[i] < fs[best]) best = i;
  }
  return xs[best];
}

}  // namespace

SwitchingControl refine_switch_times(const DynamicsProblem& problem,
                                     const BoundaryValues& boundary,
                                     SwitchingControl seed, int sim_steps,
                                     int max_evals) {
  int n_params = 0;
  for (const auto& channel : seed.switch_times) {
    n_params += static_cast<int>(channel.size());
  }
  if (n_params == 0) return seed;
  Eigen::VectorXd v0(n_params);
  int k = 0;
  for (const auto& channel : seed.switch_times) {
    for (double s : channel) v0[k++] = s;
  }
  const auto objective = [&](const Eigen::VectorXd& v) {
    return terminal_miss(problem, boundary,
                         control_from_params(seed, v, problem.t0, problem.tf),
                         sim_steps);
  };
  const double delta = 0.02 * (problem.tf - problem.t0);
  const Eigen::VectorXd v =
      nelder_mead(objective, v0, delta, max_evals);
  return control_from_params(seed, v, problem.t0, problem.tf);
}

SwitchingControl best_switching_control(const DynamicsProblem& problem,
                                        const BoundaryValues& boundary,
                                        double amplitude,
                                        int switches_per_channel) {
  if (problem.n_u < 1 || problem.n_u > 16) {
    throw std::invalid_argument(
        "best_switching_control: needs 1 <= n_u <= 16 control channels");
  }
  const double t0 = problem.t0, tf = problem.tf;
  SwitchingControl best;
  double best_miss = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < (1 << problem.n_u); ++mask) {
    SwitchingControl seed;
    seed.amplitude = amplitude;
    seed.initial_sign.resize(problem.n_u);
    seed.switch_times.resize(problem.n_u);
    for (int j = 0; j < problem.n_u; ++j) {
      seed.initial_sign[j] = (mask >> j) & 1 ? -1 : 1;
      for (int s = 1; s <= switches_per_channel; ++s) {
        seed.switch_times[j].push_back(
            t0 + (tf - t0) * s / (switches_per_channel + 1.0));
      }
    }
    const SwitchingControl refined =
        refine_switch_times(problem, boundary, seed);
    const double miss = terminal_miss(problem, boundary, refined, 600);
    if (miss < best_miss) {
      best_miss = miss;
      best = refined;
    }
  }
  // Polish the winning pattern with a finer integration and a fresh simplex.
  return refine_switch_times(problem, boundary, best, 3000, 4000);
}

Eigen::VectorXd event_aligned_mesh(double t0, double tf, int n, double phi,
                                   std::vector<double> events,
                                   std::vector<double> weights) {
  if (n < 1 || !(tf > t0)) {
    throw std::invalid_argument("event_aligned_mesh: bad horizon or n");
  }
  if (weights.empty()) weights.assign(events.size(), 1.0);
  if (weights.size() != events.size()) {
    throw std::invalid_argument(
        "event_aligned_mesh: weights/events size mismatch");
  }
  const double hbar = (tf - t0) / n;
  const double eps = 1e-9 * (tf - t0);
  const double lo = (1.0 - phi) * hbar + eps;
  const double hi = (1.0 + phi) * hbar - eps;

  // Sort events (carrying weights) and merge near-duplicates.
  std::vector<int> ord(events.size());
  for (size_t i = 0; i < events.size(); ++i) ord[i] = static_cast<int>(i);
  std::sort(ord.begin(), ord.end(),
            [&](int a, int b) { return events[a] < events[b]; });
  std::vector<double> ev, wt;
  for (int i : ord) {
    if (events[i] <= t0 + eps || events[i] >= tf - eps) continue;
    if (!ev.empty() && events[i] - ev.back() <= eps) {
      wt.back() = std::max(wt.back(), weights[i]);
      continue;
    }
    ev.push_back(events[i]);
    wt.push_back(weights[i]);
  }
  const int m = static_cast<int>(ev.size());
  if (m > 20) {
    throw std::invalid_argument("event_aligned_mesh: too many events");
  }

  Eigen::VectorXd best = Eigen::VectorXd::LinSpaced(n + 1, t0, tf);
  double best_score = std::numeric_limits<double>::infinity();
  int best_kept = -1;
  for (int mask = 0; mask < (1 << m); ++mask) {
    std::vector<double> kept = {t0};
    std::vector<double> dropped;
    for (int j = 0; j < m; ++j) {
      if (mask & (1 << j)) {
        kept.push_back(ev[j]);
      } else {
        dropped.push_back(ev[j]);
      }
    }
    kept.push_back(tf);
    const int segs = static_cast<int>(kept.size()) - 1;
    std::vector<int> kmin(segs), kmax(segs);
    int sum_min = 0, sum_max = 0;
    bool ok = true;
    for (int s = 0; s < segs; ++s) {
      const double len = kept[s + 1] - kept[s];
      kmin[s] = std::max(1, static_cast<int>(std::ceil(len / hi - 1e-12)));
      kmax[s] = static_cast<int>(std::floor(len / lo + 1e-12));
      if (kmax[s] < kmin[s]) {
        ok = false;
        break;
      }
      sum_min += kmin[s];
      sum_max += kmax[s];
    }
    if (!ok || sum_min > n || sum_max < n) continue;
    const int kc = __builtin_popcount(static_cast<unsigned>(mask));
    if (kc < best_kept) continue;

    // Counts: start at the minimum and grow whichever segment currently has
    // the longest sub-intervals.
    std::vector<int> k = kmin;
    for (int extra = n - sum_min; extra > 0; --extra) {
      int pick = -1;
      double longest = -1.0;
      for (int s = 0; s < segs; ++s) {
        if (k[s] >= kmax[s]) continue;
        const double len = (kept[s + 1] - kept[s]) / k[s];
        if (len > longest) {
          longest = len;
          pick = s;
        }
      }
      ++k[pick];
    }

    // Nodes: uniform within each segment, then pull one node per dropped
    // event as close to it as the bounds allow.
    std::vector<double> nodes = {t0};
    for (int s = 0; s < segs; ++s) {
      const double p = kept[s], q = kept[s + 1], len = q - p;
      std::vector<double> seg(k[s] + 1);
      for (int j = 0; j <= k[s]; ++j) seg[j] = p + len * j / k[s];
      for (double d : dropped) {
        if (d <= p || d >= q || k[s] < 2) continue;
        const int mm = std::min(
            k[s] - 1,
            std::max(1, static_cast<int>(std::lround((d - p) / len * k[s]))));
        const double nlo = std::max(p + mm * lo, q - (k[s] - mm) * hi);
        const double nhi = std::min(p + mm * hi, q - (k[s] - mm) * lo);
        if (nlo > nhi) continue;
        const double pos = std::min(nhi, std::max(nlo, d));
        for (int j = 1; j < mm; ++j) seg[j] = p + (pos - p) * j / mm;
        seg[mm] = pos;
        for (int j = mm + 1; j < k[s]; ++j) {
          seg[j] = pos + (q - pos) * (j - mm) / (k[s] - mm);
        }
      }
      for (int j = 1; j <= k[s]; ++j) nodes.push_back(seg[j]);
    }

    double score = 0.0;
    for (int j = 0; j < m; ++j) {
      double dmin = std::numeric_limits<double>::infinity();
      for (double nv : nodes) dmin = std::min(dmin, std::abs(nv - ev[j]));
      score += wt[j] * dmin;
    }
    if (kc > best_kept || score < best_score) {
      best_kept = kc;
      best_score = score;
      best = Eigen::Map<Eigen::VectorXd>(nodes.data(),
                                         static_cast<Eigen::Index>(nodes.size()));
    }
  }
  return best;
}

Eigen::VectorXd interpolate_decision(const TranscribedNlp& nlp,
                                     const SimulatedTrajectory& trajectory,
                                     const SwitchingControl& control,
                                     const Eigen::VectorXd& nodes) {
  const DecisionLayout& lay = nlp.layout();
  const MeshConfig& mc = nlp.mesh_config();
  const int n = mc.n_intervals;
  if (nodes.size() != n + 1) {
    throw std::invalid_argument("interpolate_decision: nodes length != N+1");
  }
  const int a = mc.deg_state, b = mc.deg_control;
  const int n_x = static_cast<int>(trajectory.xs.front().size());
  Eigen::VectorXd z0 = nlp.cold_start();
  for (int i = 0; i < n; ++i) {
    const SupportSet sup = make_supports(nodes[i], nodes[i + 1], a);
    for (int j = 0; j <= a; ++j) {
      const Eigen::VectorXd x = trajectory.state(sup.points[j]);
      for (int d = 0; d < n_x; ++d) {
        const int var = lay.state_var[lay.state_slot(d, i * a + j)];
        if (var >= 0) z0[var] = x[d];
      }
    }
    const double mid = 0.5 * (nodes[i] + nodes[i + 1]);
    const SupportSet csup = make_supports(nodes[i], nodes[i + 1],
                                          std::max(b, 1));
    for (int j = 0; j <= b; ++j) {
      double t = b >= 1 ? csup.points[j] : mid;
      t = 0.999 * t + 0.001 * mid;
      const Eigen::VectorXd u = control.eval(t);
      for (int d = 0; d < u.size(); ++d) {
        z0[lay.control_index(d, i, j)] = u[d];
      }
    }
  }
  if (mc.flexible) {
    for (int i = 1; i < n; ++i) z0[lay.mesh_index(i)] = nodes[i];
  }
  return z0;
}

}  // namespace irm
