#include "irm/transcription.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace irm {
namespace {

// Access adapters: the same evaluation code runs on plain doubles and on
// dual numbers seeded for a chunk of decision variables.
struct RealView {
  using Scalar = double;
  const double* z;
  double operator[](int k) const { return z[k]; }
};

struct SeededView {
  using Scalar = Dual;
  const double* z;
  std::array<int, kDualWidth> seed_vars{};
  int n_seeds = 0;
  Dual operator[](int k) const {
    Dual r(z[k]);
    for (int l = 0; l < n_seeds; ++l) {
      if (seed_vars[l] == k) r.d[l] = 1.0;
    }
    return r;
  }
};

Eigen::VectorXd merge_supports(const Eigen::VectorXd& a,
                               const Eigen::VectorXd& b) {
  std::vector<double> merged(a.data(), a.data() + a.size());
  merged.insert(merged.end(), b.data(), b.data() + b.size());
  std::sort(merged.begin(), merged.end());
  std::vector<double> out;
  for (const double t : merged) {
    if (out.empty() || t - out.back() > 1e-12) out.push_back(t);
  }
  return Eigen::Map<Eigen::VectorXd>(out.data(),
                                     static_cast<Eigen::Index>(out.size()));
}

}  // namespace

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max-iter";
    case SolveStatus::infeasible_constraints: return "infeasible-constraints";
    case SolveStatus::quadrature_unverified: return "quadrature-unverified";
  }
  return "unknown";
}

Eigen::VectorXd uniform_mesh(double t0, double tf, int n_intervals) {
  if (n_intervals < 1) throw std::invalid_argument("uniform_mesh: N < 1");
  if (!(tf > t0)) throw std::invalid_argument("uniform_mesh: tf <= t0");
  Eigen::VectorXd t(n_intervals + 1);
  for (int i = 0; i <= n_intervals; ++i) {
    t[i] = t0 + i * (tf - t0) / n_intervals;
  }
  t[n_intervals] = tf;
  return t;
}

TranscribedNlp::TranscribedNlp(DynamicsProblem problem, BoundaryValues boundary,
                               MeshConfig mesh)
    : problem_(std::move(problem)),
      boundary_(std::move(boundary)),
      mesh_(mesh) {
  if (mesh_.n_intervals < 1) throw std::invalid_argument("mesh: N < 1");
  if (mesh_.deg_state < 1) throw std::invalid_argument("mesh: deg_state < 1");
  if (mesh_.deg_control < 0) throw std::invalid_argument("mesh: deg_control < 0");
  if (mesh_.flexible && (mesh_.phi < 0.0 || mesh_.phi >= 1.0)) {
    throw std::invalid_argument("mesh: phi must lie in [0, 1)");
  }
  // phi = 0 pins every interval length to the uniform value, so the flexible
  // transcription degenerates to the fixed one; build it that way so the two
  // schemes coincide exactly rather than only up to the constraint tolerance.
  if (mesh_.flexible && mesh_.phi == 0.0) mesh_.flexible = false;
  quad_order_ = mesh_.effective_quad_order();
  (void)gauss_legendre(quad_order_);  // validates the order

  const int N = mesh_.n_intervals;
  const int a = mesh_.deg_state;
  const int b = mesh_.deg_control;
  uniform_nodes_ = uniform_mesh(problem_.t0, problem_.tf, N);

  state_ref_ = lgl_reference_nodes(a);
  state_ref_w_ = barycentric_weights(state_ref_);
  if (b >= 1) {
    control_ref_ = lgl_reference_nodes(b);
    control_ref_w_ = barycentric_weights(control_ref_);
  } else {
    control_ref_ = Eigen::VectorXd::Zero(1);  // constant control, midpoint
    control_ref_w_ = Eigen::VectorXd::Ones(1);
  }
  union_ref_ = problem_.n_u > 0 ? merge_supports(state_ref_, control_ref_)
                                : state_ref_;

  // Decision layout: state nodal values (pins eliminated), control block,
  // interior mesh nodes.
  layout_.n_x = problem_.n_x;
  layout_.n_u = problem_.n_u;
  layout_.n_intervals = N;
  layout_.deg_state = a;
  layout_.deg_control = b;
  layout_.flexible = mesh_.flexible;

  const int nodes = layout_.state_nodes();
  layout_.state_var.assign(problem_.n_x * nodes, -1);
  layout_.state_pin.assign(problem_.n_x * nodes, 0.0);
  int next = 0;
  for (int d = 0; d < problem_.n_x; ++d) {
    for (int m = 0; m < nodes; ++m) {
      const int slot = layout_.state_slot(d, m);
      if (m == 0 && boundary_.x0) {
        layout_.state_pin[slot] = (*boundary_.x0)[d];
      } else if (m == nodes - 1 && boundary_.xf) {
        layout_.state_pin[slot] = (*boundary_.xf)[d];
      } else {
        layout_.state_var[slot] = next++;
      }
    }
  }
  layout_.control_offset = next;
  next += problem_.n_u * N * (b + 1);
  layout_.mesh_offset = next;
  if (mesh_.flexible) next += N - 1;
  layout_.total = next;

  num_path_rows_ =
      problem_.n_g > 0 ? N * static_cast<int>(union_ref_.size()) * problem_.n_g
                       : 0;
  num_mesh_rows_ = mesh_.flexible ? 2 * N : 0;
  num_ineq_ = num_path_rows_ + num_mesh_rows_ + problem_.n_i;

  // Free-variable dependencies per interval, ascending and deterministic.
  interval_deps_.resize(N);
  for (int i = 0; i < N; ++i) {
    auto& deps = interval_deps_[i];
    for (int d = 0; d < problem_.n_x; ++d) {
      for (int j = 0; j <= a; ++j) {
        const int v = layout_.state_var[layout_.state_slot(d, i * a + j)];
        if (v >= 0) deps.push_back(v);
      }
    }
    for (int d = 0; d < problem_.n_u; ++d) {
      for (int j = 0; j <= b; ++j) {
        deps.push_back(layout_.control_index(d, i, j));
      }
    }
    if (mesh_.flexible) {
      if (i >= 1) deps.push_back(layout_.mesh_index(i));
      if (i + 1 <= N - 1) deps.push_back(layout_.mesh_index(i + 1));
    }
    std::sort(deps.begin(), deps.end());
  }

  for (int d = 0; d < problem_.n_x; ++d) {
    const int v0 = layout_.state_var[layout_.state_slot(d, 0)];
    if (v0 >= 0) boundary_deps_.push_back(v0);
    const int vf = layout_.state_var[layout_.state_slot(d, nodes - 1)];
    if (vf >= 0) boundary_deps_.push_back(vf);
  }
  std::sort(boundary_deps_.begin(), boundary_deps_.end());
}

Eigen::VectorXd TranscribedNlp::cold_start() const {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(layout_.total);
  if (mesh_.flexible) {
    for (int i = 1; i < mesh_.n_intervals; ++i) {
      z[layout_.mesh_index(i)] = uniform_nodes_[i];
    }
  }
  return z;
}

template <class View>
typename View::Scalar TranscribedNlp::node_time(const View& zv,
                                                int node) const {
  using S = typename View::Scalar;
  if (mesh_.flexible && node >= 1 && node <= mesh_.n_intervals - 1) {
    return zv[layout_.mesh_index(node)];
  }
  return S(uniform_nodes_[node]);
}

template <class View>
typename View::Scalar TranscribedNlp::interval_objective(
    const View& zv, int interval, const QuadratureRule& rule) const {
  using S = typename View::Scalar;
  const int a = mesh_.deg_state;
  const int b = mesh_.deg_control;
  const int nx = problem_.n_x;
  const int nu = problem_.n_u;

  const S tlo = node_time(zv, interval);
  const S thi = node_time(zv, interval + 1);
  const S mid = 0.5 * (tlo + thi);
  const S half = 0.5 * (thi - tlo);

  std::vector<S> ptsx(a + 1);
  for (int j = 0; j <= a; ++j) ptsx[j] = mid + half * state_ref_[j];
  std::vector<S> valsx(nx * (a + 1));
  for (int d = 0; d < nx; ++d) {
    for (int j = 0; j <= a; ++j) {
      const int slot = layout_.state_slot(d, interval * a + j);
      const int v = layout_.state_var[slot];
      valsx[d * (a + 1) + j] = v >= 0 ? zv[v] : S(layout_.state_pin[slot]);
    }
  }
  std::vector<S> ptsu, valsu;
  if (nu > 0 && b >= 1) {
    ptsu.resize(b + 1);
    for (int j = 0; j <= b; ++j) ptsu[j] = mid + half * control_ref_[j];
    valsu.resize(nu * (b + 1));
    for (int d = 0; d < nu; ++d) {
      for (int j = 0; j <= b; ++j) {
        valsu[d * (b + 1) + j] = zv[layout_.control_index(d, interval, j)];
      }
    }
  }

  const std::span<const double> wx(state_ref_w_.data(), state_ref_w_.size());
  const std::span<const double> wu(control_ref_w_.data(),
                                   control_ref_w_.size());
  std::vector<S> x(nx), xd(nx), u(nu), fout(problem_.n_f);
  S total = S(0.0);
  for (int k = 0; k < rule.order; ++k) {
    const S rho = mid + half * rule.ref_nodes[k];
    const S wk = half * rule.ref_weights[k];
    for (int d = 0; d < nx; ++d) {
      const std::span<const S> vals(&valsx[d * (a + 1)],
                                    static_cast<size_t>(a + 1));
      x[d] = bary_eval<S>(ptsx, wx, vals, rho);
      xd[d] = bary_eval_deriv<S>(ptsx, wx, vals, rho);
    }
    for (int d = 0; d < nu; ++d) {
      if (b >= 1) {
        const std::span<const S> vals(&valsu[d * (b + 1)],
                                      static_cast<size_t>(b + 1));
        u[d] = bary_eval<S>(ptsu, wu, vals, rho);
      } else {
        u[d] = zv[layout_.control_index(d, interval, 0)];
      }
    }
    problem_.dyn<S>()(xd, x, u, rho, fout);
    S sq = S(0.0);
    for (int r = 0; r < problem_.n_f; ++r) sq += fout[r] * fout[r];
    total += wk * sq;
  }
  return total;
}

template <class View>
void TranscribedNlp::path_rows_at(const View& zv, int interval, int support,
                                  std::span<typename View::Scalar> out) const {
  using S = typename View::Scalar;
  const int a = mesh_.deg_state;
  const int b = mesh_.deg_control;
  const int nx = problem_.n_x;
  const int nu = problem_.n_u;

  const S tlo = node_time(zv, interval);
  const S thi = node_time(zv, interval + 1);
  const S mid = 0.5 * (tlo + thi);
  const S half = 0.5 * (thi - tlo);
  const S tau = mid + half * union_ref_[support];

  std::vector<S> ptsx(a + 1);
  for (int j = 0; j <= a; ++j) ptsx[j] = mid + half * state_ref_[j];
  const std::span<const double> wx(state_ref_w_.data(), state_ref_w_.size());
  std::vector<S> vals(a + 1), x(nx), xd(nx), u(nu);
  for (int d = 0; d < nx; ++d) {
    for (int j = 0; j <= a; ++j) {
      const int slot = layout_.state_slot(d, interval * a + j);
      const int v = layout_.state_var[slot];
      vals[j] = v >= 0 ? zv[v] : S(layout_.state_pin[slot]);
    }
    x[d] = bary_eval<S>(ptsx, wx, vals, tau);
    xd[d] = bary_eval_deriv<S>(ptsx, wx, vals, tau);
  }
  if (nu > 0 && b >= 1) {
    std::vector<S> ptsu(b + 1), valsu(b + 1);
    for (int j = 0; j <= b; ++j) ptsu[j] = mid + half * control_ref_[j];
    const std::span<const double> wu(control_ref_w_.data(),
                                     control_ref_w_.size());
    for (int d = 0; d < nu; ++d) {
      for (int j = 0; j <= b; ++j) {
        valsu[j] = zv[layout_.control_index(d, interval, j)];
      }
      u[d] = bary_eval<S>(ptsu, wu, valsu, tau);
    }
  } else {
    for (int d = 0; d < nu; ++d) {
      u[d] = zv[layout_.control_index(d, interval, 0)];
    }
  }
  problem_.path_fn<S>()(xd, x, u, tau, out);
}

template <class View>
void TranscribedNlp::boundary_states(
    const View& zv, std::vector<typename View::Scalar>& x0,
    std::vector<typename View::Scalar>& xf) const {
  using S = typename View::Scalar;
  const int nodes = layout_.state_nodes();
  x0.resize(problem_.n_x);
  xf.resize(problem_.n_x);
  for (int d = 0; d < problem_.n_x; ++d) {
    const int s0 = layout_.state_slot(d, 0);
    const int sf = layout_.state_slot(d, nodes - 1);
    const int v0 = layout_.state_var[s0];
    const int vf = layout_.state_var[sf];
    x0[d] = v0 >= 0 ? zv[v0] : S(layout_.state_pin[s0]);
    xf[d] = vf >= 0 ? zv[vf] : S(layout_.state_pin[sf]);
  }
}

double TranscribedNlp::objective(Eigen::Ref<const Eigen::VectorXd> z) const {
  return objective_with_rule(z, gauss_legendre(quad_order_));
}

double TranscribedNlp::objective_with_rule(Eigen::Ref<const Eigen::VectorXd> z,
                                           const QuadratureRule& rule) const {
  const RealView zv{z.data()};
  double total = 0.0;
  for (int i = 0; i < mesh_.n_intervals; ++i) {
    total += interval_objective(zv, i, rule);
  }
  return total;
}

void TranscribedNlp::objective_gradient(Eigen::Ref<const Eigen::VectorXd> z,
                                        Eigen::Ref<Eigen::VectorXd> grad) const {
  grad.setZero();
  const QuadratureRule& rule = gauss_legendre(quad_order_);
  for (int i = 0; i < mesh_.n_intervals; ++i) {
    const auto& deps = interval_deps_[i];
    const int nd = static_cast<int>(deps.size());
    for (int base = 0; base < nd; base += kDualWidth) {
      SeededView zv{z.data()};
      zv.n_seeds = std::min(kDualWidth, nd - base);
      for (int l = 0; l < zv.n_seeds; ++l) zv.seed_vars[l] = deps[base + l];
      const Dual term = interval_objective(zv, i, rule);
      for (int l = 0; l < zv.n_seeds; ++l) grad[deps[base + l]] += term.d[l];
    }
  }
}

template <class View>
void TranscribedNlp::interval_gn_lanes(const View& zv, int interval,
                                       const QuadratureRule& rule,
                                       double* lanes) const {
  using S = typename View::Scalar;
  const int a = mesh_.deg_state;
  const int b = mesh_.deg_control;
  const int nx = problem_.n_x;
  const int nu = problem_.n_u;

  const S tlo = node_time(zv, interval);
  const S thi = node_time(zv, interval + 1);
  const S mid = 0.5 * (tlo + thi);
  const S half = 0.5 * (thi - tlo);

  std::vector<S> ptsx(a + 1);
  for (int j = 0; j <= a; ++j) ptsx[j] = mid + half * state_ref_[j];
  std::vector<S> valsx(nx * (a + 1));
  for (int d = 0; d < nx; ++d) {
    for (int j = 0; j <= a; ++j) {
      const int slot = layout_.state_slot(d, interval * a + j);
      const int v = layout_.state_var[slot];
      valsx[d * (a + 1) + j] = v >= 0 ? zv[v] : S(layout_.state_pin[slot]);
    }
  }
  std::vector<S> ptsu, valsu;
  if (nu > 0 && b >= 1) {
    ptsu.resize(b + 1);
    for (int j = 0; j <= b; ++j) ptsu[j] = mid + half * control_ref_[j];
    valsu.resize(nu * (b + 1));
    for (int d = 0; d < nu; ++d) {
      for (int j = 0; j <= b; ++j) {
        valsu[d * (b + 1) + j] = zv[layout_.control_index(d, interval, j)];
      }
    }
  }

  const std::span<const double> wx(state_ref_w_.data(), state_ref_w_.size());
  const std::span<const double> wu(control_ref_w_.data(),
                                   control_ref_w_.size());
  std::vector<S> x(nx), xd(nx), u(nu), fout(problem_.n_f);
  for (int k = 0; k < rule.order; ++k) {
    const S rho = mid + half * rule.ref_nodes[k];
    const double wk = value_of(half) * rule.ref_weights[k];
    for (int d = 0; d < nx; ++d) {
      const std::span<const S> vals(&valsx[d * (a + 1)],
                                    static_cast<size_t>(a + 1));
      x[d] = bary_eval<S>(ptsx, wx, vals, rho);
      xd[d] = bary_eval_deriv<S>(ptsx, wx, vals, rho);
    }
    for (int d = 0; d < nu; ++d) {
      if (b >= 1) {
        const std::span<const S> vals(&valsu[d * (b + 1)],
                                      static_cast<size_t>(b + 1));
        u[d] = bary_eval<S>(ptsu, wu, vals, rho);
      } else {
        u[d] = zv[layout_.control_index(d, interval, 0)];
      }
    }
    problem_.dyn<S>()(xd, x, u, rho, fout);
    for (int r = 0; r < problem_.n_f; ++r) {
      for (int l = 0; l < kDualWidth; ++l) {
        lanes[l] += 2.0 * wk * fout[r].d[l] * fout[r].d[l];
      }
    }
  }
}

void TranscribedNlp::objective_gn_diagonal(
    Eigen::Ref<const Eigen::VectorXd> z, Eigen::Ref<Eigen::VectorXd> out) const {
  out.setZero();
  const QuadratureRule& rule = gauss_legendre(quad_order_);
  for (int i = 0; i < mesh_.n_intervals; ++i) {
    const auto& deps = interval_deps_[i];
    const int nd = static_cast<int>(deps.size());
    for (int base = 0; base < nd; base += kDualWidth) {
      SeededView zv{z.data()};
      zv.n_seeds = std::min(kDualWidth, nd - base);
      for (int l = 0; l < zv.n_seeds; ++l) zv.seed_vars[l] = deps[base + l];
      double lanes[kDualWidth] = {};
      interval_gn_lanes(zv, i, rule, lanes);
      for (int l = 0; l < zv.n_seeds; ++l) out[deps[base + l]] += lanes[l];
    }
  }
}

void TranscribedNlp::add_ineq_gn_diagonal(
    Eigen::Ref<const Eigen::VectorXd> z, Eigen::Ref<const Eigen::VectorXd> w,
    Eigen::Ref<Eigen::VectorXd> out) const {
  int row = 0;
  if (problem_.n_g > 0) {
    std::vector<Dual> g(problem_.n_g);
    const int n_union = static_cast<int>(union_ref_.size());
    for (int i = 0; i < mesh_.n_intervals; ++i) {
      const auto& deps = interval_deps_[i];
      const int nd = static_cast<int>(deps.size());
      const int row0 = row;
      for (int base = 0; base < nd; base += kDualWidth) {
        SeededView zv{z.data()};
        zv.n_seeds = std::min(kDualWidth, nd - base);
        for (int l = 0; l < zv.n_seeds; ++l) zv.seed_vars[l] = deps[base + l];
        for (int m = 0; m < n_union; ++m) {
          path_rows_at(zv, i, m, std::span<Dual>(g));
          for (int r = 0; r < problem_.n_g; ++r) {
            const double wr = w[row0 + m * problem_.n_g + r];
            if (wr == 0.0) continue;
            for (int l = 0; l < zv.n_seeds; ++l) {
              out[deps[base + l]] += wr * g[r].d[l] * g[r].d[l];
            }
          }
        }
      }
      row += n_union * problem_.n_g;
    }
  }
  if (mesh_.flexible) {
    const int N = mesh_.n_intervals;
    for (int i = 0; i < N; ++i) {
      const double wsum = w[row] + w[row + 1];
      if (i >= 1) out[layout_.mesh_index(i)] += wsum;
      if (i + 1 <= N - 1) out[layout_.mesh_index(i + 1)] += wsum;
      row += 2;
    }
  }
  if (problem_.n_i > 0) {
    std::vector<Dual> x0, xf, psi(problem_.n_i);
    const int nd = static_cast<int>(boundary_deps_.size());
    for (int base = 0; base < nd; base += kDualWidth) {
      SeededView zv{z.data()};
      zv.n_seeds = std::min(kDualWidth, nd - base);
      for (int l = 0; l < zv.n_seeds; ++l) {
        zv.seed_vars[l] = boundary_deps_[base + l];
      }
      boundary_states(zv, x0, xf);
      problem_.boundary_ineq_dual(x0, xf, problem_.t0, problem_.tf,
                                  std::span<Dual>(psi));
      for (int r = 0; r < problem_.n_i; ++r) {
        const double wr = w[row + r];
        if (wr == 0.0) continue;
        for (int l = 0; l < zv.n_seeds; ++l) {
          out[boundary_deps_[base + l]] += wr * psi[r].d[l] * psi[r].d[l];
        }
      }
    }
    row += problem_.n_i;
  }
  assert(row == num_ineq_);
  (void)row;
}

void TranscribedNlp::add_eq_gn_diagonal(
    Eigen::Ref<const Eigen::VectorXd> z, Eigen::Ref<const Eigen::VectorXd> w,
    Eigen::Ref<Eigen::VectorXd> out) const {
  if (problem_.n_e == 0) return;
  std::vector<Dual> x0, xf, psi(problem_.n_e);
  const int nd = static_cast<int>(boundary_deps_.size());
  for (int base = 0; base < nd; base += kDualWidth) {
    SeededView zv{z.data()};
    zv.n_seeds = std::min(kDualWidth, nd - base);
    for (int l = 0; l < zv.n_seeds; ++l) {
      zv.seed_vars[l] = boundary_deps_[base + l];
    }
    boundary_states(zv, x0, xf);
    problem_.boundary_eq_dual(x0, xf, problem_.t0, problem_.tf,
                              std::span<Dual>(psi));
    for (int r = 0; r < problem_.n_e; ++r) {
      if (w[r] == 0.0) continue;
      for (int l = 0; l < zv.n_seeds; ++l) {
        out[boundary_deps_[base + l]] += w[r] * psi[r].d[l] * psi[r].d[l];
      }
    }
  }
}

void TranscribedNlp::eval_ineq(Eigen::Ref<const Eigen::VectorXd> z,
                               Eigen::Ref<Eigen::VectorXd> out) const {
  assert(out.size() == num_ineq_);
  const RealView zv{z.data()};
  int row = 0;
  if (problem_.n_g > 0) {
    std::vector<double> g(problem_.n_g);
    for (int i = 0; i < mesh_.n_intervals; ++i) {
      for (int m = 0; m < union_ref_.size(); ++m) {
        path_rows_at(zv, i, m, std::span<double>(g));
        for (int r = 0; r < problem_.n_g; ++r) out[row++] = g[r];
      }
    }
  }
  if (mesh_.flexible) {
    const Eigen::VectorXd t = mesh_nodes(z);
    const double hbar = (problem_.tf - problem_.t0) / mesh_.n_intervals;
    for (int i = 0; i < mesh_.n_intervals; ++i) {
      const double len = t[i + 1] - t[i];
      out[row++] = (1.0 - mesh_.phi) * hbar - len;
      out[row++] = len - (1.0 + mesh_.phi) * hbar;
    }
  }
  if (problem_.n_i > 0) {
    std::vector<double> x0, xf, psi(problem_.n_i);
    boundary_states(zv, x0, xf);
    problem_.boundary_ineq(x0, xf, problem_.t0, problem_.tf,
                           std::span<double>(psi));
    for (int r = 0; r < problem_.n_i; ++r) out[row++] = psi[r];
  }
  assert(row == num_ineq_);
}

void TranscribedNlp::eval_eq(Eigen::Ref<const Eigen::VectorXd> z,
                             Eigen::Ref<Eigen::VectorXd> out) const {
  assert(out.size() == problem_.n_e);
  if (problem_.n_e == 0) return;
  const RealView zv{z.data()};
  std::vector<double> x0, xf, psi(problem_.n_e);
  boundary_states(zv, x0, xf);
  problem_.boundary_eq(x0, xf, problem_.t0, problem_.tf,
                       std::span<double>(psi));
  for (int r = 0; r < problem_.n_e; ++r) out[r] = psi[r];
}

void TranscribedNlp::add_ineq_jtv(Eigen::Ref<const Eigen::VectorXd> z,
                                  Eigen::Ref<const Eigen::VectorXd> v,
                                  Eigen::Ref<Eigen::VectorXd> grad) const {
  int row = 0;
  if (problem_.n_g > 0) {
    std::vector<Dual> g(problem_.n_g);
    const int n_union = static_cast<int>(union_ref_.size());
    for (int i = 0; i < mesh_.n_intervals; ++i) {
      const auto& deps = interval_deps_[i];
      const int nd = static_cast<int>(deps.size());
      const int row0 = row;
      for (int base = 0; base < nd; base += kDualWidth) {
        SeededView zv{z.data()};
        zv.n_seeds = std::min(kDualWidth, nd - base);
        for (int l = 0; l < zv.n_seeds; ++l) zv.seed_vars[l] = deps[base + l];
        for (int m = 0; m < n_union; ++m) {
          path_rows_at(zv, i, m, std::span<Dual>(g));
          for (int r = 0; r < problem_.n_g; ++r) {
            const double vr = v[row0 + m * problem_.n_g + r];
            if (vr == 0.0) continue;
            for (int l = 0; l < zv.n_seeds; ++l) {
              grad[deps[base + l]] += vr * g[r].d[l];
            }
          }
        }
      }
      row += n_union * problem_.n_g;
    }
  }
  if (mesh_.flexible) {
    const int N = mesh_.n_intervals;
    for (int i = 0; i < N; ++i) {
      const double vlo = v[row];
      const double vhi = v[row + 1];
      // d(t_{i+1} - t_i)/dt_k = +1 at k = i+1, -1 at k = i.
      if (i >= 1) grad[layout_.mesh_index(i)] += vlo - vhi;
      if (i + 1 <= N - 1) grad[layout_.mesh_index(i + 1)] += vhi - vlo;
      row += 2;
    }
  }
  if (problem_.n_i > 0) {
    std::vector<Dual> x0, xf, psi(problem_.n_i);
    const int nd = static_cast<int>(boundary_deps_.size());
    for (int base = 0; base < nd; base += kDualWidth) {
      SeededView zv{z.data()};
      zv.n_seeds = std::min(kDualWidth, nd - base);
      for (int l = 0; l < zv.n_seeds; ++l) {
        zv.seed_vars[l] = boundary_deps_[base + l];
      }
      boundary_states(zv, x0, xf);
      problem_.boundary_ineq_dual(x0, xf, problem_.t0, problem_.tf,
                                  std::span<Dual>(psi));
      for (int r = 0; r < problem_.n_i; ++r) {
        const double vr = v[row + r];
        if (vr == 0.0) continue;
        for (int l = 0; l < zv.n_seeds; ++l) {
          grad[boundary_deps_[base + l]] += vr * psi[r].d[l];
        }
      }
    }
    row += problem_.n_i;
  }
  assert(row == num_ineq_);
  (void)row;
}

void TranscribedNlp::add_eq_jtv(Eigen::Ref<const Eigen::VectorXd> z,
                                Eigen::Ref<const Eigen::VectorXd> v,
                                Eigen::Ref<Eigen::VectorXd> grad) const {
  if (problem_.n_e == 0) return;
  std::vector<Dual> x0, xf, psi(problem_.n_e);
  const int nd = static_cast<int>(boundary_deps_.size());
  for (int base = 0; base < nd; base += kDualWidth) {
    SeededView zv{z.data()};
    zv.n_seeds = std::min(kDualWidth, nd - base);
    for (int l = 0; l < zv.n_seeds; ++l) {
      zv.seed_vars[l] = boundary_deps_[base + l];
    }
    boundary_states(zv, x0, xf);
    problem_.boundary_eq_dual(x0, xf, problem_.t0, problem_.tf,
                              std::span<Dual>(psi));
    for (int r = 0; r < problem_.n_e; ++r) {
      if (v[r] == 0.0) continue;
      for (int l = 0; l < zv.n_seeds; ++l) {
        grad[boundary_deps_[base + l]] += v[r] * psi[r].d[l];
      }
    }
  }
}

Eigen::VectorXd TranscribedNlp::mesh_nodes(
    Eigen::Ref<const Eigen::VectorXd> z) const {
  Eigen::VectorXd t = uniform_nodes_;
  if (mesh_.flexible) {
    for (int i = 1; i < mesh_.n_intervals; ++i) {
      t[i] = z[layout_.mesh_index(i)];
    }
  }
  return t;
}

bool TranscribedNlp::mesh_ordered(Eigen::Ref<const Eigen::VectorXd> z) const {
  const Eigen::VectorXd t = mesh_nodes(z);
  const double eps = 1e-12 * (problem_.tf - problem_.t0);
  for (int i = 0; i < mesh_.n_intervals; ++i) {
    if (!(t[i + 1] - t[i] > eps)) return false;
  }
  return true;
}

void TranscribedNlp::project_mesh(Eigen::Ref<Eigen::VectorXd> z) const {
  if (!mesh_pinned()) return;
  for (int i = 1; i < mesh_.n_intervals; ++i) {
    z[layout_.mesh_index(i)] = uniform_nodes_[i];
  }
}

double TranscribedNlp::eps_r_of(Eigen::Ref<const Eigen::VectorXd> z) const {
  return objective(z) / ((problem_.tf - problem_.t0) * problem_.n_f);
}

double TranscribedNlp::quadrature_error(Eigen::Ref<const Eigen::VectorXd> z,
                                        int multiplier) const {
  if (multiplier < 2) {
    throw std::invalid_argument("quadrature_error: multiplier < 2");
  }
  const int hi = std::min(64, multiplier * quad_order_);
  const double at_q = objective_with_rule(z, gauss_legendre(quad_order_));
  const double at_hi = objective_with_rule(z, gauss_legendre(hi));
  return std::abs(at_hi - at_q) / ((problem_.tf - problem_.t0) * problem_.n_f);
}

Trajectory TranscribedNlp::extract_trajectory(
    Eigen::Ref<const Eigen::VectorXd> z) const {
  Trajectory traj;
  traj.nodes = mesh_nodes(z);
  traj.n_x = problem_.n_x;
  traj.n_u = problem_.n_u;
  traj.deg_control = mesh_.deg_control;
  const int N = mesh_.n_intervals;
  const int a = mesh_.deg_state;
  const int b = mesh_.deg_control;
  traj.state_supports.reserve(N);
  traj.state_values.reserve(N);
  for (int i = 0; i < N; ++i) {
    traj.state_supports.push_back(
        make_supports(traj.nodes[i], traj.nodes[i + 1], a));
    Eigen::MatrixXd vals(problem_.n_x, a + 1);
    for (int d = 0; d < problem_.n_x; ++d) {
      for (int j = 0; j <= a; ++j) {
        const int slot = layout_.state_slot(d, i * a + j);
        const int v = layout_.state_var[slot];
        vals(d, j) = v >= 0 ? z[v] : layout_.state_pin[slot];
      }
    }
    traj.state_values.push_back(std::move(vals));
    if (problem_.n_u > 0) {
      if (b >= 1) {
        traj.control_supports.push_back(
            make_supports(traj.nodes[i], traj.nodes[i + 1], b));
      }
      Eigen::MatrixXd cv(problem_.n_u, b + 1);
      for (int d = 0; d < problem_.n_u; ++d) {
        for (int j = 0; j <= b; ++j) {
          cv(d, j) = z[layout_.control_index(d, i, j)];
        }
      }
      traj.control_values.push_back(std::move(cv));
    }
  }
  return traj;
}

int Trajectory::interval_of(double t, bool from_left) const {
  const int N = num_intervals();
  int i;
  if (from_left) {
    i = static_cast<int>(std::lower_bound(nodes.data(), nodes.data() + N + 1,
                                          t) -
                         nodes.data()) -
        1;
  } else {
    i = static_cast<int>(std::upper_bound(nodes.data(), nodes.data() + N + 1,
                                          t) -
                         nodes.data()) -
        1;
  }
  return std::clamp(i, 0, N - 1);
}

Eigen::VectorXd Trajectory::state(double t) const {
  const int i = interval_of(t);
  Eigen::VectorXd x(n_x);
  for (int d = 0; d < n_x; ++d) {
    const Eigen::VectorXd row = state_values[i].row(d);
    x[d] = eval_interp(state_supports[i],
                       std::span<const double>(row.data(), row.size()), t);
  }
  return x;
}

Eigen::VectorXd Trajectory::state_deriv(double t) const {
  const int i = interval_of(t);
  Eigen::VectorXd x(n_x);
  for (int d = 0; d < n_x; ++d) {
    const Eigen::VectorXd row = state_values[i].row(d);
    x[d] = eval_interp_deriv(state_supports[i],
                             std::span<const double>(row.data(), row.size()),
                             t);
  }
  return x;
}

Eigen::VectorXd Trajectory::control(double t, bool from_left) const {
  Eigen::VectorXd u(n_u);
  if (n_u == 0) return u;
  const int i = interval_of(t, from_left);
  for (int d = 0; d < n_u; ++d) {
    if (deg_control >= 1) {
      const Eigen::VectorXd row = control_values[i].row(d);
      u[d] = eval_interp(control_supports[i],
                         std::span<const double>(row.data(), row.size()), t);
    } else {
      u[d] = control_values[i](d, 0);
    }
  }
  return u;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path,
                          int samples_per_interval) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "t";
  for (int d = 0; d < traj.n_x; ++d) out << ",x" << d + 1;
  for (int d = 0; d < traj.n_u; ++d) out << ",u" << d + 1;
  out << "\n";
  char buf[32];
  const auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf << sep;
  };
  const int M = std::max(2, samples_per_interval);
  for (int i = 0; i < traj.num_intervals(); ++i) {
    for (int k = 0; k < M; ++k) {
      const double t =
          traj.nodes[i] +
          (traj.nodes[i + 1] - traj.nodes[i]) * k / (M - 1.0);
      // At interior nodes the first sample of interval i carries the
      // right-sided control limit; the last sample of interval i-1 carried
      // the left-sided one.
      Eigen::VectorXd x(traj.n_x);
      for (int d = 0; d < traj.n_x; ++d) {
        const Eigen::VectorXd row = traj.state_values[i].row(d);
        x[d] = eval_interp(traj.state_supports[i],
                           std::span<const double>(row.data(), row.size()), t);
      }
      Eigen::VectorXd u(traj.n_u);
      for (int d = 0; d < traj.n_u; ++d) {
        if (traj.deg_control >= 1) {
          const Eigen::VectorXd row = traj.control_values[i].row(d);
          u[d] = eval_interp(traj.control_supports[i],
                             std::span<const double>(row.data(), row.size()),
                             t);
        } else {
          u[d] = traj.control_values[i](d, 0);
        }
      }
      put(t, traj.n_x + traj.n_u > 0 ? ',' : '\n');
      for (int d = 0; d < traj.n_x; ++d) {
        put(x[d], d + 1 < traj.n_x || traj.n_u > 0 ? ',' : '\n');
      }
      for (int d = 0; d < traj.n_u; ++d) {
        put(u[d], d + 1 < traj.n_u ? ',' : '\n');
      }
    }
  }
}

void write_mesh_file(const Eigen::VectorXd& nodes, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  char buf[32];
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", nodes[i]);
    out << buf << "\n";
  }
}

}  // namespace irm
