#include "irm/basis.hpp"

#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace irm {
namespace {

// Legendre P_n and derivative at x via the three-term recurrence.
struct LegendreEval {
  double p;
  double dp;
};

LegendreEval legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace

Eigen::VectorXd lgl_reference_nodes(int degree) {
  if (degree < 1) throw std::invalid_argument("lgl_reference_nodes: degree < 1");
  const int n = degree + 1;
  Eigen::VectorXd x(n);
  x[0] = -1.0;
  x[n - 1] = 1.0;
  // Interior nodes are the roots of P'_degree, found by Newton iteration
  // from Chebyshev-Gauss-Lobatto initial guesses.
  for (int j = 1; j < degree; ++j) {
    double t = -std::cos(std::numbers::pi * j / degree);
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(degree, t);
      // (1 - t^2) P'' = 2 t P' - n(n+1) P
      const double ddp =
          (2.0 * t * dp - degree * (degree + 1.0) * p) / (1.0 - t * t);
      const double step = dp / ddp;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    x[j] = t;
  }
  // Enforce exact symmetry about 0.
  for (int j = 0; j < n / 2; ++j) {
    const double s = 0.5 * (x[n - 1 - j] - x[j]);
    x[j] = -s;
    x[n - 1 - j] = s;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  return x;
}

Eigen::VectorXd barycentric_weights(Eigen::Ref<const Eigen::VectorXd> points) {
  const int n = static_cast<int>(points.size());
  Eigen::VectorXd w(n);
  for (int j = 0; j < n; ++j) {
    double acc = 1.0;
    for (int k = 0; k < n; ++k) {
      if (k != j) acc *= points[j] - points[k];
    }
    w[j] = 1.0 / acc;
  }
  w /= w.cwiseAbs().maxCoeff();
  return w;
}

SupportSet make_supports(double t_lo, double t_hi, int degree) {
  if (!(t_hi > t_lo)) {
    throw std::invalid_argument("make_supports: degenerate interval");
  }
  if (degree < 1) throw std::invalid_argument("make_supports: degree < 1");
  const Eigen::VectorXd ref = lgl_reference_nodes(degree);
  const double mid = 0.5 * (t_lo + t_hi);
  const double half = 0.5 * (t_hi - t_lo);
  Eigen::VectorXd pts = (mid + half * ref.array()).matrix();
  pts[0] = t_lo;
  pts[pts.size() - 1] = t_hi;
  return SupportSet{pts, barycentric_weights(pts)};
}

double eval_interp(const SupportSet& s, std::span<const double> values, double t) {
  assert(static_cast<int>(values.size()) == s.degree() + 1);
  [[maybe_unused]] const double guard = 1e-9 * (s.t_hi() - s.t_lo());
  assert(t >= s.t_lo() - guard && t <= s.t_hi() + guard);
  const std::span<const double> pts(s.points.data(), s.points.size());
  const std::span<const double> w(s.bary_weights.data(), s.bary_weights.size());
  return bary_eval<double>(pts, w, values, t);
}

double eval_interp_deriv(const SupportSet& s, std::span<const double> values,
                         double t) {
  assert(static_cast<int>(values.size()) == s.degree() + 1);
  const std::span<const double> pts(s.points.data(), s.points.size());
  const std::span<const double> w(s.bary_weights.data(), s.bary_weights.size());
  return bary_eval_deriv<double>(pts, w, values, t);
}

DiffMatrix diff_matrix(const SupportSet& s) {
  const int n = s.degree() + 1;
  Eigen::MatrixXd D(n, n);
  for (int j = 0; j < n; ++j) {
    double rowsum = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      D(j, k) = (s.bary_weights[k] / s.bary_weights[j]) /
                (s.points[j] - s.points[k]);
      rowsum += D(j, k);
    }
    D(j, j) = -rowsum;  // row-sum-zero correction
  }
  return DiffMatrix{std::move(D)};
}

}  // namespace irm
