#include "irm/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace irm {
namespace {

constexpr int kMaxOrder = 64;

QuadratureRule build_rule(int q) {
  QuadratureRule rule;
  rule.order = q;
  rule.ref_nodes.resize(q);
  rule.ref_weights.resize(q);
  for (int j = 0; j < q; ++j) {
    // Chebyshev initial guess, then Newton on P_q.
    double x = -std::cos(std::numbers::pi * (j + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      if (q == 1) {
        p1 = x;
        dp = 1.0;
      }
      const double step = p1 / dp;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    rule.ref_nodes[j] = x;
    rule.ref_weights[j] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  // Symmetrize nodes and weights about 0.
  for (int j = 0; j < q / 2; ++j) {
    const double s = 0.5 * (rule.ref_nodes[q - 1 - j] - rule.ref_nodes[j]);
    rule.ref_nodes[j] = -s;
    rule.ref_nodes[q - 1 - j] = s;
    const double w = 0.5 * (rule.ref_weights[j] + rule.ref_weights[q - 1 - j]);
    rule.ref_weights[j] = w;
    rule.ref_weights[q - 1 - j] = w;
  }
  if (q % 2 == 1) rule.ref_nodes[q / 2] = 0.0;
  return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre(int q) {
  if (q < 1 || q > kMaxOrder) {
    throw std::invalid_argument("gauss_legendre: unsupported order");
  }
  static std::mutex mtx;
  static std::map<int, QuadratureRule> cache;
  std::scoped_lock lock(mtx);
  auto it = cache.find(q);
  if (it == cache.end()) it = cache.emplace(q, build_rule(q)).first;
  return it->second;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> map_rule(const QuadratureRule& rule,
                                                     double t_lo, double t_hi) {
  if (!(t_hi > t_lo)) throw std::invalid_argument("map_rule: degenerate interval");
  const double mid = 0.5 * (t_lo + t_hi);
  const double half = 0.5 * (t_hi - t_lo);
  Eigen::VectorXd nodes = (mid + half * rule.ref_nodes.array()).matrix();
  Eigen::VectorXd weights = half * rule.ref_weights;
  return {std::move(nodes), std::move(weights)};
}

}  // namespace irm
