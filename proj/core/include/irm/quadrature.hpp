#ifndef IRMESH_QUADRATURE_HPP_
#define IRMESH_QUADRATURE_HPP_

#include <Eigen/Core>
#include <utility>

namespace irm {

/// Gauss-Legendre rule on the reference interval [-1, 1].
struct QuadratureRule {
  int order = 0;               // Q
  Eigen::VectorXd ref_nodes;   // strictly increasing, symmetric about 0
  Eigen::VectorXd ref_weights; // positive, sum to 2
};

/// Reference rule of order Q, 1 <= Q <= 64. Rules are cached; lookups after
/// first construction are lock-protected reads of immutable entries.
/// Throws std::invalid_argument for Q out of range.
const QuadratureRule& gauss_legendre(int q);

/// Affine image of a rule on [t_lo, t_hi]; mapped weights sum to the
/// interval length. Throws std::invalid_argument if t_hi <= t_lo.
std::pair<Eigen::VectorXd, Eigen::VectorXd> map_rule(const QuadratureRule& rule,
                                                     double t_lo, double t_hi);

}  // namespace irm

#endif  // IRMESH_QUADRATURE_HPP_
