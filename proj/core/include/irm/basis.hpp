#ifndef IRMESH_BASIS_HPP_
#define IRMESH_BASIS_HPP_

#include <Eigen/Core>
#include <span>

namespace irm {

/// Interpolation support points on one mesh interval together with the
/// barycentric weights of the Lagrange basis they induce.
struct SupportSet {
  Eigen::VectorXd points;        // strictly increasing, endpoints included
  Eigen::VectorXd bary_weights;  // nonzero, finite

  int degree() const { return static_cast<int>(points.size()) - 1; }
  double t_lo() const { return points[0]; }
  double t_hi() const { return points[points.size() - 1]; }
};

/// Dense differentiation matrix: (D * values)[j] is the interpolant
/// derivative at support j. Rows sum to zero.
struct DiffMatrix {
  Eigen::MatrixXd entries;
};

/// Legendre-Gauss-Lobatto reference nodes on [-1, 1], ascending.
/// degree >= 1; returns degree + 1 nodes with endpoints at +-1.
Eigen::VectorXd lgl_reference_nodes(int degree);

/// Barycentric weights for an arbitrary strictly increasing point set,
/// normalized to unit max magnitude.
Eigen::VectorXd barycentric_weights(Eigen::Ref<const Eigen::VectorXd> points);

/// LGL supports affinely mapped onto [t_lo, t_hi].
/// Throws std::invalid_argument if t_hi <= t_lo or degree < 1.
SupportSet make_supports(double t_lo, double t_hi, int degree);

/// Second-form barycentric evaluation with an exact-hit shortcut at supports.
double eval_interp(const SupportSet& s, std::span<const double> values, double t);

/// Derivative of the interpolant at t; exact for polynomials up to degree a.
double eval_interp_deriv(const SupportSet& s, std::span<const double> values,
                         double t);

DiffMatrix diff_matrix(const SupportSet& s);

// Scalar-generic evaluation kernels. Support points and values may carry
// derivative information (S = Dual) while the barycentric weights stay real:
// under an affine map all weights scale by a common factor that cancels in
// the barycentric quotient, so reference-interval weights are valid for any
// interval image of the same reference nodes.

template <class S>
S bary_eval(std::span<const S> pts, std::span<const double> w,
            std::span<const S> vals, const S& t) {
  const int n = static_cast<int>(pts.size());
  for (int j = 0; j < n; ++j) {
    if (t == pts[j]) return vals[j];
  }
  S num = S(0.0), den = S(0.0);
  for (int j = 0; j < n; ++j) {
    const S c = w[j] / (t - pts[j]);
    num += c * vals[j];
    den += c;
  }
  return num / den;
}

template <class S>
S bary_eval_deriv(std::span<const S> pts, std::span<const double> w,
                  std::span<const S> vals, const S& t) {
  const int n = static_cast<int>(pts.size());
  for (int j = 0; j < n; ++j) {
    if (t == pts[j]) {
      // Differentiation-matrix row at support j.
      S acc = S(0.0);
      for (int k = 0; k < n; ++k) {
        if (k == j) continue;
        acc += (w[k] / w[j]) / (pts[j] - pts[k]) * (vals[k] - vals[j]);
      }
      return acc;
    }
  }
  S num = S(0.0), den = S(0.0);
  for (int j = 0; j < n; ++j) {
    const S c = w[j] / (t - pts[j]);
    num += c * vals[j];
    den += c;
  }
  const S p = num / den;
  S dnum = S(0.0);
  for (int j = 0; j < n; ++j) {
    const S dt = t - pts[j];
    dnum += w[j] * (p - vals[j]) / (dt * dt);
  }
  return dnum / den;
}

}  // namespace irm

#endif  // IRMESH_BASIS_HPP_
