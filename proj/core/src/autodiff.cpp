#include "irm/autodiff.hpp"

#include <cmath>

namespace irm::ad {

Eigen::VectorXd gradient(const ScalarFn& f, Eigen::Ref<const Eigen::VectorXd> z) {
  const int n = static_cast<int>(z.size());
  Eigen::VectorXd g(n);
  std::vector<Dual> zd(n);
  for (int i = 0; i < n; ++i) zd[i] = Dual(z[i]);
  for (int base = 0; base < n; base += kDualWidth) {
    const int width = std::min(kDualWidth, n - base);
    for (int k = 0; k < width; ++k) zd[base + k].d[k] = 1.0;
    Dual out = f(std::span<const Dual>(zd));
    if (!std::isfinite(out.v)) {
      throw std::runtime_error("gradient: function value is not finite");
    }
    for (int k = 0; k < width; ++k) g[base + k] = out.d[k];
    for (int k = 0; k < width; ++k) zd[base + k].d[k] = 0.0;
  }
  return g;
}

Eigen::MatrixXd jacobian(const VectorFn& f, Eigen::Ref<const Eigen::VectorXd> z,
                         int n_out) {
  const int n = static_cast<int>(z.size());
  Eigen::MatrixXd J(n_out, n);
  std::vector<Dual> zd(n);
  std::vector<Dual> out(n_out);
  for (int i = 0; i < n; ++i) zd[i] = Dual(z[i]);
  for (int base = 0; base < n; base += kDualWidth) {
    const int width = std::min(kDualWidth, n - base);
    for (int k = 0; k < width; ++k) zd[base + k].d[k] = 1.0;
    f(std::span<const Dual>(zd), std::span<Dual>(out));
    for (int r = 0; r < n_out; ++r)
      for (int k = 0; k < width; ++k) J(r, base + k) = out[r].d[k];
    for (int k = 0; k < width; ++k) zd[base + k].d[k] = 0.0;
  }
  return J;
}

}  // namespace irm::ad
