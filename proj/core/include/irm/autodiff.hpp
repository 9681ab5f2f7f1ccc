#ifndef IRMESH_AUTODIFF_HPP_
#define IRMESH_AUTODIFF_HPP_

#include <Eigen/Core>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "irm/dual.hpp"

namespace irm::ad {

using ScalarFn = std::function<Dual(std::span<const Dual>)>;
using VectorFn = std::function<void(std::span<const Dual>, std::span<Dual>)>;

/// Gradient of a scalar function by forward-mode passes of kDualWidth seeds.
Eigen::VectorXd gradient(const ScalarFn& f, Eigen::Ref<const Eigen::VectorXd> z);

/// Dense Jacobian of a vector function; rows are component gradients.
Eigen::MatrixXd jacobian(const VectorFn& f, Eigen::Ref<const Eigen::VectorXd> z,
                         int n_out);

}  // namespace irm::ad

#endif  // IRMESH_AUTODIFF_HPP_
