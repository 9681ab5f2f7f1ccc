#include <doctest.h>
#include "irm/quadrature.hpp"
TEST_CASE("gauss legendre midpoint") {
  const auto& r = irm::gauss_legendre(1);
  CHECK(r.ref_nodes[0] == doctest::Approx(0.0));
  CHECK(r.ref_weights[0] == doctest::Approx(2.0));
}
