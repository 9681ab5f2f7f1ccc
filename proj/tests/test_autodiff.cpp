#include <doctest.h>

#include <cmath>

#include "irm/autodiff.hpp"
#include "irm/basis.hpp"
#include "irm/dual.hpp"

using irm::Dual;

TEST_CASE("dual arithmetic carries exact derivatives") {
  Dual x(2.0, 0);  // seed lane 0
  Dual y(3.0, 1);  // seed lane 1

  Dual s = x + y;
  CHECK(s.v == doctest::Approx(5.0));
  CHECK(s.d[0] == doctest::Approx(1.0));
  CHECK(s.d[1] == doctest::Approx(1.0));

  Dual p = x * y;
  CHECK(p.v == doctest::Approx(6.0));
  CHECK(p.d[0] == doctest::Approx(3.0));  // d(xy)/dx = y
  CHECK(p.d[1] == doctest::Approx(2.0));  // d(xy)/dy = x

  Dual q = x / y;
  CHECK(q.v == doctest::Approx(2.0 / 3.0));
  CHECK(q.d[0] == doctest::Approx(1.0 / 3.0));
  CHECK(q.d[1] == doctest::Approx(-2.0 / 9.0));
}

TEST_CASE("transcendental rules match analytic derivatives") {
  Dual x(0.7, 0);
  CHECK(sin(x).d[0] == doctest::Approx(std::cos(0.7)));
  CHECK(cos(x).d[0] == doctest::Approx(-std::sin(0.7)));
  CHECK(exp(x).d[0] == doctest::Approx(std::exp(0.7)));
  CHECK(log(x).d[0] == doctest::Approx(1.0 / 0.7));
  CHECK(sqrt(x).d[0] == doctest::Approx(0.5 / std::sqrt(0.7)));
  CHECK(pow(x, 3.0).d[0] == doctest::Approx(3.0 * 0.7 * 0.7));
}

TEST_CASE("composition obeys the chain rule") {
  Dual x(0.4, 0);
  // f(x) = sin(x^2) * exp(-x); f'(x) = 2x cos(x^2) e^{-x} - sin(x^2) e^{-x}
  Dual f = sin(x * x) * exp(-x);
  const double want =
      2.0 * 0.4 * std::cos(0.16) * std::exp(-0.4) - std::sin(0.16) * std::exp(-0.4);
  CHECK(f.d[0] == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("smooth_abs approximates |y| with bias at most eps") {
  for (double y : {-2.0, -0.01, 0.0, 0.3, 5.0}) {
    const double s = irm::smooth_abs(y, 1e-6);
    CHECK(s >= std::abs(y));
    CHECK(s - std::abs(y) <= 1e-6);
  }
  Dual y(1.5, 0);
  CHECK(irm::smooth_abs(y, 1e-9).d[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("gradient driver handles more inputs than dual lanes") {
  // f(z) = sum_i (i+1) z_i^2 over 20 inputs forces multiple seeding passes.
  auto f = [](std::span<const Dual> z) {
    Dual acc(0.0);
    for (size_t i = 0; i < z.size(); ++i) acc += double(i + 1) * z[i] * z[i];
    return acc;
  };
  Eigen::VectorXd z(20);
  for (int i = 0; i < 20; ++i) z[i] = 0.1 * (i - 10);
  Eigen::VectorXd g = irm::ad::gradient(f, z);
  REQUIRE(g.size() == 20);
  for (int i = 0; i < 20; ++i) {
    CHECK(g[i] == doctest::Approx(2.0 * (i + 1) * z[i]).epsilon(1e-14));
  }
}

TEST_CASE("jacobian driver matches analytic rows") {
  auto f = [](std::span<const Dual> z, std::span<Dual> out) {
    out[0] = z[0] * z[1];
    out[1] = sin(z[0]) + z[2];
    out[2] = z[2] * z[2] * z[2];
  };
  Eigen::VectorXd z(3);
  z << 0.5, -1.2, 0.8;
  Eigen::MatrixXd j = irm::ad::jacobian(f, z, 3);
  CHECK(j(0, 0) == doctest::Approx(-1.2));
  CHECK(j(0, 1) == doctest::Approx(0.5));
  CHECK(j(0, 2) == doctest::Approx(0.0));
  CHECK(j(1, 0) == doctest::Approx(std::cos(0.5)));
  CHECK(j(1, 2) == doctest::Approx(1.0));
  CHECK(j(2, 2) == doctest::Approx(3.0 * 0.64).epsilon(1e-14));
}

TEST_CASE("barycentric kernels propagate derivatives through time") {
  // Interpolate f(t) = t^2 on Lobatto-3 over [0,1]; seed t and check the
  // derivative of the evaluation with respect to t equals 2t.
  auto s = irm::make_supports(0.0, 1.0, 2);
  std::array<Dual, 3> pts, vals;
  for (int j = 0; j < 3; ++j) {
    pts[j] = Dual(s.points[j]);
    vals[j] = Dual(s.points[j] * s.points[j]);
  }
  std::array<double, 3> w{s.bary_weights[0], s.bary_weights[1], s.bary_weights[2]};
  Dual t(0.33, 0);
  Dual v = irm::bary_eval<Dual>(pts, w, vals, t);
  CHECK(v.v == doctest::Approx(0.33 * 0.33).epsilon(1e-14));
  CHECK(v.d[0] == doctest::Approx(0.66).epsilon(1e-12));
}
