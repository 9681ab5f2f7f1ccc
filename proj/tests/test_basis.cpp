#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "irm/basis.hpp"

namespace {

// Independent Lagrange-product evaluation: p(t) = sum_j v_j prod_{k!=j}
// (t - x_k)/(x_j - x_k). O(n^2) and numerically naive, but correct for the
// small degrees used here.
double lagrange_product_eval(const Eigen::VectorXd& pts,
                             const Eigen::VectorXd& vals, double t) {
  double acc = 0.0;
  for (int j = 0; j < pts.size(); ++j) {
    double lj = 1.0;
    for (int k = 0; k < pts.size(); ++k) {
      if (k == j) continue;
      lj *= (t - pts[k]) / (pts[j] - pts[k]);
    }
    acc += vals[j] * lj;
  }
  return acc;
}

std::vector<double> to_vec(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace

TEST_CASE("supports degree 1 are the endpoints") {
  auto s = irm::make_supports(0.0, 1.0, 1);
  REQUIRE(s.points.size() == 2);
  CHECK(s.points[0] == doctest::Approx(0.0));
  CHECK(s.points[1] == doctest::Approx(1.0));
}

TEST_CASE("supports degree 2 have the midpoint interior node") {
  auto s = irm::make_supports(0.0, 1.0, 2);
  REQUIRE(s.points.size() == 3);
  CHECK(s.points[1] == doctest::Approx(0.5));
}

TEST_CASE("supports degree 4 interior nodes are +-sqrt(3/7) mapped") {
  // Interior Lobatto nodes of degree 4 are the roots of P4'(x), i.e.
  // +-sqrt(3/7) and 0 on [-1, 1]. Verified against a Newton iteration on
  // P4'(x) = (140 x^3 - 60 x) / 8.
  auto newton_root = [](double x) {
    for (int it = 0; it < 60; ++it) {
      const double f = (140.0 * x * x * x - 60.0 * x) / 8.0;
      const double df = (420.0 * x * x - 60.0) / 8.0;
      x -= f / df;
    }
    return x;
  };
  const double root = newton_root(0.7);
  CHECK(root == doctest::Approx(std::sqrt(3.0 / 7.0)).epsilon(1e-14));

  auto s = irm::make_supports(0.0, 2.0, 4);  // map [-1,1] -> [0,2]: x + 1
  REQUIRE(s.points.size() == 5);
  CHECK(s.points[1] == doctest::Approx(1.0 - root).epsilon(1e-14));
  CHECK(s.points[2] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.points[3] == doctest::Approx(1.0 + root).epsilon(1e-14));
}

TEST_CASE("degenerate interval and bad degree throw") {
  CHECK_THROWS_AS(irm::make_supports(1.0, 1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(irm::make_supports(2.0, 1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(irm::make_supports(0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("interpolation reproduces constants and exact-degree monomials") {
  auto s = irm::make_supports(0.0, 1.0, 2);
  std::vector<double> c{3.0, 3.0, 3.0};
  CHECK(irm::eval_interp(s, c, 0.33) == doctest::Approx(3.0));

  std::vector<double> sq(3);
  for (int j = 0; j < 3; ++j) sq[j] = s.points[j] * s.points[j];
  CHECK(irm::eval_interp(s, sq, 0.25) == doctest::Approx(0.0625));
}

TEST_CASE("cubic on degree-4 supports matches Lagrange-product oracle") {
  auto s = irm::make_supports(0.0, 2.0, 4);
  Eigen::VectorXd vals(5);
  for (int j = 0; j < 5; ++j) vals[j] = std::pow(s.points[j], 3);
  const double got = irm::eval_interp(s, to_vec(vals), 1.3);
  CHECK(got == doctest::Approx(2.197).epsilon(1e-12));
  CHECK(got ==
        doctest::Approx(lagrange_product_eval(s.points, vals, 1.3)).epsilon(1e-12));
}

TEST_CASE("reproduction property for random polynomials, degrees 1..8") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int a = 1; a <= 8; ++a) {
    auto s = irm::make_supports(-0.7, 1.9, a);
    std::vector<double> poly(a + 1);
    for (auto& c : poly) c = coef(rng);
    auto p = [&](double t) {
      double acc = 0.0;
      for (int k = a; k >= 0; --k) acc = acc * t + poly[k];
      return acc;
    };
    std::vector<double> vals(a + 1);
    for (int j = 0; j <= a; ++j) vals[j] = p(s.points[j]);
    std::uniform_real_distribution<double> tt(-0.7, 1.9);
    for (int trial = 0; trial < 100; ++trial) {
      const double t = tt(rng);
      const double want = p(t);
      CHECK(std::abs(irm::eval_interp(s, vals, t)) - std::abs(want) ==
            doctest::Approx(0.0).epsilon(1e-12));
      CHECK(irm::eval_interp(s, vals, t) ==
            doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("evaluation at a support returns the stored value bit-exactly") {
  auto s = irm::make_supports(0.0, 1.0, 4);
  std::vector<double> vals{0.1, -0.2, 0.3, -0.4, 0.5};
  for (int j = 0; j <= 4; ++j) {
    CHECK(irm::eval_interp(s, vals, s.points[j]) == vals[j]);
  }
}

TEST_CASE("derivative basics") {
  auto s = irm::make_supports(0.0, 1.0, 2);
  std::vector<double> c{5.0, 5.0, 5.0};
  CHECK(irm::eval_interp_deriv(s, c, 0.4) == doctest::Approx(0.0));

  std::vector<double> lin(3);
  for (int j = 0; j < 3; ++j) lin[j] = s.points[j];
  CHECK(irm::eval_interp_deriv(s, lin, 0.123) == doctest::Approx(1.0));

  std::vector<double> sq(3);
  for (int j = 0; j < 3; ++j) sq[j] = s.points[j] * s.points[j];
  CHECK(irm::eval_interp_deriv(s, sq, 0.7) == doctest::Approx(1.4));
}

TEST_CASE("derivative matches central differences of the interpolant") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int a = 1; a <= 8; ++a) {
    auto s = irm::make_supports(0.0, 1.0, a);
    std::vector<double> vals(a + 1);
    for (auto& v : vals) v = coef(rng);
    const double h = 1e-6;
    for (double t : {0.21, 0.48, 0.77}) {
      const double fd =
          (irm::eval_interp(s, vals, t + h) - irm::eval_interp(s, vals, t - h)) /
          (2.0 * h);
      const double an = irm::eval_interp_deriv(s, vals, t);
      CHECK(an == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("differentiation matrix") {
  SUBCASE("degree 1 on [0,1]") {
    auto d = irm::diff_matrix(irm::make_supports(0.0, 1.0, 1));
    CHECK(d.entries(0, 0) == doctest::Approx(-1.0));
    CHECK(d.entries(0, 1) == doctest::Approx(1.0));
    CHECK(d.entries(1, 0) == doctest::Approx(-1.0));
    CHECK(d.entries(1, 1) == doctest::Approx(1.0));
  }
  SUBCASE("rows sum to zero for degrees 1..8") {
    for (int a = 1; a <= 8; ++a) {
      auto d = irm::diff_matrix(irm::make_supports(-0.3, 2.1, a));
      for (int r = 0; r <= a; ++r) {
        CHECK(std::abs(d.entries.row(r).sum()) <= 1e-12);
      }
    }
  }
  SUBCASE("t^2 on Lobatto-3 over [0,1] maps {0,.25,1} to {0,1,2}") {
    auto s = irm::make_supports(0.0, 1.0, 2);
    auto d = irm::diff_matrix(s);
    Eigen::Vector3d v(0.0, 0.25, 1.0);
    Eigen::Vector3d dv = d.entries * v;
    CHECK(dv[0] == doctest::Approx(0.0));
    CHECK(dv[1] == doctest::Approx(1.0));
    CHECK(dv[2] == doctest::Approx(2.0));
  }
}

TEST_CASE("affine covariance of supports") {
  for (int a = 1; a <= 8; ++a) {
    auto ref = irm::make_supports(-1.0, 1.0, a);
    const double lo = 0.4, hi = 2.9;
    auto s = irm::make_supports(lo, hi, a);
    for (int j = 0; j <= a; ++j) {
      const double mapped = lo + (hi - lo) * (ref.points[j] + 1.0) / 2.0;
      CHECK(std::abs(s.points[j] - mapped) <= 1e-14 * std::max(1.0, std::abs(mapped)));
    }
  }
}
