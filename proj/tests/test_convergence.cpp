#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "irm/convergence.hpp"

namespace {

std::vector<irm::ConvergenceRow> power_law_rows(double k, double p) {
  std::vector<irm::ConvergenceRow> rows;
  for (int n : {5, 8, 13, 21, 34}) {
    irm::ConvergenceRow r;
    r.scheme = "fixed";
    r.n = n;
    r.eps_r = k * std::pow(1.0 / n, p);
    r.status = "converged";
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST_CASE("fit recovers an exact power law") {
  auto rows = power_law_rows(4.0, 3.0);
  auto fit = irm::fit_order(rows, "fixed", 1.0, 5);
  CHECK(fit.points == 5);
  CHECK(fit.p == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::exp(fit.log_k) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("fit uses only converged rows above the floor") {
  auto rows = power_law_rows(4.0, 3.0);
  rows[0].n = 2;                 // below default floor of 5
  rows[1].status = "max_iter";   // not converged
  auto fit = irm::fit_order(rows, "fixed", 1.0, 5);
  CHECK(fit.points == 3);
  CHECK(fit.p == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("fit respects the horizon scaling") {
  // With horizon T, the regressor is log(T/N); slope is unchanged, the
  // intercept absorbs T^p.
  auto rows = power_law_rows(4.0, 2.0);
  auto fit1 = irm::fit_order(rows, "fixed", 1.0, 5);
  auto fit2 = irm::fit_order(rows, "fixed", 3.0, 5);
  CHECK(fit1.p == doctest::Approx(fit2.p).epsilon(1e-12));
  CHECK(std::exp(fit2.log_k) * std::pow(3.0, 2.0) ==
        doctest::Approx(std::exp(fit1.log_k)).epsilon(1e-9));
}

TEST_CASE("wall time normalization divides by the maximum") {
  std::vector<irm::ConvergenceRow> rows(3);
  rows[0].wall_time_s = 1.0;
  rows[1].wall_time_s = 4.0;
  rows[2].wall_time_s = 2.0;
  irm::normalize_wall_times(rows);
  CHECK(rows[0].wall_time_norm == doctest::Approx(0.25));
  CHECK(rows[1].wall_time_norm == doctest::Approx(1.0));
  CHECK(rows[2].wall_time_norm == doctest::Approx(0.5));
}

TEST_CASE("csv round trip reproduces all numeric fields exactly") {
  std::vector<irm::ConvergenceRow> rows(2);
  rows[0] = {"fixed", 7, 1.2345678901234567e-5, 3.33e-17, 0.125, 0.5, 421,
             "converged"};
  rows[1] = {"flexible", 15, 9.876543210987654e-9, 1.0e-18, 0.25, 1.0, 993,
             "max_iter"};
  const std::string path = "test_convergence_tmp.csv";
  irm::write_convergence_csv(rows, path);
  auto back = irm::read_convergence_csv(path);
  REQUIRE(back.size() == 2);
  for (size_t i = 0; i < 2; ++i) {
    CHECK(back[i].scheme == rows[i].scheme);
    CHECK(back[i].n == rows[i].n);
    CHECK(back[i].eps_r == rows[i].eps_r);          // bitwise
    CHECK(back[i].eps_q == rows[i].eps_q);          // bitwise
    CHECK(back[i].wall_time_s == rows[i].wall_time_s);
    CHECK(back[i].wall_time_norm == rows[i].wall_time_norm);
    CHECK(back[i].iterations == rows[i].iterations);
    CHECK(back[i].status == rows[i].status);
  }
  std::remove(path.c_str());
}
