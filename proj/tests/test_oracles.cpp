#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"

using doctest::Approx;

TEST_SUITE("oracles") {

TEST_CASE("tridiagonal inverse iteration reproduces the closed form") {
  for (int n : {10, 57, 200}) {
    const auto e = oracle::tridiagonal_first(1.0, n);
    CHECK(e.lambda == Approx(oracle::tridiagonal_closed_form(1.0, n)).epsilon(1e-11));
    CHECK((e.v.array() > 0).all());
  }
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(std::abs(oracle::tridiagonal_closed_form(1.0, 200) / pi2 - 1.0) < 1e-3);
  CHECK(oracle::tridiagonal_closed_form(2.0, 400) == Approx(oracle::tridiagonal_closed_form(1.0, 400) / 4.0).epsilon(1e-3));
}

TEST_CASE("shooting reproduces the p-Laplacian closed form") {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(oracle::plaplacian_shooting(2.0) == Approx(pi2).epsilon(1e-8));
  CHECK(oracle::plaplacian_closed_form(2.0) == Approx(pi2).epsilon(1e-14));
  for (double p : {1.5, 3.0, 4.0}) {
    CAPTURE(p);
    CHECK(oracle::plaplacian_shooting(p) == Approx(oracle::plaplacian_closed_form(p)).epsilon(1e-6));
  }
  // rescaling (0, L): lambda scales like L^{-p}
  CHECK(oracle::plaplacian_shooting(3.0, 2.0) == Approx(oracle::plaplacian_closed_form(3.0) / 8.0).epsilon(1e-6));
}

}  // TEST_SUITE
