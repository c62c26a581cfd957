#include <doctest.h>

#include <cmath>
#include <sstream>

#include "orlicz/sweep.hpp"

using namespace orlicz;
using doctest::Approx;

TEST_SUITE("sweep") {

TEST_CASE("grid validation") {
  CHECK_NOTHROW(check_sweep_grid(numeric::geometric_grid(1e-2, 1e2, 3)));
  CHECK_THROWS_AS(check_sweep_grid({1.0, 2.0}), ContractError);
  CHECK_THROWS_AS(check_sweep_grid(numeric::geometric_grid(1e-2, 1e2, 2)), ContractError);
  CHECK_THROWS_AS(check_sweep_grid({1.0, 2.0, 3.0, 4.0}), ContractError);
  CHECK_THROWS_AS(check_sweep_grid({4.0, 2.0, 1.0}), ContractError);
}

TEST_CASE("Power(2) sweep is exactly linear") {
  const Mesh m = Mesh::interval(1.0, 100);
  const auto grid = numeric::geometric_grid(1e-2, 1e2, 3);
  auto recs = run_sweep(YoungFunction::power(2), m, grid);
  REQUIRE(recs.size() == grid.size());
  for (const auto& r : recs) {
    REQUIRE(r.converged);
    CHECK(r.quotient == Approx(recs.front().quotient).epsilon(1e-10));
    CHECK(r.quotient == r.energy / r.alpha);
    if (std::isfinite(r.dE_dalpha)) CHECK(r.dE_dalpha == Approx(r.lambda).epsilon(1e-6));
  }
  CHECK(std::isnan(recs.front().dE_dalpha));
  CHECK(std::isnan(recs.back().dE_dalpha));
  const auto b = check_bounds(recs, 2.0);
  CHECK(b.passed);
  CHECK(negative_control_fails(recs, 2.0));
  CHECK(check_derivative(recs).passed);

  const auto lim = estimate_limits(YoungFunction::power(2), m, recs, Endpoint::Zero);
  CHECK(lim.gap <= 1e-6);
  CHECK(lim.passed);
}

TEST_CASE("parallel sweep matches cold sequential sweep") {
  const Mesh m = Mesh::interval(1.0, 60);
  const auto grid = numeric::geometric_grid(1e-1, 1e1, 3);
  SweepOptions seq;
  seq.warm_start = false;
  SweepOptions par = seq;
  par.jobs = 4;
  const auto F = YoungFunction::sum_of_powers(2, 3);
  const auto a = run_sweep(F, m, grid, seq);
  const auto b = run_sweep(F, m, grid, par);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].energy == b[k].energy);
}

TEST_CASE("E(1) interpolation") {
  std::vector<SweepRecord> recs(2);
  recs[0].alpha = 0.5;
  recs[0].energy = 2.0;
  recs[1].alpha = 2.0;
  recs[1].energy = 8.0;
  recs[0].converged = recs[1].converged = true;
  CHECK(energy_at_one(recs) == Approx(4.0));
}

TEST_CASE("Aitken extrapolation") {
  // q_k = 5 + 0.5^k
  CHECK(aitken(6.0, 5.5, 5.25) == Approx(5.0).epsilon(1e-14));
  CHECK(aitken(5.0, 5.0, 5.0) == 5.0);
  CHECK(aitken(1.0, 2.0, 4.0) == 4.0);  // expanding differences
}

TEST_CASE("(2,4) sweep on a coarse mesh") {
  const Mesh m = Mesh::interval(1.0, 60);
  // The central difference on a geometric grid leans toward the arithmetic
  // midpoint; 5 points per decade keeps that bias inside the 5% sandwich.
  auto recs = run_sweep(YoungFunction::sum_of_powers(2, 4), m, numeric::geometric_grid(1e-2, 1e2, 5));
  for (std::size_t k = 1; k < recs.size(); ++k) CHECK(recs[k].quotient > recs[k - 1].quotient);
  const auto b = check_bounds(recs, 4.0);
  CHECK(b.passed);
  for (const auto& r : recs) CHECK(r.bounds.all());
  CHECK(negative_control_fails(recs, 4.0));
  CHECK(check_derivative(recs).sandwich_violations == 0);
  CHECK(check_derivative(recs).lipschitz_violations == 0);
}

TEST_CASE("limit and decay preconditions") {
  const Mesh unit = Mesh::interval(1.0, 50);
  const auto F = YoungFunction::exp_minus_poly(2);
  std::vector<SweepRecord> recs(3);
  CHECK_THROWS_AS(estimate_limits(F, unit, recs, Endpoint::Infinity), PreconditionError);
  CHECK_THROWS_AS(check_decay(F, unit, recs, Endpoint::Infinity), PreconditionError);
  const Mesh wide = Mesh::interval(4.0, 50);
  CHECK_THROWS_AS(check_decay(YoungFunction::power(2), wide, recs, Endpoint::Infinity),
                  PreconditionError);
}

TEST_CASE("PowerLog limit at infinity uses the p = 2 reference") {
  const Mesh m = Mesh::interval(1.0, 60);
  const auto F = YoungFunction::power_log(2, 1, 1);
  const auto recs = run_sweep(F, m, numeric::geometric_grid(1e2, 1e4, 3));
  const auto lim = estimate_limits(F, m, recs, Endpoint::Infinity);
  CHECK(lim.exponent == Approx(2.0).epsilon(1e-2));
  CHECK(lim.reference == Approx(solve_E(YoungFunction::power(lim.exponent), m, 1.0).energy).epsilon(1e-8));
  CHECK(lim.reference == Approx(solve_E(YoungFunction::power(2), m, 1.0).energy).epsilon(1e-2));
}

TEST_CASE("CSV and plot script") {
  const Mesh m = Mesh::interval(1.0, 30);
  const auto recs = run_sweep(YoungFunction::power(2), m, numeric::geometric_grid(1.0, 10.0, 3));
  std::ostringstream a, b;
  write_sweep_csv(a, recs);
  write_sweep_csv(b, run_sweep(YoungFunction::power(2), m, numeric::geometric_grid(1.0, 10.0, 3)));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("alpha,", 0) == 0);
  const std::string s = plot_script("out.csv", "t");
  CHECK(s.find("out.csv") != std::string::npos);
  CHECK(s.find("loglog") != std::string::npos);
}

}  // TEST_SUITE
