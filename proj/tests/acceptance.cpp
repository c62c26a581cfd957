// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "properties.hpp"
#include "orlicz/nonlocal.hpp"
#include "orlicz/solver.hpp"
#include "orlicz/sweep.hpp"
#include "orlicz/young.hpp"

using namespace orlicz;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Shared between criteria 3 and 4.
std::vector<SweepRecord> g_sweep3;

Outcome c1() {
  const auto t0 = Clock::now();
  const Mesh m = Mesh::interval(1.0, 200);
  const auto r = solve_E(YoungFunction::power(2), m, 1.0);
  const double secs = seconds_since(t0);
  const double oracle_ev = oracle::tridiagonal_first(1.0, 200).lambda;
  const double closed = oracle::tridiagonal_closed_form(1.0, 200);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double gap = rel(r.energy / r.alpha, oracle_ev);
  const bool ok = r.converged && gap <= 1e-2 && rel(oracle_ev, closed) <= 1e-10 &&
                  rel(closed, pi2) <= 1e-3 && secs < 10.0;
  return {ok, fmt("E/alpha=%.8f oracle=%.8f gap=%.2e oracle-vs-pi^2=%.2e time=%.2fs", r.energy / r.alpha,
                  oracle_ev, gap, rel(closed, pi2), secs)};
}

Outcome c2() {
  const Mesh m = Mesh::interval(1.0, 200);
  const auto r = solve_E(YoungFunction::power(3), m, 1.0);
  const double shoot = oracle::plaplacian_shooting(3.0);
  const double closed = oracle::plaplacian_closed_form(3.0);
  const double q = r.energy / r.alpha;
  const double gap = rel(q, shoot);
  const bool ok = r.converged && gap <= 2e-2 && rel(shoot, closed) <= 1e-6;
  return {ok, fmt("quotient=%.6f shooting=%.6f closed-form=%.6f gap=%.2e", q, shoot, closed, gap)};
}

Outcome c3() {
  const auto t0 = Clock::now();
  const Mesh m = Mesh::interval(1.0, 200);
  g_sweep3 = run_sweep(YoungFunction::sum_of_powers(2, 4), m, numeric::geometric_grid(1e-2, 1e2, 5));
  const double secs = seconds_since(t0);
  const auto d = check_derivative(g_sweep3);
  int unconverged = 0;
  for (const auto& r : g_sweep3) unconverged += !r.converged;
  const bool ok = d.median_gap <= 2e-2 && d.sandwich_violations == 0 && unconverged == 0 && secs < 300.0;
  return {ok, fmt("records=%zu median-gap=%.2e max-gap=%.2e sandwich-violations=%d unconverged=%d time=%.1fs",
                  g_sweep3.size(), d.median_gap, d.max_gap, d.sandwich_violations, unconverged, secs)};
}

Outcome c4() {
  const auto F = YoungFunction::sum_of_powers(2, 4);
  const double p = std::max(delta2_report(F, Endpoint::Zero).p_index,
                            delta2_report(F, Endpoint::Infinity).p_index);
  auto recs = g_sweep3;
  const auto b = check_bounds(recs, p);
  const bool negative = negative_control_fails(recs, p);
  const bool ok = std::abs(p - 4.0) <= 1e-6 && b.passed && b.checked == static_cast<int>(recs.size()) && negative;
  return {ok, fmt("p=%.8f checked=%d failed(energy/eigenvalue/quotient)=%d/%d/%d negative-control-detected=%s",
                  p, b.checked, b.failed_energy, b.failed_eigenvalue, b.failed_quotient,
                  negative ? "yes" : "no")};
}

Outcome c5() {
  const Mesh m = Mesh::interval(1.0, 200);
  const auto F = YoungFunction::sum_of_powers(2, 4);
  const auto recs = run_sweep(F, m, numeric::geometric_grid(1e-4, 1e4, 5));
  const double q2 = solve_E(YoungFunction::power(2), m, 1.0).energy;
  const double q4 = solve_E(YoungFunction::power(4), m, 1.0).energy;
  const auto lo = estimate_limits(F, m, recs, Endpoint::Zero);
  const auto hi = estimate_limits(F, m, recs, Endpoint::Infinity);
  const double g_lo = rel(lo.extrapolated, q2);
  const double g_hi = rel(hi.extrapolated, q4);
  const bool ok = g_lo <= 5e-2 && g_hi <= 5e-2 && lo.passed && hi.passed;
  return {ok, fmt("low: extrapolated=%.5f Power(2)=%.5f gap=%.2e; high: extrapolated=%.5f Power(4)=%.5f gap=%.2e",
                  lo.extrapolated, q2, g_lo, hi.extrapolated, q4, g_hi)};
}

Outcome c6() {
  const Mesh m = Mesh::interval(4.0, 400);
  const auto F = YoungFunction::exp_minus_poly(2);
  const auto recs = run_sweep(F, m, numeric::geometric_grid(1.0, 1e4, 5));
  const auto d = check_decay(F, m, recs, Endpoint::Infinity);
  return {d.passed, fmt("E(1)/1=%.5f final=%.5f ratio=%.4f strictly-decreasing=%s (last decade, %d samples)",
                        d.quotient_at_one, d.final_quotient, d.ratio, d.strictly_decreasing ? "yes" : "no",
                        d.decade_samples)};
}

Outcome c7() {
  struct Row {
    const char* name;
    YoungFunction F;
    Endpoint e;
    double expect;  // NaN: TrivialDegenerate
  };
  const double nan = std::nan("");
  const std::vector<Row> rows{
      {"Power(2.5) 0", YoungFunction::power(2.5), Endpoint::Zero, 2.5},
      {"Power(2.5) inf", YoungFunction::power(2.5), Endpoint::Infinity, 2.5},
      {"SumOfPowers(2,4) 0", YoungFunction::sum_of_powers(2, 4), Endpoint::Zero, 2.0},
      {"SumOfPowers(2,4) inf", YoungFunction::sum_of_powers(2, 4), Endpoint::Infinity, 4.0},
      {"PowerLog(2,1,1) 0", YoungFunction::power_log(2, 1, 1), Endpoint::Zero, 3.0},
      {"PowerLog(2,1,1) inf", YoungFunction::power_log(2, 1, 1), Endpoint::Infinity, 2.0},
      {"PowerLog(1.5,2,0.5) 0", YoungFunction::power_log(1.5, 2, 0.5), Endpoint::Zero, 2.5},
      {"PowerLog(1.5,2,0.5) inf", YoungFunction::power_log(1.5, 2, 0.5), Endpoint::Infinity, 1.5},
      {"ExpMinusPoly(2) 0", YoungFunction::exp_minus_poly(2), Endpoint::Zero, 2.0},
      {"ExpMinusPoly(3) 0", YoungFunction::exp_minus_poly(3), Endpoint::Zero, 3.0},
      {"ExpMinusPoly(2) inf", YoungFunction::exp_minus_poly(2), Endpoint::Infinity, nan},
      {"ExpNegInvPower(1) 0", YoungFunction::exp_neg_inv_power(1), Endpoint::Zero, nan},
      {"DoubleExp inf", YoungFunction::double_exp(), Endpoint::Infinity, nan},
  };
  int bad = 0;
  double worst = 0.0;
  std::string misses;
  for (const auto& r : rows) {
    const auto est = matuszewska_exponent(r.F, r.e);
    bool ok;
    if (std::isnan(r.expect)) {
      ok = est.regime == MatuszewskaRegime::TrivialDegenerate && !est.exponent_valid;
    } else {
      const double err = std::abs(est.exponent - r.expect);
      worst = std::max(worst, err);
      ok = est.regime == MatuszewskaRegime::PowerLike && est.exponent_valid && err <= 1e-2;
    }
    if (!ok) {
      ++bad;
      misses += std::string(" ") + r.name;
    }
  }
  return {bad == 0, fmt("rows=%zu mismatches=%d worst-exponent-error=%.2e%s", rows.size(), bad, worst,
                        misses.c_str())};
}

Outcome c8() {
  const int n = 1000;
  struct Suite {
    const char* name;
    props::Tally t;
  };
  const std::vector<Suite> s{{"young-inequality", props::young_inequality(n)},
                             {"involution", props::involution(n)},
                             {"luxemburg", props::luxemburg_bound(n)},
                             {"convexity", props::convexity_scaling(n)},
                             {"index-bounds", props::index_bounds(n)},
                             {"lower-index", props::lower_index_bound(n)}};
  bool ok = true;
  std::string d;
  for (const auto& x : s) {
    ok = ok && x.t.violations == 0 && x.t.cases >= n / 2;
    d += fmt("%s=%d/%d ", x.name, x.t.violations, x.t.cases);
  }
  return {ok, "violations/cases: " + d};
}

Outcome c9() {
  const auto t0 = Clock::now();
  const NonlocalMesh nm(1.0, 128, 0.5);
  const auto P2 = YoungFunction::power(2);
  std::vector<double> q;
  bool converged = true;
  ScalarField u;
  for (double a : {0.5, 1.0, 2.0}) {
    const auto r = solve_Es(P2, nm, a);
    converged = converged && r.converged;
    q.push_back(r.energy / a);
    if (a == 1.0) u = r.u;
  }
  const double spread = (*std::max_element(q.begin(), q.end()) - *std::min_element(q.begin(), q.end())) / q[1];
  Eigen::VectorXd v(u.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = std::cos(0.37 * i) + 0.2;
  double worst_fd = 0.0;
  for (const auto& F : {P2, YoungFunction::sum_of_powers(2, 4)}) {
    const double fd = oracle::directional_fd([&](const Eigen::VectorXd& x) { return energy_s(F, x, nm); }, u, v);
    const double an = energy_gradient_s(F, u, nm).dot(v);
    worst_fd = std::max(worst_fd, rel(an, fd));
  }
  const double secs = seconds_since(t0);
  const bool ok = converged && spread <= 1e-2 && worst_fd <= 1e-5 && secs < 120.0;
  return {ok, fmt("E/alpha=%.8f,%.8f,%.8f spread=%.2e fd-gap=%.2e time=%.1fs", q[0], q[1], q[2], spread,
                  worst_fd, secs)};
}

Outcome c10() {
  const NonlocalMesh nm(1.0, 128, 0.5);
  const auto r = solve_Es(YoungFunction::sum_of_powers(2, 4), nm, 1e-3);
  const double ref = solve_Es(YoungFunction::power(2), nm, 1.0).energy;
  const double q = r.energy / 1e-3;
  const double gap = rel(q, ref);
  return {r.converged && gap <= 0.1, fmt("quotient=%.6f Power(2)=%.6f gap=%.2e", q, ref, gap)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"p=2 oracle", c1},
      {"p=3 oracle", c2},
      {"derivative identity", c3},
      {"bounds suite", c4},
      {"asymptotic limits", c5},
      {"non-Delta_2 decay", c6},
      {"Matuszewska recovery", c7},
      {"Young calculus properties", c8},
      {"nonlocal homogeneity", c9},
      {"nonlocal limit", c10},
  };
  // optional argument: run only the listed criterion numbers (4 needs 3)
  std::vector<bool> run(criteria.size(), argc <= 1);
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (k >= 1 && k <= static_cast<int>(criteria.size())) run[k - 1] = true;
  }
  if (run[3]) run[2] = true;

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (!run[k]) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
