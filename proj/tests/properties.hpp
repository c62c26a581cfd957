#pragma once

// Randomized property suites over the Young function families. Each returns
// the number of cases examined and the number of violations.

#include <cmath>
#include <random>

#include "orlicz/mesh.hpp"
#include "orlicz/young.hpp"

namespace props {

using namespace orlicz;

struct Tally {
  int cases = 0;
  int violations = 0;
};

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(unsigned seed) : rng(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

  YoungFunction young(bool delta2_only = false) {
    switch (integer(0, delta2_only ? 2 : 5)) {
      case 0:
        return YoungFunction::power(uniform(1.1, 6.0));
      case 1: {
        const double p = uniform(1.1, 4.0);
        return YoungFunction::sum_of_powers(p, p + uniform(0.0, 4.0));
      }
      case 2:
        return YoungFunction::power_log(uniform(1.0, 4.0), uniform(0.2, 3.0), uniform(0.2, 3.0));
      case 3:
        return YoungFunction::exp_minus_poly(integer(2, 5));
      case 4:
        return YoungFunction::exp_neg_inv_power(uniform(0.3, 3.0));
      default:
        return YoungFunction::double_exp();
    }
  }
};

inline bool representable(const YoungFunction& F, double t) {
  const Checked c = eval_A_checked(F, t);
  return !c.overflow && c.value > 1e-280;
}

/// a(0) = A(0) = 0, a nondecreasing and positive, midpoint convexity.
inline Tally density_invariants(int n, unsigned seed = 101) {
  Gen g(seed);
  Tally r;
  for (int k = 0; k < n; ++k, ++r.cases) {
    const auto F = g.young();
    if (F.density(0.0) != 0.0 || F(0.0) != 0.0) ++r.violations;
    double prev = 0.0;
    for (double t = 1e-2; t < 1e2; t *= 1.5) {
      const double a = F.density(t);
      if (a < prev || (a <= 0.0 && representable(F, t))) ++r.violations;
      prev = a;
    }
    const double x = g.log_uniform(1e-2, 1e2);
    const double y = g.log_uniform(1e-2, 1e2);
    if (representable(F, x) && representable(F, y) && representable(F, 0.5 * (x + y))) {
      if (F(0.5 * (x + y)) > 0.5 * (F(x) + F(y)) * (1 + 1e-12)) ++r.violations;
    }
  }
  return r;
}

/// tau t <= Abar(tau) + A(t) on [1e-3, 1e3]^2.
inline Tally young_inequality(int n, unsigned seed = 102) {
  Gen g(seed);
  Tally r;
  for (int k = 0; k < n; ++k, ++r.cases) {
    const auto F = g.young();
    const double tau = g.log_uniform(1e-3, 1e3);
    const double t = g.log_uniform(1e-3, 1e3);
    const double Ab = complementary_eval(F, tau).value;
    const double A = F(t);
    if (tau * t > Ab + A + 1e-8 * (1.0 + Ab + A)) ++r.violations;
  }
  return r;
}

/// Double complement reproduces A to 1e-6 relative. The double complement
/// is a cached Custom function, so a few functions get many points each.
inline Tally involution(int n, unsigned seed = 103) {
  Gen g(seed);
  Tally r;
  const int functions = 5;
  for (int f = 0; f < functions; ++f) {
    const auto F = g.young(true);
    const auto back = complementary(complementary(F));
    for (int k = 0; k < n / functions; ++k, ++r.cases) {
      const double t = g.log_uniform(1e-2, 1e2);
      if (std::abs(back(t) - F(t)) > 1e-6 * F(t)) ++r.violations;
    }
  }
  return r;
}

/// Luxemburg norm <= max{1, modular} for random fields.
inline Tally luxemburg_bound(int n, unsigned seed = 104) {
  Gen g(seed);
  const Mesh m1 = Mesh::interval(1.0, 24);
  const Mesh m2 = Mesh::rectangle(1.0, 1.0, 6, 6);
  Tally r;
  for (int k = 0; k < n; ++k) {
    const auto F = g.young();
    const Mesh& m = k % 2 ? m1 : m2;
    Eigen::VectorXd u(m.interior_count());
    const double scale = g.log_uniform(1e-2, 5.0);
    for (auto& x : u) x = scale * g.uniform(-1.0, 1.0);
    const Checked mod = modular_checked(F, u, m);
    if (mod.overflow) continue;
    ++r.cases;
    if (luxemburg_norm(F, u, m) > std::max(1.0, mod.value)) ++r.violations;
  }
  return r;
}

/// A(tau t) <= tau A(t) for tau < 1 and >= for tau > 1.
inline Tally convexity_scaling(int n, unsigned seed = 105) {
  Gen g(seed);
  Tally r;
  for (int k = 0; k < n; ++k) {
    const auto F = g.young();
    const double t = g.log_uniform(1e-3, 1e3);
    const double tau = g.uniform(0.0, 1.0);
    const double big = g.uniform(1.0, 10.0);
    if (!representable(F, t)) continue;
    ++r.cases;
    if (F(tau * t) > tau * F(t) * (1 + 1e-12)) ++r.violations;
    if (representable(F, big * t) && F(big * t) < big * F(t) * (1 - 1e-12)) ++r.violations;
  }
  return r;
}

/// Under Delta_2 with index p: A <= a t <= p A and tau^p A(t) <= A(tau t) <= tau A(t).
inline Tally index_bounds(int n, unsigned seed = 106) {
  Gen g(seed);
  Tally r;
  for (int k = 0; k < n; ++k, ++r.cases) {
    const auto F = g.young(true);
    const double p = global_p_index(F);
    if (!std::isfinite(p)) {
      ++r.violations;
      continue;
    }
    const double t = g.log_uniform(1e-3, 1e3);
    const double tau = g.uniform(0.0, 1.0);
    const double A = F(t);
    const double at = F.density(t) * t;
    if (at < A * (1 - 1e-12) || at > p * A * (1 + 1e-9)) ++r.violations;
    const double As = F(tau * t);
    if (As < std::pow(tau, p) * A * (1 - 1e-9) || As > tau * A * (1 + 1e-12)) ++r.violations;
  }
  return r;
}

/// A <= a t for every family, Delta_2 or not.
inline Tally lower_index_bound(int n, unsigned seed = 107) {
  Gen g(seed);
  Tally r;
  for (int k = 0; k < n; ++k) {
    const auto F = g.young();
    const double t = g.log_uniform(1e-3, 1e2);
    if (!representable(F, t)) continue;
    ++r.cases;
    if (F.density(t) * t < F(t) * (1 - 1e-12)) ++r.violations;
  }
  return r;
}

/// M(s t) <= M(s) M(t) (1 + fit tolerance) where all three are power-like.
inline Tally submultiplicativity(int n, unsigned seed = 108) {
  Gen g(seed);
  MatuszewskaOptions opt;
  Tally r;
  for (int k = 0; k < n; ++k) {
    const auto F = g.young(true);
    const Endpoint e = k % 2 ? Endpoint::Zero : Endpoint::Infinity;
    const auto grid = matuszewska_tau_grid(e, opt);
    const double s = g.log_uniform(0.125, 8.0);
    const double t = g.log_uniform(0.125, 8.0);
    const auto Ms = matuszewska(F, e, s, grid, opt);
    const auto Mt = matuszewska(F, e, t, grid, opt);
    const auto Mst = matuszewska(F, e, s * t, grid, opt);
    if (Ms.regime != MatuszewskaRegime::PowerLike || Mt.regime != MatuszewskaRegime::PowerLike ||
        Mst.regime != MatuszewskaRegime::PowerLike) {
      continue;
    }
    ++r.cases;
    if (Mst.value > Ms.value * Mt.value * (1 + opt.fit_tol)) ++r.violations;
  }
  return r;
}

}  // namespace props
