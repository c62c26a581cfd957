#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace orlicz {

/// Raised when an argument violates an operation's contract (size mismatch,
/// nonpositive parameter, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a hypothesis required by a check is not met
/// (e.g. inner radius <= 1 for the decay check).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a root bracket cannot be established before the Young
/// function saturates.
class RangeError : public std::runtime_error {
 public:
  RangeError(const std::string& what, double lo, double hi)
      : std::runtime_error(what), lo_(lo), hi_(hi) {}
  double bracket_lo() const { return lo_; }
  double bracket_hi() const { return hi_; }

 private:
  double lo_;
  double hi_;
};

namespace numeric {

/// Finite stand-in for +inf returned by saturating evaluations.
inline constexpr double kSaturated = 1e300;

struct BisectionResult {
  double root = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
};

/// Bisection for a nondecreasing f on [lo, hi] with f(lo) <= target <= f(hi).
/// Returns the smallest point (up to tolerance) with f >= target. Stops when
/// the bracket is narrower than rel_tol * hi or when `done(x, fx)` says so.
template <class F, class Done>
BisectionResult bisect_increasing(const F& f, double target, double lo, double hi,
                                  double rel_tol, const Done& done,
                                  int max_iter = 400) {
  BisectionResult r{hi, lo, hi, 0};
  while (r.iterations < max_iter) {
    const double mid = 0.5 * (r.lo + r.hi);
    if (mid <= r.lo || mid >= r.hi) break;
    if (r.hi - r.lo <= rel_tol * std::abs(r.hi)) break;
    ++r.iterations;
    const double fm = f(mid);
    if (fm >= target) {
      r.hi = mid;
    } else {
      r.lo = mid;
    }
    if (done(mid, fm)) {
      r.root = mid;
      return r;
    }
  }
  r.root = r.hi;
  return r;
}

template <class F>
BisectionResult bisect_increasing(const F& f, double target, double lo, double hi,
                                  double rel_tol) {
  return bisect_increasing(f, target, lo, hi, rel_tol,
                           [](double, double) { return false; });
}

namespace detail {

template <class F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b]. The tolerance is
/// max(abs_tol, rel_tol * |coarse estimate|), refined on a 16-panel start so
/// that localized features are not missed.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double rel_tol,
                        double abs_tol = 1e-300, int max_depth = 48) {
  if (b <= a) return 0.0;
  constexpr int kPanels = 16;
  const double w = (b - a) / kPanels;
  std::vector<double> fx(2 * kPanels + 1);
  for (int i = 0; i <= 2 * kPanels; ++i) fx[i] = f(a + 0.5 * w * i);
  double coarse = 0.0;
  for (int k = 0; k < kPanels; ++k) {
    coarse += w / 6.0 * (fx[2 * k] + 4.0 * fx[2 * k + 1] + fx[2 * k + 2]);
  }
  const double tol = std::max(abs_tol, rel_tol * std::abs(coarse)) / kPanels;
  double total = 0.0;
  for (int k = 0; k < kPanels; ++k) {
    const double x0 = a + w * k;
    const double x1 = (k + 1 == kPanels) ? b : x0 + w;
    const double whole = (x1 - x0) / 6.0 * (fx[2 * k] + 4.0 * fx[2 * k + 1] + fx[2 * k + 2]);
    total += detail::simpson_step(f, x0, x1, fx[2 * k], fx[2 * k + 1], fx[2 * k + 2], whole,
                                  tol, max_depth);
  }
  return total;
}

/// Pairwise (tree) summation. Deterministic for a fixed input order.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// Geometric grid from `from` to `to` (either order) with `per_decade`
/// points per decade; both ends included, exponents snapped to k/per_decade
/// so that decades land exactly on powers of ten.
inline std::vector<double> geometric_grid(double from, double to, int per_decade) {
  if (!(from > 0.0) || !(to > 0.0) || per_decade < 1) {
    throw ContractError("geometric_grid: endpoints must be positive and per_decade >= 1");
  }
  const double e0 = std::log10(from) * per_decade;
  const double e1 = std::log10(to) * per_decade;
  const long k0 = std::lround(e0);
  const long k1 = std::lround(e1);
  std::vector<double> out;
  const long step = k1 >= k0 ? 1 : -1;
  for (long k = k0;; k += step) {
    out.push_back(std::pow(10.0, static_cast<double>(k) / per_decade));
    if (k == k1) break;
  }
  return out;
}

/// log(log1p(exp(y))) without overflow or underflow.
inline double log_log1p_exp(double y) {
  if (y < -30.0) return y - 0.5 * std::exp(y);
  if (y > 30.0) return std::log(y + std::log1p(std::exp(-y)));
  return std::log(std::log1p(std::exp(y)));
}

}  // namespace numeric
}  // namespace orlicz
