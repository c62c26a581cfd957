#include "orlicz/young.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <sstream>

#include "orlicz/mesh.hpp"

namespace orlicz {

using numeric::kSaturated;

namespace {

constexpr double kLogSaturated = 690.7755278982137;  // log(1e300)
constexpr double kE = 2.718281828459045;

Checked from_log(double log_value) {
  if (log_value > kLogSaturated) return {kSaturated, true};
  return {std::exp(log_value), false};
}

Checked saturate(double v) {
  if (!(v < kSaturated)) return {kSaturated, true};
  return {v, false};
}

// sum_{k>=0} t^k n!/(n+k)!, i.e. (e^t - sum_{j<n} t^j/j!) * n! / t^n.
double exp_tail_series(int n, double t) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 400; ++k) {
    term *= t / (n + k);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

double log_exp_minus_poly(int n, double t) {
  if (t <= 0.0) return -std::numeric_limits<double>::infinity();
  if (t <= 20.0) return n * std::log(t) - std::lgamma(n + 1.0) + std::log(exp_tail_series(n, t));
  // e^t dominates the polynomial part.
  double poly = 0.0;
  double term = 1.0;
  for (int k = 0; k < n; ++k) {
    poly += term;
    term *= t / (k + 1);
  }
  return t + std::log1p(-std::exp(std::log(poly) - t));
}

// Bell numbers B_2..B_9 for the series of e^{e^t} near zero.
constexpr std::array<double, 10> kBell = {1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147};

double double_exp_small_A(double t) {
  // e * sum_{n>=2} B_n t^n / n!
  double s = 0.0;
  double pw = t;
  double fact = 1.0;
  for (int n = 2; n < 10; ++n) {
    pw *= t;
    fact *= n;
    s += kBell[n] * pw / fact;
  }
  return kE * s;
}

double double_exp_small_a(double t) {
  // e * sum_{n>=1} B_{n+1} t^n / n!
  double s = 0.0;
  double pw = 1.0;
  double fact = 1.0;
  for (int n = 1; n < 9; ++n) {
    pw *= t;
    fact *= n;
    s += kBell[n + 1] * pw / fact;
  }
  return kE * s;
}

}  // namespace

namespace detail {

/// Cumulative integrals of a custom density on the knots t_k = 2^{k/8},
/// k >= kFirst, filled lazily under a mutex.
struct CustomTable {
  static constexpr int kFirst = -240;
  static constexpr int kPerOctave = 8;
  std::function<double(double)> density;
  mutable std::mutex mutex;
  mutable std::vector<double> cumulative;

  static double knot(int k) { return std::exp2(static_cast<double>(k) / kPerOctave); }

  double integrate(double a, double b) const {
    return numeric::adaptive_simpson(density, a, b, 1e-12);
  }

  // Integral from 0 to knot(kFirst + idx).
  double cumulative_at(std::size_t idx) const {
    std::lock_guard<std::mutex> lock(mutex);
    if (cumulative.empty()) cumulative.push_back(integrate(0.0, knot(kFirst)));
    while (cumulative.size() <= idx) {
      const int k = kFirst + static_cast<int>(cumulative.size());
      const double next = cumulative.back() + integrate(knot(k - 1), knot(k));
      cumulative.push_back(next);
      if (!(next < kSaturated)) break;
    }
    return idx < cumulative.size() ? cumulative[idx] : kSaturated;
  }

  double A(double t) const {
    if (t <= 0.0) return 0.0;
    if (t <= knot(kFirst)) return integrate(0.0, t);
    const int k = static_cast<int>(std::floor(std::log2(t) * kPerOctave));
    const int base = std::max(k, kFirst);
    const double start = cumulative_at(static_cast<std::size_t>(base - kFirst));
    if (!(start < kSaturated)) return kSaturated;
    return start + integrate(knot(base), t);
  }
};

}  // namespace detail

std::string to_string(Family f) {
  switch (f) {
    case Family::Power: return "power";
    case Family::SumOfPowers: return "sum_of_powers";
    case Family::PowerLog: return "power_log";
    case Family::ExpMinusPoly: return "exp_minus_poly";
    case Family::ExpNegInvPower: return "exp_neg_inv_power";
    case Family::DoubleExp: return "double_exp";
    case Family::Custom: return "custom";
  }
  return "?";
}

std::string to_string(Endpoint e) { return e == Endpoint::Zero ? "zero" : "infinity"; }

std::string to_string(MatuszewskaRegime r) {
  switch (r) {
    case MatuszewskaRegime::PowerLike: return "power_like";
    case MatuszewskaRegime::TrivialDegenerate: return "trivial_degenerate";
    case MatuszewskaRegime::Oscillating: return "oscillating";
  }
  return "?";
}

YoungFunction YoungFunction::power(double p) {
  if (!(p > 1.0)) throw ContractError("power: exponent p must be > 1");
  return YoungFunction(Family::Power, {p});
}

YoungFunction YoungFunction::sum_of_powers(double p, double q) {
  if (!(p > 1.0) || !(q >= p)) throw ContractError("sum_of_powers: need 1 < p <= q");
  return YoungFunction(Family::SumOfPowers, {p, q});
}

YoungFunction YoungFunction::power_log(double p, double k, double r) {
  if (!(p >= 1.0) || !(k >= 0.0) || !(r > 0.0) || !(p + r * k > 1.0) || (p == 1.0 && k == 0.0)) {
    throw ContractError("power_log: need p >= 1, exponent >= 0, r > 0 and p + r*exponent > 1");
  }
  return YoungFunction(Family::PowerLog, {p, k, r});
}

YoungFunction YoungFunction::exp_minus_poly(int n) {
  if (n < 2) throw ContractError("exp_minus_poly: need n >= 2 (a(0) = 0)");
  return YoungFunction(Family::ExpMinusPoly, {static_cast<double>(n)});
}

YoungFunction YoungFunction::exp_neg_inv_power(double k) {
  if (!(k > 0.0)) throw ContractError("exp_neg_inv_power: exponent must be > 0");
  const double tstar = 0.5 * std::pow(k / (k + 1.0), 1.0 / k);
  const double Astar = std::exp(-std::pow(tstar, -k));
  const double astar = k * std::pow(tstar, -k - 1.0) * Astar;
  const double slope = astar * (k * std::pow(tstar, -k) - (k + 1.0)) / tstar;
  return YoungFunction(Family::ExpNegInvPower, {k, tstar, Astar, astar, slope});
}

YoungFunction YoungFunction::double_exp() { return YoungFunction(Family::DoubleExp, {}); }

YoungFunction YoungFunction::custom(std::function<double(double)> density, std::string label) {
  if (!density) throw ContractError("custom: density must be callable");
  YoungFunction F(Family::Custom, {});
  F.custom_ = std::make_shared<detail::CustomTable>();
  F.custom_->density = std::move(density);
  F.label_ = std::move(label);
  return F;
}

std::string YoungFunction::name() const {
  if (family_ == Family::Custom) return label_;
  std::ostringstream os;
  switch (family_) {
    case Family::Power: os << "Power(" << params_[0] << ")"; break;
    case Family::SumOfPowers: os << "SumOfPowers(" << params_[0] << "," << params_[1] << ")"; break;
    case Family::PowerLog:
      os << "PowerLog(" << params_[0] << "," << params_[1] << "," << params_[2] << ")";
      break;
    case Family::ExpMinusPoly: os << "ExpMinusPoly(" << params_[0] << ")"; break;
    case Family::ExpNegInvPower: os << "ExpNegInvPower(" << params_[0] << ")"; break;
    case Family::DoubleExp: os << "DoubleExp"; break;
    case Family::Custom: break;
  }
  return os.str();
}

double YoungFunction::log_A(double t) const {
  if (t <= 0.0) return -std::numeric_limits<double>::infinity();
  const double lt = std::log(t);
  switch (family_) {
    case Family::Power: return params_[0] * lt;
    case Family::SumOfPowers: {
      const double p = params_[0], q = params_[1];
      if (lt < 0.0) return p * lt - std::log(p) + std::log1p((p / q) * std::exp((q - p) * lt));
      return q * lt - std::log(q) + std::log1p((q / p) * std::exp((p - q) * lt));
    }
    case Family::PowerLog: {
      const double p = params_[0], k = params_[1], r = params_[2];
      if (k == 0.0) return p * lt - std::log(p);
      return p * lt - std::log(p) + k * numeric::log_log1p_exp(r * lt);
    }
    case Family::ExpMinusPoly: return log_exp_minus_poly(static_cast<int>(params_[0]), t);
    case Family::ExpNegInvPower: {
      const double k = params_[0], ts = params_[1];
      if (t <= ts) return -std::pow(t, -k);
      const double d = t - ts;
      return std::log(params_[2] + params_[3] * d + 0.5 * params_[4] * d * d);
    }
    case Family::DoubleExp: {
      if (t < 0.01) return std::log(double_exp_small_A(t));
      const double et = std::exp(t);
      if (et < 700.0) return std::log(std::exp(et) - kE - kE * t);
      return et;  // e + e t is negligible against e^{e^t}
    }
    case Family::Custom: return std::log(custom_->A(t));
  }
  return 0.0;
}

double YoungFunction::log_density(double t) const {
  if (t <= 0.0) return -std::numeric_limits<double>::infinity();
  const double lt = std::log(t);
  switch (family_) {
    case Family::Power: return std::log(params_[0]) + (params_[0] - 1.0) * lt;
    case Family::SumOfPowers: {
      const double p = params_[0], q = params_[1];
      if (lt < 0.0) return (p - 1.0) * lt + std::log1p(std::exp((q - p) * lt));
      return (q - 1.0) * lt + std::log1p(std::exp((p - q) * lt));
    }
    case Family::PowerLog: {
      const double p = params_[0], k = params_[1], r = params_[2];
      if (k == 0.0) return (p - 1.0) * lt;
      // a = t^{p-1} L^{k-1} (L + (k r / p) sigma), L = ln(1+t^r), sigma = t^r/(1+t^r)
      const double y = r * lt;
      const double logL = numeric::log_log1p_exp(y);
      double ratio;  // sigma / L
      if (y < -30.0) {
        ratio = 1.0 - 0.5 * std::exp(y);
      } else if (y > 30.0) {
        ratio = std::exp(-logL);
      } else {
        const double x = std::exp(y);
        ratio = x / ((1.0 + x) * std::log1p(x));
      }
      return (p - 1.0) * lt + k * logL + std::log1p((k * r / p) * ratio);
    }
    case Family::ExpMinusPoly: {
      const int n = static_cast<int>(params_[0]);
      return log_exp_minus_poly(n - 1, t);
    }
    case Family::ExpNegInvPower: {
      const double k = params_[0], ts = params_[1];
      if (t <= ts) return std::log(k) - (k + 1.0) * lt - std::pow(t, -k);
      return std::log(params_[3] + params_[4] * (t - ts));
    }
    case Family::DoubleExp: {
      if (t < 0.01) return std::log(double_exp_small_a(t));
      const double et = std::exp(t);
      if (et < 700.0) return std::log(std::exp(et) * et - kE);
      return et + t;
    }
    case Family::Custom: return std::log(custom_->density(t));
  }
  return 0.0;
}

Checked YoungFunction::eval(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw ContractError("eval_A: argument must be finite and >= 0");
  }
  if (t == 0.0) return {0.0, false};
  switch (family_) {
    case Family::Power: return saturate(std::pow(t, params_[0]));
    case Family::SumOfPowers: {
      const double p = params_[0], q = params_[1];
      return saturate(std::pow(t, p) / p + std::pow(t, q) / q);
    }
    case Family::PowerLog: {
      const double p = params_[0], k = params_[1], r = params_[2];
      const double direct = std::pow(t, p) / p * std::pow(std::log1p(std::pow(t, r)), k);
      if (direct > 0.0 && std::isfinite(direct)) return saturate(direct);
      return from_log(log_A(t));
    }
    case Family::ExpMinusPoly: {
      const int n = static_cast<int>(params_[0]);
      if (t <= 20.0) {
        // t^n/n! * series, evaluated in log space to survive underflow of t^n
        return from_log(log_exp_minus_poly(n, t));
      }
      if (t > 709.0) return {kSaturated, true};
      double poly = 0.0;
      double term = 1.0;
      for (int k = 0; k < n; ++k) {
        poly += term;
        term *= t / (k + 1);
      }
      return saturate(std::exp(t) - poly);
    }
    case Family::ExpNegInvPower: {
      const double k = params_[0], ts = params_[1];
      if (t <= ts) return {std::exp(-std::pow(t, -k)), false};
      const double d = t - ts;
      return saturate(params_[2] + params_[3] * d + 0.5 * params_[4] * d * d);
    }
    case Family::DoubleExp: {
      if (t < 0.01) return {double_exp_small_A(t), false};
      return from_log(log_A(t));
    }
    case Family::Custom: return saturate(custom_->A(t));
  }
  return {0.0, false};
}

Checked YoungFunction::density_checked(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw ContractError("density: argument must be finite and >= 0");
  }
  if (t == 0.0) return {0.0, false};
  switch (family_) {
    case Family::Power: return saturate(params_[0] * std::pow(t, params_[0] - 1.0));
    case Family::SumOfPowers:
      return saturate(std::pow(t, params_[0] - 1.0) + std::pow(t, params_[1] - 1.0));
    case Family::ExpNegInvPower: {
      const double k = params_[0], ts = params_[1];
      if (t <= ts) return {k * std::pow(t, -k - 1.0) * std::exp(-std::pow(t, -k)), false};
      return saturate(params_[3] + params_[4] * (t - ts));
    }
    case Family::DoubleExp:
      if (t < 0.01) return {double_exp_small_a(t), false};
      return from_log(log_density(t));
    case Family::Custom: return saturate(custom_->density(t));
    default: return from_log(log_density(t));
  }
}

double YoungFunction::density(double t) const { return density_checked(t).value; }

double YoungFunction::index_ratio(double t) const {
  return std::exp(std::log(t) + log_density(t) - log_A(t));
}

void YoungFunction::warm(double t_max) const {
  if (custom_) (void)custom_->A(t_max);
}

double eval_A(const YoungFunction& F, double t) { return F.eval(t).value; }
Checked eval_A_checked(const YoungFunction& F, double t) { return F.eval(t); }

Checked inverse_density(const YoungFunction& F, double s) {
  if (!(s >= 0.0)) throw ContractError("inverse_density: argument must be >= 0");
  if (s == 0.0) return {0.0, false};
  if (s >= kSaturated) return {kSaturated, true};
  const auto a = [&F](double t) { return F.density(t); };
  double lo = 0.0;
  double hi = 1.0;
  if (a(hi) >= s) {
    lo = 0.5;
    while (a(lo) >= s) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-300) return {0.0, false};
    }
  } else {
    while (a(hi) < s) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) return {kSaturated, true};
    }
  }
  const auto r = numeric::bisect_increasing(a, s, lo, hi, 4e-16);
  return {r.root, false};
}

Checked complementary_eval(const YoungFunction& F, double t) {
  if (!(t >= 0.0)) throw ContractError("complementary_eval: argument must be >= 0");
  if (t == 0.0) return {0.0, false};
  if (inverse_density(F, t).overflow) return {kSaturated, true};
  const auto inv = [&F](double s) { return inverse_density(F, s).value; };
  return saturate(numeric::adaptive_simpson(inv, 0.0, t, 1e-11));
}

Checked complementary_direct(const YoungFunction& F, double t) {
  if (!(t >= 0.0)) throw ContractError("complementary_direct: argument must be >= 0");
  if (t == 0.0) return {0.0, false};
  const Checked tau = inverse_density(F, t);
  if (tau.overflow) return tau;
  const Checked A = F.eval(tau.value);
  if (A.overflow) return A;
  return {t * tau.value - A.value, false};
}

YoungFunction complementary(const YoungFunction& F) {
  return YoungFunction::custom([F](double s) { return inverse_density(F, s).value; },
                               "Complementary(" + F.name() + ")");
}

Checked weighted_modular(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                         const Eigen::Ref<const Eigen::VectorXd>& weights) {
  if (u.size() != weights.size()) {
    throw ContractError("modular: field size does not match the quadrature weights");
  }
  double s = 0.0;
  bool overflow = false;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const Checked v = F.eval(std::abs(u[i]));
    overflow = overflow || v.overflow;
    s += weights[i] * v.value;
  }
  if (overflow || !(s < kSaturated)) return {kSaturated, true};
  return {s, false};
}

Checked modular_checked(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                        const Mesh& m) {
  m.check_conforms(u);
  return weighted_modular(F, u, m.node_weights());
}

double modular(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u, const Mesh& m) {
  return modular_checked(F, u, m).value;
}

double luxemburg_norm(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                      const Mesh& m) {
  m.check_conforms(u);
  const double umax = u.cwiseAbs().maxCoeff();
  if (u.size() == 0 || umax == 0.0) return 0.0;
  const auto rho = [&](double k) { return modular(F, u / k, m); };
  // rho is nonincreasing in k: find k_lo with rho > 1 and k_hi with rho <= 1.
  double hi = umax;
  while (rho(hi) > 1.0) hi *= 2.0;
  double lo = hi * 0.5;
  while (rho(lo) <= 1.0) {
    hi = lo;
    lo *= 0.5;
    if (lo < 1e-300) return hi;
  }
  // -rho is nondecreasing in k; the smallest k with -rho(k) >= -1 is the norm.
  const auto neg = [&](double k) { return -rho(k); };
  return numeric::bisect_increasing(neg, -1.0, lo, hi, 1e-10).root;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> half_range_grid(Endpoint e, const Delta2Grid& g) {
  // Ordered from t = 1 toward the endpoint.
  return e == Endpoint::Zero ? numeric::geometric_grid(1.0, g.t_min, g.per_decade)
                             : numeric::geometric_grid(1.0, g.t_max, g.per_decade);
}

}  // namespace

Delta2Report delta2_report(const YoungFunction& F, Endpoint endpoint, const Delta2Grid& grid) {
  const auto ts = half_range_grid(endpoint, grid);
  if (std::abs(std::log10(ts.back())) < 6.0) {
    throw ContractError("delta2_report: grid must cover at least 6 decades");
  }
  Delta2Report rep;
  rep.endpoint = endpoint;
  rep.threshold = 1.0;
  const double log_div = std::log(grid.divergence);
  std::vector<double> log_doubling;  // ordered toward the endpoint
  double p_sup = 0.0;
  bool p_div = false;
  for (double t : ts) {
    const double lA = F.log_A(t);
    if (!std::isfinite(lA) && lA < 0.0) {
      ++rep.skipped_points;
      continue;
    }
    const double lr = std::log(t) + F.log_density(t) - lA;
    if (!std::isfinite(lr) || lr > log_div) {
      p_div = true;
    } else {
      p_sup = std::max(p_sup, std::exp(lr));
    }
    // Doubling ratio on pairs (t, 2t) that stay inside the half-range.
    const bool pair_inside = endpoint == Endpoint::Zero ? 2.0 * t <= 1.0 : true;
    if (pair_inside) {
      const double lA2 = F.log_A(2.0 * t);
      double ld = lA2 - lA;
      if (!std::isfinite(ld)) ld = std::numeric_limits<double>::infinity();
      log_doubling.push_back(ld);
    }
  }
  double ld_sup = -std::numeric_limits<double>::infinity();
  for (double v : log_doubling) ld_sup = std::max(ld_sup, v);
  rep.doubling_divergent = !(ld_sup <= log_div);
  rep.doubling_sup = rep.doubling_divergent ? std::exp(std::min(ld_sup, 700.0)) : std::exp(ld_sup);

  // Monotone growth over the last two decades toward the endpoint that does
  // not slow down. A bounded ratio creeping up to its limit (q close to p in
  // SumOfPowers) grows less in the last decade than in the one before.
  bool growing = false;
  const std::size_t dec = static_cast<std::size_t>(grid.per_decade);
  if (log_doubling.size() > 2 * dec) {
    const auto first = log_doubling.end() - static_cast<std::ptrdiff_t>(2 * dec) - 1;
    bool monotone = true;
    for (auto it = first; it + 1 != log_doubling.end(); ++it) {
      if (!(*(it + 1) >= *it)) monotone = false;
    }
    const double middle = *(first + static_cast<std::ptrdiff_t>(dec));
    const double earlier = middle - *first;
    const double later = log_doubling.back() - middle;
    growing = monotone && later + earlier > 1e-3 && later >= earlier;
  }
  rep.holds = !rep.doubling_divergent && !growing;
  rep.p_divergent = p_div || !rep.holds;
  rep.p_index = rep.p_divergent ? std::numeric_limits<double>::infinity() : std::max(p_sup, 1.0);
  rep.C_divergent = !rep.holds;
  rep.C_constant = rep.C_divergent ? std::numeric_limits<double>::infinity()
                                   : std::max(2.0, rep.doubling_sup);
  return rep;
}

double global_p_index(const YoungFunction& F) {
  const auto z = delta2_report(F, Endpoint::Zero);
  const auto i = delta2_report(F, Endpoint::Infinity);
  if (!z.holds || !i.holds) return std::numeric_limits<double>::quiet_NaN();
  return std::max(z.p_index, i.p_index);
}

// ---------------------------------------------------------------------------

std::vector<double> matuszewska_tau_grid(Endpoint endpoint, const MatuszewskaOptions& opt) {
  const double end = std::pow(10.0, endpoint == Endpoint::Zero ? -opt.decades : opt.decades);
  return numeric::geometric_grid(1.0, end, opt.per_decade);
}

MatuszewskaValue matuszewska(const YoungFunction& F, Endpoint endpoint, double t,
                             const std::vector<double>& tau_grid, const MatuszewskaOptions& opt) {
  if (!(t > 0.0)) throw ContractError("matuszewska: t must be > 0");
  if (tau_grid.size() < 2) throw ContractError("matuszewska: tau grid too short");
  (void)endpoint;
  MatuszewskaValue out;
  out.running.reserve(tau_grid.size());
  const double log_div = std::log(opt.divergence);
  const double log_van = std::log(opt.vanishing);
  double last_log = 0.0;
  bool diverged = false;
  bool vanished = false;
  for (double tau : tau_grid) {
    const double lr = F.log_A(tau * t) - F.log_A(tau);
    if (std::isnan(lr)) continue;
    last_log = lr;
    out.running.push_back(lr > kLogSaturated ? kSaturated : std::exp(lr));
    if (lr > log_div) diverged = true;
    if (lr < log_van) vanished = true;
  }
  out.value = out.running.empty() ? 0.0 : out.running.back();
  out.divergent = last_log > log_div;

  // Stabilization over the last decade of the grid.
  const double span = std::abs(std::log10(tau_grid.back() / tau_grid.front()));
  const double per_decade = (tau_grid.size() - 1) / std::max(span, 1e-300);
  const std::size_t last = std::min<std::size_t>(
      out.running.size(), static_cast<std::size_t>(std::ceil(per_decade)) + 1);
  bool stable = last >= 2;
  if (stable) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t k = out.running.size() - last; k < out.running.size(); ++k) {
      lo = std::min(lo, out.running[k]);
      hi = std::max(hi, out.running[k]);
    }
    stable = lo > 0.0 && hi < kSaturated && (hi / lo - 1.0) <= opt.stable_tol;
  }
  if (stable) {
    out.regime = MatuszewskaRegime::PowerLike;
  } else if ((t > 1.0 && diverged && out.divergent) ||
             (t < 1.0 && vanished && last_log < log_van)) {
    out.regime = MatuszewskaRegime::TrivialDegenerate;
  } else {
    out.regime = MatuszewskaRegime::Oscillating;
  }
  return out;
}

MatuszewskaEstimate matuszewska_exponent(const YoungFunction& F, Endpoint endpoint,
                                         const MatuszewskaOptions& opt) {
  MatuszewskaEstimate est;
  est.endpoint = endpoint;
  est.tau_grid = matuszewska_tau_grid(endpoint, opt);
  bool all_power = true;
  bool degenerate = true;
  std::vector<MatuszewskaValue> vals;
  for (int j = -3; j <= 3; ++j) {
    const double t = std::exp2(j);
    auto v = matuszewska(F, endpoint, t, est.tau_grid, opt);
    est.samples.emplace_back(t, v.value);
    if (v.regime != MatuszewskaRegime::PowerLike) all_power = false;
    if (j != 0 && v.regime != MatuszewskaRegime::TrivialDegenerate) degenerate = false;
    vals.push_back(std::move(v));
  }
  if (all_power) {
    est.regime = MatuszewskaRegime::PowerLike;
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [t, m] : est.samples) {
      const double x = std::log(t);
      sxy += x * std::log(m);
      sxx += x * x;
    }
    est.exponent = sxy / sxx;
    double dev = 0.0;
    bool below_identity = true;
    for (const auto& [t, m] : est.samples) {
      const double model = std::pow(t, est.exponent);
      dev = std::max(dev, std::abs(m - model) / model);
      if (t < 1.0 && m > t * (1.0 + opt.fit_tol)) below_identity = false;
    }
    est.max_fit_deviation = dev;
    est.exponent_valid = dev <= opt.fit_tol && below_identity && est.exponent >= 1.0 - opt.fit_tol;
  } else if (degenerate) {
    est.regime = MatuszewskaRegime::TrivialDegenerate;
    est.exponent = std::numeric_limits<double>::quiet_NaN();
  } else {
    est.regime = MatuszewskaRegime::Oscillating;
    est.exponent = std::numeric_limits<double>::quiet_NaN();
  }
  return est;
}

}  // namespace orlicz
