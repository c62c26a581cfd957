#pragma once

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "orlicz/numeric.hpp"

namespace orlicz {

class Mesh;

enum class Family { Power, SumOfPowers, PowerLog, ExpMinusPoly, ExpNegInvPower, DoubleExp, Custom };
enum class Endpoint { Zero, Infinity };

std::string to_string(Family f);
std::string to_string(Endpoint e);

/// A value together with a flag telling whether it was saturated.
struct Checked {
  double value = 0.0;
  bool overflow = false;
};

namespace detail {
struct CustomTable;
}

/// A Young function A(t) = int_0^t a, stored as a preset family plus its
/// parameters. Closed forms are used for every preset; the Custom family
/// integrates a user density numerically and caches cumulative integrals.
///
/// Evaluations never return infinity: values beyond double range come back as
/// numeric::kSaturated and the *_checked variants raise an overflow flag.
/// log_A / log_density stay finite far beyond that range and are what the
/// index and Matuszewska machinery use.
class YoungFunction {
 public:
  /// A(t) = t^p, p > 1.
  static YoungFunction power(double p);
  /// A(t) = t^p/p + t^q/q, 1 < p <= q.
  static YoungFunction sum_of_powers(double p, double q);
  /// A(t) = (t^p/p) ln^k(1 + t^r), p >= 1, k >= 0, r > 0, p + r k > 1.
  static YoungFunction power_log(double p, double k, double r);
  /// A(t) = e^t - sum_{j<n} t^j/j!, n >= 2.
  static YoungFunction exp_minus_poly(int n);
  /// A(t) = exp(-t^{-k}) near zero, continued by its second-order Taylor
  /// polynomial beyond half the inflection point of the density.
  static YoungFunction exp_neg_inv_power(double k);
  /// A(t) = e^{e^t} - e - e t.
  static YoungFunction double_exp();
  /// Arbitrary nondecreasing density with a(0) = 0.
  static YoungFunction custom(std::function<double(double)> density,
                              std::string label = "Custom");

  Family family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  std::string name() const;

  /// a(t), saturating.
  double density(double t) const;
  /// A(t), saturating.
  double operator()(double t) const { return eval(t).value; }
  Checked eval(double t) const;
  Checked density_checked(double t) const;

  double log_A(double t) const;
  double log_density(double t) const;
  /// t a(t) / A(t).
  double index_ratio(double t) const;

  /// Fill the Custom-family cache up to t so that concurrent readers only
  /// hit precomputed segments. No-op for closed-form families.
  void warm(double t_max) const;

 private:
  YoungFunction(Family f, std::vector<double> params) : family_(f), params_(std::move(params)) {}

  Family family_;
  std::vector<double> params_;
  std::shared_ptr<detail::CustomTable> custom_;
  std::string label_;
};

double eval_A(const YoungFunction& F, double t);
Checked eval_A_checked(const YoungFunction& F, double t);

/// Generalized inverse inf{ tau : a(tau) >= s } by monotone bisection.
Checked inverse_density(const YoungFunction& F, double s);

/// Complementary function as the integral of the generalized inverse density.
Checked complementary_eval(const YoungFunction& F, double t);
/// Complementary function by direct maximization of tau t - A(tau); the
/// maximizer is the generalized inverse density at t.
Checked complementary_direct(const YoungFunction& F, double t);
/// The complementary function as a Custom Young function.
YoungFunction complementary(const YoungFunction& F);

/// Quadrature of int A(|u|) with the mesh's nodal weights.
double modular(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
               const Mesh& m);
Checked modular_checked(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                        const Mesh& m);
/// Weighted modular sum_i w_i A(|u_i|) for an arbitrary nodal weight vector.
Checked weighted_modular(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                         const Eigen::Ref<const Eigen::VectorXd>& weights);

/// inf { k > 0 : modular(u / k) <= 1 }, relative tolerance 1e-8.
double luxemburg_norm(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                      const Mesh& m);

// ---------------------------------------------------------------------------
// Delta_2 condition

struct Delta2Grid {
  double t_min = 1e-12;
  double t_max = 1e12;
  int per_decade = 10;
  double divergence = 1e6;

  /// (t_min, 1] for Zero, [1, t_max) for Infinity; 12 decades each.
  static Delta2Grid defaults() { return {}; }
};

struct Delta2Report {
  Endpoint endpoint = Endpoint::Zero;
  bool holds = false;
  /// sup of t a(t)/A(t) over the half-range; meaningful only when finite.
  double p_index = 0.0;
  bool p_divergent = false;
  /// T_0 (upper end of the Zero range) or T_inf (lower end of the Infinity
  /// range); points whose A underflows are skipped and the threshold moved.
  double threshold = 1.0;
  double doubling_sup = 0.0;
  bool doubling_divergent = false;
  /// C_0 or C_inf, i.e. the doubling constant on the range (>= 2).
  double C_constant = 0.0;
  bool C_divergent = false;
  int skipped_points = 0;
};

Delta2Report delta2_report(const YoungFunction& F, Endpoint endpoint,
                           const Delta2Grid& grid = Delta2Grid::defaults());

/// max of the two endpoint indices when both endpoints satisfy Delta_2,
/// NaN otherwise.
double global_p_index(const YoungFunction& F);

// ---------------------------------------------------------------------------
// Matuszewska-Orlicz functions

enum class MatuszewskaRegime { PowerLike, TrivialDegenerate, Oscillating };
std::string to_string(MatuszewskaRegime r);

struct MatuszewskaOptions {
  double fit_tol = 1e-2;
  double stable_tol = 1e-3;
  double divergence = 1e6;
  double vanishing = 1e-6;
  double decades = 200.0;
  int per_decade = 4;
};

/// Geometric tau grid running from 1 toward the endpoint.
std::vector<double> matuszewska_tau_grid(Endpoint endpoint,
                                         const MatuszewskaOptions& opt = {});

struct MatuszewskaValue {
  double value = 0.0;  ///< running value at the last finite grid point (may be kSaturated)
  bool divergent = false;
  MatuszewskaRegime regime = MatuszewskaRegime::Oscillating;
  std::vector<double> running;
};

MatuszewskaValue matuszewska(const YoungFunction& F, Endpoint endpoint, double t,
                             const std::vector<double>& tau_grid,
                             const MatuszewskaOptions& opt = {});

struct MatuszewskaEstimate {
  Endpoint endpoint = Endpoint::Zero;
  std::vector<std::pair<double, double>> samples;
  MatuszewskaRegime regime = MatuszewskaRegime::Oscillating;
  double exponent = 0.0;
  bool exponent_valid = false;
  double max_fit_deviation = 0.0;
  std::vector<double> tau_grid;
};

MatuszewskaEstimate matuszewska_exponent(const YoungFunction& F, Endpoint endpoint,
                                         const MatuszewskaOptions& opt = {});

}  // namespace orlicz
