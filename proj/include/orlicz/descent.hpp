#pragma once

// Projected descent on the level set { u : sum_i w_i A(|u_i|) = alpha },
// shared by the local and the nonlocal discretizations.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <random>
#include <vector>

#include "orlicz/solver.hpp"

namespace orlicz::detail {

/// What the descent needs from a discretization of the gradient energy.
///   energy(F, u)          discrete gradient energy
///   flux(F, u)            discrete int a(|Du|)|Du| (numerator of lambda)
///   gradient(F, u, eps)   nodal gradient of energy
///   preconditioner(...)   SPD operator with .solve(), built from the
///                         linearized weights a(g)/g
///   linear_operator()     the p = 2 operator (weights 1), with .solve()
///   newton(F, u, eps, lambda, r, c_grad, c_curv)
///                         tangent Newton step: solves the bordered system
///                         [H - lambda diag(c_curv), c_grad; c_grad^T, 0] d = [-r; 0]
///                         with H the energy Hessian; non-finite on failure
template <class P>
concept DescentProblem = requires(const P& p, const YoungFunction& F, const Eigen::VectorXd& u) {
  { p.node_weights() } -> std::convertible_to<const Eigen::VectorXd&>;
  { p.energy(F, u) } -> std::convertible_to<double>;
  { p.flux(F, u) } -> std::convertible_to<double>;
  { p.gradient(F, u, 1e-12) } -> std::convertible_to<Eigen::VectorXd>;
  { p.preconditioner(F, u, 1e-12).solve(u) } -> std::convertible_to<Eigen::VectorXd>;
  { p.linear_operator().solve(u) } -> std::convertible_to<Eigen::VectorXd>;
  { p.newton(F, u, 1e-12, 1.0, u, u, u) } -> std::convertible_to<Eigen::VectorXd>;
};

/// a'(t) by a central difference in log t.
inline double density_slope(const YoungFunction& F, double t) {
  constexpr double kStep = 1e-5;
  const double up = std::exp(kStep);
  const double hi = F.density(t * up);
  const double lo = F.density(t / up);
  return (hi - lo) / (t * (up - 1.0 / up));
}

struct ConstraintTerms {
  Eigen::VectorXd gradient;  ///< w_i a(|u_i|) sgn(u_i)
  double flux = 0.0;         ///< sum_i w_i a(|u_i|) |u_i|
};

/// Diagonal of the constraint Hessian, w_i a'(|u_i|).
inline Eigen::VectorXd constraint_curvature(const YoungFunction& F, const Eigen::VectorXd& u,
                                            const Eigen::VectorXd& w, double eps) {
  Eigen::VectorXd out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    out[i] = w[i] * density_slope(F, std::max(std::abs(u[i]), eps));
  }
  return out;
}

inline ConstraintTerms constraint_terms(const YoungFunction& F, const Eigen::VectorXd& u,
                                        const Eigen::VectorXd& w) {
  ConstraintTerms c;
  c.gradient.resize(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double au = F.density(std::abs(u[i]));
    c.gradient[i] = w[i] * au * (u[i] < 0.0 ? -1.0 : 1.0);
    c.flux += w[i] * au * std::abs(u[i]);
  }
  return c;
}

/// Inverse power iteration for the p = 2 problem K x = mu W x.
template <DescentProblem P>
std::pair<Eigen::VectorXd, double> linear_mode(const P& prob) {
  const auto& w = prob.node_weights();
  const auto& op = prob.linear_operator();
  Eigen::VectorXd x = Eigen::VectorXd::Ones(w.size());
  double mu = 0.0;
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXd y = op.solve(Eigen::VectorXd(w.cwiseProduct(x)));
    const double next = x.dot(w.cwiseProduct(x)) / x.dot(w.cwiseProduct(y));
    x = y / y.cwiseAbs().maxCoeff();
    if (it > 2 && std::abs(next - mu) <= 1e-15 * std::abs(next)) {
      mu = next;
      break;
    }
    mu = next;
  }
  if (x.sum() < 0.0) x = -x;
  return {x, mu};
}

template <DescentProblem P>
MinimizerResult run_descent(const P& prob, const YoungFunction& F, double alpha,
                            Eigen::VectorXd u, const SolveOptions& opt) {
  const Eigen::VectorXd& w = prob.node_weights();
  const auto project = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return phi_root_weighted(F, v, w, alpha).r_alpha * v;
  };
  u = project(u);
  double E = prob.energy(F, u);

  MinimizerResult res;
  double lambda = 0.0;
  double residual = 1.0;
  int it = 0;
  for (;; ++it) {
    const Eigen::VectorXd gE = prob.gradient(F, u, opt.eps_g);
    const ConstraintTerms c = constraint_terms(F, u, w);
    lambda = prob.flux(F, u) / c.flux;
    const Eigen::VectorXd r = gE - lambda * c.gradient;
    const double gnorm = gE.norm();
    residual = gnorm > 0.0 ? r.norm() / gnorm : 0.0;
    if (residual < opt.tol || it >= opt.max_iter) break;

    // Backtracking on t -> E(project(u + t d)) with safeguarded quadratic
    // interpolation; the slack absorbs rounding in the energy sum.
    const double slack = 1e-14 * std::abs(E);
    Eigen::VectorXd trial;
    double E_trial = E;
    const auto search = [&](const Eigen::VectorXd& d, double slope, int max_ls) {
      double t = 1.0;
      for (int ls = 0; ls < max_ls; ++ls) {
        const Eigen::VectorXd v = u + t * d;
        E_trial = std::numeric_limits<double>::infinity();
        if (v.cwiseAbs().maxCoeff() > 0.0) {
          try {
            trial = project(v);
            E_trial = prob.energy(F, trial);
          } catch (const RangeError&) {
          }
          if (E_trial <= E + opt.armijo * t * slope + slack) return true;
        }
        double next = opt.shrink * t;
        if (std::isfinite(E_trial)) {
          const double denom = 2.0 * (E_trial - E - slope * t);
          if (denom > 0.0) next = std::clamp(-slope * t * t / denom, 0.1 * t, opt.shrink * t);
        }
        t = next;
      }
      return false;
    };

    // Tangent Newton first; preconditioned secant step when Newton is not a
    // descent direction or its line search stalls.
    bool accepted = false;
    {
      const Eigen::VectorXd curv = constraint_curvature(F, u, w, opt.eps_g);
      const Eigen::VectorXd d = prob.newton(F, u, opt.eps_g, lambda, r, c.gradient, curv);
      const double slope = r.dot(d);
      if (d.size() == u.size() && d.allFinite() && slope < 0.0) accepted = search(d, slope, 8);
    }
    if (!accepted) {
      Eigen::VectorXd d = -prob.preconditioner(F, u, opt.eps_g).solve(r);
      double slope = r.dot(d);
      if (!(slope < 0.0) || !d.allFinite()) {
        d = -r;
        slope = -r.squaredNorm();
      }
      accepted = search(d, slope, 60);
    }
    if (!accepted) break;
    if (E_trial > E + slack) ++res.monotonicity_violations;
    u = std::move(trial);
    E = E_trial;
  }

  if (u.sum() < 0.0) u = -u;
  res.u = std::move(u);
  res.alpha = weighted_modular(F, res.u, w).value;
  res.energy = prob.energy(F, res.u);
  res.lambda = lambda;
  res.residual = residual;
  res.iterations = it;
  res.converged = residual < opt.tol;
  return res;
}

/// Starts: the warm start (if any) or the p = 2 mode, then smoothed positive
/// random fields. Returns the lowest-energy converged run (ties: lowest
/// residual), or the best unconverged run flagged as such.
template <DescentProblem P>
MinimizerResult multistart(const P& prob, const YoungFunction& F, double alpha,
                           const SolveOptions& opt, const Eigen::VectorXd* warm) {
  if (!(alpha > 0.0)) throw ContractError("solve: alpha must be > 0");
  const Eigen::VectorXd& w = prob.node_weights();
  const int starts = std::max(1, opt.restarts);
  std::vector<MinimizerResult> runs;
  runs.reserve(starts);
  for (int s = 0; s < starts; ++s) {
    Eigen::VectorXd u0;
    if (s == 0) {
      u0 = warm ? *warm : linear_mode(prob).first;
    } else {
      std::mt19937_64 rng(opt.seed + static_cast<std::uint64_t>(s));
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      Eigen::VectorXd noise(w.size());
      for (Eigen::Index i = 0; i < noise.size(); ++i) noise[i] = unif(rng);
      u0 = prob.linear_operator().solve(Eigen::VectorXd(w.cwiseProduct(noise)));
      u0 += 0.25 * u0.cwiseAbs().maxCoeff() * noise.cwiseProduct(u0 / u0.maxCoeff());
    }
    runs.push_back(run_descent(prob, F, alpha, std::move(u0), opt));
  }
  const auto better = [](const MinimizerResult& a, const MinimizerResult& b) {
    if (a.converged != b.converged) return a.converged;
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.residual < b.residual;
  };
  std::size_t best = 0;
  for (std::size_t k = 1; k < runs.size(); ++k) {
    if (better(runs[k], runs[best])) best = k;
  }
  MinimizerResult out = std::move(runs[best]);
  out.restarts_used = starts;
  return out;
}

}  // namespace orlicz::detail
