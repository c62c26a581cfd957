#pragma once

#include <Eigen/Core>

#include <cstdint>

#include "orlicz/mesh.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

struct SolveOptions {
  double tol = 1e-8;         ///< normalized weak residual at which a run stops
  int max_iter = 50000;
  int restarts = 5;          ///< number of starts (first: p = 2 mode or warm start)
  std::uint64_t seed = 42;
  double armijo = 1e-4;
  double shrink = 0.5;       ///< largest backtracking factor
  double eps_g = 1e-12;      ///< floor on |grad u| in a(g)/g
};

struct NormalizationResult {
  double r_alpha = 1.0;
  double phi_value = 0.0;
  int bisection_iterations = 0;
};

struct MinimizerResult {
  ScalarField u;
  double alpha = 0.0;        ///< achieved modular of u
  double energy = 0.0;
  double lambda = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  int restarts_used = 0;
  int monotonicity_violations = 0;
};

/// Root r of phi(r) = sum_i w_i A(r |u_i|) = alpha by monotone bisection.
/// Throws RangeError if A saturates before the bracket is found.
NormalizationResult phi_root(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                             const Mesh& m, double alpha);
NormalizationResult phi_root_weighted(const YoungFunction& F,
                                      const Eigen::Ref<const Eigen::VectorXd>& u,
                                      const Eigen::Ref<const Eigen::VectorXd>& weights,
                                      double alpha);

/// Discrete int A(|grad u|).
double energy(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u, const Mesh& m);

/// Nodal gradient of the discrete energy, with a(g)/g evaluated at max(g, eps_g).
ScalarField energy_gradient(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                            const Mesh& m, double eps_g = 1e-12);

/// Negated energy gradient.
ScalarField descent_direction(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                              const Mesh& m);

/// int a(|grad u|)|grad u| / int a(|u|)|u|.
double lagrange_quotient(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                         const Mesh& m);

/// || dE(u) - lambda dC(u) || / || dE(u) || over the nodal basis, where C is
/// the modular constraint.
double weak_residual(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                     double lambda, const Mesh& m);

/// Constrained minimizer of int A(|grad u|) subject to int A(|u|) = alpha.
/// When `warm` is given it replaces the p = 2 mode as the first start.
MinimizerResult solve_E(const YoungFunction& F, const Mesh& m, double alpha,
                        const SolveOptions& opts = {}, const ScalarField* warm = nullptr);

/// First Dirichlet eigenvector (positive, unit max) of the p = 2 problem on
/// the mesh by inverse power iteration; also returns its Rayleigh quotient.
std::pair<ScalarField, double> linear_first_mode(const Mesh& m);

}  // namespace orlicz
