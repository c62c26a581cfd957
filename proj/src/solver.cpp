#include "orlicz/solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>

#include "orlicz/descent.hpp"

namespace orlicz {

namespace {

class SparseSolve {
 public:
  explicit SparseSolve(const Eigen::SparseMatrix<double>& K) : ldlt_(K) {
    if (ldlt_.info() != Eigen::Success) throw std::runtime_error("stiffness factorization failed");
  }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return ldlt_.solve(b); }

 private:
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

/// Gradient energy sum_c w_c A(g_c) on a structured mesh.
class LocalProblem {
 public:
  explicit LocalProblem(const Mesh& m)
      : mesh_(m), laplacian_(m.weighted_stiffness(Eigen::VectorXd::Ones(m.cell_count()))) {}

  const Eigen::VectorXd& node_weights() const { return mesh_.node_weights(); }

  double energy(const YoungFunction& F, const Eigen::VectorXd& u) const {
    const Eigen::VectorXd g = cell_gradient_magnitudes(u, mesh_);
    double s = 0.0;
    for (Eigen::Index c = 0; c < g.size(); ++c) s += mesh_.cell_weights()[c] * F(g[c]);
    return s;
  }

  double flux(const YoungFunction& F, const Eigen::VectorXd& u) const {
    const Eigen::VectorXd g = cell_gradient_magnitudes(u, mesh_);
    double s = 0.0;
    for (Eigen::Index c = 0; c < g.size(); ++c) {
      s += mesh_.cell_weights()[c] * F.density(g[c]) * g[c];
    }
    return s;
  }

  Eigen::VectorXd secant_factors(const YoungFunction& F, const Eigen::VectorXd& u,
                                 double eps) const {
    const Eigen::VectorXd g = cell_gradient_magnitudes(u, mesh_);
    Eigen::VectorXd k(g.size());
    for (Eigen::Index c = 0; c < g.size(); ++c) {
      const double gc = std::max(g[c], eps);
      k[c] = F.density(gc) / gc;
    }
    return k;
  }

  Eigen::VectorXd gradient(const YoungFunction& F, const Eigen::VectorXd& u, double eps) const {
    return mesh_.apply_weighted_stiffness(secant_factors(F, u, eps), u);
  }

  SparseSolve preconditioner(const YoungFunction& F, const Eigen::VectorXd& u, double eps) const {
    Eigen::VectorXd k = secant_factors(F, u, eps);
    const double floor = 1e-10 * k.maxCoeff();
    k = k.cwiseMax(floor > 0.0 ? floor : 1.0);
    return SparseSolve(mesh_.weighted_stiffness(k));
  }

  const SparseSolve& linear_operator() const { return laplacian_; }

  Eigen::VectorXd newton(const YoungFunction& F, const Eigen::VectorXd& u, double eps,
                         double lambda, const Eigen::VectorXd& r, const Eigen::VectorXd& c_grad,
                         const Eigen::VectorXd& c_curv) const {
    const Eigen::Index n = u.size();
    const Eigen::VectorXd g = cell_gradient_magnitudes(u, mesh_);
    Eigen::VectorXd k(g.size());
    for (Eigen::Index c = 0; c < g.size(); ++c) {
      const double gc = std::max(g[c], eps);
      k[c] = F.density(gc) / gc;
    }
    const Eigen::SparseMatrix<double> K = mesh_.weighted_stiffness(k);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(K.nonZeros() + 16 * g.size() + 3 * n);
    for (Eigen::Index col = 0; col < K.outerSize(); ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it) {
        trip.emplace_back(it.row(), it.col(), it.value());
      }
    }
    // Rank-one part w_c (a'(g) - a(g)/g) / g^2 (M_c u)(M_c u)^T per cell.
    const auto& edges = mesh_.edges();
    const auto& off = mesh_.cell_offsets();
    for (Eigen::Index c = 0; c < g.size(); ++c) {
      if (!(g[c] > eps)) continue;
      const double scale =
          mesh_.cell_weights()[c] * (detail::density_slope(F, g[c]) - k[c]) / (g[c] * g[c]);
      std::array<std::pair<Eigen::Index, double>, 8> v{};
      int nv = 0;
      const auto add = [&](Eigen::Index node, double x) {
        if (node < 0) return;
        for (int q = 0; q < nv; ++q) {
          if (v[q].first == node) {
            v[q].second += x;
            return;
          }
        }
        v[nv++] = {node, x};
      };
      for (Eigen::Index e = off[c]; e < off[c + 1]; ++e) {
        const Mesh::Edge& ed = edges[e];
        const double d = (ed.a >= 0 ? u[ed.a] : 0.0) - (ed.b >= 0 ? u[ed.b] : 0.0);
        add(ed.a, ed.coeff * d);
        add(ed.b, -ed.coeff * d);
      }
      for (int p = 0; p < nv; ++p) {
        for (int q = 0; q < nv; ++q) {
          trip.emplace_back(v[p].first, v[q].first, scale * v[p].second * v[q].second);
        }
      }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      trip.emplace_back(i, i, -lambda * c_curv[i]);
      trip.emplace_back(i, n, c_grad[i]);
      trip.emplace_back(n, i, c_grad[i]);
    }
    Eigen::SparseMatrix<double> B(n + 1, n + 1);
    B.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(B);
    if (lu.info() != Eigen::Success) return Eigen::VectorXd();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs.head(n) = -r;
    const Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success) return Eigen::VectorXd();
    return x.head(n);
  }

 private:
  const Mesh& mesh_;
  SparseSolve laplacian_;
};

}  // namespace

NormalizationResult phi_root_weighted(const YoungFunction& F,
                                      const Eigen::Ref<const Eigen::VectorXd>& u,
                                      const Eigen::Ref<const Eigen::VectorXd>& weights,
                                      double alpha) {
  if (!(alpha > 0.0)) throw ContractError("phi_root: alpha must be > 0");
  if (u.size() != weights.size()) throw ContractError("phi_root: field/weights size mismatch");
  if (!(u.cwiseAbs().maxCoeff() > 0.0)) throw ContractError("phi_root: field is identically zero");
  NormalizationResult out;
  const auto phi = [&](double r) -> double {
    const Checked v = weighted_modular(F, r * u, weights);
    return v.overflow ? std::numeric_limits<double>::infinity() : v.value;
  };
  double lo = 1.0;
  double hi = 1.0;
  double fhi = phi(hi);
  if (fhi < alpha) {
    while (fhi < alpha) {
      lo = hi;
      hi *= 2.0;
      fhi = phi(hi);
      if (hi > 1e300) throw RangeError("phi_root: no bracket before overflow", lo, hi);
    }
  } else {
    double flo = fhi;
    while (flo >= alpha) {
      hi = lo;
      lo *= 0.5;
      flo = phi(lo);
      if (lo < 1e-300) throw RangeError("phi_root: no bracket above underflow", lo, hi);
    }
  }
  if (!std::isfinite(phi(lo))) throw RangeError("phi_root: overflow inside bracket", lo, hi);
  const auto done = [&](double, double f) { return f == alpha; };
  const auto r = numeric::bisect_increasing(phi, alpha, lo, hi, 1e-16, done, 200);
  // Pick the bracket end closest to the target.
  const double f_lo = phi(r.lo);
  const double f_hi = phi(r.hi);
  if (f_hi == std::numeric_limits<double>::infinity()) {
    throw RangeError("phi_root: overflow at the root", r.lo, r.hi);
  }
  if (std::abs(f_lo - alpha) < std::abs(f_hi - alpha)) {
    out.r_alpha = r.lo;
    out.phi_value = f_lo;
  } else {
    out.r_alpha = r.hi;
    out.phi_value = f_hi;
  }
  if (r.root != r.lo && r.root != r.hi) {
    const double f_root = phi(r.root);
    if (std::abs(f_root - alpha) <= std::abs(out.phi_value - alpha)) {
      out.r_alpha = r.root;
      out.phi_value = f_root;
    }
  }
  out.bisection_iterations = r.iterations;
  return out;
}

NormalizationResult phi_root(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                             const Mesh& m, double alpha) {
  m.check_conforms(u);
  return phi_root_weighted(F, u, m.node_weights(), alpha);
}

double energy(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u, const Mesh& m) {
  m.check_conforms(u);
  return LocalProblem(m).energy(F, u);
}

ScalarField energy_gradient(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                            const Mesh& m, double eps_g) {
  m.check_conforms(u);
  return LocalProblem(m).gradient(F, u, eps_g);
}

ScalarField descent_direction(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                              const Mesh& m) {
  return -energy_gradient(F, u, m);
}

double lagrange_quotient(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                         const Mesh& m) {
  m.check_conforms(u);
  const double denom = detail::constraint_terms(F, u, m.node_weights()).flux;
  if (!(denom > 1e-300)) throw ContractError("lagrange_quotient: denominator underflow");
  return LocalProblem(m).flux(F, u) / denom;
}

double weak_residual(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                     double lambda, const Mesh& m) {
  m.check_conforms(u);
  const Eigen::VectorXd gE = energy_gradient(F, u, m);
  const auto c = detail::constraint_terms(F, u, m.node_weights());
  const double n = gE.norm();
  const Eigen::VectorXd r = gE - lambda * c.gradient;
  return n > 0.0 ? r.norm() / n : r.norm();
}

MinimizerResult solve_E(const YoungFunction& F, const Mesh& m, double alpha,
                        const SolveOptions& opts, const ScalarField* warm) {
  if (warm) m.check_conforms(*warm);
  const LocalProblem prob(m);
  return detail::multistart(prob, F, alpha, opts, warm);
}

std::pair<ScalarField, double> linear_first_mode(const Mesh& m) {
  return detail::linear_mode(LocalProblem(m));
}

}  // namespace orlicz
