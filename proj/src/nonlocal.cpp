#include "orlicz/nonlocal.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <string>

#include "orlicz/descent.hpp"

namespace orlicz {

NonlocalMesh::NonlocalMesh(double length, int nodes, double s, double rcut, bool tail_correction)
    : length_(length), nodes_(nodes), s_(s), rcut_(rcut > 0.0 ? rcut : 4.0 * length),
      tail_(tail_correction) {
  if (!(length > 0.0) || nodes < 2) {
    throw ContractError("NonlocalMesh: need length > 0 and at least 2 nodes");
  }
  if (!(s > 0.0 && s < 1.0)) throw ContractError("NonlocalMesh: s must lie in (0, 1)");
  if (rcut < 0.0 || !std::isfinite(rcut)) throw ContractError("NonlocalMesh: rcut must be > 0");
  h_ = length / (nodes + 1);
  halo_ = static_cast<int>(std::ceil(rcut_ / h_ - 1e-9));
  weights_ = Eigen::VectorXd::Constant(nodes, h_);
  const int kmax = nodes_ + 1 + halo_;
  w_.resize(kmax + 1);
  ds_.resize(kmax + 1);
  w_[0] = 0.0;
  ds_[0] = 0.0;
  for (int k = 1; k <= kmax; ++k) {
    w_[k] = h_ / k;
    ds_[k] = std::pow(k * h_, s_);
  }
}

Eigen::VectorXd NonlocalMesh::coordinates() const {
  return Eigen::VectorXd::LinSpaced(nodes_, h_, nodes_ * h_);
}

double NonlocalMesh::pair_weight(int e1, int e2) const {
  if (e1 == e2) throw ContractError("pair_weight: diagonal pairs are excluded");
  if (e1 < 0 || e2 < 0 || e1 >= extended_count() || e2 >= extended_count()) {
    throw ContractError("pair_weight: index outside the extended grid");
  }
  return h_ * h_ / std::abs(extended_coordinate(e1) - extended_coordinate(e2));
}

void NonlocalMesh::check_conforms(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  if (u.size() != nodes_) {
    throw ContractError("field has " + std::to_string(u.size()) + " values but the nonlocal mesh has " +
                        std::to_string(nodes_) + " nodes");
  }
}

namespace {

/// G(t) = int_0^t A(r)/r dr = int_{-inf}^{ln t} A(e^v) dv.
double tail_primitive(const YoungFunction& F, double t) {
  if (!(t > 0.0)) return 0.0;
  if (F.family() == Family::Power) return F(t) / F.params()[0];
  const double top = std::log(t);
  const auto f = [&](double v) { return F(std::exp(v)); };
  return numeric::adaptive_simpson(f, top - 60.0, top, 1e-11);
}

class DenseSolve {
 public:
  explicit DenseSolve(const Eigen::MatrixXd& P) : ldlt_(P) {
    if (ldlt_.info() != Eigen::Success) throw std::runtime_error("pair matrix factorization failed");
  }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return ldlt_.solve(b); }

 private:
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
};

/// Pair-sum energy of the 1D fractional problem. Halo pairs only see |u_i|;
/// the exterior term is per node.
class NonlocalProblem {
 public:
  explicit NonlocalProblem(const NonlocalMesh& nm) : nm_(nm), linear_(assemble_linear()) {}

  const Eigen::VectorXd& node_weights() const { return nm_.node_weights(); }

  double energy(const YoungFunction& F, const Eigen::VectorXd& u) const {
    return row_sum(u, [&](double D) { return F(D); },
                   [&](double ui, double Dl, double Dr) { return tail_term(F, ui, Dl, Dr); });
  }

  double tail(const YoungFunction& F, const Eigen::VectorXd& u) const {
    Eigen::VectorXd rows(u.size());
    for (int i = 0; i < nm_.nodes(); ++i) {
      rows[i] = tail_term(F, u[i], nm_.tail_left(i), nm_.tail_right(i));
    }
    return numeric::pairwise_sum(std::span<const double>(rows.data(), rows.size()));
  }

  double flux(const YoungFunction& F, const Eigen::VectorXd& u) const {
    const double c = 2.0 * nm_.spacing() / nm_.order();
    return row_sum(
        u, [&](double D) { return F.density(D) * D; },
        [&](double ui, double Dl, double Dr) {
          if (!nm_.tail_correction() || ui == 0.0) return 0.0;
          const double a = std::abs(ui);
          return c * (F(a / std::pow(Dl, nm_.order())) + F(a / std::pow(Dr, nm_.order())));
        });
  }

  Eigen::VectorXd gradient(const YoungFunction& F, const Eigen::VectorXd& u, double eps) const {
    const int n = nm_.nodes();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const int k = j - i;
        const double D = (u[i] - u[j]) / nm_.offset_power(k);
        const double f = 2.0 * nm_.offset_weight(k) * secant(F, D, eps) * D / nm_.offset_power(k);
        g[i] += f;
        g[j] -= f;
      }
      double halo = 0.0;
      for_halo(i, [&](int k) {
        const double D = u[i] / nm_.offset_power(k);
        halo += 2.0 * nm_.offset_weight(k) * secant(F, D, eps) * D / nm_.offset_power(k);
      });
      g[i] += halo + tail_slope(F, u[i], i);
    }
    return g;
  }

  DenseSolve preconditioner(const YoungFunction& F, const Eigen::VectorXd& u, double eps) const {
    Eigen::MatrixXd P = assemble(u, [&](double D) { return secant(F, std::abs(D), eps); });
    for (int i = 0; i < nm_.nodes(); ++i) {
      const double a = std::max(std::abs(u[i]), eps);
      P(i, i) += tail_slope(F, a, i) / a;
    }
    const double floor = 1e-10 * P.diagonal().maxCoeff();
    for (int i = 0; i < nm_.nodes(); ++i) P(i, i) = std::max(P(i, i), floor);
    return DenseSolve(P);
  }

  const DenseSolve& linear_operator() const { return linear_; }

  Eigen::VectorXd newton(const YoungFunction& F, const Eigen::VectorXd& u, double eps,
                         double lambda, const Eigen::VectorXd& r, const Eigen::VectorXd& c_grad,
                         const Eigen::VectorXd& c_curv) const {
    const int n = nm_.nodes();
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n + 1, n + 1);
    B.topLeftCorner(n, n) =
        assemble(u, [&](double D) { return detail::density_slope(F, std::max(std::abs(D), eps)); });
    const double c = 2.0 * nm_.spacing() / nm_.order();
    for (int i = 0; i < n; ++i) {
      if (nm_.tail_correction()) {
        // d^2/du^2 of c G(u / D^s) = c (a(t) t - A(t)) / u^2, t = u / D^s.
        const double a = std::max(std::abs(u[i]), eps);
        for (double D : {nm_.tail_left(i), nm_.tail_right(i)}) {
          const double t = a / std::pow(D, nm_.order());
          B(i, i) += c * (F.density(t) * t - F(t)) / (a * a);
        }
      }
      B(i, i) -= lambda * c_curv[i];
      B(i, n) = c_grad[i];
      B(n, i) = c_grad[i];
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs.head(n) = -r;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    return lu.solve(rhs).head(n);
  }

 private:
  static double secant(const YoungFunction& F, double D, double eps) {
    const double g = std::max(std::abs(D), eps);
    return F.density(g) / g;
  }

  template <class K>
  void for_halo(int i, const K& visit) const {
    const int M = nm_.halo_nodes();
    for (int k = i + 1; k <= i + 1 + M; ++k) visit(k);
    for (int k = nm_.nodes() - i; k <= nm_.nodes() - i + M; ++k) visit(k);
  }

  double tail_term(const YoungFunction& F, double ui, double Dl, double Dr) const {
    if (!nm_.tail_correction() || ui == 0.0) return 0.0;
    const double a = std::abs(ui);
    const double c = 2.0 * nm_.spacing() / nm_.order();
    return c * (tail_primitive(F, a / std::pow(Dl, nm_.order())) +
                tail_primitive(F, a / std::pow(Dr, nm_.order())));
  }

  /// d/du_i of the exterior term: c A(t)/u summed over both sides.
  double tail_slope(const YoungFunction& F, double ui, int i) const {
    if (!nm_.tail_correction() || ui == 0.0) return 0.0;
    const double a = std::abs(ui);
    const double c = 2.0 * nm_.spacing() / nm_.order();
    double s = 0.0;
    for (double D : {nm_.tail_left(i), nm_.tail_right(i)}) s += F(a / std::pow(D, nm_.order()));
    return c * s / ui;
  }

  /// Per-node rows of the pair sum, reduced pairwise in a fixed order.
  template <class Pair, class Tail>
  double row_sum(const Eigen::VectorXd& u, const Pair& pair, const Tail& tail) const {
    const int n = nm_.nodes();
    Eigen::VectorXd rows(n);
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = i + 1; j < n; ++j) {
        const int k = j - i;
        s += 2.0 * nm_.offset_weight(k) * pair(std::abs(u[i] - u[j]) / nm_.offset_power(k));
      }
      const double a = std::abs(u[i]);
      for_halo(i, [&](int k) { s += 2.0 * nm_.offset_weight(k) * pair(a / nm_.offset_power(k)); });
      rows[i] = s + tail(u[i], nm_.tail_left(i), nm_.tail_right(i));
    }
    return numeric::pairwise_sum(std::span<const double>(rows.data(), rows.size()));
  }

  /// Symmetric pair matrix with entries 2 w kappa(D) / d^{2s}.
  template <class Kappa>
  Eigen::MatrixXd assemble(const Eigen::VectorXd& u, const Kappa& kappa) const {
    const int n = nm_.nodes();
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const int k = j - i;
        const double ds = nm_.offset_power(k);
        const double v = 2.0 * nm_.offset_weight(k) * kappa((u[i] - u[j]) / ds) / (ds * ds);
        P(i, j) -= v;
        P(j, i) -= v;
        P(i, i) += v;
        P(j, j) += v;
      }
      for_halo(i, [&](int k) {
        const double ds = nm_.offset_power(k);
        P(i, i) += 2.0 * nm_.offset_weight(k) * kappa(u[i] / ds) / (ds * ds);
      });
    }
    return P;
  }

  /// The p = 2 operator: kappa = 1, exterior term of A(t) = t^2 / 2.
  DenseSolve assemble_linear() const {
    Eigen::MatrixXd P = assemble(Eigen::VectorXd::Zero(nm_.nodes()), [](double) { return 1.0; });
    if (nm_.tail_correction()) {
      const double c = nm_.spacing() / nm_.order();
      for (int i = 0; i < nm_.nodes(); ++i) {
        P(i, i) += c * (std::pow(nm_.tail_left(i), -2.0 * nm_.order()) +
                        std::pow(nm_.tail_right(i), -2.0 * nm_.order()));
      }
    }
    return DenseSolve(P);
  }

  const NonlocalMesh& nm_;
  DenseSolve linear_;
};

}  // namespace

double energy_s(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                const NonlocalMesh& nm) {
  nm.check_conforms(u);
  return NonlocalProblem(nm).energy(F, u);
}

double tail_energy_s(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                     const NonlocalMesh& nm) {
  nm.check_conforms(u);
  const NonlocalMesh on(nm.length(), nm.nodes(), nm.order(), nm.rcut(), true);
  return NonlocalProblem(on).tail(F, u);
}

ScalarField energy_gradient_s(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                              const NonlocalMesh& nm, double eps_g) {
  nm.check_conforms(u);
  return NonlocalProblem(nm).gradient(F, u, eps_g);
}

double lagrange_quotient_s(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                           const NonlocalMesh& nm) {
  nm.check_conforms(u);
  const double denom = detail::constraint_terms(F, u, nm.node_weights()).flux;
  if (!(denom > 1e-300)) throw ContractError("lagrange_quotient_s: denominator underflow");
  return NonlocalProblem(nm).flux(F, u) / denom;
}

double weak_residual_s(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                       double lambda, const NonlocalMesh& nm) {
  nm.check_conforms(u);
  const Eigen::VectorXd gE = NonlocalProblem(nm).gradient(F, u, 1e-12);
  const auto c = detail::constraint_terms(F, u, nm.node_weights());
  const double n = gE.norm();
  const Eigen::VectorXd r = gE - lambda * c.gradient;
  return n > 0.0 ? r.norm() / n : r.norm();
}

MinimizerResult solve_Es(const YoungFunction& F, const NonlocalMesh& nm, double alpha,
                         const SolveOptions& opts, const ScalarField* warm) {
  if (warm) nm.check_conforms(*warm);
  const NonlocalProblem prob(nm);
  return detail::multistart(prob, F, alpha, opts, warm);
}

}  // namespace orlicz
