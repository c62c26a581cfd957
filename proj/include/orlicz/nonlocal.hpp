#pragma once

#include <Eigen/Core>

#include "orlicz/solver.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

/// Uniform 1D grid for the fractional problem on (0, L).
///
/// Interior nodes x_i = i h, i = 1..N, h = L/(N+1). The halo carries u = 0 on
/// the grid nodes x = -m h and x = L + m h, m = 0..M, M = ceil(rcut/h). Pairs
/// are weighted by the midpoint rule for |x - y|^{-1} dx dy, i.e.
/// w = h^2 / |x_i - x_j|.
///
/// Beyond the halo u is still 0, and the interior-exterior part of the double
/// integral has the closed form
///   2 h / s * G(|u_i| / D^s),  G(t) = int_0^t A(r)/r dr,
/// per node and side, D the distance to the end of the halo. With
/// tail_correction on (the default) this term is part of the energy, so the
/// discrete energy approximates the integral over the whole line.
class NonlocalMesh {
 public:
  NonlocalMesh(double length, int nodes, double s, double rcut = 0.0, bool tail_correction = true);

  double length() const { return length_; }
  int nodes() const { return nodes_; }
  double order() const { return s_; }
  double rcut() const { return rcut_; }
  double spacing() const { return h_; }
  int halo_nodes() const { return halo_; }  ///< per side, including x = 0 and x = L
  bool tail_correction() const { return tail_; }

  const Eigen::VectorXd& node_weights() const { return weights_; }
  Eigen::VectorXd coordinates() const;

  /// Extended grid: index e = 0 .. extended_count()-1 at x = (e - M) h.
  int extended_count() const { return nodes_ + 2 * halo_ + 2; }
  double extended_coordinate(int e) const { return (e - halo_) * h_; }
  bool is_interior(int e) const { return e > halo_ && e <= halo_ + nodes_; }
  double pair_weight(int e1, int e2) const;

  /// Pair weight h^2/(k h) and (k h)^s for grid offset k >= 1.
  double offset_weight(int k) const { return w_[k]; }
  double offset_power(int k) const { return ds_[k]; }  ///< (k h)^s

  /// Distance from interior node i (0-based) to the far end of each halo.
  double tail_left(int i) const { return (i + 1 + halo_ + 0.5) * h_; }
  double tail_right(int i) const { return (nodes_ - i + halo_ + 0.5) * h_; }

  void check_conforms(const Eigen::Ref<const Eigen::VectorXd>& u) const;

 private:
  double length_;
  int nodes_;
  double s_;
  double rcut_;
  double h_;
  int halo_;
  bool tail_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd w_;
  Eigen::VectorXd ds_;
};

/// Sum over unordered pairs of 2 w A(|D^s u|), halo included, plus the
/// exterior term when the mesh has tail_correction.
double energy_s(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                const NonlocalMesh& nm);

/// Interior-exterior contribution beyond the halo, whether or not the mesh
/// adds it to the energy.
double tail_energy_s(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                     const NonlocalMesh& nm);

ScalarField energy_gradient_s(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                              const NonlocalMesh& nm, double eps_g = 1e-12);

/// Pair-sum flux of a(|D|)|D| over the modular flux int a(|u|)|u|.
double lagrange_quotient_s(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                           const NonlocalMesh& nm);

double weak_residual_s(const YoungFunction& F, const Eigen::Ref<const Eigen::VectorXd>& u,
                       double lambda, const NonlocalMesh& nm);

MinimizerResult solve_Es(const YoungFunction& F, const NonlocalMesh& nm, double alpha,
                         const SolveOptions& opts = {}, const ScalarField* warm = nullptr);

}  // namespace orlicz
