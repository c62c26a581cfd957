#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <iosfwd>
#include <vector>

#include "orlicz/numeric.hpp"

namespace orlicz {

/// Axis-aligned rectangular hole [x0, x1] x [y0, y1]; nodes on or inside it
/// are held at zero like the outer boundary.
struct Box {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
};

/// Nodal values at the interior (free) nodes of a mesh. Boundary and hole
/// nodes are identically zero and not stored.
using ScalarField = Eigen::VectorXd;

/// Structured Dirichlet mesh of an interval or a rectangle (optionally with
/// rectangular holes).
///
/// Every cell carries a list of node-pair "edges" with coefficients such that
/// the squared discrete gradient magnitude of the cell is
///   g_c^2 = sum_e coeff_e (u_a - u_b)^2.
/// In 1D this is the forward difference; in 2D it is the mean of the two
/// squared x-differences over hx^2 plus the mean of the two squared
/// y-differences over hy^2. Gradient terms use one value per cell with the
/// cell area as weight; zero-order terms use the product trapezoid rule at
/// the nodes.
class Mesh {
 public:
  struct Edge {
    Eigen::Index a = -1;  ///< interior index, -1 for a Dirichlet node
    Eigen::Index b = -1;
    double coeff = 0.0;
  };

  static Mesh interval(double length, int cells);
  static Mesh rectangle(double lx, double ly, int nx, int ny, std::vector<Box> holes = {});

  int dim() const { return dim_; }
  const std::vector<double>& extents() const { return extents_; }
  const std::vector<int>& counts() const { return counts_; }
  const std::vector<double>& spacing() const { return spacing_; }
  const std::vector<Box>& holes() const { return holes_; }

  Eigen::Index interior_count() const { return node_weights_.size(); }
  Eigen::Index cell_count() const { return static_cast<Eigen::Index>(cell_weights_.size()); }

  /// Nodal quadrature weights (positive) of the interior nodes.
  const Eigen::VectorXd& node_weights() const { return node_weights_; }
  /// Sum of nodal weights, i.e. the measure seen by the zero-order quadrature.
  double quadrature_measure() const { return node_weights_.sum(); }
  /// |Omega| (extents product minus holes).
  double measure() const;
  double inner_radius() const { return inner_radius_; }

  /// Interior node coordinates, one row per node.
  const Eigen::MatrixXd& coordinates() const { return coords_; }
  /// Grid-node index -> interior index (-1 for Dirichlet nodes).
  const std::vector<Eigen::Index>& interior_map() const { return interior_map_; }
  /// Boundary mask over all grid nodes (true = Dirichlet).
  std::vector<bool> boundary_mask() const;

  const std::vector<double>& cell_weights() const { return cell_weights_; }
  const std::vector<Edge>& edges() const { return edges_; }
  /// Edges of cell c are edges()[cell_offsets()[c] .. cell_offsets()[c+1]).
  const std::vector<Eigen::Index>& cell_offsets() const { return cell_offsets_; }

  void check_conforms(const Eigen::Ref<const Eigen::VectorXd>& u) const;

  /// sum_e coeff_e (u_a - u_b)^2 for every cell.
  Eigen::VectorXd cell_gradient_squares(const Eigen::Ref<const Eigen::VectorXd>& u) const;

  /// Assembled K with (K u)_k = d/du_k [ (1/2) sum_c w_c f_c g_c^2 ].
  Eigen::SparseMatrix<double> weighted_stiffness(const Eigen::Ref<const Eigen::VectorXd>& cell_factor) const;
  /// K(cell_factor) * u without assembling.
  Eigen::VectorXd apply_weighted_stiffness(const Eigen::Ref<const Eigen::VectorXd>& cell_factor,
                                           const Eigen::Ref<const Eigen::VectorXd>& u) const;

 private:
  Mesh() = default;
  void finish_cells();

  int dim_ = 1;
  std::vector<double> extents_;
  std::vector<int> counts_;
  std::vector<double> spacing_;
  std::vector<Box> holes_;
  std::vector<Eigen::Index> interior_map_;
  Eigen::VectorXd node_weights_;
  Eigen::MatrixXd coords_;
  std::vector<double> cell_weights_;
  std::vector<Edge> edges_;
  std::vector<Eigen::Index> cell_offsets_;
  double inner_radius_ = 0.0;
};

/// Discrete |grad u| per cell.
Eigen::VectorXd cell_gradient_magnitudes(const Eigen::Ref<const Eigen::VectorXd>& u,
                                         const Mesh& m);

/// Piecewise-linear radial profile: 1 on the ball B_r(center), decaying
/// linearly to 0 across the widest annulus that fits in Omega. Throws
/// PreconditionError when r >= inner radius or when the resulting discrete
/// gradient magnitudes are not all below 1.
ScalarField bump_field(const Mesh& m, double r, const std::vector<double>& center);

/// CSV with node coordinates and values, boundary nodes included (as zeros).
void write_field_csv(std::ostream& os, const Mesh& m, const Eigen::Ref<const Eigen::VectorXd>& u);

}  // namespace orlicz
