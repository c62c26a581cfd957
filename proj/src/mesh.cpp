#include "orlicz/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

namespace orlicz {

namespace {

bool inside_box(const Box& b, double x, double y) {
  return x >= b.x0 && x <= b.x1 && y >= b.y0 && y <= b.y1;
}

double distance_to_box(const Box& b, double x, double y) {
  const double dx = std::max({b.x0 - x, 0.0, x - b.x1});
  const double dy = std::max({b.y0 - y, 0.0, y - b.y1});
  return std::hypot(dx, dy);
}

}  // namespace

Mesh Mesh::interval(double length, int cells) {
  if (!(length > 0.0) || cells < 2) {
    throw ContractError("Mesh::interval: need length > 0 and at least 2 cells");
  }
  Mesh m;
  m.dim_ = 1;
  m.extents_ = {length};
  m.counts_ = {cells};
  const double h = length / cells;
  m.spacing_ = {h};
  m.interior_map_.assign(cells + 1, -1);
  m.node_weights_ = Eigen::VectorXd::Constant(cells - 1, h);
  m.coords_.resize(cells - 1, 1);
  for (int i = 1; i < cells; ++i) {
    m.interior_map_[i] = i - 1;
    m.coords_(i - 1, 0) = i * h;
  }
  m.cell_offsets_.push_back(0);
  for (int c = 0; c < cells; ++c) {
    m.cell_weights_.push_back(h);
    m.edges_.push_back({m.interior_map_[c + 1], m.interior_map_[c], 1.0 / (h * h)});
    m.cell_offsets_.push_back(static_cast<Eigen::Index>(m.edges_.size()));
  }
  m.inner_radius_ = 0.5 * length;
  return m;
}

Mesh Mesh::rectangle(double lx, double ly, int nx, int ny, std::vector<Box> holes) {
  if (!(lx > 0.0) || !(ly > 0.0) || nx < 2 || ny < 2) {
    throw ContractError("Mesh::rectangle: need positive extents and at least 2 cells per axis");
  }
  Mesh m;
  m.dim_ = 2;
  m.extents_ = {lx, ly};
  m.counts_ = {nx, ny};
  const double hx = lx / nx;
  const double hy = ly / ny;
  m.spacing_ = {hx, hy};
  m.holes_ = std::move(holes);
  const auto grid = [nx](int i, int j) { return static_cast<std::size_t>(j) * (nx + 1) + i; };
  m.interior_map_.assign(static_cast<std::size_t>(nx + 1) * (ny + 1), -1);
  std::vector<std::pair<double, double>> pts;
  Eigen::Index next = 0;
  for (int j = 1; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) {
      const double x = i * hx;
      const double y = j * hy;
      const bool in_hole = std::any_of(m.holes_.begin(), m.holes_.end(),
                                       [&](const Box& b) { return inside_box(b, x, y); });
      if (in_hole) continue;
      m.interior_map_[grid(i, j)] = next++;
      pts.emplace_back(x, y);
    }
  }
  if (next == 0) throw ContractError("Mesh::rectangle: no interior nodes");
  m.node_weights_ = Eigen::VectorXd::Constant(next, hx * hy);
  m.coords_.resize(next, 2);
  for (Eigen::Index k = 0; k < next; ++k) {
    m.coords_(k, 0) = pts[k].first;
    m.coords_(k, 1) = pts[k].second;
  }
  m.cell_offsets_.push_back(0);
  const double cx = 1.0 / (2.0 * hx * hx);
  const double cy = 1.0 / (2.0 * hy * hy);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const auto n00 = m.interior_map_[grid(i, j)];
      const auto n10 = m.interior_map_[grid(i + 1, j)];
      const auto n01 = m.interior_map_[grid(i, j + 1)];
      const auto n11 = m.interior_map_[grid(i + 1, j + 1)];
      m.cell_weights_.push_back(hx * hy);
      m.edges_.push_back({n10, n00, cx});
      m.edges_.push_back({n11, n01, cx});
      m.edges_.push_back({n01, n00, cy});
      m.edges_.push_back({n11, n10, cy});
      m.cell_offsets_.push_back(static_cast<Eigen::Index>(m.edges_.size()));
    }
  }
  if (m.holes_.empty()) {
    m.inner_radius_ = 0.5 * std::min(lx, ly);
  } else {
    // Sampled over the grid nodes; exact only up to the mesh spacing.
    double best = 0.0;
    for (int j = 0; j <= ny; ++j) {
      for (int i = 0; i <= nx; ++i) {
        const double x = i * hx;
        const double y = j * hy;
        double d = std::min({x, lx - x, y, ly - y});
        for (const Box& b : m.holes_) {
          if (inside_box(b, x, y)) d = 0.0;
          d = std::min(d, distance_to_box(b, x, y));
        }
        best = std::max(best, d);
      }
    }
    m.inner_radius_ = best;
  }
  return m;
}

double Mesh::measure() const {
  if (dim_ == 1) return extents_[0];
  double area = extents_[0] * extents_[1];
  for (const Box& b : holes_) {
    const double w = std::max(0.0, std::min(b.x1, extents_[0]) - std::max(b.x0, 0.0));
    const double h = std::max(0.0, std::min(b.y1, extents_[1]) - std::max(b.y0, 0.0));
    area -= w * h;
  }
  return area;
}

std::vector<bool> Mesh::boundary_mask() const {
  std::vector<bool> mask(interior_map_.size());
  for (std::size_t k = 0; k < interior_map_.size(); ++k) mask[k] = interior_map_[k] < 0;
  return mask;
}

void Mesh::check_conforms(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  if (u.size() != interior_count()) {
    throw ContractError("field has " + std::to_string(u.size()) + " values but the mesh has " +
                        std::to_string(interior_count()) + " interior nodes");
  }
}

Eigen::VectorXd Mesh::cell_gradient_squares(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  check_conforms(u);
  Eigen::VectorXd g2(cell_count());
  for (Eigen::Index c = 0; c < cell_count(); ++c) {
    double s = 0.0;
    for (Eigen::Index e = cell_offsets_[c]; e < cell_offsets_[c + 1]; ++e) {
      const Edge& ed = edges_[e];
      const double d = (ed.a >= 0 ? u[ed.a] : 0.0) - (ed.b >= 0 ? u[ed.b] : 0.0);
      s += ed.coeff * d * d;
    }
    g2[c] = s;
  }
  return g2;
}

Eigen::SparseMatrix<double> Mesh::weighted_stiffness(
    const Eigen::Ref<const Eigen::VectorXd>& cell_factor) const {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(edges_.size() * 4);
  for (Eigen::Index c = 0; c < cell_count(); ++c) {
    const double wc = cell_weights_[c] * cell_factor[c];
    for (Eigen::Index e = cell_offsets_[c]; e < cell_offsets_[c + 1]; ++e) {
      const Edge& ed = edges_[e];
      const double k = wc * ed.coeff;
      if (ed.a >= 0) trip.emplace_back(ed.a, ed.a, k);
      if (ed.b >= 0) trip.emplace_back(ed.b, ed.b, k);
      if (ed.a >= 0 && ed.b >= 0) {
        trip.emplace_back(ed.a, ed.b, -k);
        trip.emplace_back(ed.b, ed.a, -k);
      }
    }
  }
  Eigen::SparseMatrix<double> K(interior_count(), interior_count());
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

Eigen::VectorXd Mesh::apply_weighted_stiffness(const Eigen::Ref<const Eigen::VectorXd>& cell_factor,
                                               const Eigen::Ref<const Eigen::VectorXd>& u) const {
  check_conforms(u);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(interior_count());
  for (Eigen::Index c = 0; c < cell_count(); ++c) {
    const double wc = cell_weights_[c] * cell_factor[c];
    for (Eigen::Index e = cell_offsets_[c]; e < cell_offsets_[c + 1]; ++e) {
      const Edge& ed = edges_[e];
      const double d = (ed.a >= 0 ? u[ed.a] : 0.0) - (ed.b >= 0 ? u[ed.b] : 0.0);
      const double f = wc * ed.coeff * d;
      if (ed.a >= 0) out[ed.a] += f;
      if (ed.b >= 0) out[ed.b] -= f;
    }
  }
  return out;
}

Eigen::VectorXd cell_gradient_magnitudes(const Eigen::Ref<const Eigen::VectorXd>& u,
                                         const Mesh& m) {
  return m.cell_gradient_squares(u).cwiseSqrt();
}

ScalarField bump_field(const Mesh& m, double r, const std::vector<double>& center) {
  if (static_cast<int>(center.size()) != m.dim()) {
    throw ContractError("bump_field: center dimension does not match the mesh");
  }
  if (!(r > 0.0) || r >= m.inner_radius()) {
    throw PreconditionError("bump_field: plateau radius must lie in (0, inner radius)");
  }
  // Room between the plateau and the nearest obstacle.
  double reach = std::numeric_limits<double>::infinity();
  for (int d = 0; d < m.dim(); ++d) {
    reach = std::min({reach, center[d], m.extents()[d] - center[d]});
  }
  if (m.dim() == 2) {
    for (const Box& b : m.holes()) reach = std::min(reach, distance_to_box(b, center[0], center[1]));
  }
  const double width = reach - r;
  if (!(width > 1.0)) {
    throw PreconditionError(
        "bump_field: no transition annulus of width > 1 fits around the plateau "
        "(needs inner radius > 1)");
  }
  ScalarField u(m.interior_count());
  for (Eigen::Index k = 0; k < m.interior_count(); ++k) {
    double rho2 = 0.0;
    for (int d = 0; d < m.dim(); ++d) {
      const double dx = m.coordinates()(k, d) - center[d];
      rho2 += dx * dx;
    }
    const double rho = std::sqrt(rho2);
    u[k] = std::clamp(1.0 - (rho - r) / width, 0.0, 1.0);
  }
  const double gmax = cell_gradient_magnitudes(u, m).maxCoeff();
  if (!(gmax < 1.0)) {
    throw PreconditionError("bump_field: discrete gradient bound |grad u| < 1 not met (max " +
                            std::to_string(gmax) + ")");
  }
  return u;
}

void write_field_csv(std::ostream& os, const Mesh& m, const Eigen::Ref<const Eigen::VectorXd>& u) {
  m.check_conforms(u);
  os << std::setprecision(17);
  if (m.dim() == 1) {
    os << "x,u\n";
    const double h = m.spacing()[0];
    for (int i = 0; i <= m.counts()[0]; ++i) {
      const auto k = m.interior_map()[i];
      os << i * h << ',' << (k >= 0 ? u[k] : 0.0) << '\n';
    }
  } else {
    os << "x,y,u\n";
    const int nx = m.counts()[0];
    const int ny = m.counts()[1];
    for (int j = 0; j <= ny; ++j) {
      for (int i = 0; i <= nx; ++i) {
        const auto k = m.interior_map()[static_cast<std::size_t>(j) * (nx + 1) + i];
        os << i * m.spacing()[0] << ',' << j * m.spacing()[1] << ',' << (k >= 0 ? u[k] : 0.0)
           << '\n';
      }
    }
  }
}

}  // namespace orlicz
