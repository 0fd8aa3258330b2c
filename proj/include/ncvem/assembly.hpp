#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <fstream>
#include <functional>
#include <iomanip>
#include <string>
#include <vector>

#include "ncvem/errors.hpp"
#include "ncvem/local_forms.hpp"
#include "ncvem/mesh.hpp"
#include "ncvem/projectors.hpp"

namespace ncvem {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Global numbering: edge moments first (edge-major), then bulk moments
/// (cell-major). Interior and interface edges carry a single set of moments
/// shared by both neighbours.
class DofMap {
 public:
  DofMap(const Mesh& mesh, int k)
      : k_(k), n_edges_(static_cast<int>(mesh.edges.size())), n_cells_(static_cast<int>(mesh.cells.size())) {
    if (k < 1) fail(ErrorKind::InvalidArgument, "polynomial order k must be >= 1");
    boundary_.assign(static_cast<std::size_t>(size()), 0);
    for (int e = 0; e < n_edges_; ++e)
      if (mesh.edges[static_cast<std::size_t>(e)].tag == EdgeTag::Boundary)
        for (int i = 0; i < k_; ++i) boundary_[static_cast<std::size_t>(edge_dof(e, i))] = 1;
  }

  int k() const { return k_; }
  int bulk_per_cell() const { return poly_dim(k_ - 2); }
  int size() const { return k_ * n_edges_ + bulk_per_cell() * n_cells_; }
  int edge_dof(int edge, int moment) const { return edge * k_ + moment; }
  int cell_dof(int cell, int moment) const { return k_ * n_edges_ + cell * bulk_per_cell() + moment; }
  bool is_boundary(int dof) const { return boundary_[static_cast<std::size_t>(dof)] != 0; }
  const std::vector<char>& boundary_mask() const { return boundary_; }

  /// Global indices of a cell's DoFs in local layout.
  std::vector<int> local_to_global(const Mesh& mesh, int cell) const {
    const Cell& c = mesh.cells[static_cast<std::size_t>(cell)];
    std::vector<int> out;
    out.reserve(c.edges.size() * static_cast<std::size_t>(k_) + static_cast<std::size_t>(bulk_per_cell()));
    for (int e : c.edges)
      for (int i = 0; i < k_; ++i) out.push_back(edge_dof(e, i));
    for (int j = 0; j < bulk_per_cell(); ++j) out.push_back(cell_dof(cell, j));
    return out;
  }

 private:
  int k_;
  int n_edges_;
  int n_cells_;
  std::vector<char> boundary_;
};

inline DofMap build_dof_map(const Mesh& mesh, int k) { return DofMap(mesh, k); }

/// Boundary data g(point, region of the adjacent cell).
using BoundaryFunction = std::function<double(const Point&, int)>;

/// All local elements of a mesh for a fixed order.
struct Discretization {
  const Mesh* mesh = nullptr;
  int k = 1;
  DofMap dofs;
  std::vector<LocalElement> elements;

  Discretization(const Mesh& m, int order, const QuadratureOptions& opt = QuadratureOptions::from_env())
      : mesh(&m), k(order), dofs(m, order) {
    elements.reserve(m.cells.size());
    for (std::size_t c = 0; c < m.cells.size(); ++c) elements.emplace_back(m, static_cast<int>(c), order, opt);
  }

  double max_condition() const {
    double c = 0.0;
    for (const auto& e : elements) c = std::max(c, e.condition_estimate());
    return c;
  }
};

/// Edge moments |e|^{-1} int_e g m_i ds on boundary edges; zero elsewhere.
inline Vector apply_dirichlet(const Discretization& disc, const BoundaryFunction& g) {
  const Mesh& mesh = *disc.mesh;
  Vector values = Vector::Zero(disc.dofs.size());
  for (const auto& el : disc.elements) {
    const int region = mesh.region_of_cell[static_cast<std::size_t>(el.cell_index())];
    for (const auto& le : el.edges()) {
      if (mesh.edges[static_cast<std::size_t>(le.edge)].tag != EdgeTag::Boundary) continue;
      Vector samples(static_cast<Eigen::Index>(le.rule.nodes.size()));
      for (std::size_t j = 0; j < le.rule.nodes.size(); ++j)
        samples[static_cast<Eigen::Index>(j)] = g(le.rule.nodes[j].point, region);
      const Vector moments = le.weighted() * samples / le.length;
      for (int i = 0; i < disc.k; ++i) values[disc.dofs.edge_dof(le.edge, i)] = moments[i];
    }
  }
  return values;
}

struct SolveResult {
  Vector dofs;             // all global DoFs, boundary values included
  double residual = 0.0;   // ||A x - b|| / ||b|| on the free system
  int free_dofs = 0;
  SparseMatrix matrix;     // free-free block
  Vector rhs;              // eliminated right-hand side
};

/// Assembles B_h(u, v) = F_h(v) with Dirichlet moments eliminated and solves
/// it by sparse LU.
inline SolveResult assemble_and_solve(const Discretization& disc, const CoefficientField& coeff,
                                      const BoundaryFunction& g) {
  const Mesh& mesh = *disc.mesh;
  const DofMap& map = disc.dofs;
  const int n = map.size();
  const Vector fixed = apply_dirichlet(disc, g);

  std::vector<int> free_index(static_cast<std::size_t>(n), -1);
  int n_free = 0;
  for (int i = 0; i < n; ++i)
    if (!map.is_boundary(i)) free_index[static_cast<std::size_t>(i)] = n_free++;

  std::vector<Eigen::Triplet<double>> triplets;
  Vector rhs = Vector::Zero(n_free);
  for (const auto& el : disc.elements) {
    const int region = mesh.region_of_cell[static_cast<std::size_t>(el.cell_index())];
    const LocalSystem sys = assemble_local(el, coeff, region);
    const Matrix local = sys.full();
    const auto glob = map.local_to_global(mesh, el.cell_index());
    for (std::size_t i = 0; i < glob.size(); ++i) {
      const int gi = free_index[static_cast<std::size_t>(glob[i])];
      if (gi < 0) continue;
      rhs[gi] += sys.load[static_cast<Eigen::Index>(i)];
      for (std::size_t j = 0; j < glob.size(); ++j) {
        const double v = local(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        const int gj = free_index[static_cast<std::size_t>(glob[j])];
        if (gj < 0)
          rhs[gi] -= v * fixed[glob[j]];
        else
          triplets.emplace_back(gi, gj, v);
      }
    }
  }
  SolveResult result;
  result.free_dofs = n_free;
  result.dofs = fixed;
  result.matrix.resize(n_free, n_free);
  result.matrix.setFromTriplets(triplets.begin(), triplets.end());
  result.rhs = rhs;
  if (n_free == 0) return result;

  result.matrix.makeCompressed();
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(result.matrix);
  if (lu.info() != Eigen::Success)
    fail(ErrorKind::SolverError, "sparse LU failed (h=" + std::to_string(mesh.h()) + ", k=" +
                                     std::to_string(disc.k) + ", max local condition " +
                                     std::to_string(disc.max_condition()) + "): " + lu.lastErrorMessage());
  const Vector x = lu.solve(rhs);
  if (lu.info() != Eigen::Success) fail(ErrorKind::SolverError, "sparse LU solve failed");
  const double bnorm = rhs.norm();
  result.residual = (result.matrix * x - rhs).norm() / (bnorm > 0 ? bnorm : 1.0);
  for (int i = 0; i < n; ++i) {
    const int fi = free_index[static_cast<std::size_t>(i)];
    if (fi >= 0) result.dofs[i] = x[fi];
  }
  return result;
}

/// Writes the eliminated system as "row col value" lines followed by
/// "rhs index value" lines, 0-based.
inline void write_system_coo(const SolveResult& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  out << std::setprecision(17);
  out << "% " << s.matrix.rows() << " " << s.matrix.cols() << " " << s.matrix.nonZeros() << "\n";
  for (int col = 0; col < s.matrix.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(s.matrix, col); it; ++it)
      out << it.row() << " " << it.col() << " " << it.value() << "\n";
  for (Eigen::Index i = 0; i < s.rhs.size(); ++i) out << "rhs " << i << " " << s.rhs[i] << "\n";
  if (!out) fail(ErrorKind::IoError, "failed writing '" + path + "'");
}

}  // namespace ncvem
