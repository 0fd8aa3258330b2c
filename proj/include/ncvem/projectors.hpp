#pragma once

#include <Eigen/Dense>

#include <limits>
#include <string>
#include <vector>

#include "ncvem/errors.hpp"
#include "ncvem/mesh.hpp"
#include "ncvem/poly_basis.hpp"
#include "ncvem/quadrature.hpp"

namespace ncvem {

/// Edge monomials are ((t - t_mid) / (kEdgeScale |I_e|))^i and range over [-2, 2].
inline constexpr double kEdgeScale = 0.25;

/// Edge data of one cell: rule, mapped monomials and their Gram matrix.
struct LocalEdge {
  int edge = -1;
  int orientation = 1;
  double length = 0.0;  // arclength |e|
  bool curved = false;
  EdgeRule rule;
  EdgeBasis basis;  // order k-1 in the canonical parameter
  Matrix values;    // nodes x (k): basis values at the rule nodes
  Matrix gram;      // int_e m_i m_j ds
  Eigen::LDLT<Matrix> gram_factor;

  /// Rows of the weighted basis, W(i, node) = m_i(t_node) w_node.
  Matrix weighted() const {
    Matrix w = values.transpose();
    for (Eigen::Index j = 0; j < w.cols(); ++j) w.col(j) *= rule.nodes[static_cast<std::size_t>(j)].weight;
    return w;
  }
};

/// Coefficients of the edge L2 projection onto mapped polynomials of order
/// `n` of a function sampled at the nodes of `rule`.
struct EdgeProjection {
  EdgeBasis basis;
  Matrix gram;
  Matrix weighted;  // (n+1) x nodes

  Vector coefficients(const Vector& samples) const {
    Eigen::FullPivLU<Matrix> lu(gram);
    return lu.solve(weighted * samples);
  }
};

inline EdgeProjection edge_l2_projection(const Mesh& mesh, const Edge& edge, const EdgeRule& rule, int n) {
  const auto [ta, tb] = mesh.param_range(edge);
  EdgeProjection p;
  p.basis = EdgeBasis{0.5 * (ta + tb), kEdgeScale * std::abs(tb - ta), n};
  p.weighted.resize(n + 1, static_cast<Eigen::Index>(rule.nodes.size()));
  for (std::size_t j = 0; j < rule.nodes.size(); ++j)
    p.weighted.col(static_cast<Eigen::Index>(j)) = p.basis.eval(rule.nodes[j].t) * rule.nodes[j].weight;
  p.gram = Matrix::Zero(n + 1, n + 1);
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const Vector m = p.basis.eval(rule.nodes[j].t);
    p.gram += rule.nodes[j].weight * m * m.transpose();
  }
  Eigen::FullPivLU<Matrix> lu(p.gram);
  if (!lu.isInvertible() || lu.rcond() < 1e-14) fail(ErrorKind::NumericError, "singular edge Gram matrix");
  return p;
}

/// Solves A X = B by full-pivot LU after row and column equilibration of A.
/// Returns false when A is singular; `rcond` receives the reciprocal condition
/// estimate of the equilibrated matrix.
inline bool equilibrated_solve(const Matrix& a, const Matrix& b, Matrix& x, double& rcond) {
  const Eigen::Index n = a.rows();
  Vector r(n), c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = a.row(i).cwiseAbs().maxCoeff();
    r[i] = m > 0 ? 1.0 / m : 1.0;
  }
  const Matrix ar = r.asDiagonal() * a;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double m = ar.col(j).cwiseAbs().maxCoeff();
    c[j] = m > 0 ? 1.0 / m : 1.0;
  }
  Eigen::FullPivLU<Matrix> lu(ar * c.asDiagonal());
  rcond = lu.rcond();
  if (!lu.isInvertible()) return false;
  x = c.asDiagonal() * lu.solve(r.asDiagonal() * b);
  return true;
}

/// Per-cell discretization data: geometry, rules, and every projector as a
/// matrix acting on the local DoF vector.
///
/// Local DoFs are ordered edge by edge along the counterclockwise loop (k
/// moments each, in canonical edge orientation) followed by the dim P_{k-2}
/// bulk moments.
class LocalElement {
 public:
  LocalElement(const Mesh& mesh, int cell_index, int k, const QuadratureOptions& opt = QuadratureOptions::from_env())
      : k_(k), cell_index_(cell_index) {
    if (k < 1) fail(ErrorKind::InvalidArgument, "polynomial order k must be >= 1");
    const Cell& cell = mesh.cells.at(static_cast<std::size_t>(cell_index));
    area_ = cell.area;
    diameter_ = cell.diameter;
    basis_ = CellBasis(cell.centroid, cell.diameter, k);
    quad_degree_ = 2 * k + 2;
    rule_ = cell_rule(mesh, cell, quad_degree_, opt);
    build_edges(mesh, cell, opt);
    build_mass();
    build_dofs_of_polynomials();
    build_ritz_galerkin();
    build_gradient_projector();
    build_scalar_projectors();
  }

  int k() const { return k_; }
  int cell_index() const { return cell_index_; }
  double area() const { return area_; }
  double diameter() const { return diameter_; }
  const CellBasis& basis() const { return basis_; }
  const CellRule& rule() const { return rule_; }
  const std::vector<LocalEdge>& edges() const { return edges_; }
  int num_edge_dofs() const { return k_ * static_cast<int>(edges_.size()); }
  int num_bulk_dofs() const { return poly_dim(k_ - 2); }
  int num_dofs() const { return num_edge_dofs() + num_bulk_dofs(); }
  bool has_curved_edge() const {
    for (const auto& e : edges_)
      if (e.curved) return true;
    return false;
  }

  /// Ritz-Galerkin projector onto P_k: dim P_k x N_dof.
  const Matrix& ritz_galerkin() const { return p_nabla_; }
  /// L2 projection of the gradient onto [P_{k-1}]^2: 2 dim P_{k-1} x N_dof,
  /// x-components first.
  const Matrix& gradient_projector() const { return p_grad_; }
  /// L2 projection onto P_k computed through the enhancement constraints.
  const Matrix& l2_projector() const { return p_l2_; }
  /// L2 projection onto P_{k-1}.
  const Matrix& l2_projector_lower() const { return p_l2_lower_; }
  /// DoFs of the basis monomials: N_dof x dim P_k.
  const Matrix& dofs_of_polynomials() const { return dofs_of_poly_; }
  /// int_K m_i m_j over the order-k basis.
  const Matrix& mass() const { return mass_; }

  /// Largest condition number among the local systems solved.
  double condition_estimate() const { return condition_; }

 private:
  void build_edges(const Mesh& mesh, const Cell& cell, const QuadratureOptions& opt) {
    for (std::size_t i = 0; i < cell.edges.size(); ++i) {
      const Edge& e = mesh.edges[cell.edges[i]];
      LocalEdge le;
      le.edge = cell.edges[i];
      le.orientation = cell.orientation[i];
      le.length = e.length;
      le.curved = e.is_curved();
      le.rule = edge_rule(mesh, cell, i, quad_degree_, opt);
      const auto [ta, tb] = mesh.param_range(e);
      le.basis = EdgeBasis{0.5 * (ta + tb), kEdgeScale * std::abs(tb - ta), k_ - 1};
      le.values.resize(static_cast<Eigen::Index>(le.rule.nodes.size()), k_);
      le.gram = Matrix::Zero(k_, k_);
      for (std::size_t j = 0; j < le.rule.nodes.size(); ++j) {
        const Vector m = le.basis.eval(le.rule.nodes[j].t);
        le.values.row(static_cast<Eigen::Index>(j)) = m.transpose();
        le.gram += le.rule.nodes[j].weight * m * m.transpose();
      }
      le.gram_factor.compute(le.gram);
      if (le.gram_factor.info() != Eigen::Success || !(le.gram_factor.vectorD().minCoeff() > 0.0))
        fail(ErrorKind::NumericError, "singular edge Gram matrix on edge " + std::to_string(le.edge));
      edges_.push_back(std::move(le));
    }
  }

  void build_mass() {
    const int nk = basis_.dim();
    mass_ = Matrix::Zero(nk, nk);
    stiffness_ = Matrix::Zero(nk, nk);
    for (const auto& n : rule_.nodes) {
      const Vector v = basis_.eval(n.point);
      const auto g = basis_.grad(n.point);
      mass_.noalias() += n.weight * v * v.transpose();
      stiffness_.noalias() += n.weight * g * g.transpose();
    }
  }

  int edge_offset(std::size_t local) const { return k_ * static_cast<int>(local); }

  void build_dofs_of_polynomials() {
    const int nk = basis_.dim();
    dofs_of_poly_ = Matrix::Zero(num_dofs(), nk);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const auto& le = edges_[i];
      Matrix poly_at_nodes(static_cast<Eigen::Index>(le.rule.nodes.size()), nk);
      for (std::size_t j = 0; j < le.rule.nodes.size(); ++j)
        poly_at_nodes.row(static_cast<Eigen::Index>(j)) = basis_.eval(le.rule.nodes[j].point).transpose();
      dofs_of_poly_.middleRows(edge_offset(i), k_) = le.weighted() * poly_at_nodes / le.length;
    }
    const int nb = num_bulk_dofs();
    if (nb > 0) dofs_of_poly_.bottomRows(nb) = mass_.topRows(nb) / area_;
  }

  /// Coefficients (k x columns) of the order k-1 edge projection of the flux
  /// samples, times |e|, so that int_e proj(flux) v ds = coeffs . D_e(v).
  Matrix projected_flux(const LocalEdge& le, const Matrix& flux_at_nodes) const {
    return le.length * le.gram_factor.solve(le.weighted() * flux_at_nodes);
  }

  void build_ritz_galerkin() {
    const int nk = basis_.dim();
    const int ndof = num_dofs();
    const int nb = num_bulk_dofs();
    Matrix lhs = stiffness_;
    Matrix rhs = Matrix::Zero(nk, ndof);
    if (nb > 0) rhs.rightCols(nb) = -area_ * basis_.laplacian_map().transpose();
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const auto& le = edges_[i];
      Matrix flux(static_cast<Eigen::Index>(le.rule.nodes.size()), nk);
      for (std::size_t j = 0; j < le.rule.nodes.size(); ++j) {
        const auto& node = le.rule.nodes[j];
        flux.row(static_cast<Eigen::Index>(j)) = (basis_.grad(node.point) * node.normal).transpose();
      }
      rhs.middleCols(edge_offset(i), k_) += projected_flux(le, flux).transpose();
    }
    // The constant row is replaced by the mean-value constraint.
    lhs.row(0).setZero();
    rhs.row(0).setZero();
    if (k_ == 1) {
      double perimeter = 0.0;
      for (std::size_t i = 0; i < edges_.size(); ++i) {
        const auto& le = edges_[i];
        for (const auto& node : le.rule.nodes) lhs.row(0) += node.weight * basis_.eval(node.point).transpose();
        rhs(0, edge_offset(i)) = le.length;
        perimeter += le.length;
      }
      lhs.row(0) /= perimeter;
      rhs.row(0) /= perimeter;
    } else {
      lhs.row(0) = mass_.row(0) / area_;
      rhs(0, num_edge_dofs()) = 1.0;
    }
    solve(lhs, rhs, p_nabla_, "singular Ritz-Galerkin system");
  }

  void build_gradient_projector() {
    const int nl = poly_dim(k_ - 1);
    const int ndof = num_dofs();
    const int nb = num_bulk_dofs();
    const CellBasis lower(basis_.center, basis_.h, k_ - 1);
    Matrix lhs = Matrix::Zero(2 * nl, 2 * nl);
    lhs.topLeftCorner(nl, nl) = mass_.topLeftCorner(nl, nl);
    lhs.bottomRightCorner(nl, nl) = mass_.topLeftCorner(nl, nl);
    Matrix rhs = Matrix::Zero(2 * nl, ndof);
    if (nb > 0) rhs.rightCols(nb) = -area_ * lower.divergence_map().transpose();
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const auto& le = edges_[i];
      Matrix flux(static_cast<Eigen::Index>(le.rule.nodes.size()), 2 * nl);
      for (std::size_t j = 0; j < le.rule.nodes.size(); ++j) {
        const auto& node = le.rule.nodes[j];
        const Vector m = lower.eval(node.point);
        flux.row(static_cast<Eigen::Index>(j)) << node.normal.x() * m.transpose(), node.normal.y() * m.transpose();
      }
      rhs.middleCols(edge_offset(i), k_) += projected_flux(le, flux).transpose();
    }
    Matrix both(nl, 2 * ndof), sol;
    both << rhs.topRows(nl), rhs.bottomRows(nl);
    solve(lhs.topLeftCorner(nl, nl), both, sol, "singular cell mass matrix");
    p_grad_.resize(2 * nl, ndof);
    p_grad_.topRows(nl) = sol.leftCols(ndof);
    p_grad_.bottomRows(nl) = sol.rightCols(ndof);
  }

  void build_scalar_projectors() {
    const int nk = basis_.dim();
    const int nl = poly_dim(k_ - 1);
    const int nb = num_bulk_dofs();
    // Moments against M_k: low orders are DoFs, orders k-1 and k come from the
    // Ritz-Galerkin projection (enhancement).
    Matrix moments = mass_ * p_nabla_;
    for (int j = 0; j < nb; ++j) {
      moments.row(j).setZero();
      moments(j, num_edge_dofs() + j) = area_;
    }
    solve(mass_, moments, p_l2_, "singular cell mass matrix");
    solve(mass_.topLeftCorner(nl, nl), moments.topRows(nl), p_l2_lower_, "singular cell mass matrix");
  }

  void solve(const Matrix& a, const Matrix& b, Matrix& x, const char* what) {
    double rc = 0.0;
    if (!equilibrated_solve(a, b, x, rc)) fail(ErrorKind::NumericError, what);
    condition_ = std::max(condition_, rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity());
  }

  int k_;
  int cell_index_;
  int quad_degree_ = 0;
  double area_ = 0.0;
  double diameter_ = 0.0;
  double condition_ = 1.0;
  CellBasis basis_;
  CellRule rule_;
  std::vector<LocalEdge> edges_;
  Matrix mass_;
  Matrix stiffness_;
  Matrix dofs_of_poly_;
  Matrix p_nabla_;
  Matrix p_grad_;
  Matrix p_l2_;
  Matrix p_l2_lower_;
};

}  // namespace ncvem
