#pragma once

#include <Eigen/Dense>

#include <array>
#include <utility>
#include <vector>

#include "ncvem/curves.hpp"

namespace ncvem {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Number of bivariate monomials of total degree <= n (0 for n < 0).
constexpr int poly_dim(int n) { return n < 0 ? 0 : (n + 1) * (n + 2) / 2; }

/// Position of the exponent (a, b) in graded order: degree blocks, and within a
/// block increasing power of y.
constexpr int monomial_index(int a, int b) { return (a + b) * (a + b + 1) / 2 + b; }

/// Scaled monomials ((x - center) / h)^alpha on a cell.
struct CellBasis {
  Point center = Point::Zero();
  double h = 1.0;
  int order = 0;

  CellBasis() = default;
  CellBasis(Point c, double scale, int n) : center(std::move(c)), h(scale), order(n) {}

  int dim() const { return poly_dim(order); }

  std::vector<std::array<int, 2>> exponents() const {
    std::vector<std::array<int, 2>> out;
    for (int d = 0; d <= order; ++d)
      for (int j = 0; j <= d; ++j) out.push_back({d - j, j});
    return out;
  }

  /// Values of all basis functions at one point.
  Vector eval(const Point& p) const {
    Vector v(dim());
    const Point s = (p - center) / h;
    std::vector<double> px(order + 1), py(order + 1);
    px[0] = py[0] = 1.0;
    for (int i = 1; i <= order; ++i) {
      px[i] = px[i - 1] * s.x();
      py[i] = py[i - 1] * s.y();
    }
    int idx = 0;
    for (int d = 0; d <= order; ++d)
      for (int j = 0; j <= d; ++j) v[idx++] = px[d - j] * py[j];
    return v;
  }

  /// Gradients at one point: column 0 is d/dx, column 1 is d/dy.
  Eigen::Matrix<double, Eigen::Dynamic, 2> grad(const Point& p) const {
    Eigen::Matrix<double, Eigen::Dynamic, 2> g(dim(), 2);
    const Point s = (p - center) / h;
    std::vector<double> px(order + 1), py(order + 1);
    px[0] = py[0] = 1.0;
    for (int i = 1; i <= order; ++i) {
      px[i] = px[i - 1] * s.x();
      py[i] = py[i - 1] * s.y();
    }
    int idx = 0;
    for (int d = 0; d <= order; ++d)
      for (int j = 0; j <= d; ++j, ++idx) {
        const int a = d - j;
        const int b = j;
        g(idx, 0) = a > 0 ? a * px[a - 1] * py[b] / h : 0.0;
        g(idx, 1) = b > 0 ? b * px[a] * py[b - 1] / h : 0.0;
      }
    return g;
  }

  /// Rows are points, columns basis functions.
  Matrix eval(const std::vector<Point>& pts) const {
    Matrix m(static_cast<Eigen::Index>(pts.size()), dim());
    for (std::size_t i = 0; i < pts.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = eval(pts[i]).transpose();
    return m;
  }

  /// Coefficients of d/dx (axis 0) or d/dy (axis 1) of each basis function in
  /// the basis of order - 1: column alpha holds the expansion of d m_alpha.
  Matrix derivative_map(int axis) const {
    Matrix d = Matrix::Zero(poly_dim(order - 1), dim());
    for (const auto& [a, b] : exponents()) {
      const int col = monomial_index(a, b);
      if (axis == 0 && a > 0) d(monomial_index(a - 1, b), col) = a / h;
      if (axis == 1 && b > 0) d(monomial_index(a, b - 1), col) = b / h;
    }
    return d;
  }

  /// Coefficients of the Laplacian of each basis function in the basis of order - 2.
  Matrix laplacian_map() const {
    Matrix l = Matrix::Zero(poly_dim(order - 2), dim());
    for (const auto& [a, b] : exponents()) {
      const int col = monomial_index(a, b);
      if (a > 1) l(monomial_index(a - 2, b), col) += a * (a - 1) / (h * h);
      if (b > 1) l(monomial_index(a, b - 2), col) += b * (b - 1) / (h * h);
    }
    return l;
  }

  /// Pointwise Laplacian of every basis function.
  Vector laplacian(const Point& p) const {
    if (order < 2) return Vector::Zero(dim());
    const CellBasis lower(center, h, order - 2);
    return laplacian_map().transpose() * lower.eval(p);
  }

  /// Divergence of the vector monomials [M_n]^2, ordered (m_0,0)...(m_N,0),
  /// (0,m_0)...(0,m_N), expressed in the basis of order - 1.
  Matrix divergence_map() const {
    Matrix div(poly_dim(order - 1), 2 * dim());
    div << derivative_map(0), derivative_map(1);
    return div;
  }
};

/// Scaled monomials ((t - t_mid) / h)^i in an edge parameter.
struct EdgeBasis {
  double t_mid = 0.0;
  double h = 1.0;
  int order = 0;

  int dim() const { return order + 1; }

  Vector eval(double t) const {
    Vector v(dim());
    const double s = (t - t_mid) / h;
    double m = 1.0;
    for (int i = 0; i <= order; ++i, m *= s) v[i] = m;
    return v;
  }
};

}  // namespace ncvem
