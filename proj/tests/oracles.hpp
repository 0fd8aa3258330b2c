#pragma once

// Reference integrals for the tests, computed independently of the library's
// rules by brute-force composite Gauss on the true boundary.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>

#include "ncvem/ncvem.hpp"

namespace oracle {

using ncvem::Point;

/// 8-point Gauss-Legendre on [-1, 1], tabulated.
inline constexpr double kNodes[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                     -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                     0.7966664774136267,  0.9602898564975363};
inline constexpr double kWeights[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                       0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                       0.2223810344533745, 0.1012285362903763};

inline double integrate(double a, double b, const std::function<double(double)>& f, int panels = 256) {
  double s = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p)
    for (int i = 0; i < 8; ++i) s += 0.5 * h * kWeights[i] * f(a + h * (p + 0.5 * (kNodes[i] + 1.0)));
  return s;
}

/// int_K F dx for F = d/dx G, evaluated as the boundary integral of G dy along
/// the counterclockwise loop.
inline double cell_integral_from_antiderivative(const ncvem::Mesh& mesh, const ncvem::Cell& cell,
                                                const std::function<double(const Point&)>& G, int panels = 64) {
  double s = 0.0;
  for (std::size_t i = 0; i < cell.edges.size(); ++i) {
    const auto& e = mesh.edges[cell.edges[i]];
    const auto [ta, tb] = mesh.param_range(e);
    const double part = integrate(
        ta, tb, [&](double t) { return G(mesh.edge_point(e, t)) * mesh.edge_derivative(e, t).y(); }, panels);
    s += cell.orientation[i] * part;
  }
  return s;
}

/// Arclength of an edge.
inline double arclength(const ncvem::Mesh& mesh, const ncvem::Edge& e, int panels = 256) {
  const auto [ta, tb] = mesh.param_range(e);
  return std::abs(integrate(ta, tb, [&](double t) { return mesh.edge_derivative(e, t).norm(); }, panels));
}

/// int_K F dx for F polynomial in x of degree <= 15 (inner x-antiderivative by
/// 8-point Gauss from the line x = x0).
inline double cell_integral(const ncvem::Mesh& mesh, const ncvem::Cell& cell,
                            const std::function<double(const Point&)>& F, int panels = 64) {
  const double x0 = cell.centroid.x();
  return cell_integral_from_antiderivative(
      mesh, cell,
      [&](const Point& p) {
        double s = 0.0;
        for (int i = 0; i < 8; ++i) {
          const double tau = 0.5 * (kNodes[i] + 1.0);
          s += 0.5 * kWeights[i] * F(Point(x0 + tau * (p.x() - x0), p.y()));
        }
        return (p.x() - x0) * s;
      },
      panels);
}

/// DoF vector of a function in the local layout of `el`: edge moments in loop
/// order, then bulk moments.
inline ncvem::Vector dofs_of(const ncvem::Mesh& mesh, const ncvem::LocalElement& el,
                             const std::function<double(const Point&)>& f) {
  ncvem::Vector d(el.num_dofs());
  int row = 0;
  for (const auto& le : el.edges()) {
    const auto& e = mesh.edges[static_cast<std::size_t>(le.edge)];
    const auto [ta, tb] = mesh.param_range(e);
    const double len = arclength(mesh, e);
    for (int i = 0; i < el.k(); ++i)
      d[row++] = integrate(std::min(ta, tb), std::max(ta, tb), [&](double t) {
                   return f(mesh.edge_point(e, t)) * le.basis.eval(t)[i] * mesh.edge_derivative(e, t).norm();
                 }) / len;
  }
  const auto& cell = mesh.cells[static_cast<std::size_t>(el.cell_index())];
  const ncvem::CellBasis lower(el.basis().center, el.basis().h, el.k() - 2);
  for (int j = 0; j < lower.dim(); ++j)
    d[row++] = cell_integral(mesh, cell, [&](const Point& p) { return f(p) * lower.eval(p)[j]; }) / cell.area;
  return d;
}

/// int_K ((x - c)/h)^a ((y - c)/h)^b dx.
inline double monomial_integral(const ncvem::Mesh& mesh, const ncvem::Cell& cell, const Point& c, double h, int a,
                                int b, int panels = 64) {
  return cell_integral_from_antiderivative(
      mesh, cell,
      [&](const Point& p) {
        const double sx = (p.x() - c.x()) / h;
        const double sy = (p.y() - c.y()) / h;
        return h * std::pow(sx, a + 1) / (a + 1) * std::pow(sy, b);
      },
      panels);
}

/// RMS sizes on the cell of the scaled monomials of order <= n.
inline ncvem::Vector monomial_scale(const ncvem::LocalElement& el, int n) {
  return (el.mass().diagonal().head(ncvem::poly_dim(n)) / el.area()).cwiseSqrt();
}

/// Largest entry of a coefficient-to-coefficient matrix after rescaling both
/// sides to monomials of unit RMS on the cell.
inline double normalized_max(const ncvem::Matrix& a, const ncvem::Vector& rows, const ncvem::Vector& cols) {
  return (rows.asDiagonal() * a * cols.cwiseInverse().asDiagonal()).cwiseAbs().maxCoeff();
}

/// Small meshes from every generator, straight and curved.
inline std::vector<ncvem::Mesh> mesh_pool() {
  using namespace ncvem;
  std::vector<Mesh> pool;
  pool.push_back(generate_square_quad_mesh(3));
  pool.push_back(generate_voronoi_mesh(12, 5, 7));
  pool.push_back(generate_concave_mesh(2));
  pool.push_back(map_mesh_to_curved_domain(generate_square_quad_mesh(3), sine_graph(1), sine_graph(3)));
  pool.push_back(map_mesh_to_curved_domain(generate_jittered_voronoi_mesh(3, 0.6, 10, 5), sine_graph(1),
                                           sine_graph(3)));
  pool.push_back(generate_interface_mesh(4, sine_graph(3)));
  return pool;
}

}  // namespace oracle
