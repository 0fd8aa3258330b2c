#pragma once

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "ncvem/errors.hpp"
#include "ncvem/gauss.hpp"
#include "ncvem/mesh.hpp"

namespace ncvem {

/// Controls for rules on curved geometry.
struct QuadratureOptions {
  /// Extra Gauss points per panel on curved edges beyond the polynomial count.
  int curve_excess = 4;
  /// Compare curved rules against a rule with twice the panels.
  bool certify = true;
  double certify_tol = 1e-12;

  /// Defaults, with VEM_QUAD_EXCESS overriding the curve excess.
  static QuadratureOptions from_env() {
    QuadratureOptions o;
    if (const char* env = std::getenv("VEM_QUAD_EXCESS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end != env && v >= 0 && v <= 20) o.curve_excess = static_cast<int>(v);
    }
    return o;
  }
};

struct EdgeRule {
  struct Node {
    double t;       // canonical edge parameter
    Point point;
    double weight;  // includes |d point / dt|, so sum(weight) = arclength
    Point normal;   // unit, outward for the requesting cell
  };
  std::vector<Node> nodes;
  int exactness_degree = 0;

  double length() const {
    double s = 0.0;
    for (const auto& n : nodes) s += n.weight;
    return s;
  }
};

struct CellRule {
  struct Node {
    Point point;
    double weight;
  };
  std::vector<Node> nodes;
  int exactness_degree = 0;

  double area() const {
    double s = 0.0;
    for (const auto& n : nodes) s += n.weight;
    return s;
  }
};

namespace detail {

inline const GaussRule1D& cached_gauss(int n) {
  static const std::vector<GaussRule1D> table = [] {
    std::vector<GaussRule1D> t;
    for (int i = 1; i <= kMaxGaussPoints; ++i) t.push_back(gauss_legendre(i));
    return t;
  }();
  return table.at(static_cast<std::size_t>(n - 1));
}

/// Composite Gauss nodes on [a, b] (b may be below a); weights are positive.
struct ParamRule {
  std::vector<double> t;
  std::vector<double> w;
};

inline ParamRule param_rule(double a, double b, int points, int panels) {
  const auto& g = cached_gauss(points);
  ParamRule r;
  const double hp = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * hp;
    for (int i = 0; i < points; ++i) {
      r.t.push_back(lo + 0.5 * hp * (g.nodes[i] + 1.0));
      r.w.push_back(0.5 * std::abs(hp) * g.weights[i]);
    }
  }
  return r;
}

inline int points_for_degree(int degree) { return std::max(1, (degree + 2) / 2); }

inline bool agree(const std::vector<double>& coarse, const std::vector<double>& fine,
                  const std::vector<double>& magnitude, double tol) {
  for (std::size_t i = 0; i < coarse.size(); ++i)
    if (std::abs(coarse[i] - fine[i]) > tol * std::max(magnitude[i], 1e-300)) return false;
  return true;
}

/// Traversal direction factor turning d/dt into the counterclockwise tangent.
inline double traversal_sign(const Mesh& mesh, const Cell& cell, std::size_t local) {
  const auto [ta, tb] = mesh.param_range(mesh.edges[cell.edges[local]]);
  return cell.orientation[local] * (tb >= ta ? 1.0 : -1.0);
}

inline EdgeRule build_edge_rule(const Mesh& mesh, const Cell& cell, std::size_t local, int degree, int points,
                                int panels) {
  const Edge& e = mesh.edges[cell.edges[local]];
  const auto [ta, tb] = mesh.param_range(e);
  const double sgn = traversal_sign(mesh, cell, local);
  const ParamRule pr = param_rule(ta, tb, points, panels);
  EdgeRule rule;
  rule.exactness_degree = degree;
  rule.nodes.reserve(pr.t.size());
  for (std::size_t i = 0; i < pr.t.size(); ++i) {
    const Point d = mesh.edge_derivative(e, pr.t[i]);
    const double speed = d.norm();
    const Point tau = sgn * d / speed;
    rule.nodes.push_back({pr.t[i], mesh.edge_point(e, pr.t[i]), pr.w[i] * speed, Point(tau.y(), -tau.x())});
  }
  return rule;
}

/// Integrals of the scaled parameter monomials ((t - t_mid)/h_I)^i, i <= degree.
inline void edge_moments(const EdgeRule& r, double t_mid, double h_param, int degree, std::vector<double>& val,
                         std::vector<double>& mag) {
  val.assign(degree + 1, 0.0);
  mag.assign(degree + 1, 0.0);
  for (const auto& n : r.nodes) {
    const double s = (n.t - t_mid) / h_param;
    double m = 1.0;
    for (int i = 0; i <= degree; ++i) {
      val[i] += n.weight * m;
      mag[i] += std::abs(n.weight * m);
      m *= s;
    }
  }
}

}  // namespace detail

/// Quadrature on the `local`-th edge of `cell`, exact (straight) or certified
/// (curved) for polynomials of the edge parameter up to `degree`.
inline EdgeRule edge_rule(const Mesh& mesh, const Cell& cell, std::size_t local, int degree,
                          const QuadratureOptions& opt = {}) {
  if (degree < 0) fail(ErrorKind::InvalidArgument, "edge_rule: negative degree");
  const Edge& e = mesh.edges[cell.edges[local]];
  const int base = detail::points_for_degree(degree);
  if (!e.is_curved()) return detail::build_edge_rule(mesh, cell, local, degree, base, 1);

  const int points = std::min(kMaxGaussPoints, base + opt.curve_excess);
  const auto [ta, tb] = mesh.param_range(e);
  const double t_mid = 0.5 * (ta + tb);
  const double h_param = std::abs(tb - ta);
  int panels = 1;
  for (int attempt = 0; attempt <= 2; ++attempt, panels *= 2) {
    EdgeRule rule = detail::build_edge_rule(mesh, cell, local, degree, points, panels);
    if (!opt.certify) return rule;
    const EdgeRule fine = detail::build_edge_rule(mesh, cell, local, degree, points, 2 * panels);
    std::vector<double> a, b, mag, unused;
    detail::edge_moments(rule, t_mid, h_param, degree, a, mag);
    detail::edge_moments(fine, t_mid, h_param, degree, b, unused);
    if (detail::agree(a, b, mag, opt.certify_tol)) return rule;
  }
  fail(ErrorKind::QuadratureError, "curved edge rule failed certification");
}

namespace detail {

inline void append_sector(const Mesh& mesh, const Cell& cell, std::size_t local, const Point& center, int s_points,
                          int t_points, int panels, CellRule& out) {
  const Edge& e = mesh.edges[cell.edges[local]];
  const auto [ta, tb] = mesh.param_range(e);
  const double sgn = traversal_sign(mesh, cell, local);
  const ParamRule pt = param_rule(ta, tb, t_points, panels);
  const ParamRule ps = param_rule(0.0, 1.0, s_points, 1);
  for (std::size_t i = 0; i < pt.t.size(); ++i) {
    const Point p = mesh.edge_point(e, pt.t[i]);
    const Point r = p - center;
    const double jac_t = cross2(r, sgn * mesh.edge_derivative(e, pt.t[i]));
    if (!(jac_t > 0.0)) fail(ErrorKind::QuadratureError, "nonpositive sector Jacobian (cell not star-shaped)");
    for (std::size_t j = 0; j < ps.t.size(); ++j) {
      const double s = ps.t[j];
      out.nodes.push_back({center + s * r, pt.w[i] * ps.w[j] * s * jac_t});
    }
  }
}

inline void cell_moments(const CellRule& r, const Point& center, double h, int degree, std::vector<double>& val,
                         std::vector<double>& mag) {
  const std::size_t dim = static_cast<std::size_t>((degree + 1) * (degree + 2) / 2);
  val.assign(dim, 0.0);
  mag.assign(dim, 0.0);
  std::vector<double> px(degree + 1), py(degree + 1);
  for (const auto& n : r.nodes) {
    const Point s = (n.point - center) / h;
    px[0] = py[0] = 1.0;
    for (int i = 1; i <= degree; ++i) {
      px[i] = px[i - 1] * s.x();
      py[i] = py[i - 1] * s.y();
    }
    std::size_t idx = 0;
    for (int d = 0; d <= degree; ++d)
      for (int j = 0; j <= d; ++j, ++idx) {
        const double v = n.weight * px[d - j] * py[j];
        val[idx] += v;
        mag[idx] += std::abs(v);
      }
  }
}

}  // namespace detail

/// Star-sector quadrature on a (possibly curved) cell anchored at its star
/// center, exact or certified for polynomials of total degree `degree`.
inline CellRule cell_rule(const Mesh& mesh, const Cell& cell, int degree, const QuadratureOptions& opt = {}) {
  if (degree < 0) fail(ErrorKind::InvalidArgument, "cell_rule: negative degree");
  const Point center = cell.star_center;
  const int s_points = detail::points_for_degree(degree + 1);
  const int t_points = detail::points_for_degree(degree);
  const int curved_points = std::min(kMaxGaussPoints, t_points + opt.curve_excess);

  CellRule straight;
  bool any_curved = false;
  for (std::size_t i = 0; i < cell.edges.size(); ++i) {
    if (mesh.edges[cell.edges[i]].is_curved()) any_curved = true;
    else detail::append_sector(mesh, cell, i, center, s_points, t_points, 1, straight);
  }
  const auto with_curved = [&](int panels) {
    CellRule r = straight;
    r.exactness_degree = degree;
    for (std::size_t i = 0; i < cell.edges.size(); ++i)
      if (mesh.edges[cell.edges[i]].is_curved())
        detail::append_sector(mesh, cell, i, center, s_points, curved_points, panels, r);
    return r;
  };
  if (!any_curved) {
    straight.exactness_degree = degree;
    return straight;
  }
  int panels = 1;
  for (int attempt = 0; attempt <= 2; ++attempt, panels *= 2) {
    CellRule rule = with_curved(panels);
    if (!opt.certify) return rule;
    const CellRule fine = with_curved(2 * panels);
    std::vector<double> a, b, mag, unused;
    detail::cell_moments(rule, cell.centroid, cell.diameter, degree, a, mag);
    detail::cell_moments(fine, cell.centroid, cell.diameter, degree, b, unused);
    if (detail::agree(a, b, mag, opt.certify_tol)) return rule;
  }
  fail(ErrorKind::QuadratureError, "curved cell rule failed certification");
}

}  // namespace ncvem
