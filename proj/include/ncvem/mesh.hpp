#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "ncvem/curves.hpp"
#include "ncvem/errors.hpp"
#include "ncvem/gauss.hpp"

namespace ncvem {

enum class EdgeTag { Interior, Boundary, Interface };

inline const char* to_string(EdgeTag tag) {
  switch (tag) {
    case EdgeTag::Interior: return "interior";
    case EdgeTag::Boundary: return "boundary";
    case EdgeTag::Interface: return "interface";
  }
  return "interior";
}

/// A mesh edge, canonically oriented from the lower to the higher vertex id.
///
/// Straight edges are parametrized by arclength t in [0, length] starting at
/// vertices[0]. Curved edges are the sub-arc [t_start, t_end] of a shared
/// curve, with curve(t_start) == vertices[0]; t_end may be below t_start.
struct Edge {
  std::array<int, 2> vertices{0, 0};
  int curve = -1;
  double t_start = 0.0;
  double t_end = 0.0;
  EdgeTag tag = EdgeTag::Interior;
  double length = 0.0;

  bool is_curved() const { return curve >= 0; }
  bool operator==(const Edge&) const = default;
};

/// A polygonal cell as a counterclockwise loop of (possibly curved) edges.
struct Cell {
  std::vector<int> edges;
  /// +1 when the loop traverses the edge in canonical direction, -1 otherwise.
  std::vector<int> orientation;
  Point star_center = Point::Zero();
  Point centroid = Point::Zero();
  double diameter = 0.0;
  double area = 0.0;

  bool operator==(const Cell& o) const {
    return edges == o.edges && orientation == o.orientation;
  }
};

class Mesh {
 public:
  std::vector<Point> vertices;
  std::vector<Edge> edges;
  std::vector<Cell> cells;
  std::vector<CurveParam> curves;
  std::vector<int> region_of_cell;

  /// Builds edges and incidence from counterclockwise vertex loops. Edges used
  /// by a single loop are tagged Boundary. Call finalize() after adjusting
  /// edge geometry or tags.
  static Mesh from_polygons(std::vector<Point> vertices, const std::vector<std::vector<int>>& loops) {
    Mesh m;
    m.vertices = std::move(vertices);
    std::map<std::pair<int, int>, int> edge_index;
    std::vector<int> use_count;
    for (const auto& loop : loops) {
      if (loop.size() < 3) fail(ErrorKind::GenerationFailure, "cell with fewer than 3 vertices");
      Cell cell;
      for (std::size_t i = 0; i < loop.size(); ++i) {
        const int a = loop[i];
        const int b = loop[(i + 1) % loop.size()];
        if (a == b) fail(ErrorKind::GenerationFailure, "repeated vertex in cell loop");
        const auto key = std::minmax(a, b);
        auto [it, inserted] = edge_index.try_emplace({key.first, key.second}, static_cast<int>(m.edges.size()));
        if (inserted) {
          Edge e;
          e.vertices = {key.first, key.second};
          m.edges.push_back(e);
          use_count.push_back(0);
        }
        ++use_count[it->second];
        cell.edges.push_back(it->second);
        cell.orientation.push_back(a < b ? 1 : -1);
      }
      m.cells.push_back(std::move(cell));
    }
    for (std::size_t e = 0; e < m.edges.size(); ++e) {
      if (use_count[e] > 2) fail(ErrorKind::GenerationFailure, "edge shared by more than two cells");
      m.edges[e].tag = use_count[e] == 1 ? EdgeTag::Boundary : EdgeTag::Interior;
    }
    m.region_of_cell.assign(m.cells.size(), 1);
    return m;
  }

  int add_curve(CurveParam c) {
    curves.push_back(std::move(c));
    return static_cast<int>(curves.size()) - 1;
  }

  std::size_t num_cells() const { return cells.size(); }
  std::size_t num_edges() const { return edges.size(); }

  /// Mesh size h = max diameter.
  double h() const {
    double h = 0.0;
    for (const auto& c : cells) h = std::max(h, c.diameter);
    return h;
  }

  // ---- edge geometry in the canonical parameter ----

  std::pair<double, double> param_range(const Edge& e) const {
    if (e.is_curved()) return {e.t_start, e.t_end};
    return {0.0, (vertices[e.vertices[1]] - vertices[e.vertices[0]]).norm()};
  }

  Point edge_point(const Edge& e, double t) const {
    if (e.is_curved()) return curves[e.curve].map(t);
    const Point& p0 = vertices[e.vertices[0]];
    const Point d = vertices[e.vertices[1]] - p0;
    return p0 + t * d / d.norm();
  }

  /// d(point)/dt in the canonical parameter.
  Point edge_derivative(const Edge& e, double t) const {
    if (e.is_curved()) return curves[e.curve].derivative(t);
    const Point d = vertices[e.vertices[1]] - vertices[e.vertices[0]];
    return d / d.norm();
  }

  /// Recomputes edge lengths and all derived cell geometry; checks the
  /// closed counterclockwise loop and star-shapedness invariants.
  void finalize();

  bool operator==(const Mesh& o) const {
    if (vertices.size() != o.vertices.size() || curves.size() != o.curves.size()) return false;
    for (std::size_t i = 0; i < vertices.size(); ++i)
      if (vertices[i] != o.vertices[i]) return false;
    for (std::size_t i = 0; i < curves.size(); ++i)
      if (curves[i].name != o.curves[i].name || curves[i].params != o.curves[i].params) return false;
    return edges == o.edges && cells == o.cells && region_of_cell == o.region_of_cell;
  }
};

namespace detail {

/// Composite Gauss integration of a smooth function of the edge parameter.
template <class F>
double integrate_param(double a, double b, F&& f, int panels = 4) {
  static const GaussRule1D rule = gauss_legendre(12);
  double sum = 0.0;
  const double hp = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * hp;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double t = lo + 0.5 * hp * (rule.nodes[i] + 1.0);
      sum += 0.5 * hp * rule.weights[i] * f(t);
    }
  }
  return sum;
}

}  // namespace detail

/// Points sampled along the cell boundary together with the counterclockwise
/// traversal tangent at each sample.
struct BoundarySample {
  Point point;
  Point tangent;
};

inline std::vector<BoundarySample> sample_cell_boundary(const Mesh& mesh, const Cell& cell,
                                                        int per_edge = 8) {
  std::vector<BoundarySample> out;
  for (std::size_t i = 0; i < cell.edges.size(); ++i) {
    const Edge& e = mesh.edges[cell.edges[i]];
    const auto [ta, tb] = mesh.param_range(e);
    const int sgn = cell.orientation[i];
    const int n = e.is_curved() ? per_edge : 2;
    for (int j = 0; j <= n; ++j) {
      const double s = static_cast<double>(j) / n;
      const double t = sgn > 0 ? ta + s * (tb - ta) : tb + s * (ta - tb);
      out.push_back({mesh.edge_point(e, t), sgn * (tb >= ta ? 1.0 : -1.0) * mesh.edge_derivative(e, t)});
    }
  }
  return out;
}

/// Straightened polygon vertex loop of a cell (counterclockwise).
inline std::vector<Point> cell_polygon(const Mesh& mesh, const Cell& cell) {
  std::vector<Point> poly;
  for (std::size_t i = 0; i < cell.edges.size(); ++i) {
    const Edge& e = mesh.edges[cell.edges[i]];
    poly.push_back(mesh.vertices[cell.orientation[i] > 0 ? e.vertices[0] : e.vertices[1]]);
  }
  return poly;
}

inline double polygon_area(const std::vector<Point>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross2(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

inline Point polygon_centroid(const std::vector<Point>& poly) {
  double a = 0.0;
  Point c = Point::Zero();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % poly.size()];
    const double w = cross2(p, q);
    a += w;
    c += w * (p + q);
  }
  return c / (3.0 * a);
}

/// True when every sampled boundary point is strictly visible from `center`,
/// i.e. the boundary winds monotonically around it.
inline bool sees_boundary(const std::vector<BoundarySample>& samples, const Point& center, double scale) {
  const double tol = 1e-12 * scale;
  for (const auto& s : samples) {
    const double len = s.tangent.norm();
    if (!(len > 0.0) || cross2(s.point - center, s.tangent) / len <= tol) return false;
  }
  return true;
}

inline double distance_to_boundary(const std::vector<BoundarySample>& samples, const Point& p) {
  // Distance to the sampled boundary polyline.
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Point& a = samples[i].point;
    const Point& b = samples[(i + 1) % samples.size()].point;
    const Point ab = b - a;
    const double len2 = ab.squaredNorm();
    double s = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, (a + s * ab - p).norm());
  }
  return best;
}

inline void Mesh::finalize() {
  if (cells.empty()) fail(ErrorKind::GenerationFailure, "empty mesh");
  for (auto& e : edges) {
    if (e.is_curved()) {
      if (e.curve >= static_cast<int>(curves.size()))
        fail(ErrorKind::GenerationFailure, "edge references missing curve");
      const auto& c = curves[e.curve];
      e.length = std::abs(detail::integrate_param(e.t_start, e.t_end,
                                                  [&](double t) { return c.derivative(t).norm(); }));
      const double tol = 1e-12 * e.length + 1e-15;
      if ((c.map(e.t_start) - vertices[e.vertices[0]]).norm() > tol ||
          (c.map(e.t_end) - vertices[e.vertices[1]]).norm() > tol)
        fail(ErrorKind::GenerationFailure, "curved edge endpoints do not match its vertices");
    } else {
      e.length = (vertices[e.vertices[1]] - vertices[e.vertices[0]]).norm();
    }
    if (!(e.length > 0.0)) fail(ErrorKind::GenerationFailure, "edge with zero length");
  }
  for (std::size_t k = 0; k < cells.size(); ++k) {
    Cell& cell = cells[k];
    // Closed loop: consecutive edges share a vertex in traversal order.
    const std::size_t n = cell.edges.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Edge& e = edges[cell.edges[i]];
      const Edge& f = edges[cell.edges[(i + 1) % n]];
      const int head = cell.orientation[i] > 0 ? e.vertices[1] : e.vertices[0];
      const int tail = cell.orientation[(i + 1) % n] > 0 ? f.vertices[0] : f.vertices[1];
      if (head != tail) fail(ErrorKind::GenerationFailure, "cell " + std::to_string(k) + " edge loop is not closed");
    }
    // Area and centroid through Green's formula on the true boundary.
    double area = 0.0;
    Point first = Point::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      const Edge& e = edges[cell.edges[i]];
      const auto [ta, tb] = param_range(e);
      const double sgn = cell.orientation[i];
      if (!e.is_curved()) {
        const Point& p = vertices[e.vertices[0]];
        const Point& q = vertices[e.vertices[1]];
        area += sgn * 0.5 * cross2(p, q);
        // int x^2 dy and int y^2 dx along segment
        const Point d = q - p;
        first.x() += sgn * d.y() * (p.x() * p.x() + p.x() * q.x() + q.x() * q.x()) / 3.0;
        first.y() -= sgn * d.x() * (p.y() * p.y() + p.y() * q.y() + q.y() * q.y()) / 3.0;
      } else {
        area += sgn * detail::integrate_param(ta, tb, [&](double t) {
          return 0.5 * cross2(edge_point(e, t), edge_derivative(e, t));
        });
        first.x() += sgn * detail::integrate_param(ta, tb, [&](double t) {
          const Point p = edge_point(e, t);
          return p.x() * p.x() * edge_derivative(e, t).y();
        });
        first.y() -= sgn * detail::integrate_param(ta, tb, [&](double t) {
          const Point p = edge_point(e, t);
          return p.y() * p.y() * edge_derivative(e, t).x();
        });
      }
    }
    if (!(area > 0.0)) fail(ErrorKind::GenerationFailure, "cell " + std::to_string(k) + " is not counterclockwise");
    cell.area = area;
    cell.centroid = first / (2.0 * area);

    const auto samples = sample_cell_boundary(*this, cell, 16);
    double diam = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
      for (std::size_t j = i + 1; j < samples.size(); ++j)
        diam = std::max(diam, (samples[i].point - samples[j].point).norm());
    cell.diameter = diam;

    const auto poly = cell_polygon(*this, cell);
    Point center = polygon_centroid(poly);
    if (!sees_boundary(samples, center, diam)) {
      // Chebyshev-like fallback: visible grid point farthest from the boundary.
      Point lo = samples.front().point, hi = lo;
      for (const auto& s : samples) {
        lo = lo.cwiseMin(s.point);
        hi = hi.cwiseMax(s.point);
      }
      double best = -1.0;
      constexpr int kGrid = 40;
      for (int i = 1; i < kGrid; ++i) {
        for (int j = 1; j < kGrid; ++j) {
          const Point p(lo.x() + (hi.x() - lo.x()) * i / kGrid, lo.y() + (hi.y() - lo.y()) * j / kGrid);
          if (!sees_boundary(samples, p, diam)) continue;
          const double d = distance_to_boundary(samples, p);
          if (d > best) {
            best = d;
            center = p;
          }
        }
      }
      if (best < 0.0) fail(ErrorKind::GenerationFailure, "cell " + std::to_string(k) + " is not star-shaped");
    }
    cell.star_center = center;
  }
}

/// Every interior edge is shared by exactly two cells traversing it in
/// opposite directions, every boundary edge belongs to exactly one cell.
inline bool check_topology(const Mesh& mesh, std::string* why = nullptr) {
  std::vector<int> plus(mesh.edges.size(), 0), minus(mesh.edges.size(), 0);
  for (const auto& c : mesh.cells)
    for (std::size_t i = 0; i < c.edges.size(); ++i) (c.orientation[i] > 0 ? plus : minus)[c.edges[i]]++;
  for (std::size_t e = 0; e < mesh.edges.size(); ++e) {
    const bool boundary = mesh.edges[e].tag == EdgeTag::Boundary;
    const bool ok = boundary ? plus[e] + minus[e] == 1 : (plus[e] == 1 && minus[e] == 1);
    if (!ok) {
      if (why) *why = "edge " + std::to_string(e) + " has inconsistent incidence";
      return false;
    }
  }
  return true;
}

/// Cells adjacent to each edge: {left, right} with -1 for none. Index 0 is the
/// cell traversing the edge canonically.
inline std::vector<std::array<int, 2>> edge_cells(const Mesh& mesh) {
  std::vector<std::array<int, 2>> out(mesh.edges.size(), {-1, -1});
  for (std::size_t k = 0; k < mesh.cells.size(); ++k) {
    const auto& c = mesh.cells[k];
    for (std::size_t i = 0; i < c.edges.size(); ++i) out[c.edges[i]][c.orientation[i] > 0 ? 0 : 1] = static_cast<int>(k);
  }
  return out;
}

// ---- shape regularity ----

struct CellValidation {
  bool star_shaped_ball = false;  // (G1)
  bool edge_ratio = false;        // (G2)
  double min_edge_over_diameter = 0.0;
};

struct MeshValidation {
  std::vector<CellValidation> cells;
  int g1_violations = 0;
  int g2_violations = 0;
  bool ok() const { return g1_violations == 0 && g2_violations == 0; }
};

inline constexpr double kDefaultRho = 0.05;

/// Sampled check of star-shapedness with respect to the ball B(x_K, rho*h_K)
/// and of min_e h_e >= rho*h_K. Violations are reported, never thrown.
inline MeshValidation validate_mesh(const Mesh& mesh, double rho = kDefaultRho) {
  if (!(rho > 0.0 && rho < 1.0)) fail(ErrorKind::InvalidArgument, "rho must lie in (0, 1)");
  MeshValidation out;
  for (const auto& cell : mesh.cells) {
    CellValidation v;
    const auto samples = sample_cell_boundary(mesh, cell, 16);
    const double r = rho * cell.diameter;
    bool g1 = sees_boundary(samples, cell.star_center, cell.diameter) &&
              distance_to_boundary(samples, cell.star_center) >= r;
    constexpr int kRing = 16;
    for (int i = 0; i < kRing && g1; ++i) {
      const double th = 2.0 * std::numbers::pi * i / kRing;
      g1 = sees_boundary(samples, cell.star_center + r * Point(std::cos(th), std::sin(th)), cell.diameter);
    }
    v.star_shaped_ball = g1;
    double min_edge = std::numeric_limits<double>::infinity();
    for (int e : cell.edges) min_edge = std::min(min_edge, mesh.edges[e].length);
    v.min_edge_over_diameter = min_edge / cell.diameter;
    v.edge_ratio = min_edge >= rho * cell.diameter;
    out.g1_violations += !v.star_shaped_ball;
    out.g2_violations += !v.edge_ratio;
    out.cells.push_back(v);
  }
  return out;
}

}  // namespace ncvem
