#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <unordered_map>
#include <vector>

#include "ncvem/curves.hpp"
#include "ncvem/errors.hpp"
#include "ncvem/mesh.hpp"

namespace ncvem {

/// nx-by-ny axis-aligned quads on [x0,x1]x[y0,y1]; vertex (i,j) has id j*(nx+1)+i.
inline Mesh generate_rect_quad_mesh(int nx, int ny, double x0, double x1, double y0, double y1) {
  if (nx < 1 || ny < 1) fail(ErrorKind::InvalidArgument, "quad mesh needs at least one subdivision");
  std::vector<Point> verts;
  verts.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      verts.emplace_back(i == nx ? x1 : x0 + (x1 - x0) * i / nx, j == ny ? y1 : y0 + (y1 - y0) * j / ny);
  std::vector<std::vector<int>> loops;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int a = j * (nx + 1) + i;
      loops.push_back({a, a + 1, a + nx + 2, a + nx + 1});
    }
  Mesh m = Mesh::from_polygons(std::move(verts), loops);
  m.finalize();
  return m;
}

inline Mesh generate_square_quad_mesh(int n) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "generate_square_quad_mesh: n must be >= 1");
  return generate_rect_quad_mesh(n, n, 0.0, 1.0, 0.0, 1.0);
}

namespace detail {

/// Keeps the part of a convex polygon where (x - mid).normal <= 0.
inline std::vector<Point> clip_half_plane(const std::vector<Point>& poly, const Point& mid, const Point& normal) {
  std::vector<Point> out;
  const std::size_t n = poly.size();
  out.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = poly[i];
    const Point& q = poly[(i + 1) % n];
    const double dp = (p - mid).dot(normal);
    const double dq = (q - mid).dot(normal);
    if (dp <= 0.0) out.push_back(p);
    if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) out.push_back(p + dp / (dp - dq) * (q - p));
  }
  return out;
}

/// Voronoi cells of `seeds` clipped to the unit square.
inline std::vector<std::vector<Point>> voronoi_cells(const std::vector<Point>& seeds) {
  const std::size_t n = seeds.size();
  std::vector<std::vector<Point>> cells(n);
  std::vector<std::pair<double, std::size_t>> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) order[j] = {(seeds[j] - seeds[i]).squaredNorm(), j};
    std::sort(order.begin(), order.end());
    std::vector<Point> poly{Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)};
    for (const auto& [d2, j] : order) {
      if (j == i) continue;
      double r2 = 0.0;
      for (const auto& p : poly) r2 = std::max(r2, (p - seeds[i]).squaredNorm());
      // Bisectors farther than the current cell radius cannot cut it.
      if (d2 > 4.0 * r2) break;
      poly = clip_half_plane(poly, 0.5 * (seeds[i] + seeds[j]), seeds[j] - seeds[i]);
      if (poly.size() < 3) fail(ErrorKind::GenerationFailure, "degenerate Voronoi cell");
    }
    cells[i] = std::move(poly);
  }
  return cells;
}

inline void check_distinct(const std::vector<Point>& seeds) {
  for (std::size_t i = 0; i < seeds.size(); ++i)
    for (std::size_t j = i + 1; j < seeds.size(); ++j)
      if ((seeds[i] - seeds[j]).norm() < 1e-12)
        fail(ErrorKind::GenerationFailure, "duplicate Voronoi seeds");
}

/// Merges coincident polygon corners into shared vertices.
class VertexWelder {
 public:
  explicit VertexWelder(double tol) : tol_(tol) {}

  int insert(Point p) {
    for (double* c : {&p.x(), &p.y()}) {
      if (std::abs(*c) < tol_) *c = 0.0;
      if (std::abs(*c - 1.0) < tol_) *c = 1.0;
    }
    const auto bx = static_cast<std::int64_t>(std::floor(p.x() / bucket_));
    const auto by = static_cast<std::int64_t>(std::floor(p.y() / bucket_));
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = grid_.find(key(bx + dx, by + dy));
        if (it == grid_.end()) continue;
        for (int id : it->second)
          if ((points_[id] - p).norm() < tol_) return id;
      }
    const int id = static_cast<int>(points_.size());
    points_.push_back(p);
    grid_[key(bx, by)].push_back(id);
    return id;
  }

  std::vector<Point> take() { return std::move(points_); }

 private:
  static std::int64_t key(std::int64_t x, std::int64_t y) { return x * 1000003 + y; }
  double tol_;
  double bucket_ = 1e-3;
  std::vector<Point> points_;
  std::unordered_map<std::int64_t, std::vector<int>> grid_;
};

}  // namespace detail

/// Lloyd-relaxed Voronoi mesh of the unit square from explicit seeds.
inline Mesh generate_voronoi_mesh_from_seeds(std::vector<Point> seeds, int lloyd_iters) {
  if (seeds.size() < 2) fail(ErrorKind::InvalidArgument, "Voronoi mesh needs at least two seeds");
  detail::check_distinct(seeds);
  for (int it = 0; it < lloyd_iters; ++it) {
    const auto cells = detail::voronoi_cells(seeds);
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = polygon_centroid(cells[i]);
    detail::check_distinct(seeds);
  }
  const auto polys = detail::voronoi_cells(seeds);
  detail::VertexWelder welder(1e-8);
  std::vector<std::vector<int>> loops;
  loops.reserve(polys.size());
  for (const auto& poly : polys) {
    std::vector<int> loop;
    for (const auto& p : poly) {
      const int id = welder.insert(p);
      if (loop.empty() || loop.back() != id) loop.push_back(id);
    }
    while (loop.size() > 1 && loop.front() == loop.back()) loop.pop_back();
    if (loop.size() < 3) fail(ErrorKind::GenerationFailure, "Voronoi cell collapsed while welding");
    loops.push_back(std::move(loop));
  }
  Mesh m = Mesh::from_polygons(welder.take(), loops);
  std::string why;
  if (!check_topology(m, &why)) fail(ErrorKind::GenerationFailure, "Voronoi topology: " + why);
  m.finalize();
  return m;
}

/// Voronoi mesh of n_seeds uniformly random seeds, deterministic in rng_seed.
inline Mesh generate_voronoi_mesh(int n_seeds, int lloyd_iters, std::uint64_t rng_seed) {
  if (n_seeds < 2) fail(ErrorKind::InvalidArgument, "Voronoi mesh needs at least two seeds");
  std::mt19937_64 rng(rng_seed);
  std::vector<Point> seeds;
  seeds.reserve(n_seeds);
  // Raw engine output keeps the sequence identical across standard libraries.
  const auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (int i = 0; i < n_seeds; ++i) {
    const double x = unit();
    const double y = unit();
    seeds.emplace_back(x, y);
  }
  return generate_voronoi_mesh_from_seeds(std::move(seeds), lloyd_iters);
}

/// Lloyd-relaxed Voronoi mesh whose seeds start at the centers of an n x n grid,
/// each displaced uniformly by up to jitter/2 cell widths per axis.
inline Mesh generate_jittered_voronoi_mesh(int n, double jitter, int lloyd_iters, std::uint64_t rng_seed) {
  if (n < 2) fail(ErrorKind::InvalidArgument, "generate_jittered_voronoi_mesh: n must be >= 2");
  if (!(jitter >= 0.0 && jitter < 1.0)) fail(ErrorKind::InvalidArgument, "jitter must lie in [0, 1)");
  std::mt19937_64 rng(rng_seed);
  const auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const double h = 1.0 / n;
  std::vector<Point> seeds;
  seeds.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double dx = jitter * (unit() - 0.5);
      const double dy = jitter * (unit() - 0.5);
      seeds.emplace_back((i + 0.5 + dx) * h, (j + 0.5 + dy) * h);
    }
  return generate_voronoi_mesh_from_seeds(std::move(seeds), lloyd_iters);
}

/// Unit square tiled by nonconvex hexagons: every grid quad is split into two
/// chevrons by a zigzag through the midpoints of its horizontal sides.
inline Mesh generate_concave_mesh(int n) {
  if (n < 1) fail(ErrorKind::InvalidArgument, "generate_concave_mesh: n must be >= 1");
  const double h = 1.0 / n;
  const double w = h / 12.0;
  std::vector<Point> verts;
  const auto coord = [n](int i) { return i == n ? 1.0 : static_cast<double>(i) / n; };
  // Grid corners, then midpoints of horizontal sides, then zigzag kinks.
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) verts.emplace_back(coord(i), coord(j));
  const int mid0 = static_cast<int>(verts.size());
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i < n; ++i) verts.emplace_back((i + 0.5) * h, coord(j));
  const int kink0 = static_cast<int>(verts.size());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      verts.emplace_back((i + 0.5) * h + w, (j + 1.0 / 3.0) * h);
      verts.emplace_back((i + 0.5) * h - w, (j + 2.0 / 3.0) * h);
    }
  std::vector<std::vector<int>> loops;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int c00 = j * (n + 1) + i;
      const int c10 = c00 + 1;
      const int c01 = c00 + n + 1;
      const int c11 = c01 + 1;
      const int mb = mid0 + j * n + i;
      const int mt = mid0 + (j + 1) * n + i;
      const int z1 = kink0 + 2 * (j * n + i);
      const int z2 = z1 + 1;
      loops.push_back({c00, mb, z1, z2, mt, c01});
      loops.push_back({mb, c10, c11, mt, z2, z1});
    }
  Mesh m = Mesh::from_polygons(std::move(verts), loops);
  m.finalize();
  return m;
}

/// Moves the nodes of a mesh of the unit square onto the domain
/// g1(x) < y < 1 + g2(x) by blending toward the bottom and top graphs, and
/// turns the edges on y=0 and y=1 into arcs of those graphs.
inline Mesh map_mesh_to_curved_domain(const Mesh& square, const GraphFunction& g1, const GraphFunction& g2) {
  Mesh m = square;
  constexpr double tol = 1e-14;
  std::vector<char> on_bottom(m.vertices.size(), 0), on_top(m.vertices.size(), 0);
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    const double xs = square.vertices[v].x();
    const double ys = square.vertices[v].y();
    if (xs < -tol || xs > 1 + tol || ys < -tol || ys > 1 + tol)
      fail(ErrorKind::InvalidArgument, "map_mesh_to_curved_domain: vertex outside the unit square");
    on_bottom[v] = std::abs(ys) <= tol;
    on_top[v] = std::abs(ys - 1.0) <= tol;
    if (ys <= 0.5)
      m.vertices[v].y() = ys + g1(xs) * (1.0 - 2.0 * ys);
    else
      m.vertices[v].y() = ys + g2(xs) * (2.0 * ys - 1.0);
    if (on_bottom[v] && !g1.identically_zero) m.vertices[v].y() = g1(xs);
    if (on_top[v] && !g2.identically_zero) m.vertices[v].y() = 1.0 + g2(xs);
  }
  const auto bend = [&](const GraphFunction& g, double offset, const std::vector<char>& on) {
    if (g.identically_zero) return;
    const int curve = m.add_curve(graph_curve(g, offset));
    for (auto& e : m.edges) {
      if (!on[e.vertices[0]] || !on[e.vertices[1]]) continue;
      e.curve = curve;
      e.t_start = m.vertices[e.vertices[0]].x();
      e.t_end = m.vertices[e.vertices[1]].x();
    }
  };
  bend(g1, 0.0, on_bottom);
  bend(g2, 1.0, on_top);
  m.finalize();
  return m;
}

/// Quad grid on (0,1)x(-1/2,1/2) bent so that the line y=0 becomes the graph
/// of g3. Cells below the interface get region 1, cells above region 2.
inline Mesh generate_interface_mesh(int n, const GraphFunction& g3) {
  if (n < 2 || n % 2 != 0) fail(ErrorKind::InvalidArgument, "generate_interface_mesh: n must be even and >= 2");
  Mesh m = generate_rect_quad_mesh(n, n, 0.0, 1.0, -0.5, 0.5);
  const int mid_row = n / 2;
  std::vector<char> on_interface(m.vertices.size(), 0);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      const int v = j * (n + 1) + i;
      Point& p = m.vertices[v];
      if (j == mid_row) {
        p.y() = 0.0;
        on_interface[v] = 1;
      }
      p.y() += g3(p.x()) * (1.0 - 2.0 * std::abs(p.y()));
      if (j == mid_row) p.y() = g3(p.x());
    }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m.region_of_cell[j * n + i] = j < mid_row ? 1 : 2;
  const int curve = g3.identically_zero ? -1 : m.add_curve(graph_curve(g3, 0.0));
  for (auto& e : m.edges) {
    if (!on_interface[e.vertices[0]] || !on_interface[e.vertices[1]]) continue;
    e.tag = EdgeTag::Interface;
    if (curve < 0) continue;
    e.curve = curve;
    e.t_start = m.vertices[e.vertices[0]].x();
    e.t_end = m.vertices[e.vertices[1]].x();
  }
  m.finalize();
  return m;
}

}  // namespace ncvem
