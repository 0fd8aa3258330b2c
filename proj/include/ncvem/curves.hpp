#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ncvem/errors.hpp"

namespace ncvem {

using Point = Eigen::Vector2d;

/// z-component of the planar cross product.
inline double cross2(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

/// A scalar function y = g(x) with its derivative, used to bend straight
/// mesh lines into curved boundaries and interfaces.
struct GraphFunction {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  bool identically_zero = false;

  double operator()(double x) const { return value(x); }
};

inline GraphFunction zero_graph() {
  return {"zero", [](double) { return 0.0; }, [](double) { return 0.0; }, true};
}

/// sin(m*pi*x)/20 for the frequencies used by the test geometries.
inline GraphFunction sine_graph(int m) {
  const double w = m * std::numbers::pi;
  std::string name = m == 1 ? "sin_pi_over20" : "sin_" + std::to_string(m) + "pi_over20";
  return {std::move(name), [w](double x) { return std::sin(w * x) / 20.0; },
          [w](double x) { return w * std::cos(w * x) / 20.0; }, false};
}

inline GraphFunction graph_by_name(std::string_view name) {
  if (name == "zero") return zero_graph();
  if (name == "sin_pi_over20") return sine_graph(1);
  if (name == "sin_3pi_over20") return sine_graph(3);
  fail(ErrorKind::InvalidArgument, "unknown graph function '" + std::string(name) + "'");
}

/// Regular parametrization t -> (x, y) of a boundary or interface curve.
///
/// Curves are referenced by registry name so that meshes can be serialized
/// exactly: graph curves "<graph>" and "one_plus_<graph>" (parameter t = x),
/// and "affine" with params [x0, y0, x1, y1] (t in [0, 1]).
struct CurveParam {
  std::string name;
  std::vector<double> params;
  std::function<Point(double)> map;
  std::function<Point(double)> derivative;
  double t0 = 0.0;
  double t1 = 1.0;
  int smoothness_order = 1;

  Point operator()(double t) const { return map(t); }
};

inline CurveParam graph_curve(const GraphFunction& g, double offset) {
  CurveParam c;
  c.name = offset == 0.0 ? g.name : (offset == 1.0 ? "one_plus_" + g.name : "");
  if (c.name.empty()) fail(ErrorKind::InvalidArgument, "graph curve offset must be 0 or 1");
  auto value = g.value;
  auto deriv = g.derivative;
  c.map = [value, offset](double t) { return Point(t, offset + value(t)); };
  c.derivative = [deriv](double t) { return Point(1.0, deriv(t)); };
  c.smoothness_order = 1000;
  return c;
}

inline CurveParam affine_curve(const Point& p0, const Point& p1) {
  CurveParam c;
  c.name = "affine";
  c.params = {p0.x(), p0.y(), p1.x(), p1.y()};
  const Point d = p1 - p0;
  c.map = [p0, d](double t) -> Point { return p0 + t * d; };
  c.derivative = [d](double) -> Point { return d; };
  c.smoothness_order = 1000;
  return c;
}

/// Rebuilds a curve from its serialized identity.
inline CurveParam make_curve(std::string_view name, const std::vector<double>& params) {
  if (name == "affine") {
    if (params.size() != 4) fail(ErrorKind::InvalidArgument, "affine curve needs 4 params");
    return affine_curve(Point(params[0], params[1]), Point(params[2], params[3]));
  }
  constexpr std::string_view prefix = "one_plus_";
  if (name.substr(0, prefix.size()) == prefix) {
    return graph_curve(graph_by_name(name.substr(prefix.size())), 1.0);
  }
  return graph_curve(graph_by_name(name), 0.0);
}

/// Checks regularity (nonvanishing derivative) and injectivity on a sample grid.
inline bool curve_is_regular(const CurveParam& c, int samples = 64) {
  std::vector<Point> pts;
  pts.reserve(samples + 1);
  for (int i = 0; i <= samples; ++i) {
    const double t = c.t0 + (c.t1 - c.t0) * i / samples;
    if (c.derivative(t).norm() <= 0.0) return false;
    pts.push_back(c.map(t));
  }
  for (int i = 0; i <= samples; ++i)
    for (int j = i + 1; j <= samples; ++j)
      if ((pts[i] - pts[j]).norm() == 0.0) return false;
  return true;
}

}  // namespace ncvem
