#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <numbers>
#include <string>

#include "ncvem/curves.hpp"
#include "ncvem/errors.hpp"
#include "ncvem/jet.hpp"
#include "ncvem/local_forms.hpp"

namespace ncvem {

/// Exact solution with its gradient and the load it manufactures.
struct ExactSolution {
  std::function<double(const Point&, int)> u;
  std::function<Point(const Point&, int)> grad_u;
  std::function<double(const Point&, int)> f;
};

/// An elliptic problem given through differentiable closed forms; the load is
/// obtained from the strong form f = -div(a grad u) + div(b u) + c u.
struct ManufacturedProblem {
  std::function<Jet(const Point&, int)> u;
  /// a11, a12, a22 (first derivatives are used).
  std::function<std::array<Jet, 3>(const Point&, int)> a;
  std::function<std::array<Jet, 2>(const Point&, int)> b;
  std::function<double(const Point&, int)> c;

  double load(const Point& p, int region) const {
    const Jet w = u(p, region);
    const auto [a11, a12, a22] = a(p, region);
    const auto [b1, b2] = b(p, region);
    const double div_flux = a11.x * w.x + a11.v * w.xx + a12.x * w.y + a12.v * w.xy + a12.y * w.x + a12.v * w.xy +
                            a22.y * w.y + a22.v * w.yy;
    const double div_bu = b1.x * w.v + b1.v * w.x + b2.y * w.v + b2.v * w.y;
    return -div_flux + div_bu + c(p, region) * w.v;
  }

  CoefficientField coefficients() const {
    auto self = *this;
    return {[self](const Point& p, int r) -> Eigen::Matrix2d {
              const auto [a11, a12, a22] = self.a(p, r);
              Eigen::Matrix2d m;
              m << a11.v, a12.v, a12.v, a22.v;
              return m;
            },
            [self](const Point& p, int r) -> Point {
              const auto [b1, b2] = self.b(p, r);
              return {b1.v, b2.v};
            },
            self.c, [self](const Point& p, int r) { return self.load(p, r); }};
  }

  ExactSolution exact() const {
    auto self = *this;
    return {[self](const Point& p, int r) { return self.u(p, r).v; },
            [self](const Point& p, int r) -> Point {
              const Jet w = self.u(p, r);
              return {w.x, w.y};
            },
            [self](const Point& p, int r) { return self.load(p, r); }};
  }
};

namespace problems {

inline std::array<Jet, 3> a1(const Point& p) {
  const Jet x = Jet::var_x(p.x());
  const Jet y = Jet::var_y(p.y());
  return {y * y + 1.0, -(x * y), x * x + 1.0};
}

inline std::array<Jet, 2> b1(const Point& p) { return {Jet::var_x(p.x()), Jet::var_y(p.y())}; }

inline double c1(const Point& p) { return p.x() * p.x() + p.y() * p.y() * p.y(); }

/// u1 = x^2 y + sin(2 pi x) sin(2 pi y) + 2 with coefficients a1, b1, c1 on the unit square.
inline ManufacturedProblem case1() {
  ManufacturedProblem p;
  p.u = [](const Point& q, int) {
    const Jet x = Jet::var_x(q.x());
    const Jet y = Jet::var_y(q.y());
    const double w = 2.0 * std::numbers::pi;
    return x * x * y + sin(w * x) * sin(w * y) + 2.0;
  };
  p.a = [](const Point& q, int) { return a1(q); };
  p.b = [](const Point& q, int) { return b1(q); };
  p.c = [](const Point& q, int) { return c1(q); };
  return p;
}

/// u2 = -(y - g1)(y - g2) x (1 - x)(3 + sin 5x sin 7y) with g1 = sin(pi x)/20 and
/// g2 = 1 + sin(3 pi x)/20; vanishes on the boundary of g1 < y < g2.
inline ManufacturedProblem case2() {
  ManufacturedProblem p;
  p.u = [](const Point& q, int) {
    const Jet x = Jet::var_x(q.x());
    const Jet y = Jet::var_y(q.y());
    const Jet g1 = sin(std::numbers::pi * x) / 20.0;
    const Jet g2 = 1.0 + sin(3.0 * std::numbers::pi * x) / 20.0;
    return -((y - g1) * (y - g2) * (1.0 - x) * x * (3.0 + sin(5.0 * x) * sin(7.0 * y)));
  };
  p.a = [](const Point& q, int) { return a1(q); };
  p.b = [](const Point& q, int) { return b1(q); };
  p.c = [](const Point& q, int) { return c1(q); };
  return p;
}

/// Interface problem on (0,1)x(-1/2,1/2): a = kappa_r a1 and u = w / kappa_r
/// in region r (1 below the interface y = sin(3 pi x)/20, 2 above).
inline ManufacturedProblem case3(double kappa1, double kappa2) {
  if (!(kappa1 > 0.0 && kappa2 > 0.0)) fail(ErrorKind::InvalidArgument, "kappa values must be positive");
  ManufacturedProblem p;
  const auto kappa = [kappa1, kappa2](int region) { return region == 2 ? kappa2 : kappa1; };
  p.u = [kappa](const Point& q, int r) {
    const Jet x = Jet::var_x(q.x());
    const Jet y = Jet::var_y(q.y());
    const Jet g3 = sin(3.0 * std::numbers::pi * x) / 20.0;
    return x * (1.0 - x) * (y - g3) * (3.0 + sin(5.0 * x) * sin(7.0 * y)) / kappa(r);
  };
  p.a = [kappa](const Point& q, int r) {
    auto a = a1(q);
    for (auto& e : a) e = kappa(r) * e;
    return a;
  };
  p.b = [](const Point& q, int) { return b1(q); };
  p.c = [](const Point& q, int) { return c1(q); };
  return p;
}

/// a = I, b = c = 0 with the full polynomial sum_{a+b<=k} x^a y^b / (1 + a + 2b).
inline ManufacturedProblem patch(int k) {
  ManufacturedProblem p;
  p.u = [k](const Point& q, int) {
    const Jet x = Jet::var_x(q.x());
    const Jet y = Jet::var_y(q.y());
    Jet sum = Jet::constant(0.0);
    Jet xa = Jet::constant(1.0);
    for (int a = 0; a <= k; ++a) {
      Jet yb = Jet::constant(1.0);
      for (int b = 0; a + b <= k; ++b) {
        sum = sum + (xa * yb) / (1.0 + a + 2.0 * b);
        yb = yb * y;
      }
      xa = xa * x;
    }
    return sum;
  };
  p.a = [](const Point&, int) {
    return std::array<Jet, 3>{Jet::constant(1.0), Jet::constant(0.0), Jet::constant(1.0)};
  };
  p.b = [](const Point&, int) { return std::array<Jet, 2>{Jet::constant(0.0), Jet::constant(0.0)}; };
  p.c = [](const Point&, int) { return 0.0; };
  return p;
}

}  // namespace problems
}  // namespace ncvem
