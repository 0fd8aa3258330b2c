#pragma once

#include <cmath>

namespace ncvem {

/// Value, gradient and Hessian of a scalar field at one point, propagated
/// through arithmetic so manufactured data can be written in closed form.
struct Jet {
  double v = 0.0;
  double x = 0.0;
  double y = 0.0;
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  static Jet constant(double c) { return {c, 0, 0, 0, 0, 0}; }
  static Jet var_x(double x0) { return {x0, 1, 0, 0, 0, 0}; }
  static Jet var_y(double y0) { return {y0, 0, 1, 0, 0, 0}; }
};

inline Jet operator+(const Jet& a, const Jet& b) {
  return {a.v + b.v, a.x + b.x, a.y + b.y, a.xx + b.xx, a.xy + b.xy, a.yy + b.yy};
}
inline Jet operator-(const Jet& a, const Jet& b) {
  return {a.v - b.v, a.x - b.x, a.y - b.y, a.xx - b.xx, a.xy - b.xy, a.yy - b.yy};
}
inline Jet operator-(const Jet& a) { return {-a.v, -a.x, -a.y, -a.xx, -a.xy, -a.yy}; }
inline Jet operator*(double s, const Jet& a) { return {s * a.v, s * a.x, s * a.y, s * a.xx, s * a.xy, s * a.yy}; }
inline Jet operator*(const Jet& a, double s) { return s * a; }
inline Jet operator/(const Jet& a, double s) { return (1.0 / s) * a; }
inline Jet operator+(const Jet& a, double s) { return a + Jet::constant(s); }
inline Jet operator+(double s, const Jet& a) { return a + Jet::constant(s); }
inline Jet operator-(double s, const Jet& a) { return Jet::constant(s) - a; }
inline Jet operator-(const Jet& a, double s) { return a - Jet::constant(s); }

inline Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v,
          a.x * b.v + a.v * b.x,
          a.y * b.v + a.v * b.y,
          a.xx * b.v + 2 * a.x * b.x + a.v * b.xx,
          a.xy * b.v + a.x * b.y + a.y * b.x + a.v * b.xy,
          a.yy * b.v + 2 * a.y * b.y + a.v * b.yy};
}

/// phi(a) given phi, phi', phi'' evaluated at a.v.
inline Jet chain(const Jet& a, double f0, double f1, double f2) {
  return {f0,
          f1 * a.x,
          f1 * a.y,
          f2 * a.x * a.x + f1 * a.xx,
          f2 * a.x * a.y + f1 * a.xy,
          f2 * a.y * a.y + f1 * a.yy};
}

inline Jet sin(const Jet& a) { return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet cos(const Jet& a) { return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }

}  // namespace ncvem
