#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <utility>

#include "ncvem/errors.hpp"
#include "ncvem/projectors.hpp"

namespace ncvem {

/// Coefficients of -div(a grad u) + div(b u) + c u = f. Every callable takes
/// the physical point and the material region of the cell being integrated.
struct CoefficientField {
  std::function<Eigen::Matrix2d(const Point&, int)> a;
  std::function<Point(const Point&, int)> b;
  std::function<double(const Point&, int)> c;
  std::function<double(const Point&, int)> f;

  /// a = I, b = 0, c = 0 with the given load.
  static CoefficientField laplace(std::function<double(const Point&, int)> load) {
    return {[](const Point&, int) -> Eigen::Matrix2d { return Eigen::Matrix2d::Identity(); },
            [](const Point&, int) -> Point { return Point::Zero(); }, [](const Point&, int) { return 0.0; },
            std::move(load)};
  }
};

/// Local matrices; entry (i, j) couples test function i with trial function j.
struct LocalSystem {
  Matrix consistency;    // int a Pgrad phi_j . Pgrad phi_i
  Matrix stabilization;  // dofi-dofi on (I - Pnabla)
  Matrix diffusion;      // consistency + stabilization
  Matrix advection;
  Matrix reaction;
  Vector load;

  Matrix full() const { return diffusion + advection + reaction; }
};

inline void check_ellipticity(const Eigen::Matrix2d& a, const Point& p) {
  const double scale = a.cwiseAbs().maxCoeff();
  if (std::abs(a(0, 1) - a(1, 0)) > 1e-12 * scale)
    fail(ErrorKind::CoefficientError, "diffusion tensor is not symmetric at (" + std::to_string(p.x()) + ", " +
                                          std::to_string(p.y()) + ")");
  const double tr = a.trace();
  const double det = a.determinant();
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  if (!(0.5 * tr - disc > 0.0))
    fail(ErrorKind::CoefficientError, "diffusion tensor is not elliptic at (" + std::to_string(p.x()) + ", " +
                                          std::to_string(p.y()) + ")");
}

/// Assembles the discrete local forms and load of one cell.
inline LocalSystem assemble_local(const LocalElement& el, const CoefficientField& coeff, int region) {
  const int k = el.k();
  const int nl = poly_dim(k - 1);
  Matrix ma = Matrix::Zero(2 * nl, 2 * nl);
  Matrix mb = Matrix::Zero(2 * nl, nl);
  Matrix mc = Matrix::Zero(nl, nl);
  Vector mf = Vector::Zero(nl);
  for (const auto& node : el.rule().nodes) {
    const Vector v = el.basis().eval(node.point).head(nl);
    const Eigen::Matrix2d a = coeff.a(node.point, region);
    check_ellipticity(a, node.point);
    const Point b = coeff.b(node.point, region);
    const double c = coeff.c(node.point, region);
    const double f = coeff.f(node.point, region);
    const Matrix vv = node.weight * v * v.transpose();
    ma.topLeftCorner(nl, nl) += a(0, 0) * vv;
    ma.topRightCorner(nl, nl) += a(0, 1) * vv;
    ma.bottomLeftCorner(nl, nl) += a(1, 0) * vv;
    ma.bottomRightCorner(nl, nl) += a(1, 1) * vv;
    mb.topRows(nl) += b.x() * vv;
    mb.bottomRows(nl) += b.y() * vv;
    mc += c * vv;
    mf += node.weight * f * v;
  }
  const Matrix& pg = el.gradient_projector();
  const Matrix& p0 = el.l2_projector_lower();
  const Matrix residual =
      Matrix::Identity(el.num_dofs(), el.num_dofs()) - el.dofs_of_polynomials() * el.ritz_galerkin();

  LocalSystem sys;
  sys.consistency = pg.transpose() * ma * pg;
  sys.stabilization = residual.transpose() * residual;
  sys.diffusion = sys.consistency + sys.stabilization;
  sys.advection = -pg.transpose() * mb * p0;
  sys.reaction = p0.transpose() * mc * p0;
  sys.load = p0.transpose() * mf;
  return sys;
}

/// Extreme generalized eigenvalues of the local diffusion form against the
/// reference form consistency + dofi-dofi of the identity, excluding the
/// constant kernel.
inline std::pair<double, double> stability_ratio(const LocalSystem& sys) {
  const Eigen::Index n = sys.diffusion.rows();
  const Matrix reference = sys.consistency + Matrix::Identity(n, n);
  const Matrix a = 0.5 * (sys.diffusion + sys.diffusion.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> eig(a, 0.5 * (reference + reference.transpose()));
  if (eig.info() != Eigen::Success) fail(ErrorKind::NumericError, "stability eigenproblem failed");
  const Vector& ev = eig.eigenvalues();
  return {ev(1), ev(n - 1)};
}

}  // namespace ncvem
