#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ncvem/ncvem.hpp"

using namespace ncvem;

namespace {

std::vector<Point> random_points(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.emplace_back(u(rng), u(rng));
  return pts;
}

}  // namespace

TEST(CellBasis, Dimensions) {
  for (int n = 0; n <= 6; ++n) {
    EXPECT_EQ(CellBasis(Point::Zero(), 1.0, n).dim(), (n + 1) * (n + 2) / 2);
    EXPECT_EQ((EdgeBasis{0.0, 1.0, n}.dim()), n + 1);
  }
  EXPECT_EQ(poly_dim(-1), 0);
}

TEST(CellBasis, ConstantIsOne) {
  const CellBasis b(Point(0.3, 0.7), 0.2, 4);
  for (const Point& p : random_points(10, 1)) EXPECT_EQ(b.eval(p)[0], 1.0);
}

TEST(CellBasis, ScaledMonomialDefinition) {
  const CellBasis b(Point(0.5, 0.5), std::sqrt(2.0), 1);
  const Vector v = b.eval(Point(0.5 + std::sqrt(2.0), 0.5));
  EXPECT_NEAR(v[monomial_index(1, 0)], 1.0, 1e-15);
  EXPECT_NEAR(v[monomial_index(0, 1)], 0.0, 1e-15);
}

TEST(CellBasis, GradedOrdering) {
  const CellBasis b(Point::Zero(), 1.0, 3);
  const auto ex = b.exponents();
  for (std::size_t i = 0; i < ex.size(); ++i) EXPECT_EQ(monomial_index(ex[i][0], ex[i][1]), static_cast<int>(i));
}

TEST(CellBasis, ProjectThenEvaluateReproduces) {
  // Least-squares fit of samples of a degree-n polynomial recovers it exactly.
  const int n = 4;
  const CellBasis b(Point(0.4, 0.6), 0.3, n);
  const auto f = [](const Point& p) {
    return 1.0 - 2.0 * p.x() + p.x() * p.y() * p.y() + 3.0 * std::pow(p.y(), 4) - p.x() * p.x() * p.x();
  };
  const auto pts = random_points(40, 2);
  Vector rhs(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) rhs[static_cast<Eigen::Index>(i)] = f(pts[i]);
  const Matrix v = b.eval(pts);
  const Vector c = v.colPivHouseholderQr().solve(rhs);
  for (const Point& p : random_points(20, 3)) EXPECT_NEAR(b.eval(p).dot(c), f(p), 1e-12 * (1.0 + std::abs(f(p))));
}

TEST(CellBasis, ConstantGradientVanishes) {
  const CellBasis b(Point(0.1, 0.2), 0.5, 3);
  EXPECT_EQ(b.grad(Point(0.7, -0.4)).row(0).norm(), 0.0);
}

TEST(CellBasis, GradientMatchesFiniteDifferences) {
  for (int n = 1; n <= 5; ++n) {
    const CellBasis b(Point(0.3, -0.2), 0.7, n);
    const double step = 1e-7 * b.h;
    for (const Point& p : random_points(10, 10 + n)) {
      const auto g = b.grad(p);
      const Vector fx = (b.eval(Point(p.x() + step, p.y())) - b.eval(Point(p.x() - step, p.y()))) / (2 * step);
      const Vector fy = (b.eval(Point(p.x(), p.y() + step)) - b.eval(Point(p.x(), p.y() - step))) / (2 * step);
      for (int i = 0; i < b.dim(); ++i) {
        EXPECT_NEAR(g(i, 0), fx[i], 1e-6 * (1.0 + std::abs(g(i, 0))));
        EXPECT_NEAR(g(i, 1), fy[i], 1e-6 * (1.0 + std::abs(g(i, 1))));
      }
    }
  }
}

TEST(CellBasis, LaplacianOfXSquared) {
  const double h = 0.4;
  const CellBasis b(Point(0.2, 0.1), h, 2);
  const Matrix l = b.laplacian_map();
  ASSERT_EQ(l.rows(), 1);
  EXPECT_NEAR(l(0, monomial_index(2, 0)), 2.0 / (h * h), 1e-14);
  EXPECT_NEAR(l(0, monomial_index(1, 1)), 0.0, 1e-14);
}

TEST(CellBasis, LaplacianMapMatchesPointwise) {
  for (int n = 2; n <= 6; ++n) {
    const CellBasis b(Point(0.5, 0.25), 0.8, n);
    const double step = 1e-3 * b.h;
    for (const Point& p : random_points(10, 20 + n)) {
      const Vector lap = b.laplacian(p);
      // Fourth-order central differences as an independent pointwise value.
      const auto d2 = [&](const Point& e) -> Vector {
        return (-b.eval(p + 2 * step * e) + 16 * b.eval(p + step * e) - 30 * b.eval(p) + 16 * b.eval(p - step * e) -
                b.eval(p - 2 * step * e)) /
               (12 * step * step);
      };
      const Vector fd = d2(Point(1, 0)) + d2(Point(0, 1));
      for (int i = 0; i < b.dim(); ++i) EXPECT_NEAR(lap[i], fd[i], 1e-6 * (1.0 + std::abs(lap[i])));
      // Coefficient map against the closed form a(a-1) s^(a-2) t^b + b(b-1) s^a t^(b-2).
      const Point s = (p - b.center) / b.h;
      const auto ex = b.exponents();
      for (int i = 0; i < b.dim(); ++i) {
        const int a = ex[i][0], c = ex[i][1];
        const double exact = ((a > 1 ? a * (a - 1) * std::pow(s.x(), a - 2) * std::pow(s.y(), c) : 0.0) +
                              (c > 1 ? c * (c - 1) * std::pow(s.x(), a) * std::pow(s.y(), c - 2) : 0.0)) /
                             (b.h * b.h);
        EXPECT_NEAR(lap[i], exact, 1e-12 * (1.0 + std::abs(exact)));
      }
    }
  }
}

TEST(CellBasis, DerivativeAndDivergenceMaps) {
  const CellBasis b(Point(0.1, 0.9), 0.6, 4);
  const CellBasis lower(b.center, b.h, 3);
  for (const Point& p : random_points(5, 31)) {
    const auto g = b.grad(p);
    EXPECT_LT((b.derivative_map(0).transpose() * lower.eval(p) - g.col(0)).norm(), 1e-12 * g.norm());
    EXPECT_LT((b.derivative_map(1).transpose() * lower.eval(p) - g.col(1)).norm(), 1e-12 * g.norm());
    const Matrix div = b.divergence_map();
    ASSERT_EQ(div.cols(), 2 * b.dim());
    for (int i = 0; i < b.dim(); ++i) {
      EXPECT_NEAR(lower.eval(p).dot(div.col(i)), g(i, 0), 1e-12 * (1.0 + std::abs(g(i, 0))));
      EXPECT_NEAR(lower.eval(p).dot(div.col(b.dim() + i)), g(i, 1), 1e-12 * (1.0 + std::abs(g(i, 1))));
    }
  }
}

TEST(EdgeBasis, Values) {
  const EdgeBasis b{0.3, 0.2, 3};
  EXPECT_EQ(b.eval(-4.0)[0], 1.0);
  EXPECT_NEAR(b.eval(0.5)[1], 1.0, 1e-15);
  EXPECT_NEAR(b.eval(0.1)[3], -1.0, 1e-14);
}

TEST(EdgeBasis, GramOnStraightUnitEdge) {
  // Mapped monomials (t - 1/2)^i / h^i on [0, 1] against 3-point Gauss.
  const double h = 0.25;
  const EdgeBasis b{0.5, h, 2};
  const auto g = gauss_legendre(3);
  Matrix gram = Matrix::Zero(3, 3);
  for (std::size_t q = 0; q < g.nodes.size(); ++q) {
    const Vector v = b.eval(0.5 + 0.5 * g.nodes[q]);
    gram += 0.5 * g.weights[q] * v * v.transpose();
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int d = i + j;
      const double exact = d % 2 ? 0.0 : std::pow(0.5, d) / (d + 1) / std::pow(h, d);
      EXPECT_NEAR(gram(i, j), exact, 1e-14 * (1.0 + exact));
    }
}
