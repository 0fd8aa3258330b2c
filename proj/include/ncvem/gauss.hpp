#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "ncvem/errors.hpp"

namespace ncvem {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline constexpr int kMaxGaussPoints = 30;

/// Newton iteration on the three-term Legendre recurrence; nodes ascending.
inline GaussRule1D gauss_legendre(int n_points) {
  if (n_points < 1 || n_points > kMaxGaussPoints) {
    fail(ErrorKind::InvalidArgument,
         "gauss_legendre: n_points must lie in [1, 30], got " + std::to_string(n_points));
  }
  const int n = n_points;
  GaussRule1D rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) {
      p1 = x;
      p0 = 1.0;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace ncvem
