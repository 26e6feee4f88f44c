#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "bergman/core.hpp"

namespace bergman {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `order` points on [a, b].
inline GaussRule gauss_legendre(int order, double a = -1.0, double b = 1.0) {
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
  for (int i = 0; i < order; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (order == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    if (order == 1) {
      x = 0.0;
      dp = 1.0;
    }
    const auto idx = static_cast<std::size_t>(order - 1 - i);
    rule.nodes[idx] = mid + half * x;
    rule.weights[idx] = order == 1 ? 2.0 * half : 2.0 * half / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace bergman
