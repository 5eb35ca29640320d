#pragma once

#include <vector>

namespace ztl {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule, 1 <= n <= 64. Nodes ascend.
GaussLegendreRule gauss_legendre(int n);

}  // namespace ztl
