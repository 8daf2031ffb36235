#pragma once

#include <utility>
#include <vector>

namespace loctens {

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1]; tables are built once per order.
const QuadRule& gauss_legendre(int n);

/// Rule on the reference triangle {(a,b): a,b >= 0, a+b <= 1}, exact up to
/// total degree `degree`. Weights sum to 1/2.
struct TriangleRule {
  std::vector<std::pair<double, double>> points;
  std::vector<double> weights;
};
const TriangleRule& triangle_rule(int degree);

}  // namespace loctens
