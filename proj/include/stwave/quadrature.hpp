#pragma once

#include <array>
#include <span>
#include <vector>

namespace stwave {

/// Gauss-Legendre rule on the reference interval [0,1].
struct QuadRule {
  std::vector<double> points;
  std::vector<double> weights;  // positive, summing to 1

  int size() const { return static_cast<int>(points.size()); }
};

/// n-point Gauss-Legendre rule, exact for polynomials of degree 2n-1.
/// Valid for 1 <= n <= 20.
QuadRule gauss_rule(int n);

/// Tensor-product rule on [0,1]^d, d = number of factors (1 to 3).
/// Unused coordinates are padded with zero.
struct TensorRule {
  int dim = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(points.size()); }
};

TensorRule tensor_rule(std::span<const QuadRule> factors);

// Rule sizes used throughout: volume integrals of discrete functions use
// degree+2 points per direction (exact); integrals against non-polynomial
// data use degree+6.
inline int volume_rule_points(int degree) { return degree + 2; }
inline int data_rule_points(int degree) { return degree + 6; }

}  // namespace stwave
