#include "stwave/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace stwave {

QuadRule gauss_rule(int n) {
  if (n < 1 || n > 20) {
    throw std::domain_error("gauss_rule: point count must be in [1,20], got " +
                            std::to_string(n));
  }
  QuadRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  // Newton iteration on the Legendre polynomial P_n over [-1,1].
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - z * z) * pp * pp);
    // map [-1,1] -> [0,1]
    rule.points[i] = 0.5 * (1.0 - z);
    rule.points[n - 1 - i] = 0.5 * (1.0 + z);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.5;  // kill the -0.0 of cos(pi/2)
  return rule;
}

TensorRule tensor_rule(std::span<const QuadRule> factors) {
  if (factors.empty() || factors.size() > 3) {
    throw std::domain_error("tensor_rule: expected 1 to 3 factor rules");
  }
  TensorRule rule;
  rule.dim = static_cast<int>(factors.size());
  int total = 1;
  for (const auto& f : factors) total *= f.size();
  rule.points.reserve(total);
  rule.weights.reserve(total);
  std::array<int, 3> n{1, 1, 1};
  for (int d = 0; d < rule.dim; ++d) n[d] = factors[d].size();
  for (int i = 0; i < n[0]; ++i) {
    for (int j = 0; j < n[1]; ++j) {
      for (int l = 0; l < n[2]; ++l) {
        std::array<double, 3> p{factors[0].points[i], 0.0, 0.0};
        double w = factors[0].weights[i];
        if (rule.dim > 1) {
          p[1] = factors[1].points[j];
          w *= factors[1].weights[j];
        }
        if (rule.dim > 2) {
          p[2] = factors[2].points[l];
          w *= factors[2].weights[l];
        }
        rule.points.push_back(p);
        rule.weights.push_back(w);
      }
    }
  }
  return rule;
}

}  // namespace stwave
