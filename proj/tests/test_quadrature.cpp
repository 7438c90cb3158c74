#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "stwave/quadrature.hpp"

using namespace stwave;

TEST_SUITE_BEGIN("quadrature");

TEST_CASE("one-point rule is the midpoint rule") {
  const QuadRule r = gauss_rule(1);
  REQUIRE(r.size() == 1);
  CHECK(r.points[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("two-point rule has the classical nodes") {
  const QuadRule r = gauss_rule(2);
  REQUIRE(r.size() == 2);
  const double off = 1.0 / (2.0 * std::sqrt(3.0));
  CHECK(r.points[0] == doctest::Approx(0.5 - off).epsilon(1e-15));
  CHECK(r.points[1] == doctest::Approx(0.5 + off).epsilon(1e-15));
  CHECK(r.weights[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r.weights[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("three points integrate x^4 exactly") {
  const QuadRule r = gauss_rule(3);
  double acc = 0.0;
  for (int i = 0; i < r.size(); ++i) acc += r.weights[i] * std::pow(r.points[i], 4);
  CHECK(acc == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("polynomial exactness up to degree 2n-1") {
  for (int n = 1; n <= 20; ++n) {
    const QuadRule r = gauss_rule(n);
    double wsum = 0.0;
    for (double w : r.weights) {
      CHECK(w > 0.0);
      wsum += w;
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double acc = 0.0;
      for (int i = 0; i < r.size(); ++i) acc += r.weights[i] * std::pow(r.points[i], d);
      CHECK(acc == doctest::Approx(1.0 / (d + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("out-of-range point counts throw") {
  CHECK_THROWS_AS(gauss_rule(0), std::domain_error);
  CHECK_THROWS_AS(gauss_rule(21), std::domain_error);
}

TEST_CASE("tensor rule of two 2-point rules") {
  const QuadRule g2 = gauss_rule(2);
  const QuadRule factors[] = {g2, g2};
  const TensorRule r = tensor_rule(factors);
  REQUIRE(r.size() == 4);
  for (double w : r.weights) CHECK(w == doctest::Approx(0.25).epsilon(1e-15));
  double acc = 0.0;
  for (int i = 0; i < r.size(); ++i) {
    acc += r.weights[i] * r.points[i][0] * r.points[i][0] * r.points[i][1] * r.points[i][1];
  }
  CHECK(acc == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("tensor rule of three 1-point rules") {
  const QuadRule g1 = gauss_rule(1);
  const QuadRule factors[] = {g1, g1, g1};
  const TensorRule r = tensor_rule(factors);
  REQUIRE(r.size() == 1);
  CHECK(r.points[0][0] == 0.5);
  CHECK(r.points[0][1] == 0.5);
  CHECK(r.points[0][2] == 0.5);
  CHECK(r.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("tensor rule rejects empty and oversized factor lists") {
  CHECK_THROWS_AS(tensor_rule({}), std::domain_error);
  const QuadRule g1 = gauss_rule(1);
  const QuadRule four[] = {g1, g1, g1, g1};
  CHECK_THROWS_AS(tensor_rule(four), std::domain_error);
}

TEST_SUITE_END();
