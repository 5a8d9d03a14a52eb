#include <gtest/gtest.h>

#include <cmath>

#include "prs/error.hpp"
#include "prs/quadrature.hpp"

using namespace prs;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

// Mean of λ1^a λ2^b λ3^c over the reference triangle.
double exact_mean(int a, int b, int c) {
  return 2.0 * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2);
}

double apply(const TriangleRule& r, int a, int b, int c) {
  double s = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) {
    const auto& l = r.points[q];
    s += r.weights[q] * std::pow(l[0], a) * std::pow(l[1], b) * std::pow(l[2], c);
  }
  return s;
}

}  // namespace

class RuleExactness : public ::testing::TestWithParam<int> {};

TEST_P(RuleExactness, IntegratesMonomials) {
  const int degree = GetParam();
  const TriangleRule& r = triangle_rule(degree);
  EXPECT_GE(r.degree, degree);
  double wsum = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) {
    EXPECT_GT(r.weights[q], 0.0);
    EXPECT_NEAR(r.points[q][0] + r.points[q][1] + r.points[q][2], 1.0, 1e-14);
    for (double l : r.points[q]) EXPECT_GE(l, 0.0);
    wsum += r.weights[q];
  }
  EXPECT_NEAR(wsum, 1.0, 1e-14);
  for (int a = 0; a <= degree; ++a) {
    for (int b = 0; a + b <= degree; ++b) {
      const int c = degree - a - b;
      EXPECT_NEAR(apply(r, a, b, c), exact_mean(a, b, c), 1e-14) << a << "," << b << "," << c;
      EXPECT_NEAR(apply(r, a, b, 0), exact_mean(a, b, 0), 1e-14);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Degrees, RuleExactness, ::testing::Range(1, max_triangle_rule_degree + 1));

TEST(Quadrature, RuleNotExactBeyondDegree) {
  // a degree-1 rule cannot integrate λ1^2 exactly
  EXPECT_GT(std::abs(apply(triangle_rule(1), 2, 0, 0) - exact_mean(2, 0, 0)), 1e-3);
}

TEST(Quadrature, UnsupportedDegree) {
  EXPECT_THROW(triangle_rule(0), InvalidInput);
  EXPECT_THROW(triangle_rule(max_triangle_rule_degree + 1), InvalidInput);
}

TEST(Quadrature, CompositeKeepsExactness) {
  const TriangleRule& base = triangle_rule(5);
  for (int s : {1, 2, 3, 7}) {
    const TriangleRule r = composite_rule(base, s);
    EXPECT_EQ(r.size(), base.size() * static_cast<std::size_t>(s * s));
    for (int a = 0; a <= 5; ++a) {
      for (int b = 0; a + b <= 5; ++b) EXPECT_NEAR(apply(r, a, b, 5 - a - b), exact_mean(a, b, 5 - a - b), 1e-14);
    }
  }
}

TEST(Quadrature, CompositeConvergesForRoughIntegrand) {
  // exp(-40 λ1): exact mean 2 (e^{-k} - 1 + k) / k^2
  const double k = 40.0;
  const double exact = 2.0 * (std::exp(-k) - 1.0 + k) / (k * k);
  auto integrate = [&](const TriangleRule& r) {
    double s = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * std::exp(-k * r.points[q][0]);
    return s;
  };
  double prev = std::abs(integrate(triangle_rule(5)) - exact);
  for (int s : {2, 4, 8, 16, 32, 64}) {
    const double e = std::abs(integrate(composite_rule(triangle_rule(5), s)) - exact);
    EXPECT_LT(e, prev);
    // sixth order once the sub-triangles resolve exp(-k λ1)
    if (s >= 32) EXPECT_GT(prev / e, 40.0);
    prev = e;
  }
  EXPECT_LT(prev / exact, 1e-7);
}

TEST(Quadrature, GaussLegendre) {
  for (int n = 1; n <= 8; ++n) {
    const LineRule r = gauss_legendre(n);
    ASSERT_EQ(r.points.size(), static_cast<std::size_t>(n));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.points[i], p);
      EXPECT_NEAR(s, 1.0 / (p + 1), 1e-14) << "n=" << n << " p=" << p;
    }
  }
}
