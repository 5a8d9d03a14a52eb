#pragma once

#include <array>
#include <vector>

namespace prs {

/// Quadrature on a triangle in barycentric coordinates. Weights sum to one, so
/// an integral over element T is |T| * sum_q w_q g(x_q).
struct TriangleRule {
  int degree = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Symmetric rule with positive weights, exact for polynomials of total degree
/// >= `degree`. Supported: 1..9. Throws InvalidInput otherwise.
const TriangleRule& triangle_rule(int degree);

constexpr int max_triangle_rule_degree = 9;

/// Splits the triangle into s*s congruent sub-triangles and applies `base` on
/// each. s == 1 returns `base` unchanged.
TriangleRule composite_rule(const TriangleRule& base, int s);

/// Gauss-Legendre rule on [0, 1] with n points; weights sum to one.
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};
LineRule gauss_legendre(int n);

}  // namespace prs
