#pragma once

#include <limits>

#include "prs/geometry.hpp"

namespace prs {

/// A known Stokes solution (u, p) with its data f = -nu Δu + ∇p, used to drive
/// solves and to measure errors.
class ExactSolution {
 public:
  virtual ~ExactSolution() = default;

  virtual Vec2 velocity(const Vec2& p) const = 0;
  virtual Mat2 gradient(const Vec2& p) const = 0;
  virtual double pressure(const Vec2& p) const = 0;
  virtual Vec2 forcing(const Vec2& p) const = 0;

  /// Width of a boundary layer along y = y_min, or 0 if there is none.
  virtual double layer_width() const { return 0.0; }

  /// Mean of the velocity over the segment [a, b]; used for Dirichlet data on
  /// boundary facets. Defaults to midpoint evaluation.
  virtual Vec2 facet_mean(const Vec2& a, const Vec2& b) const { return velocity(0.5 * (a + b)); }

  /// Length scales (x, y) on which the solution varies inside the box [lo, hi].
  /// Quadrature is refined until sub-elements are a fraction of these.
  virtual Vec2 variation_scale(const Vec2& /*lo*/, const Vec2& /*hi*/) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {inf, inf};
  }
};

}  // namespace prs
