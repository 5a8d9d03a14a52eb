#pragma once

#include <memory>
#include <vector>

#include "prs/exact.hpp"

namespace prs {

struct ProfileSample {
  double eta = 0.0;
  double f = 0.0;
  double fp = 0.0;
  double fpp = 0.0;
};

struct ProfileValue {
  double f = 0.0;
  double fp = 0.0;
  double fpp = 0.0;
};

/// Tabulated solution of f''' + f f'' + 1 - f'^2 = 0, f(0) = f'(0) = 0, f'(∞) = 1.
struct HiemenzProfile {
  double eta_max = 10.0;
  double step = 0.0;           // table spacing (the accepted RK4 step)
  double fpp0 = 0.0;           // shooting parameter f''(0)
  double fpp0_coarse = 0.0;    // f''(0) obtained with twice the accepted step
  double beta = 0.0;           // displacement constant, f(η) ≈ η - beta for large η
  double residual = 0.0;       // f'(eta_max) - 1
  std::vector<ProfileSample> table;
};

/// Shooting on f''(0) with fixed-step classical RK4. The step is halved until
/// f''(0) changes by less than `tol`; at each step the bracket is refined until
/// |f'(eta_max) - 1| < tol.
HiemenzProfile solve_profile(double eta_max = 10.0, double tol = 1e-10);

/// Cubic Hermite interpolation of the table; asymptotic f = η - beta beyond eta_max.
ProfileValue eval_profile(const HiemenzProfile& profile, double eta);

/// Third derivative from the ODE itself.
inline double profile_fppp(const ProfileValue& v) { return -v.f * v.fpp - 1.0 + v.fp * v.fp; }

struct FlowParams {
  double nu = 1e-4;
  double a = 1.0;
  double p0 = 0.0;

  void validate() const;
};

/// Hiemenz stagnation-point flow on y >= 0:
///   u = (a x f'(η), -sqrt(a nu) f(η)),  η = sqrt(a / nu) y,
///   p = p0 - a^2/2 (x^2 + 2 nu / a (f'(η) + f(η)^2 / 2)).
/// The forcing is the convective term moved to the data, f = -(u·∇)u.
class ExactFields final : public ExactSolution {
 public:
  ExactFields(FlowParams params, std::shared_ptr<const HiemenzProfile> profile);

  const FlowParams& params() const { return params_; }
  const HiemenzProfile& profile() const { return *profile_; }
  double delta() const { return delta_; }
  double eta(double y) const { return scale_ * y; }

  Vec2 velocity(const Vec2& p) const override;
  Mat2 gradient(const Vec2& p) const override;
  double pressure(const Vec2& p) const override;
  Vec2 forcing(const Vec2& p) const override;
  double layer_width() const override { return delta_; }
  Vec2 facet_mean(const Vec2& a, const Vec2& b) const override;
  Vec2 variation_scale(const Vec2& lo, const Vec2& hi) const override;

 private:
  ProfileValue at(double y) const;

  FlowParams params_;
  std::shared_ptr<const HiemenzProfile> profile_;
  double delta_ = 0.0;
  double scale_ = 0.0;      // sqrt(a / nu)
  double sqrt_a_nu_ = 0.0;  // sqrt(a nu)
};

}  // namespace prs
