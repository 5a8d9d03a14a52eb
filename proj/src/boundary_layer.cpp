#include "prs/boundary_layer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "prs/error.hpp"
#include "prs/quadrature.hpp"

namespace prs {

namespace {

using State = std::array<double, 3>;  // f, f', f''

constexpr int kShootingIterationCap = 200;
constexpr double kBlowUp = 1e3;

State rhs(const State& s) { return {s[1], s[2], -s[0] * s[2] - 1.0 + s[1] * s[1]}; }

State rk4_step(const State& s, double h) {
  auto axpy = [](const State& x, double a, const State& k) {
    return State{x[0] + a * k[0], x[1] + a * k[1], x[2] + a * k[2]};
  };
  const State k1 = rhs(s);
  const State k2 = rhs(axpy(s, 0.5 * h, k1));
  const State k3 = rhs(axpy(s, 0.5 * h, k2));
  const State k4 = rhs(axpy(s, h, k3));
  State out;
  for (int i = 0; i < 3; ++i) out[i] = s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

struct Shot {
  double residual;  // f'(eta_max) - 1, or NaN after divergence
  int side;         // +1 overshoot (f' > 1 first), -1 undershoot (f'' < 0 first), 0 neither
};

// Integrates from 0 to eta_max in n steps. The exact profile has f' < 1 and
// f'' > 0 everywhere, so the first violation tells on which side of the true
// f''(0) the guess lies, even for trajectories that later blow up.
Shot shoot(double fpp0, double eta_max, int n, std::vector<ProfileSample>* table) {
  const double h = eta_max / n;
  State s{0.0, 0.0, fpp0};
  if (table) {
    table->clear();
    table->reserve(static_cast<std::size_t>(n) + 1);
    table->push_back({0.0, s[0], s[1], s[2]});
  }
  int side = 0;
  for (int i = 1; i <= n; ++i) {
    s = rk4_step(s, h);
    if (side == 0) {
      if (s[1] > 1.0) side = 1;
      else if (s[2] < 0.0) side = -1;
    }
    if (!std::isfinite(s[1]) || std::abs(s[1]) > kBlowUp) {
      return {std::numeric_limits<double>::quiet_NaN(), side};
    }
    if (table) table->push_back({i == n ? eta_max : i * h, s[0], s[1], s[2]});
  }
  if (side == 0) side = s[1] > 1.0 ? 1 : -1;
  return {s[1] - 1.0, side};
}

struct ShotResult {
  double fpp0;
  double residual;
};

ShotResult solve_shooting(double eta_max, int n, double tol) {
  static constexpr std::array<double, 6> guesses{0.5, 1.0, 1.25, 1.5, 2.0, 3.0};
  double lo = 0.0;
  double hi = 0.0;
  bool bracketed = false;
  double prev = guesses[0];
  int prev_side = shoot(prev, eta_max, n, nullptr).side;
  for (std::size_t i = 1; i < guesses.size() && !bracketed; ++i) {
    const int side = shoot(guesses[i], eta_max, n, nullptr).side;
    if (prev_side < 0 && side > 0) {
      lo = prev;
      hi = guesses[i];
      bracketed = true;
    }
    prev = guesses[i];
    prev_side = side;
  }
  if (!bracketed) throw NumericalFailure("solve_profile: shooting residual does not change sign");

  ShotResult best{lo, std::numeric_limits<double>::infinity()};
  auto consider = [&](double s, const Shot& shot) {
    if (std::isfinite(shot.residual) && std::abs(shot.residual) < std::abs(best.residual)) best = {s, shot.residual};
  };
  for (int it = 0; it < kShootingIterationCap; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const Shot shot = shoot(mid, eta_max, n, nullptr);
    consider(mid, shot);
    if (shot.side > 0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (std::abs(best.residual) < tol) return best;
  throw NumericalFailure("solve_profile: shooting did not reach the tolerance (residual " +
                         std::to_string(best.residual) + ")");
}

}  // namespace

HiemenzProfile solve_profile(double eta_max, double tol) {
  if (!(eta_max >= 8.0)) throw InvalidInput("solve_profile: eta_max must be >= 8");
  if (!(tol >= 1e-12)) throw InvalidInput("solve_profile: tol must be >= 1e-12");

  int n = static_cast<int>(std::ceil(eta_max / 0.02));
  ShotResult coarse = solve_shooting(eta_max, n, tol);
  for (;;) {
    if (n > (1 << 22)) throw NumericalFailure("solve_profile: step refinement did not settle");
    const ShotResult fine = solve_shooting(eta_max, 2 * n, tol);
    n *= 2;
    if (std::abs(fine.fpp0 - coarse.fpp0) < tol) {
      HiemenzProfile p;
      p.eta_max = eta_max;
      p.step = eta_max / n;
      p.fpp0 = fine.fpp0;
      p.fpp0_coarse = coarse.fpp0;
      p.residual = shoot(fine.fpp0, eta_max, n, &p.table).residual;
      p.beta = eta_max - p.table.back().f;
      return p;
    }
    coarse = fine;
  }
}

ProfileValue eval_profile(const HiemenzProfile& profile, double eta) {
  if (!(eta >= 0.0)) throw InvalidInput("eval_profile: eta must be non-negative");
  const auto& t = profile.table;
  if (eta > profile.eta_max) return {eta - profile.beta, 1.0, 0.0};
  if (eta == profile.eta_max) return {t.back().f, t.back().fp, t.back().fpp};

  const double h = profile.step;
  auto i = static_cast<std::size_t>(eta / h);
  i = std::min(i, t.size() - 2);
  const ProfileSample& a = t[i];
  const ProfileSample& b = t[i + 1];
  const double s = (eta - a.eta) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  const double a3 = profile_fppp({a.f, a.fp, a.fpp});
  const double b3 = profile_fppp({b.f, b.fp, b.fpp});
  auto hermite = [&](double ya, double dya, double yb, double dyb) {
    return h00 * ya + h10 * h * dya + h01 * yb + h11 * h * dyb;
  };
  return {hermite(a.f, a.fp, b.f, b.fp), hermite(a.fp, a.fpp, b.fp, b.fpp), hermite(a.fpp, a3, b.fpp, b3)};
}

void FlowParams::validate() const {
  if (!(nu > 0.0)) throw InvalidInput("FlowParams: nu must be positive");
  if (!(a > 0.0)) throw InvalidInput("FlowParams: a must be positive");
  if (!std::isfinite(p0)) throw InvalidInput("FlowParams: p0 must be finite");
}

ExactFields::ExactFields(FlowParams params, std::shared_ptr<const HiemenzProfile> profile)
    : params_(params), profile_(std::move(profile)) {
  params_.validate();
  if (!profile_ || profile_->table.size() < 2) throw InvalidInput("ExactFields: missing profile");
  delta_ = 2.4 * std::sqrt(params_.nu / params_.a);
  scale_ = std::sqrt(params_.a / params_.nu);
  sqrt_a_nu_ = std::sqrt(params_.a * params_.nu);
}

ProfileValue ExactFields::at(double y) const { return eval_profile(*profile_, scale_ * y); }

Vec2 ExactFields::velocity(const Vec2& p) const {
  const auto v = at(p.y);
  return {params_.a * p.x * v.fp, -sqrt_a_nu_ * v.f};
}

Mat2 ExactFields::gradient(const Vec2& p) const {
  const auto v = at(p.y);
  const double a = params_.a;
  const double diag = a * v.fp;
  return {diag, a * p.x * v.fpp * scale_, 0.0, -diag};
}

double ExactFields::pressure(const Vec2& p) const {
  const auto v = at(p.y);
  const double a = params_.a;
  return params_.p0 - 0.5 * a * a * (p.x * p.x + 2.0 * params_.nu / a * (v.fp + 0.5 * v.f * v.f));
}

Vec2 ExactFields::forcing(const Vec2& p) const {
  const auto v = at(p.y);
  const double a = params_.a;
  return {-a * a * p.x * (v.fp * v.fp - v.f * v.fpp), -a * sqrt_a_nu_ * v.f * v.fp};
}

Vec2 ExactFields::facet_mean(const Vec2& a, const Vec2& b) const {
  const double amp = params_.a;
  if (a.y == b.y) {
    // η constant along the facet, u_x linear in x.
    const auto v = at(a.y);
    return {amp * 0.5 * (a.x + b.x) * v.fp, -sqrt_a_nu_ * v.f};
  }
  static const LineRule gauss = gauss_legendre(8);
  // composite rule with pieces of at most half a unit in η inside the table
  const double eta_lo = std::min(eta(std::min(a.y, b.y)), profile_->eta_max);
  const double eta_hi = std::min(eta(std::max(a.y, b.y)), profile_->eta_max);
  const int pieces = std::clamp(static_cast<int>(std::ceil(2.0 * (eta_hi - eta_lo))), 1, 64);
  Vec2 mean;
  for (int k = 0; k < pieces; ++k) {
    const Vec2 a0 = a + (static_cast<double>(k) / pieces) * (b - a);
    const Vec2 d = (1.0 / pieces) * (b - a);
    for (std::size_t q = 0; q < gauss.points.size(); ++q) {
      mean += (gauss.weights[q] / pieces) * velocity(a0 + gauss.points[q] * d);
    }
  }
  if (a.x == b.x) {
    // Normal flux in closed form: the integral of f' dη is f, so discrete
    // boundary fluxes telescope and balance exactly.
    const double fa = at(a.y).f;
    const double fb = at(b.y).f;
    mean.x = amp * a.x * (fb - fa) / (scale_ * (b.y - a.y));
  }
  return mean;
}

Vec2 ExactFields::variation_scale(const Vec2& lo, const Vec2& /*hi*/) const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (eta(std::max(lo.y, 0.0)) > profile_->eta_max) return {inf, inf};
  return {inf, 1.0 / scale_};
}

}  // namespace prs
