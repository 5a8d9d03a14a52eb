#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "prs/error.hpp"
#include "prs/kernels.hpp"

using namespace prs;
namespace k = prs::kernels;

namespace {

struct Data {
  std::array<std::vector<double>, 3> bx, by, ux, uy;
  std::vector<double> w;
  std::vector<double> gxx, gxy, gyx, gyy;

  explicit Data(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    auto fill = [&](std::vector<double>& v) {
      v.resize(n);
      for (auto& x : v) x = d(rng);
    };
    for (int i = 0; i < 3; ++i) {
      fill(bx[i]);
      fill(by[i]);
      fill(ux[i]);
      fill(uy[i]);
    }
    fill(w);
    for (auto& x : w) x = std::abs(x);
    fill(gxx);
    fill(gxy);
    fill(gyx);
    fill(gyy);
  }

  k::ElementGradientArgs args() const {
    return {{bx[0], bx[1], bx[2]}, {by[0], by[1], by[2]}, {ux[0], ux[1], ux[2]}, {uy[0], uy[1], uy[2]}};
  }
  k::ConstGradientArrays grads() const { return {gxx, gxy, gyx, gyy}; }
};

bool have_avx2() { return k::isa_supported(k::Isa::Avx2); }

}  // namespace

TEST(Kernels, ScalarAlwaysSupported) {
  EXPECT_TRUE(k::isa_supported(k::Isa::Scalar));
  EXPECT_STREQ(k::isa_name(k::Isa::Scalar), "scalar");
  EXPECT_STREQ(k::isa_name(k::Isa::Avx2), "avx2");
}

TEST(Kernels, SelectAndRestore) {
  const k::Isa before = k::active_isa();
  k::set_active_isa(k::Isa::Scalar);
  EXPECT_EQ(k::active_isa(), k::Isa::Scalar);
  if (have_avx2()) {
    k::set_active_isa(k::Isa::Avx2);
    EXPECT_EQ(k::active_isa(), k::Isa::Avx2);
  } else {
    EXPECT_THROW(k::set_active_isa(k::Isa::Avx2), InvalidInput);
  }
  k::set_active_isa(before);
}

TEST(Kernels, ElementGradientsReference) {
  // u = (x + 2y, 3x - y) on the reference triangle; CR basis gradients -2∇λ_k
  const std::vector<double> b0x{2.0}, b0y{2.0}, b1x{-2.0}, b1y{0.0}, b2x{0.0}, b2y{-2.0};
  // midpoints of the facets opposite (0,0), (1,0), (0,1)
  const std::vector<double> u0x{0.5 + 1.0}, u0y{1.5 - 0.5}, u1x{0.0 + 1.0}, u1y{0.0 - 0.5}, u2x{0.5}, u2y{1.5};
  const k::ElementGradientArgs args{{b0x, b1x, b2x}, {b0y, b1y, b2y}, {u0x, u1x, u2x}, {u0y, u1y, u2y}};
  for (k::Isa isa : {k::Isa::Scalar, k::Isa::Avx2}) {
    if (!k::isa_supported(isa)) continue;
    std::vector<double> xx(1), xy(1), yx(1), yy(1);
    const k::GradientArrays out{xx, xy, yx, yy};
    if (isa == k::Isa::Scalar) k::scalar::element_gradients(args, out);
    else k::avx2::element_gradients(args, out);
    EXPECT_NEAR(xx[0], 1.0, 1e-15);
    EXPECT_NEAR(xy[0], 2.0, 1e-15);
    EXPECT_NEAR(yx[0], 3.0, 1e-15);
    EXPECT_NEAR(yy[0], -1.0, 1e-15);
  }
}

class KernelEquivalence : public ::testing::TestWithParam<std::size_t> {};

TEST_P(KernelEquivalence, Avx2MatchesScalar) {
  if (!have_avx2()) GTEST_SKIP() << "AVX2 not available";
  const std::size_t n = GetParam();
  const Data d(n, 1234 + n);

  std::vector<double> s_xx(n), s_xy(n), s_yx(n), s_yy(n), v_xx(n), v_xy(n), v_yx(n), v_yy(n);
  k::scalar::element_gradients(d.args(), {s_xx, s_xy, s_yx, s_yy});
  k::avx2::element_gradients(d.args(), {v_xx, v_xy, v_yx, v_yy});
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_NEAR(s_xx[i], v_xx[i], 1e-13 * (1 + std::abs(s_xx[i])));
    EXPECT_NEAR(s_xy[i], v_xy[i], 1e-13 * (1 + std::abs(s_xy[i])));
    EXPECT_NEAR(s_yx[i], v_yx[i], 1e-13 * (1 + std::abs(s_yx[i])));
    EXPECT_NEAR(s_yy[i], v_yy[i], 1e-13 * (1 + std::abs(s_yy[i])));
  }

  std::vector<double> s_f(n), v_f(n);
  k::scalar::weighted_frobenius_sq(d.w, d.grads(), s_f);
  k::avx2::weighted_frobenius_sq(d.w, d.grads(), v_f);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(s_f[i], v_f[i], 1e-13 * (1 + s_f[i]));

  const std::array<double, 4> c{0.5, -1.0, 2.0, 0.25};
  const double s_g = k::scalar::quad_gradient_error_sq(d.w, d.grads(), c);
  const double v_g = k::avx2::quad_gradient_error_sq(d.w, d.grads(), c);
  EXPECT_NEAR(s_g, v_g, 1e-12 * (1 + s_g));

  const double s_s = k::scalar::quad_scalar_error_sq(d.w, d.gxx, 0.7);
  const double v_s = k::avx2::quad_scalar_error_sq(d.w, d.gxx, 0.7);
  EXPECT_NEAR(s_s, v_s, 1e-12 * (1 + s_s));
}

// sizes around the vector width exercise the remainder loops
INSTANTIATE_TEST_SUITE_P(Sizes, KernelEquivalence, ::testing::Values(0, 1, 3, 4, 5, 7, 8, 13, 64, 1001));

TEST(Kernels, ScalarReductionsMatchDirectSums) {
  const Data d(37, 7);
  double g = 0.0, s = 0.0;
  const std::array<double, 4> c{1.0, 0.0, -0.5, 2.0};
  for (std::size_t i = 0; i < 37; ++i) {
    const double a = d.gxx[i] - c[0], b = d.gxy[i] - c[1], e = d.gyx[i] - c[2], f = d.gyy[i] - c[3];
    g += d.w[i] * (a * a + b * b + e * e + f * f);
    s += d.w[i] * (d.gxx[i] - 0.3) * (d.gxx[i] - 0.3);
  }
  EXPECT_NEAR(k::scalar::quad_gradient_error_sq(d.w, d.grads(), c), g, 1e-12 * g);
  EXPECT_NEAR(k::scalar::quad_scalar_error_sq(d.w, d.gxx, 0.3), s, 1e-12 * s);
}
