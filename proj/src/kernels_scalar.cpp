#include "prs/kernels.hpp"

namespace prs::kernels::scalar {

void element_gradients(const ElementGradientArgs& args, const GradientArrays& out) {
  const std::size_t n = out.xx.size();
  for (std::size_t e = 0; e < n; ++e) {
    double xx = 0.0, xy = 0.0, yx = 0.0, yy = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double bx = args.basis_x[k][e];
      const double by = args.basis_y[k][e];
      xx += args.ux[k][e] * bx;
      xy += args.ux[k][e] * by;
      yx += args.uy[k][e] * bx;
      yy += args.uy[k][e] * by;
    }
    out.xx[e] = xx;
    out.xy[e] = xy;
    out.yx[e] = yx;
    out.yy[e] = yy;
  }
}

void weighted_frobenius_sq(std::span<const double> w, const ConstGradientArrays& g, std::span<double> out) {
  for (std::size_t e = 0; e < out.size(); ++e) {
    out[e] = w[e] * (g.xx[e] * g.xx[e] + g.xy[e] * g.xy[e] + g.yx[e] * g.yx[e] + g.yy[e] * g.yy[e]);
  }
}

double quad_gradient_error_sq(std::span<const double> w, const ConstGradientArrays& g,
                              const std::array<double, 4>& c) {
  double sum = 0.0;
  for (std::size_t q = 0; q < w.size(); ++q) {
    const double a = g.xx[q] - c[0];
    const double b = g.xy[q] - c[1];
    const double d = g.yx[q] - c[2];
    const double e = g.yy[q] - c[3];
    sum += w[q] * (a * a + b * b + d * d + e * e);
  }
  return sum;
}

double quad_scalar_error_sq(std::span<const double> w, std::span<const double> v, double c) {
  double sum = 0.0;
  for (std::size_t q = 0; q < w.size(); ++q) {
    const double d = v[q] - c;
    sum += w[q] * d * d;
  }
  return sum;
}

}  // namespace prs::kernels::scalar
