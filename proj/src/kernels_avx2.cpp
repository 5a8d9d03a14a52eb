// Built with -mavx2 -mfma; only reached when CPUID reports both.
#include <immintrin.h>

#include "prs/kernels.hpp"

namespace prs::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void element_gradients(const ElementGradientArgs& args, const GradientArrays& out) {
  const std::size_t n = out.xx.size();
  std::size_t e = 0;
  for (; e + 4 <= n; e += 4) {
    __m256d xx = _mm256_setzero_pd();
    __m256d xy = _mm256_setzero_pd();
    __m256d yx = _mm256_setzero_pd();
    __m256d yy = _mm256_setzero_pd();
    for (int k = 0; k < 3; ++k) {
      const __m256d bx = _mm256_loadu_pd(args.basis_x[k].data() + e);
      const __m256d by = _mm256_loadu_pd(args.basis_y[k].data() + e);
      const __m256d ux = _mm256_loadu_pd(args.ux[k].data() + e);
      const __m256d uy = _mm256_loadu_pd(args.uy[k].data() + e);
      xx = _mm256_fmadd_pd(ux, bx, xx);
      xy = _mm256_fmadd_pd(ux, by, xy);
      yx = _mm256_fmadd_pd(uy, bx, yx);
      yy = _mm256_fmadd_pd(uy, by, yy);
    }
    _mm256_storeu_pd(out.xx.data() + e, xx);
    _mm256_storeu_pd(out.xy.data() + e, xy);
    _mm256_storeu_pd(out.yx.data() + e, yx);
    _mm256_storeu_pd(out.yy.data() + e, yy);
  }
  if (e < n) {
    ElementGradientArgs tail;
    for (int k = 0; k < 3; ++k) {
      tail.basis_x[k] = args.basis_x[k].subspan(e);
      tail.basis_y[k] = args.basis_y[k].subspan(e);
      tail.ux[k] = args.ux[k].subspan(e);
      tail.uy[k] = args.uy[k].subspan(e);
    }
    scalar::element_gradients(tail, {out.xx.subspan(e), out.xy.subspan(e), out.yx.subspan(e), out.yy.subspan(e)});
  }
}

void weighted_frobenius_sq(std::span<const double> w, const ConstGradientArrays& g, std::span<double> out) {
  const std::size_t n = out.size();
  std::size_t e = 0;
  for (; e + 4 <= n; e += 4) {
    const __m256d a = _mm256_loadu_pd(g.xx.data() + e);
    const __m256d b = _mm256_loadu_pd(g.xy.data() + e);
    const __m256d c = _mm256_loadu_pd(g.yx.data() + e);
    const __m256d d = _mm256_loadu_pd(g.yy.data() + e);
    __m256d s = _mm256_mul_pd(a, a);
    s = _mm256_fmadd_pd(b, b, s);
    s = _mm256_fmadd_pd(c, c, s);
    s = _mm256_fmadd_pd(d, d, s);
    _mm256_storeu_pd(out.data() + e, _mm256_mul_pd(_mm256_loadu_pd(w.data() + e), s));
  }
  if (e < n) {
    scalar::weighted_frobenius_sq(w.subspan(e), {g.xx.subspan(e), g.xy.subspan(e), g.yx.subspan(e), g.yy.subspan(e)},
                                  out.subspan(e));
  }
}

double quad_gradient_error_sq(std::span<const double> w, const ConstGradientArrays& g,
                              const std::array<double, 4>& c) {
  const std::size_t n = w.size();
  const __m256d c0 = _mm256_set1_pd(c[0]);
  const __m256d c1 = _mm256_set1_pd(c[1]);
  const __m256d c2 = _mm256_set1_pd(c[2]);
  const __m256d c3 = _mm256_set1_pd(c[3]);
  __m256d acc = _mm256_setzero_pd();
  std::size_t q = 0;
  for (; q + 4 <= n; q += 4) {
    const __m256d a = _mm256_sub_pd(_mm256_loadu_pd(g.xx.data() + q), c0);
    const __m256d b = _mm256_sub_pd(_mm256_loadu_pd(g.xy.data() + q), c1);
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(g.yx.data() + q), c2);
    const __m256d e = _mm256_sub_pd(_mm256_loadu_pd(g.yy.data() + q), c3);
    __m256d s = _mm256_mul_pd(a, a);
    s = _mm256_fmadd_pd(b, b, s);
    s = _mm256_fmadd_pd(d, d, s);
    s = _mm256_fmadd_pd(e, e, s);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w.data() + q), s, acc);
  }
  double sum = hsum(acc);
  if (q < n) {
    sum += scalar::quad_gradient_error_sq(
        w.subspan(q), {g.xx.subspan(q), g.xy.subspan(q), g.yx.subspan(q), g.yy.subspan(q)}, c);
  }
  return sum;
}

double quad_scalar_error_sq(std::span<const double> w, std::span<const double> v, double c) {
  const std::size_t n = w.size();
  const __m256d cv = _mm256_set1_pd(c);
  __m256d acc = _mm256_setzero_pd();
  std::size_t q = 0;
  for (; q + 4 <= n; q += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(v.data() + q), cv);
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w.data() + q), _mm256_mul_pd(d, d), acc);
  }
  double sum = hsum(acc);
  if (q < n) sum += scalar::quad_scalar_error_sq(w.subspan(q), v.subspan(q), c);
  return sum;
}

}  // namespace prs::kernels::avx2
