#include "prs/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "prs/error.hpp"

namespace prs::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(PRS_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detected_isa()};
  return isa;
}

}  // namespace

const char* isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) {
  if (isa == Isa::Scalar) return true;
  static const bool avx2 = cpu_has_avx2();
  return avx2;
}

Isa detected_isa() {
  const char* force = std::getenv("PRS_FORCE_SCALAR");
  if (force && std::strcmp(force, "0") != 0 && *force) return Isa::Scalar;
  return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) throw InvalidInput(std::string("kernels: ISA not supported: ") + isa_name(isa));
  active().store(isa, std::memory_order_relaxed);
}

void element_gradients(const ElementGradientArgs& args, const GradientArrays& out) {
  if (active_isa() == Isa::Avx2) return avx2::element_gradients(args, out);
  scalar::element_gradients(args, out);
}

void weighted_frobenius_sq(std::span<const double> w, const ConstGradientArrays& g, std::span<double> out) {
  if (active_isa() == Isa::Avx2) return avx2::weighted_frobenius_sq(w, g, out);
  scalar::weighted_frobenius_sq(w, g, out);
}

double quad_gradient_error_sq(std::span<const double> w, const ConstGradientArrays& g,
                              const std::array<double, 4>& c) {
  if (active_isa() == Isa::Avx2) return avx2::quad_gradient_error_sq(w, g, c);
  return scalar::quad_gradient_error_sq(w, g, c);
}

double quad_scalar_error_sq(std::span<const double> w, std::span<const double> v, double c) {
  if (active_isa() == Isa::Avx2) return avx2::quad_scalar_error_sq(w, v, c);
  return scalar::quad_scalar_error_sq(w, v, c);
}

#if !defined(PRS_BUILD_AVX2)
// Never selected: isa_supported(Avx2) is false in this build.
namespace avx2 {
void element_gradients(const ElementGradientArgs& args, const GradientArrays& out) {
  scalar::element_gradients(args, out);
}
void weighted_frobenius_sq(std::span<const double> w, const ConstGradientArrays& g, std::span<double> out) {
  scalar::weighted_frobenius_sq(w, g, out);
}
double quad_gradient_error_sq(std::span<const double> w, const ConstGradientArrays& g,
                              const std::array<double, 4>& c) {
  return scalar::quad_gradient_error_sq(w, g, c);
}
double quad_scalar_error_sq(std::span<const double> w, std::span<const double> v, double c) {
  return scalar::quad_scalar_error_sq(w, v, c);
}
}  // namespace avx2
#endif

}  // namespace prs::kernels
