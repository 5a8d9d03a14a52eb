#pragma once

#include <array>
#include <cstddef>
#include <span>

// Data-parallel inner loops over elements and quadrature points. Every kernel
// has a scalar reference and, on x86-64, an AVX2/FMA variant; the variant is
// picked at runtime from CPUID and can be overridden for testing.

namespace prs::kernels {

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa);
bool isa_supported(Isa isa);
/// Best variant supported by this CPU and build (PRS_FORCE_SCALAR=1 in the
/// environment pins the scalar path).
Isa detected_isa();
Isa active_isa();
/// Throws InvalidInput if `isa` is not supported.
void set_active_isa(Isa isa);

/// Structure-of-arrays inputs for n elements.
///   basis_x[k][e], basis_y[k][e]: gradient of the k-th local CR basis function
///   ux[k][e], uy[k][e]: velocity dof on the k-th local facet
struct ElementGradientArgs {
  std::array<std::span<const double>, 3> basis_x;
  std::array<std::span<const double>, 3> basis_y;
  std::array<std::span<const double>, 3> ux;
  std::array<std::span<const double>, 3> uy;
};

/// Gradient components as four arrays: xx = d ux/dx, xy = d ux/dy, yx, yy.
struct GradientArrays {
  std::span<double> xx;
  std::span<double> xy;
  std::span<double> yx;
  std::span<double> yy;
};

struct ConstGradientArrays {
  std::span<const double> xx;
  std::span<const double> xy;
  std::span<const double> yx;
  std::span<const double> yy;
};

/// out = sum_k u_k (x) grad(basis_k), elementwise.
void element_gradients(const ElementGradientArgs& args, const GradientArrays& out);

/// out[e] = w[e] * |G_e|_F^2
void weighted_frobenius_sq(std::span<const double> w, const ConstGradientArrays& g, std::span<double> out);

/// sum_q w[q] * |G_q - c|_F^2 for a constant matrix c = {xx, xy, yx, yy}.
double quad_gradient_error_sq(std::span<const double> w, const ConstGradientArrays& g,
                              const std::array<double, 4>& c);

/// sum_q w[q] * (v[q] - c)^2
double quad_scalar_error_sq(std::span<const double> w, std::span<const double> v, double c);

// Per-ISA entry points; exposed for equivalence tests.
namespace scalar {
void element_gradients(const ElementGradientArgs& args, const GradientArrays& out);
void weighted_frobenius_sq(std::span<const double> w, const ConstGradientArrays& g, std::span<double> out);
double quad_gradient_error_sq(std::span<const double> w, const ConstGradientArrays& g,
                              const std::array<double, 4>& c);
double quad_scalar_error_sq(std::span<const double> w, std::span<const double> v, double c);
}  // namespace scalar

namespace avx2 {
void element_gradients(const ElementGradientArgs& args, const GradientArrays& out);
void weighted_frobenius_sq(std::span<const double> w, const ConstGradientArrays& g, std::span<double> out);
double quad_gradient_error_sq(std::span<const double> w, const ConstGradientArrays& g,
                              const std::array<double, 4>& c);
double quad_scalar_error_sq(std::span<const double> w, std::span<const double> v, double c);
}  // namespace avx2

}  // namespace prs::kernels
