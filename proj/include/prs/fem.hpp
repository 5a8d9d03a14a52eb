#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

#include "prs/geometry.hpp"
#include "prs/mesh.hpp"

namespace prs {

/// Which operator I_h is applied to the test functions in the load term.
enum class MethodKind { CR, CR_RT, CR_BDM };

std::string_view method_name(MethodKind m);  // "cr", "cr-rt", "cr-bdm"
MethodKind parse_method(std::string_view s);

using VectorFunction = std::function<Vec2(const Vec2&)>;
using ScalarFunction = std::function<double(const Vec2&)>;

/// Piecewise linear vector field continuous at facet midpoints; one Vec2 dof
/// per facet holding the midpoint value. Holds a reference to its mesh, which
/// must outlive it.
class CRVectorField {
 public:
  explicit CRVectorField(const TriMesh& mesh);

  const TriMesh& mesh() const { return *mesh_; }
  std::span<Vec2> dofs() { return dofs_; }
  std::span<const Vec2> dofs() const { return dofs_; }
  Vec2& operator[](std::size_t facet) { return dofs_[facet]; }
  const Vec2& operator[](std::size_t facet) const { return dofs_[facet]; }

  /// Value on element e at barycentric coordinates `bary`.
  Vec2 value(std::size_t e, const std::array<double, 3>& bary) const;
  /// Value of the restriction to element e at its local vertex j.
  Vec2 vertex_value(std::size_t e, int j) const;
  Mat2 element_gradient(std::size_t e) const;
  double element_divergence(std::size_t e) const { return element_gradient(e).trace(); }

 private:
  const TriMesh* mesh_;
  std::vector<Vec2> dofs_;
};

/// One value per element.
class P0Scalar {
 public:
  explicit P0Scalar(const TriMesh& mesh);

  const TriMesh& mesh() const { return *mesh_; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t e) { return values_[e]; }
  double operator[](std::size_t e) const { return values_[e]; }

  /// Area-weighted mean over the domain.
  double mean() const;
  double l2_norm() const;
  void shift_to_zero_mean();

 private:
  const TriMesh* mesh_;
  std::vector<double> values_;
};

/// Midpoint interpolation: dof on facet F is g(midpoint(F)).
CRVectorField cr_interpolate(const TriMesh& mesh, const VectorFunction& g);

/// Piecewise constant gradients of a CR field as arrays (per element).
struct BrokenGradient {
  std::vector<double> xx, xy, yx, yy;
};
BrokenGradient broken_gradient(const CRVectorField& v);

/// sqrt(sum_T |∇v|_T|^2 |T|)
double broken_gradient_norm(const CRVectorField& v);

/// Element-wise broken divergence.
std::vector<double> broken_divergence(const CRVectorField& v);

/// How the normal moments of the reconstruction are taken on boundary facets.
enum class BoundaryTrace {
  Trace,  // use the element trace of the field
  Zero,   // zero normal moments (fields in X_h with homogeneous boundary values)
};

/// RT0 fluxes on the three local facets of element e, w.r.t. the global facet
/// normals: c_k = |F_k| v(mid F_k)·n_{F_k}.
std::array<double, 3> rt0_reconstruct(const CRVectorField& v, std::size_t e,
                                      BoundaryTrace mode = BoundaryTrace::Trace);
Vec2 rt0_evaluate(const TriMesh& mesh, std::size_t e, const std::array<double, 3>& coeffs,
                  const std::array<double, 3>& bary);

/// BDM1 normal moments per local facet k: entries 2k and 2k+1 hold
/// ∫_F w·n ds and ∫_F w·n q ds, where n is the global facet normal and q is
/// linear along F with q = -1 at the lower-indexed endpoint and +1 at the other.
/// Moments are taken from the averaged trace of v.
std::array<double, 6> bdm1_reconstruct(const CRVectorField& v, std::size_t e,
                                       BoundaryTrace mode = BoundaryTrace::Trace);
Vec2 bdm1_evaluate(const TriMesh& mesh, std::size_t e, const std::array<double, 6>& coeffs,
                   const std::array<double, 3>& bary);

/// Boundary value on a boundary facet with endpoints a, b.
using FacetData = std::function<Vec2(const Vec2& a, const Vec2& b)>;

struct AssemblyOptions {
  int quad_degree = 5;
  /// Worker threads for the load integrals; the result does not depend on it.
  int threads = 1;
  /// Dirichlet data; empty means homogeneous.
  FacetData boundary;
  /// Optional composite refinement of the load quadrature per element.
  std::function<int(std::size_t)> subdivision;
};

/// Assembled saddle-point system with boundary dofs eliminated. Velocity
/// unknown 2*i + c is component c of interior facet `interior_facets[i]`.
struct StokesSystem {
  const TriMesh* mesh = nullptr;
  MethodKind method = MethodKind::CR;
  double nu = 1.0;
  std::vector<int> dof_of_facet;      // -1 on boundary facets
  std::vector<int> interior_facets;
  Eigen::SparseMatrix<double> A;      // nu (∇_h u, ∇_h v)
  Eigen::SparseMatrix<double> B;      // -(∇_h·v, q), rows = elements
  Eigen::VectorXd rhs_u;              // (f, I_h v) - lifting
  Eigen::VectorXd rhs_p;              // lifting contribution to the divergence rows
  CRVectorField lifting;              // boundary values, zero on interior facets

  explicit StokesSystem(const TriMesh& m) : mesh(&m), lifting(m) {}
  std::size_t n_velocity() const { return static_cast<std::size_t>(A.rows()); }
  std::size_t n_pressure() const { return static_cast<std::size_t>(B.rows()); }
};

StokesSystem assemble(const TriMesh& mesh, MethodKind method, double nu, const VectorFunction& f,
                      const AssemblyOptions& options = {});

/// Only the load vector (f, I_h v) for interior test functions; A and B do not
/// depend on the method.
Eigen::VectorXd assemble_load(const TriMesh& mesh, MethodKind method, const VectorFunction& f,
                              const std::vector<int>& dof_of_facet, const AssemblyOptions& options);

}  // namespace prs
