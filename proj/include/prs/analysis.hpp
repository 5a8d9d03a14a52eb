#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prs/boundary_layer.hpp"
#include "prs/exact.hpp"
#include "prs/fem.hpp"
#include "prs/mesh.hpp"
#include "prs/solver.hpp"

namespace prs {

struct ErrorSummary {
  double velocity_h1 = 0.0;         // ||∇_h(u - u_h)||
  double pressure_l2 = 0.0;         // ||(p - mean p) - p_h||
  std::vector<double> per_element;  // ||∇(u - u_h)||_{L2(T)}
  double layer_fraction = 0.0;      // share of velocity_h1^2 on elements with centroid below the layer width
};

struct ErrorOptions {
  int quad_degree = 6;
  /// Sub-elements are refined until their extent is at most this fraction of
  /// the solution's variation scale (see ExactSolution::variation_scale).
  double resolution = 0.5;
  int max_subdivision = 64;
  int threads = 1;
};

/// Composite refinement factor for element e so that sub-elements resolve the
/// exact solution; 1 for smooth solutions.
int quadrature_subdivision(const TriMesh& mesh, std::size_t e, const ExactSolution& exact, double resolution,
                           int max_subdivision);

/// Area-weighted mean of the exact pressure over the mesh domain.
double exact_pressure_mean(const TriMesh& mesh, const ExactSolution& exact, const ErrorOptions& options = {});

ErrorSummary error_norms(const CRVectorField& u_h, const P0Scalar& p_h, const ExactSolution& exact,
                         const ErrorOptions& options = {});

/// Smooth polynomial Stokes solution on (-1,1)×(0,1) with zero boundary values:
/// stream function (1 - x^2)^2 y^2 (1 - y)^2 and p = x^3 + y^3 - 1/4.
class PolynomialFlow final : public ExactSolution {
 public:
  explicit PolynomialFlow(double nu) : nu_(nu) {}
  Vec2 velocity(const Vec2& p) const override;
  Mat2 gradient(const Vec2& p) const override;
  double pressure(const Vec2& p) const override;
  Vec2 forcing(const Vec2& p) const override;
  /// -Δu, exposed for tests.
  Vec2 minus_laplacian(const Vec2& p) const;

 private:
  double nu_;
};

enum class MeshKind { Uniform, Shishkin };
std::string_view mesh_kind_name(MeshKind k);
MeshKind parse_mesh_kind(std::string_view s);

struct StudyConfig {
  Rect rect{-1.0, 1.0, 0.0, 1.0};
  double nu = 1e-4;
  std::vector<MethodKind> methods{MethodKind::CR, MethodKind::CR_RT};
  MeshKind mesh_kind = MeshKind::Uniform;
  int ny0 = 8;
  int levels = 4;
  int nx_per_ny = 2;
  std::optional<double> tau;  // Shishkin transition; defaults to the layer width
  int quad_degree = 5;
  ErrorOptions error;
  /// Refine the load quadrature where the exact solution varies quickly.
  bool adaptive_load_quadrature = true;
  double solver_tol = 1e-8;
  int threads = 1;
  bool parallel_levels = false;
};

struct ConvergenceRecord {
  int level = 0;
  int ny = 0;
  double h_max = 0.0;
  std::size_t n_dofs = 0;
  MethodKind method = MethodKind::CR;
  MeshKind mesh_kind = MeshKind::Uniform;
  ErrorSummary errors;
  std::optional<double> observed_rate_velocity;
  std::optional<double> observed_rate_pressure;
  SolveReport report;
  double max_divergence = 0.0;  // max_T |∇_h·u_h| relative to ||u_h||_{1,h}
};

/// Mesh for refinement level `level`: ny = ny0 * 2^level, nx = nx_per_ny * ny.
TriMesh study_mesh(const StudyConfig& config, int level, double layer_width);

/// Solves every configured method on every level. Records are ordered by
/// level, then by method in configuration order.
std::vector<ConvergenceRecord> convergence_study(const StudyConfig& config, const ExactSolution& exact);

/// One mesh, every configured method; the factorization is shared.
struct LevelResult {
  std::vector<ConvergenceRecord> records;
  std::vector<StokesSolution> solutions;
};
LevelResult solve_level(const StudyConfig& config, const ExactSolution& exact, const TriMesh& mesh, int level);

std::string convergence_csv_header();
std::string convergence_csv_row(const ConvergenceRecord& r);
std::string convergence_csv(const std::vector<ConvergenceRecord>& records);

struct ScalarPotential {
  ScalarFunction value;
  VectorFunction gradient;
};

/// φ = x^3 + y^3
ScalarPotential cubic_potential();

/// Solves with f = ∇φ and zero boundary data; the exact velocity is 0, so the
/// returned ||u_h||_{1,h} is the velocity error.
double noflow_test(const TriMesh& mesh, MethodKind method, double nu, const ScalarPotential& phi,
                   int quad_degree = 5);

}  // namespace prs
