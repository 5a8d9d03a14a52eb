#include "prs/config.hpp"

#include "prs/error.hpp"
#include "prs/quadrature.hpp"

namespace prs {

void RunConfig::validate() const {
  flow().validate();
  if (levels < 1) throw InvalidInput("config: levels must be >= 1");
  if (ny0 < 1) throw InvalidInput("config: ny0 must be >= 1");
  if (mesh_kind == MeshKind::Shishkin && ny0 % 2 != 0) throw InvalidInput("config: ny0 must be even for shishkin");
  if (quad_degree < 2 || quad_degree > max_triangle_rule_degree) {
    throw InvalidInput("config: quad-degree must be in [2, 9]");
  }
  if (error_quad_degree < 4 || error_quad_degree > max_triangle_rule_degree) {
    throw InvalidInput("config: error-quad-degree must be in [4, 9]");
  }
  if (!(eta_max >= 8.0)) throw InvalidInput("config: eta-max must be >= 8");
  if (!(ode_tol >= 1e-12)) throw InvalidInput("config: ode-tol must be >= 1e-12");
  if (tau && !(*tau > 0.0)) throw InvalidInput("config: tau must be positive");
  if (threads < 1) throw InvalidInput("config: threads must be >= 1");
}

StudyConfig RunConfig::study() const {
  StudyConfig s;
  s.nu = nu;
  s.methods = {method};
  s.mesh_kind = mesh_kind;
  s.ny0 = ny0;
  s.levels = levels;
  s.tau = tau;
  s.quad_degree = quad_degree;
  s.error.quad_degree = error_quad_degree;
  s.threads = threads;
  s.parallel_levels = parallel_levels;
  return s;
}

}  // namespace prs
