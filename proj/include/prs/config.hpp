#pragma once

#include <optional>
#include <string>

#include "prs/analysis.hpp"
#include "prs/boundary_layer.hpp"
#include "prs/fem.hpp"

namespace prs {

/// Settings shared by all CLI subcommands. Defaults are the stagnation-point
/// study: nu = 1e-4, a = 1, p0 = 0, Shishkin transition at the layer width.
struct RunConfig {
  double nu = 1e-4;
  double a = 1.0;
  double p0 = 0.0;
  MethodKind method = MethodKind::CR_RT;
  MeshKind mesh_kind = MeshKind::Uniform;
  int ny0 = 8;
  int levels = 4;
  int quad_degree = 5;
  int error_quad_degree = 6;
  double eta_max = 10.0;
  double ode_tol = 1e-10;
  std::optional<double> tau;
  std::string output_dir = "out";
  int threads = 1;
  bool parallel_levels = false;

  /// Throws InvalidInput.
  void validate() const;
  FlowParams flow() const { return {nu, a, p0}; }
  StudyConfig study() const;
};

}  // namespace prs
