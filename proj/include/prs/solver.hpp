#pragma once

#include <memory>

#include <Eigen/SparseCore>

#include "prs/fem.hpp"

namespace prs {

struct SolveReport {
  double residual_norm = 0.0;  // ||K x - b|| / ||b|| (0 when b = 0)
  std::size_t n_unknowns = 0;
  double factor_time = 0.0;    // seconds
  double solve_time = 0.0;     // seconds
};

struct StokesSolution {
  CRVectorField velocity;
  P0Scalar pressure;
  SolveReport report;
};

/// Sparse LU factorization (UMFPACK) of
///   [ A   B^T ]
///   [ B   0   ]
/// with the pressure constant fixed on the first element; the returned
/// pressure is shifted to zero mean. The matrix does not depend on the method, so one factorization serves the
/// CR, CR-RT and CR-BDM load vectors on the same mesh.
class SaddlePointSolver {
 public:
  explicit SaddlePointSolver(const StokesSystem& system);
  ~SaddlePointSolver();
  SaddlePointSolver(SaddlePointSolver&&) noexcept;
  SaddlePointSolver& operator=(SaddlePointSolver&&) noexcept;

  std::size_t n_unknowns() const;
  double factor_time() const { return factor_time_; }

  /// Solves with the load and lifting of `system`, which must have the same
  /// A, B and boundary partition as the factorized one.
  StokesSolution solve(const StokesSystem& system, double tol) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double factor_time_ = 0.0;
};

StokesSolution solve(const StokesSystem& system, double tol = 1e-10);

}  // namespace prs
