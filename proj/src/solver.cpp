#include "prs/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include <Eigen/UmfPackSupport>

#include "prs/error.hpp"

namespace prs {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

struct SaddlePointSolver::Impl {
  Eigen::SparseMatrix<double> K;
  Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu;
  Eigen::Index nv = 0;
  Eigen::Index np = 0;
};

SaddlePointSolver::SaddlePointSolver(const StokesSystem& system) : impl_(std::make_unique<Impl>()) {
  const auto t0 = std::chrono::steady_clock::now();
  auto& s = *impl_;
  s.nv = system.A.rows();
  s.np = system.B.rows();
  const Eigen::Index n = s.nv + s.np;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(system.A.nonZeros() + 2 * system.B.nonZeros() + 2 * s.np));
  for (Eigen::Index c = 0; c < system.A.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(system.A, c); it; ++it) {
      trip.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (Eigen::Index c = 0; c < system.B.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(system.B, c); it; ++it) {
      trip.emplace_back(s.nv + it.row(), it.col(), it.value());
      trip.emplace_back(it.col(), s.nv + it.row(), it.value());
    }
  }
  // Pressure is fixed up to a constant by a diagonal entry on the first
  // element; for compatible data that pressure comes out as zero and the
  // mean is removed afterwards. A dense mean-value row would ruin the fill.
  if (s.np > 0) {
    double scale = 0.0;
    for (Eigen::Index c = 0; c < system.B.outerSize(); ++c) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(system.B, c); it; ++it) {
        if (it.row() == 0) scale = std::max(scale, std::abs(it.value()));
      }
    }
    trip.emplace_back(s.nv, s.nv, scale > 0.0 ? scale : 1.0);
  }
  s.K.resize(n, n);
  s.K.setFromTriplets(trip.begin(), trip.end());
  s.K.makeCompressed();

  s.lu.compute(s.K);
  if (s.lu.info() != Eigen::Success) throw NumericalFailure("SaddlePointSolver: factorization failed");
  factor_time_ = seconds_since(t0);
}

SaddlePointSolver::~SaddlePointSolver() = default;
SaddlePointSolver::SaddlePointSolver(SaddlePointSolver&&) noexcept = default;
SaddlePointSolver& SaddlePointSolver::operator=(SaddlePointSolver&&) noexcept = default;

std::size_t SaddlePointSolver::n_unknowns() const { return static_cast<std::size_t>(impl_->K.rows()); }

StokesSolution SaddlePointSolver::solve(const StokesSystem& system, double tol) const {
  if (!(tol >= 1e-14)) throw InvalidInput("solve: tol must be >= 1e-14");
  const auto& s = *impl_;
  if (system.A.rows() != s.nv || system.B.rows() != s.np) {
    throw InvalidInput("SaddlePointSolver: system does not match the factorization");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::Index n = s.K.rows();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b.head(s.nv) = system.rhs_u;
  b.segment(s.nv, s.np) = system.rhs_p;

  StokesSolution out{system.lifting, P0Scalar(*system.mesh), {}};
  out.report.n_unknowns = static_cast<std::size_t>(n);
  out.report.factor_time = factor_time_;

  const double b_norm = b.norm();
  if (b_norm == 0.0) {
    out.report.solve_time = seconds_since(t0);
    return out;
  }
  Eigen::VectorXd x = s.lu.solve(b);
  if (s.lu.info() != Eigen::Success || !x.allFinite()) throw NumericalFailure("solve: back-substitution failed");
  out.report.residual_norm = (s.K * x - b).norm() / b_norm;
  out.report.solve_time = seconds_since(t0);
  if (!(out.report.residual_norm <= tol)) {
    throw NumericalFailure("solve: relative residual " + std::to_string(out.report.residual_norm) +
                           " above tolerance");
  }

  for (std::size_t i = 0; i < system.interior_facets.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(2 * i);
    out.velocity[system.interior_facets[i]] = {x[k], x[k + 1]};
  }
  for (Eigen::Index e = 0; e < s.np; ++e) out.pressure[static_cast<std::size_t>(e)] = x[s.nv + e];
  out.pressure.shift_to_zero_mean();
  return out;
}

StokesSolution solve(const StokesSystem& system, double tol) {
  SaddlePointSolver solver(system);
  return solver.solve(system, tol);
}

}  // namespace prs
