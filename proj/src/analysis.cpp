#include "prs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <future>
#include <map>
#include <sstream>
#include <thread>

#include "prs/error.hpp"
#include "prs/format.hpp"
#include "prs/kernels.hpp"
#include "prs/quadrature.hpp"

namespace prs {

namespace {

Vec2 point_at(const TriMesh& mesh, std::size_t e, const std::array<double, 3>& l) {
  const auto& t = mesh.triangle(e);
  return l[0] * mesh.vertex(t[0]) + l[1] * mesh.vertex(t[1]) + l[2] * mesh.vertex(t[2]);
}

// Runs body(e) for every element, split over `threads` workers.
template <class Body>
void for_each_element(std::size_t n, int threads, Body body) {
  threads = std::max(1, threads);
  if (threads == 1 || n < 2 * static_cast<std::size_t>(threads)) {
    for (std::size_t e = 0; e < n; ++e) body(e);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (int i = 0; i < threads; ++i) {
      const std::size_t begin = std::min(n, i * chunk);
      const std::size_t end = std::min(n, begin + chunk);
      pool.emplace_back([&, i, begin, end] {
        try {
          for (std::size_t e = begin; e < end; ++e) body(e);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

}  // namespace

int quadrature_subdivision(const TriMesh& mesh, std::size_t e, const ExactSolution& exact, double resolution,
                           int max_subdivision) {
  const auto& t = mesh.triangle(e);
  Vec2 lo = mesh.vertex(t[0]);
  Vec2 hi = lo;
  for (int k = 1; k < 3; ++k) {
    const Vec2& p = mesh.vertex(t[k]);
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  const Vec2 scale = exact.variation_scale(lo, hi);
  const double ratio = std::max((hi.x - lo.x) / scale.x, (hi.y - lo.y) / scale.y) / resolution;
  if (!(ratio > 1.0)) return 1;
  return std::min(max_subdivision, static_cast<int>(std::ceil(ratio)));
}

double exact_pressure_mean(const TriMesh& mesh, const ExactSolution& exact, const ErrorOptions& options) {
  std::vector<double> integrals(mesh.n_elements());
  for_each_element(mesh.n_elements(), options.threads, [&](std::size_t e) {
    thread_local std::map<int, TriangleRule> cache;
    const int s = quadrature_subdivision(mesh, e, exact, options.resolution, options.max_subdivision);
    auto key = options.quad_degree * 1000 + s;
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, composite_rule(triangle_rule(options.quad_degree), s)).first;
    const TriangleRule& rule = it->second;
    double sum = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) sum += rule.weights[q] * exact.pressure(point_at(mesh, e, rule.points[q]));
    integrals[e] = sum * mesh.area(e);
  });
  double total = 0.0;
  for (double v : integrals) total += v;
  return total / mesh.rect().area();
}

ErrorSummary error_norms(const CRVectorField& u_h, const P0Scalar& p_h, const ExactSolution& exact,
                         const ErrorOptions& options) {
  if (options.quad_degree < 4) throw InvalidInput("error_norms: quad_degree must be >= 4");
  const TriMesh& mesh = u_h.mesh();
  const std::size_t n = mesh.n_elements();
  const double p_mean = exact_pressure_mean(mesh, exact, options);
  const BrokenGradient gh = broken_gradient(u_h);

  std::vector<double> vel_sq(n);
  std::vector<double> press_sq(n);
  for_each_element(n, options.threads, [&](std::size_t e) {
    thread_local std::map<int, TriangleRule> cache;
    thread_local std::vector<double> w, gxx, gxy, gyx, gyy, pv;
    const int s = quadrature_subdivision(mesh, e, exact, options.resolution, options.max_subdivision);
    auto key = options.quad_degree * 1000 + s;
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, composite_rule(triangle_rule(options.quad_degree), s)).first;
    const TriangleRule& rule = it->second;
    const std::size_t nq = rule.size();
    w.resize(nq);
    gxx.resize(nq);
    gxy.resize(nq);
    gyx.resize(nq);
    gyy.resize(nq);
    pv.resize(nq);
    const double area = mesh.area(e);
    for (std::size_t q = 0; q < nq; ++q) {
      const Vec2 x = point_at(mesh, e, rule.points[q]);
      const Mat2 g = exact.gradient(x);
      w[q] = rule.weights[q] * area;
      gxx[q] = g.xx;
      gxy[q] = g.xy;
      gyx[q] = g.yx;
      gyy[q] = g.yy;
      pv[q] = exact.pressure(x);
    }
    vel_sq[e] = kernels::quad_gradient_error_sq(w, {gxx, gxy, gyx, gyy}, {gh.xx[e], gh.xy[e], gh.yx[e], gh.yy[e]});
    press_sq[e] = kernels::quad_scalar_error_sq(w, pv, p_h[e] + p_mean);
  });

  ErrorSummary out;
  out.per_element.resize(n);
  double vel_total = 0.0;
  double press_total = 0.0;
  double layer = 0.0;
  const double delta = exact.layer_width();
  for (std::size_t e = 0; e < n; ++e) {
    out.per_element[e] = std::sqrt(vel_sq[e]);
    vel_total += vel_sq[e];
    press_total += press_sq[e];
    if (delta > 0.0 && mesh.centroid(e).y < mesh.rect().y_min + delta) layer += vel_sq[e];
  }
  out.velocity_h1 = std::sqrt(vel_total);
  out.pressure_l2 = std::sqrt(press_total);
  out.layer_fraction = vel_total > 0.0 ? std::clamp(layer / vel_total, 0.0, 1.0) : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Polynomial flow: ψ = X(x) Y(y), u = (X Y', -X' Y)

namespace {

struct Poly {
  double v, d1, d2, d3;
};
Poly px(double x) {
  const double x2 = x * x;
  return {1.0 - 2.0 * x2 + x2 * x2, -4.0 * x + 4.0 * x2 * x, -4.0 + 12.0 * x2, 24.0 * x};
}
Poly py(double y) {
  const double y2 = y * y;
  return {y2 - 2.0 * y2 * y + y2 * y2, 2.0 * y - 6.0 * y2 + 4.0 * y2 * y, 2.0 - 12.0 * y + 12.0 * y2,
          -12.0 + 24.0 * y};
}

}  // namespace

Vec2 PolynomialFlow::velocity(const Vec2& p) const {
  const Poly X = px(p.x), Y = py(p.y);
  return {X.v * Y.d1, -X.d1 * Y.v};
}

Mat2 PolynomialFlow::gradient(const Vec2& p) const {
  const Poly X = px(p.x), Y = py(p.y);
  return {X.d1 * Y.d1, X.v * Y.d2, -X.d2 * Y.v, -X.d1 * Y.d1};
}

double PolynomialFlow::pressure(const Vec2& p) const { return p.x * p.x * p.x + p.y * p.y * p.y - 0.25; }

Vec2 PolynomialFlow::minus_laplacian(const Vec2& p) const {
  const Poly X = px(p.x), Y = py(p.y);
  return {-(X.d2 * Y.d1 + X.v * Y.d3), X.d3 * Y.v + X.d1 * Y.d2};
}

Vec2 PolynomialFlow::forcing(const Vec2& p) const {
  return nu_ * minus_laplacian(p) + Vec2{3.0 * p.x * p.x, 3.0 * p.y * p.y};
}

// ---------------------------------------------------------------------------
// Studies

std::string_view mesh_kind_name(MeshKind k) { return k == MeshKind::Uniform ? "uniform" : "shishkin"; }

MeshKind parse_mesh_kind(std::string_view s) {
  if (s == "uniform") return MeshKind::Uniform;
  if (s == "shishkin") return MeshKind::Shishkin;
  throw InvalidInput("unknown mesh kind '" + std::string(s) + "' (expected uniform or shishkin)");
}

TriMesh study_mesh(const StudyConfig& config, int level, double layer_width) {
  const int ny = config.ny0 << level;
  const int nx = config.nx_per_ny * ny;
  if (config.mesh_kind == MeshKind::Uniform) return build_uniform(config.rect, nx, ny);
  const double tau = config.tau.value_or(layer_width);
  return build_shishkin(config.rect, nx, ny, tau);
}

LevelResult solve_level(const StudyConfig& config, const ExactSolution& exact, const TriMesh& mesh, int level) {
  LevelResult out;
  const MeshQuality q = quality(mesh);
  AssemblyOptions opts;
  opts.quad_degree = config.quad_degree;
  opts.threads = config.threads;
  opts.boundary = [&exact](const Vec2& a, const Vec2& b) { return exact.facet_mean(a, b); };
  if (config.adaptive_load_quadrature) {
    opts.subdivision = [&](std::size_t e) {
      return quadrature_subdivision(mesh, e, exact, config.error.resolution, config.error.max_subdivision);
    };
  }
  ErrorOptions err_opts = config.error;
  err_opts.threads = config.threads;
  const VectorFunction forcing = [&exact](const Vec2& p) { return exact.forcing(p); };

  std::optional<SaddlePointSolver> solver;
  for (MethodKind method : config.methods) {
    const StokesSystem sys = assemble(mesh, method, config.nu, forcing, opts);
    if (!solver) solver.emplace(sys);
    StokesSolution sol = solver->solve(sys, config.solver_tol);

    ConvergenceRecord r;
    r.level = level;
    r.ny = mesh.ny();
    r.h_max = q.h_max;
    r.n_dofs = sys.n_velocity() + sys.n_pressure();
    r.method = method;
    r.mesh_kind = config.mesh_kind;
    r.errors = error_norms(sol.velocity, sol.pressure, exact, err_opts);
    r.report = sol.report;
    const double unorm = broken_gradient_norm(sol.velocity);
    double max_div = 0.0;
    for (double d : broken_divergence(sol.velocity)) max_div = std::max(max_div, std::abs(d));
    r.max_divergence = unorm > 0.0 ? max_div / unorm : max_div;
    out.records.push_back(std::move(r));
    out.solutions.push_back(std::move(sol));
  }
  return out;
}

std::vector<ConvergenceRecord> convergence_study(const StudyConfig& config, const ExactSolution& exact) {
  if (config.levels < 2) throw InvalidInput("convergence_study: need at least 2 levels");
  if (config.ny0 < 1) throw InvalidInput("convergence_study: ny0 must be >= 1");
  if (config.methods.empty()) throw InvalidInput("convergence_study: no methods");

  std::vector<std::vector<ConvergenceRecord>> per_level(config.levels);
  auto run_level = [&](int level) {
    const TriMesh mesh = study_mesh(config, level, exact.layer_width());
    return solve_level(config, exact, mesh, level).records;
  };
  if (config.parallel_levels) {
    std::vector<std::future<std::vector<ConvergenceRecord>>> jobs;
    for (int l = 0; l < config.levels; ++l) jobs.push_back(std::async(std::launch::async, run_level, l));
    for (int l = 0; l < config.levels; ++l) per_level[l] = jobs[l].get();
  } else {
    for (int l = 0; l < config.levels; ++l) per_level[l] = run_level(l);
  }

  std::vector<ConvergenceRecord> out;
  for (int l = 0; l < config.levels; ++l) {
    for (std::size_t m = 0; m < per_level[l].size(); ++m) {
      ConvergenceRecord r = per_level[l][m];
      if (l > 0) {
        const ConvergenceRecord& prev = per_level[l - 1][m];
        // Graded meshes: h_max is set by the coarse region, so measure against ny.
        const double refine = config.mesh_kind == MeshKind::Uniform
                                  ? std::log(prev.h_max / r.h_max)
                                  : std::log(static_cast<double>(r.ny) / prev.ny);
        r.observed_rate_velocity = std::log(prev.errors.velocity_h1 / r.errors.velocity_h1) / refine;
        r.observed_rate_pressure = std::log(prev.errors.pressure_l2 / r.errors.pressure_l2) / refine;
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::string convergence_csv_header() {
  return "level,method,mesh,h_max,n_dofs,vel_h1,press_l2,rate_v,rate_p,layer_fraction";
}

std::string convergence_csv_row(const ConvergenceRecord& r) {
  std::ostringstream s;
  auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
  s << r.level << ',' << method_name(r.method) << ',' << mesh_kind_name(r.mesh_kind) << ',' << format_real(r.h_max)
    << ',' << r.n_dofs << ',' << format_real(r.errors.velocity_h1) << ',' << format_real(r.errors.pressure_l2) << ','
    << opt(r.observed_rate_velocity) << ',' << opt(r.observed_rate_pressure) << ','
    << format_real(r.errors.layer_fraction);
  return s.str();
}

std::string convergence_csv(const std::vector<ConvergenceRecord>& records) {
  std::string out = convergence_csv_header() + "\n";
  for (const auto& r : records) out += convergence_csv_row(r) + "\n";
  return out;
}

ScalarPotential cubic_potential() {
  return {[](const Vec2& p) { return p.x * p.x * p.x + p.y * p.y * p.y; },
          [](const Vec2& p) { return Vec2{3.0 * p.x * p.x, 3.0 * p.y * p.y}; }};
}

double noflow_test(const TriMesh& mesh, MethodKind method, double nu, const ScalarPotential& phi, int quad_degree) {
  AssemblyOptions opts;
  opts.quad_degree = quad_degree;
  const StokesSystem sys = assemble(mesh, method, nu, phi.gradient, opts);
  const StokesSolution sol = solve(sys, 1e-10);
  return broken_gradient_norm(sol.velocity);
}

}  // namespace prs
