#include "prs/fem.hpp"

#include <cmath>
#include <exception>
#include <map>
#include <thread>

#include "prs/error.hpp"
#include "prs/kernels.hpp"
#include "prs/quadrature.hpp"

namespace prs {

std::string_view method_name(MethodKind m) {
  switch (m) {
    case MethodKind::CR:
      return "cr";
    case MethodKind::CR_RT:
      return "cr-rt";
    case MethodKind::CR_BDM:
      return "cr-bdm";
  }
  return "?";
}

MethodKind parse_method(std::string_view s) {
  if (s == "cr") return MethodKind::CR;
  if (s == "cr-rt") return MethodKind::CR_RT;
  if (s == "cr-bdm") return MethodKind::CR_BDM;
  throw InvalidInput("unknown method '" + std::string(s) + "' (expected cr, cr-rt or cr-bdm)");
}

// ---------------------------------------------------------------------------
// Fields

CRVectorField::CRVectorField(const TriMesh& mesh) : mesh_(&mesh), dofs_(mesh.n_facets()) {}

Vec2 CRVectorField::value(std::size_t e, const std::array<double, 3>& bary) const {
  const auto& fs = mesh_->element_facets(e);
  Vec2 out;
  for (int k = 0; k < 3; ++k) out += (1.0 - 2.0 * bary[k]) * dofs_[fs[k]];
  return out;
}

Vec2 CRVectorField::vertex_value(std::size_t e, int j) const {
  const auto& fs = mesh_->element_facets(e);
  return dofs_[fs[0]] + dofs_[fs[1]] + dofs_[fs[2]] - 2.0 * dofs_[fs[j]];
}

Mat2 CRVectorField::element_gradient(std::size_t e) const {
  const auto& fs = mesh_->element_facets(e);
  const auto& gl = mesh_->grad_barycentric(e);
  Mat2 g;
  for (int k = 0; k < 3; ++k) {
    // ∇(1 - 2 λ_k) = -2 ∇λ_k
    const Vec2 b = -2.0 * gl[k];
    const Vec2& u = dofs_[fs[k]];
    g.xx += u.x * b.x;
    g.xy += u.x * b.y;
    g.yx += u.y * b.x;
    g.yy += u.y * b.y;
  }
  return g;
}

P0Scalar::P0Scalar(const TriMesh& mesh) : mesh_(&mesh), values_(mesh.n_elements(), 0.0) {}

double P0Scalar::mean() const {
  double integral = 0.0;
  for (std::size_t e = 0; e < values_.size(); ++e) integral += values_[e] * mesh_->area(e);
  return integral / mesh_->rect().area();
}

double P0Scalar::l2_norm() const {
  double s = 0.0;
  for (std::size_t e = 0; e < values_.size(); ++e) s += values_[e] * values_[e] * mesh_->area(e);
  return std::sqrt(s);
}

void P0Scalar::shift_to_zero_mean() {
  const double m = mean();
  for (double& v : values_) v -= m;
}

CRVectorField cr_interpolate(const TriMesh& mesh, const VectorFunction& g) {
  CRVectorField v(mesh);
  for (std::size_t f = 0; f < mesh.n_facets(); ++f) v[f] = g(mesh.facet_midpoint(f));
  return v;
}

BrokenGradient broken_gradient(const CRVectorField& v) {
  const TriMesh& mesh = v.mesh();
  const std::size_t n = mesh.n_elements();
  std::array<std::vector<double>, 3> bx, by, ux, uy;
  for (int k = 0; k < 3; ++k) {
    bx[k].resize(n);
    by[k].resize(n);
    ux[k].resize(n);
    uy[k].resize(n);
  }
  for (std::size_t e = 0; e < n; ++e) {
    const auto& gl = mesh.grad_barycentric(e);
    const auto& fs = mesh.element_facets(e);
    for (int k = 0; k < 3; ++k) {
      bx[k][e] = -2.0 * gl[k].x;
      by[k][e] = -2.0 * gl[k].y;
      ux[k][e] = v[fs[k]].x;
      uy[k][e] = v[fs[k]].y;
    }
  }
  BrokenGradient g{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  kernels::ElementGradientArgs args;
  for (int k = 0; k < 3; ++k) {
    args.basis_x[k] = bx[k];
    args.basis_y[k] = by[k];
    args.ux[k] = ux[k];
    args.uy[k] = uy[k];
  }
  kernels::element_gradients(args, {g.xx, g.xy, g.yx, g.yy});
  return g;
}

double broken_gradient_norm(const CRVectorField& v) {
  const TriMesh& mesh = v.mesh();
  const auto g = broken_gradient(v);
  std::vector<double> areas(mesh.n_elements());
  for (std::size_t e = 0; e < areas.size(); ++e) areas[e] = mesh.area(e);
  std::vector<double> per_element(areas.size());
  kernels::weighted_frobenius_sq(areas, {g.xx, g.xy, g.yx, g.yy}, per_element);
  double sum = 0.0;
  for (double s : per_element) sum += s;
  return std::sqrt(sum);
}

std::vector<double> broken_divergence(const CRVectorField& v) {
  const auto g = broken_gradient(v);
  std::vector<double> div(g.xx.size());
  for (std::size_t e = 0; e < div.size(); ++e) div[e] = g.xx[e] + g.yy[e];
  return div;
}

// ---------------------------------------------------------------------------
// Reconstructions

std::array<double, 3> rt0_reconstruct(const CRVectorField& v, std::size_t e, BoundaryTrace mode) {
  const TriMesh& mesh = v.mesh();
  std::array<double, 3> c{};
  for (int k = 0; k < 3; ++k) {
    const int f = mesh.element_facets(e)[k];
    if (mode == BoundaryTrace::Zero && mesh.is_boundary(f)) continue;
    c[k] = mesh.facet_length(f) * dot(v[f], mesh.facet_normal(f));
  }
  return c;
}

namespace {

Vec2 point_at(const TriMesh& mesh, std::size_t e, const std::array<double, 3>& bary) {
  const auto& t = mesh.triangle(e);
  return bary[0] * mesh.vertex(t[0]) + bary[1] * mesh.vertex(t[1]) + bary[2] * mesh.vertex(t[2]);
}

// Vertex values of the P1 field with the given BDM1 moments.
std::array<Vec2, 3> bdm1_vertex_values(const TriMesh& mesh, std::size_t e, const std::array<double, 6>& c) {
  const auto& t = mesh.triangle(e);
  const auto& fs = mesh.element_facets(e);
  std::array<Vec2, 3> w{};
  for (int j = 0; j < 3; ++j) {
    std::array<Vec2, 2> n{};
    std::array<double, 2> rhs{};
    for (int i = 0; i < 2; ++i) {
      const int k = (j + 1 + i) % 3;
      const int f = fs[k];
      const double len = mesh.facet_length(f);
      const bool at_lower = mesh.facet(f)[0] == t[j];
      n[i] = mesh.facet_normal(f);
      rhs[i] = (c[2 * k] + (at_lower ? -3.0 : 3.0) * c[2 * k + 1]) / len;
    }
    const double det = cross(n[0], n[1]);
    w[j] = {(rhs[0] * n[1].y - rhs[1] * n[0].y) / det, (n[0].x * rhs[1] - n[1].x * rhs[0]) / det};
  }
  return w;
}

}  // namespace

Vec2 rt0_evaluate(const TriMesh& mesh, std::size_t e, const std::array<double, 3>& coeffs,
                  const std::array<double, 3>& bary) {
  const Vec2 x = point_at(mesh, e, bary);
  const auto& t = mesh.triangle(e);
  const double inv = 1.0 / (2.0 * mesh.area(e));
  Vec2 out;
  for (int k = 0; k < 3; ++k) {
    out += (coeffs[k] * mesh.facet_sign(e, k) * inv) * (x - mesh.vertex(t[k]));
  }
  return out;
}

std::array<double, 6> bdm1_reconstruct(const CRVectorField& v, std::size_t e, BoundaryTrace mode) {
  const TriMesh& mesh = v.mesh();
  std::array<double, 6> c{};
  for (int k = 0; k < 3; ++k) {
    const int f = mesh.element_facets(e)[k];
    const bool boundary = mesh.is_boundary(f);
    if (boundary && mode == BoundaryTrace::Zero) continue;
    const double len = mesh.facet_length(f);
    const Vec2& n = mesh.facet_normal(f);
    const auto [va, vb] = mesh.facet(f);
    const double weight = boundary ? 1.0 : 0.5;
    for (int side = 0; side < (boundary ? 1 : 2); ++side) {
      const auto el = static_cast<std::size_t>(mesh.facet_elements(f)[side]);
      const auto& t = mesh.triangle(el);
      double alpha = 0.0;
      double beta = 0.0;
      for (int j = 0; j < 3; ++j) {
        if (t[j] == va) alpha = dot(v.vertex_value(el, j), n);
        if (t[j] == vb) beta = dot(v.vertex_value(el, j), n);
      }
      c[2 * k] += weight * len * 0.5 * (alpha + beta);
      c[2 * k + 1] += weight * len * (beta - alpha) / 6.0;
    }
  }
  return c;
}

Vec2 bdm1_evaluate(const TriMesh& mesh, std::size_t e, const std::array<double, 6>& coeffs,
                   const std::array<double, 3>& bary) {
  const auto w = bdm1_vertex_values(mesh, e, coeffs);
  return bary[0] * w[0] + bary[1] * w[1] + bary[2] * w[2];
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

// Element-local load integrals. CR: (k, c) -> 2k + c. RT0: k. BDM1: (k, moment) -> 2k + m.
using LocalLoad = std::array<double, 6>;

LocalLoad element_load(const TriMesh& mesh, std::size_t e, MethodKind method, const VectorFunction& f,
                       const TriangleRule& rule) {
  LocalLoad out{};
  const double area = mesh.area(e);
  const auto& t = mesh.triangle(e);

  std::array<std::array<Vec2, 3>, 6> bdm_basis{};
  if (method == MethodKind::CR_BDM) {
    for (int i = 0; i < 6; ++i) {
      std::array<double, 6> unit{};
      unit[i] = 1.0;
      bdm_basis[i] = bdm1_vertex_values(mesh, e, unit);
    }
  }
  const double inv2a = 1.0 / (2.0 * area);

  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto& l = rule.points[q];
    const Vec2 x = point_at(mesh, e, l);
    const Vec2 fx = f(x);
    const double w = rule.weights[q] * area;
    switch (method) {
      case MethodKind::CR:
        for (int k = 0; k < 3; ++k) {
          const double psi = 1.0 - 2.0 * l[k];
          out[2 * k] += w * fx.x * psi;
          out[2 * k + 1] += w * fx.y * psi;
        }
        break;
      case MethodKind::CR_RT:
        for (int k = 0; k < 3; ++k) {
          const Vec2 basis = (mesh.facet_sign(e, k) * inv2a) * (x - mesh.vertex(t[k]));
          out[k] += w * dot(fx, basis);
        }
        break;
      case MethodKind::CR_BDM:
        for (int i = 0; i < 6; ++i) {
          const auto& b = bdm_basis[i];
          const Vec2 basis = l[0] * b[0] + l[1] * b[1] + l[2] * b[2];
          out[i] += w * dot(fx, basis);
        }
        break;
    }
  }
  return out;
}

std::vector<LocalLoad> element_loads(const TriMesh& mesh, MethodKind method, const VectorFunction& f,
                                     const AssemblyOptions& options) {
  const TriangleRule& base = triangle_rule(options.quad_degree);
  const std::size_t n = mesh.n_elements();
  std::vector<LocalLoad> loads(n);

  auto work = [&](std::size_t begin, std::size_t end) {
    std::map<int, TriangleRule> composite;
    for (std::size_t e = begin; e < end; ++e) {
      const int s = options.subdivision ? std::max(1, options.subdivision(e)) : 1;
      const TriangleRule* rule = &base;
      if (s > 1) {
        auto it = composite.find(s);
        if (it == composite.end()) it = composite.emplace(s, composite_rule(base, s)).first;
        rule = &it->second;
      }
      loads[e] = element_load(mesh, e, method, f, *rule);
    }
  };

  const int threads = std::max(1, options.threads);
  if (threads == 1 || n < 2 * static_cast<std::size_t>(threads)) {
    work(0, n);
    return loads;
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
          work(begin, end);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return loads;
}

}  // namespace

Eigen::VectorXd assemble_load(const TriMesh& mesh, MethodKind method, const VectorFunction& f,
                              const std::vector<int>& dof_of_facet, const AssemblyOptions& options) {
  std::size_t n_interior = 0;
  for (int d : dof_of_facet) n_interior += d >= 0 ? 1 : 0;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * n_interior));
  const auto loads = element_loads(mesh, method, f, options);

  // Scatter serially in element order so the result is independent of threading.
  for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
    const auto& fs = mesh.element_facets(e);
    const LocalLoad& l = loads[e];
    for (int k = 0; k < 3; ++k) {
      const int g = fs[k];
      const int dof = dof_of_facet[g];
      if (method == MethodKind::CR) {
        if (dof < 0) continue;
        rhs[2 * dof] += l[2 * k];
        rhs[2 * dof + 1] += l[2 * k + 1];
        continue;
      }
      // I_h of a test function has normal moments only on interior facets.
      if (mesh.is_boundary(g)) continue;
      const double len = mesh.facet_length(g);
      const Vec2& n = mesh.facet_normal(g);
      const double m0 = method == MethodKind::CR_RT ? l[k] : l[2 * k];
      // Zeroth moment: only the basis function attached to g has a nonzero mean trace on g.
      rhs[2 * dof] += m0 * len * n.x;
      rhs[2 * dof + 1] += m0 * len * n.y;
      if (method != MethodKind::CR_BDM) continue;
      // First moment of the averaged trace: basis functions of the neighbouring
      // facets vary linearly along g, from -1 at their opposite vertex to +1.
      const double m1 = l[2 * k + 1];
      const int lower = mesh.facet(g)[0];
      for (int side = 0; side < 2; ++side) {
        const auto el = static_cast<std::size_t>(mesh.facet_elements(g)[side]);
        const auto& t = mesh.triangle(el);
        const auto& efs = mesh.element_facets(el);
        for (int j = 0; j < 3; ++j) {
          const int fj = efs[j];
          const int dj = dof_of_facet[fj];
          if (fj == g || dj < 0) continue;
          const double coef = 0.5 * len / 3.0 * (t[j] == lower ? 1.0 : -1.0);
          rhs[2 * dj] += m1 * coef * n.x;
          rhs[2 * dj + 1] += m1 * coef * n.y;
        }
      }
    }
  }
  return rhs;
}

StokesSystem assemble(const TriMesh& mesh, MethodKind method, double nu, const VectorFunction& f,
                      const AssemblyOptions& options) {
  if (mesh.n_elements() == 0) throw InvalidInput("assemble: empty mesh");
  if (!(nu > 0.0)) throw InvalidInput("assemble: nu must be positive");
  if (options.quad_degree < 2) throw InvalidInput("assemble: quad_degree must be >= 2");
  (void)triangle_rule(options.quad_degree);

  StokesSystem sys(mesh);
  sys.method = method;
  sys.nu = nu;
  sys.dof_of_facet.assign(mesh.n_facets(), -1);
  for (std::size_t f = 0; f < mesh.n_facets(); ++f) {
    if (mesh.is_boundary(f)) {
      if (options.boundary) {
        const auto& ends = mesh.facet(f);
        sys.lifting[f] = options.boundary(mesh.vertex(ends[0]), mesh.vertex(ends[1]));
      }
    } else {
      sys.dof_of_facet[f] = static_cast<int>(sys.interior_facets.size());
      sys.interior_facets.push_back(static_cast<int>(f));
    }
  }
  const auto nv = static_cast<Eigen::Index>(2 * sys.interior_facets.size());
  const auto np = static_cast<Eigen::Index>(mesh.n_elements());

  sys.rhs_u = assemble_load(mesh, method, f, sys.dof_of_facet, options);
  sys.rhs_p = Eigen::VectorXd::Zero(np);

  std::vector<Eigen::Triplet<double>> a_trip;
  std::vector<Eigen::Triplet<double>> b_trip;
  a_trip.reserve(mesh.n_elements() * 18);
  b_trip.reserve(mesh.n_elements() * 6);
  for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
    const double area = mesh.area(e);
    const auto& gl = mesh.grad_barycentric(e);
    const auto& fs = mesh.element_facets(e);
    for (int k = 0; k < 3; ++k) {
      const int dk = sys.dof_of_facet[fs[k]];
      for (int l = 0; l < 3; ++l) {
        const double kl = 4.0 * nu * area * dot(gl[k], gl[l]);
        const int dl = sys.dof_of_facet[fs[l]];
        if (dk < 0) continue;
        if (dl >= 0) {
          a_trip.emplace_back(2 * dk, 2 * dl, kl);
          a_trip.emplace_back(2 * dk + 1, 2 * dl + 1, kl);
        } else {
          const Vec2& g = sys.lifting[fs[l]];
          sys.rhs_u[2 * dk] -= kl * g.x;
          sys.rhs_u[2 * dk + 1] -= kl * g.y;
        }
      }
      // -(div ψ_k e_c) |T| with ∇ψ_k = -2 ∇λ_k
      const Vec2 b = 2.0 * area * gl[k];
      if (dk >= 0) {
        b_trip.emplace_back(static_cast<int>(e), 2 * dk, b.x);
        b_trip.emplace_back(static_cast<int>(e), 2 * dk + 1, b.y);
      } else {
        const Vec2& g = sys.lifting[fs[k]];
        sys.rhs_p[static_cast<Eigen::Index>(e)] -= b.x * g.x + b.y * g.y;
      }
    }
  }
  sys.A.resize(nv, nv);
  sys.A.setFromTriplets(a_trip.begin(), a_trip.end());
  sys.B.resize(np, nv);
  sys.B.setFromTriplets(b_trip.begin(), b_trip.end());
  return sys;
}

}  // namespace prs
