#include "prs/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <unordered_map>

#include "prs/error.hpp"
#include "prs/format.hpp"

namespace prs {

void Rect::validate() const {
  if (!(x_min < x_max) || !(y_min < y_max)) {
    throw InvalidInput("Rect: require x_min < x_max and y_min < y_max");
  }
}

namespace {

std::vector<double> uniform_line(double lo, double hi, int n) {
  std::vector<double> line(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    line[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
  }
  line.back() = hi;
  return line;
}

void require_counts(int nx, int ny) {
  if (nx < 1 || ny < 1) {
    throw InvalidInput("mesh: nx and ny must be >= 1");
  }
}

}  // namespace

TriMesh TriMesh::from_grid(const Rect& rect, std::span<const double> xs, std::span<const double> ys,
                           Grading grading) {
  rect.validate();
  if (xs.size() < 2 || ys.size() < 2) {
    throw InvalidInput("TriMesh::from_grid: need at least two coordinate lines per direction");
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i - 1] < xs[i])) throw InvalidInput("TriMesh::from_grid: x lines not increasing");
  }
  for (std::size_t j = 1; j < ys.size(); ++j) {
    if (!(ys[j - 1] < ys[j])) throw InvalidInput("TriMesh::from_grid: y lines not increasing");
  }

  TriMesh m;
  m.rect_ = rect;
  m.grading_ = grading;
  m.nx_ = static_cast<int>(xs.size()) - 1;
  m.ny_ = static_cast<int>(ys.size()) - 1;
  const int nvx = m.nx_ + 1;

  m.vertices_.reserve(xs.size() * ys.size());
  for (double y : ys) {
    for (double x : xs) m.vertices_.push_back({x, y});
  }

  m.triangles_.reserve(2 * static_cast<std::size_t>(m.nx_) * m.ny_);
  for (int j = 0; j < m.ny_; ++j) {
    for (int i = 0; i < m.nx_; ++i) {
      const int v0 = j * nvx + i;
      const int v1 = v0 + 1;
      const int v2 = v1 + nvx;
      const int v3 = v0 + nvx;
      m.triangles_.push_back({v0, v1, v2});
      m.triangles_.push_back({v0, v2, v3});
    }
  }

  // Facets are numbered in order of first appearance while sweeping elements
  // and their local facets, so numbering is deterministic.
  const auto n_el = m.triangles_.size();
  std::unordered_map<long long, int> lookup;
  lookup.reserve(3 * n_el);
  m.element_facets_.resize(n_el);
  for (std::size_t e = 0; e < n_el; ++e) {
    const auto& t = m.triangles_[e];
    for (int k = 0; k < 3; ++k) {
      int a = t[(k + 1) % 3];
      int b = t[(k + 2) % 3];
      if (a > b) std::swap(a, b);
      const long long key = static_cast<long long>(a) * static_cast<long long>(m.vertices_.size()) + b;
      auto [it, inserted] = lookup.try_emplace(key, static_cast<int>(m.facets_.size()));
      if (inserted) {
        m.facets_.push_back({a, b});
        m.facet_elements_.push_back({static_cast<int>(e), -1});
      } else {
        auto& adj = m.facet_elements_[it->second];
        if (adj[1] >= 0) throw NumericalFailure("TriMesh: facet shared by more than two elements");
        adj[1] = static_cast<int>(e);
      }
      m.element_facets_[e][k] = it->second;
    }
  }

  m.areas_.resize(n_el);
  m.grad_lambda_.resize(n_el);
  for (std::size_t e = 0; e < n_el; ++e) {
    const auto& t = m.triangles_[e];
    const Vec2& p0 = m.vertices_[t[0]];
    const Vec2& p1 = m.vertices_[t[1]];
    const Vec2& p2 = m.vertices_[t[2]];
    const double twice_area = cross(p1 - p0, p2 - p0);
    if (!(twice_area > 0.0)) throw NumericalFailure("TriMesh: non-positive element area");
    m.areas_[e] = 0.5 * twice_area;
    // grad lambda_k = rot(p_{k+2} - p_{k+1}) / (2|T|), rot(x, y) = (y, -x)
    for (int k = 0; k < 3; ++k) {
      const Vec2 d = m.vertices_[t[(k + 2) % 3]] - m.vertices_[t[(k + 1) % 3]];
      m.grad_lambda_[e][k] = {-d.y / twice_area, d.x / twice_area};
    }
  }

  const auto n_f = m.facets_.size();
  m.midpoints_.resize(n_f);
  m.normals_.resize(n_f);
  m.lengths_.resize(n_f);
  for (std::size_t f = 0; f < n_f; ++f) {
    const Vec2& a = m.vertices_[m.facets_[f][0]];
    const Vec2& b = m.vertices_[m.facets_[f][1]];
    m.midpoints_[f] = {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    const Vec2 d = b - a;
    const double len = norm(d);
    m.lengths_[f] = len;
    Vec2 n{d.y / len, -d.x / len};
    const Vec2 c = m.centroid(static_cast<std::size_t>(m.facet_elements_[f][0]));
    if (dot(n, m.midpoints_[f] - c) < 0.0) n = -1.0 * n;
    m.normals_[f] = n;
  }
  return m;
}

Vec2 TriMesh::centroid(std::size_t e) const {
  const auto& t = triangles_[e];
  const Vec2& a = vertices_[t[0]];
  const Vec2& b = vertices_[t[1]];
  const Vec2& c = vertices_[t[2]];
  return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

int TriMesh::local_facet(std::size_t e, int f) const {
  for (int k = 0; k < 3; ++k) {
    if (element_facets_[e][k] == f) return k;
  }
  return -1;
}

TriMesh build_uniform(const Rect& rect, int nx, int ny) {
  rect.validate();
  require_counts(nx, ny);
  const auto xs = uniform_line(rect.x_min, rect.x_max, nx);
  const auto ys = uniform_line(rect.y_min, rect.y_max, ny);
  return TriMesh::from_grid(rect, xs, ys, {GradingKind::Uniform, 0.0});
}

TriMesh build_shishkin(const Rect& rect, int nx, int ny, double tau) {
  rect.validate();
  require_counts(nx, ny);
  if (ny % 2 != 0) throw InvalidInput("build_shishkin: ny must be even");
  if (!(tau > 0.0) || !(tau < rect.height())) {
    throw InvalidInput("build_shishkin: tau must satisfy 0 < tau < y_max - y_min");
  }
  const int half = ny / 2;
  const double y_tau = rect.y_min + tau;
  std::vector<double> ys(static_cast<std::size_t>(ny) + 1);
  for (int j = 0; j <= half; ++j) {
    ys[j] = rect.y_min + tau * static_cast<double>(j) / static_cast<double>(half);
  }
  for (int j = 1; j <= half; ++j) {
    ys[half + j] = y_tau + (rect.y_max - y_tau) * static_cast<double>(j) / static_cast<double>(half);
  }
  ys[half] = y_tau;
  ys.back() = rect.y_max;
  const auto xs = uniform_line(rect.x_min, rect.x_max, nx);
  return TriMesh::from_grid(rect, xs, ys, {GradingKind::Shishkin, tau});
}

std::vector<double> element_max_angles(const TriMesh& mesh) {
  std::vector<double> out(mesh.n_elements());
  for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
    const auto& t = mesh.triangle(e);
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
      const Vec2& p = mesh.vertex(t[k]);
      const Vec2 u = mesh.vertex(t[(k + 1) % 3]) - p;
      const Vec2 v = mesh.vertex(t[(k + 2) % 3]) - p;
      worst = std::max(worst, std::atan2(std::abs(cross(u, v)), dot(u, v)));
    }
    out[e] = worst;
  }
  return out;
}

MeshQuality quality(const TriMesh& mesh) {
  MeshQuality q;
  q.n_elements = mesh.n_elements();
  q.n_facets = mesh.n_facets();
  q.n_vertices = mesh.n_vertices();
  for (double a : element_max_angles(mesh)) q.max_angle = std::max(q.max_angle, a);
  for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
    double longest = 0.0;
    for (int f : mesh.element_facets(e)) longest = std::max(longest, mesh.facet_length(f));
    const double height = 2.0 * mesh.area(e) / longest;
    q.max_aspect_ratio = std::max(q.max_aspect_ratio, longest / height);
    q.h_max = std::max(q.h_max, longest);
  }
  return q;
}

std::string quality_csv_header() { return "n_elements,n_facets,h_max,max_angle,max_aspect_ratio"; }

std::string quality_csv_row(const MeshQuality& q) {
  return std::to_string(q.n_elements) + "," + std::to_string(q.n_facets) + "," + format_real(q.h_max) + "," +
         format_real(q.max_angle) + "," + format_real(q.max_aspect_ratio);
}

void write_vtk(std::ostream& out, const TriMesh& mesh, std::span<const CellField> cell_data) {
  out << "# vtk DataFile Version 3.0\n";
  out << "prs triangulation\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  for (const auto& v : mesh.vertices()) out << format_real(v.x) << ' ' << format_real(v.y) << " 0\n";
  const auto n_el = mesh.n_elements();
  out << "CELLS " << n_el << ' ' << 4 * n_el << '\n';
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << n_el << '\n';
  for (std::size_t e = 0; e < n_el; ++e) out << "5\n";
  if (cell_data.empty()) return;
  out << "CELL_DATA " << n_el << '\n';
  for (const auto& field : cell_data) {
    if (field.values.size() != n_el) throw InvalidInput("write_vtk: cell field size mismatch: " + field.name);
    out << "SCALARS " << field.name << " double 1\n";
    out << "LOOKUP_TABLE default\n";
    for (double v : field.values) out << format_real(v) << '\n';
  }
}

}  // namespace prs
