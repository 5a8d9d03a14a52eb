#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "prs/error.hpp"
#include "prs/mesh.hpp"

using namespace prs;

namespace {

const Rect kDomain{-1.0, 1.0, 0.0, 1.0};

void expect_consistent(const TriMesh& m) {
  for (std::size_t e = 0; e < m.n_elements(); ++e) {
    const auto& t = m.triangle(e);
    const auto& fs = m.element_facets(e);
    for (int k = 0; k < 3; ++k) {
      const auto& ed = m.facet(fs[k]);
      EXPECT_NE(ed[0], t[k]);
      EXPECT_NE(ed[1], t[k]);
      EXPECT_LT(ed[0], ed[1]);
      EXPECT_EQ(m.local_facet(e, fs[k]), k);
      const auto& fe = m.facet_elements(fs[k]);
      EXPECT_TRUE(fe[0] == static_cast<int>(e) || fe[1] == static_cast<int>(e));
    }
    // ∇λ_k · (x_j - x_m) = δ_kj - δ_km
    const auto& g = m.grad_barycentric(e);
    for (int k = 0; k < 3; ++k) {
      for (int j = 0; j < 3; ++j) {
        const Vec2 d = m.vertex(t[j]) - m.vertex(t[(j + 1) % 3]);
        const double expect = (k == j ? 1.0 : 0.0) - (k == (j + 1) % 3 ? 1.0 : 0.0);
        EXPECT_NEAR(dot(g[k], d), expect, 1e-11);
      }
    }
  }
  for (std::size_t f = 0; f < m.n_facets(); ++f) {
    const auto& fe = m.facet_elements(f);
    const Vec2 n = m.facet_normal(f);
    EXPECT_NEAR(norm(n), 1.0, 1e-14);
    const Vec2 d = m.vertex(m.facet(f)[1]) - m.vertex(m.facet(f)[0]);
    EXPECT_NEAR(dot(n, d), 0.0, 1e-14);
    EXPECT_NEAR(norm(d), m.facet_length(f), 1e-14);
    EXPECT_GT(dot(n, m.facet_midpoint(f) - m.centroid(static_cast<std::size_t>(fe[0]))), 0.0);
    if (fe[1] >= 0) {
      EXPECT_LT(fe[0], fe[1]);
      EXPECT_LT(dot(n, m.facet_midpoint(f) - m.centroid(static_cast<std::size_t>(fe[1]))), 0.0);
    } else {
      const Vec2 mid = m.facet_midpoint(f);
      const bool on_boundary = mid.x == m.rect().x_min || mid.x == m.rect().x_max || mid.y == m.rect().y_min ||
                               mid.y == m.rect().y_max;
      EXPECT_TRUE(on_boundary);
    }
  }
}

}  // namespace

TEST(Mesh, UniformCounts) {
  const int nx = 6, ny = 4;
  const TriMesh m = build_uniform(kDomain, nx, ny);
  EXPECT_EQ(m.n_vertices(), static_cast<std::size_t>((nx + 1) * (ny + 1)));
  EXPECT_EQ(m.n_elements(), static_cast<std::size_t>(2 * nx * ny));
  EXPECT_EQ(m.n_facets(), static_cast<std::size_t>(nx * (ny + 1) + ny * (nx + 1) + nx * ny));
  std::size_t boundary = 0;
  for (std::size_t f = 0; f < m.n_facets(); ++f) boundary += m.is_boundary(f) ? 1 : 0;
  EXPECT_EQ(boundary, static_cast<std::size_t>(2 * (nx + ny)));
  // Euler characteristic of a disc
  EXPECT_EQ(static_cast<long>(m.n_vertices()) - static_cast<long>(m.n_facets()) + static_cast<long>(m.n_elements()),
            1);
}

TEST(Mesh, AreasSumToDomain) {
  const TriMesh m = build_shishkin(kDomain, 16, 8, 0.024);
  double total = 0.0;
  for (std::size_t e = 0; e < m.n_elements(); ++e) {
    EXPECT_GT(m.area(e), 0.0);
    total += m.area(e);
  }
  EXPECT_NEAR(total, kDomain.area(), 1e-13);
}

TEST(Mesh, ConnectivityUniform) { expect_consistent(build_uniform(kDomain, 5, 3)); }

TEST(Mesh, ConnectivityShishkin) { expect_consistent(build_shishkin(kDomain, 8, 6, 0.1)); }

TEST(Mesh, FacetSignMatchesOrientation) {
  const TriMesh m = build_uniform(kDomain, 4, 4);
  for (std::size_t e = 0; e < m.n_elements(); ++e) {
    for (int k = 0; k < 3; ++k) {
      const int f = m.element_facets(e)[k];
      const double outward = dot(m.facet_normal(f), m.facet_midpoint(f) - m.centroid(e)) > 0.0 ? 1.0 : -1.0;
      EXPECT_EQ(m.facet_sign(e, k), outward);
    }
  }
}

TEST(Mesh, ShishkinRows) {
  const double tau = 0.024;
  const TriMesh m = build_shishkin(kDomain, 16, 8, tau);
  std::set<double> ys;
  for (const auto& v : m.vertices()) ys.insert(v.y);
  ASSERT_EQ(ys.size(), 9u);
  int below = 0;
  for (double y : ys) below += y < tau - 1e-15 ? 1 : 0;
  EXPECT_EQ(below, 4);
  EXPECT_TRUE(ys.count(tau) == 1);
}

TEST(Mesh, ShishkinReducesToUniform) {
  const TriMesh s = build_shishkin(kDomain, 6, 4, 0.5);
  const TriMesh u = build_uniform(kDomain, 6, 4);
  ASSERT_EQ(s.n_vertices(), u.n_vertices());
  for (std::size_t v = 0; v < s.n_vertices(); ++v) {
    EXPECT_NEAR(s.vertex(v).x, u.vertex(v).x, 1e-15);
    EXPECT_NEAR(s.vertex(v).y, u.vertex(v).y, 1e-15);
  }
  EXPECT_EQ(s.triangles().size(), u.triangles().size());
}

TEST(Mesh, QualityUniform) {
  const TriMesh m = build_uniform(kDomain, 8, 4);
  const MeshQuality q = quality(m);
  EXPECT_NEAR(q.max_angle, std::numbers::pi / 2, 1e-12);
  // square cells of side 1/4: right isosceles triangles, aspect ratio 2
  EXPECT_NEAR(q.max_aspect_ratio, 2.0, 1e-12);
  EXPECT_NEAR(q.h_max, std::sqrt(2.0) / 4.0, 1e-14);
}

TEST(Mesh, QualityShishkinAspect) {
  // hx = 2/nx, hy = 2 tau/ny; longest edge over its height is hx/hy + hy/hx.
  const double tau = 0.024;
  for (int ny : {8, 16, 64}) {
    const TriMesh m = build_shishkin(kDomain, 2 * ny, ny, tau);
    const double r = 1.0 / (2.0 * tau);
    EXPECT_NEAR(quality(m).max_aspect_ratio, r + 1.0 / r, 1e-9);
    EXPECT_NEAR(quality(m).max_angle, std::numbers::pi / 2, 1e-12);
  }
}

TEST(Mesh, MaxAnglesPerElement) {
  const TriMesh m = build_shishkin(kDomain, 6, 4, 0.2);
  for (double a : element_max_angles(m)) EXPECT_NEAR(a, std::numbers::pi / 2, 1e-12);
}

TEST(Mesh, InvalidInput) {
  EXPECT_THROW(build_uniform(kDomain, 0, 4), InvalidInput);
  EXPECT_THROW(build_uniform(kDomain, 4, -1), InvalidInput);
  EXPECT_THROW(build_uniform(Rect{1.0, 0.0, 0.0, 1.0}, 4, 4), InvalidInput);
  EXPECT_THROW(build_shishkin(kDomain, 4, 5, 0.1), InvalidInput);
  EXPECT_THROW(build_shishkin(kDomain, 4, 4, 0.0), InvalidInput);
  EXPECT_THROW(build_shishkin(kDomain, 4, 4, 1.0), InvalidInput);
}

TEST(Mesh, QualityCsv) {
  const TriMesh m = build_uniform(kDomain, 2, 1);
  EXPECT_EQ(quality_csv_header(), "n_elements,n_facets,h_max,max_angle,max_aspect_ratio");
  const std::string row = quality_csv_row(quality(m));
  EXPECT_EQ(row.rfind("4,9,", 0), 0u) << row;
}

TEST(Mesh, VtkExport) {
  const TriMesh m = build_uniform(kDomain, 2, 1);
  std::vector<double> vals{1.0, 2.0, 3.0, 4.0};
  const std::vector<CellField> cells{{"err_h1", vals}};
  std::ostringstream out;
  write_vtk(out, m, cells);
  const std::string s = out.str();
  EXPECT_EQ(s.rfind("# vtk DataFile Version", 0), 0u);
  EXPECT_NE(s.find("POINTS 6"), std::string::npos);
  EXPECT_NE(s.find("CELLS 4 16"), std::string::npos);
  EXPECT_NE(s.find("CELL_TYPES 4\n5\n5\n5\n5\n"), std::string::npos);
  EXPECT_NE(s.find("CELL_DATA 4"), std::string::npos);
  EXPECT_NE(s.find("SCALARS err_h1 double"), std::string::npos);
}

TEST(Mesh, VtkRejectsWrongFieldSize) {
  const TriMesh m = build_uniform(kDomain, 2, 1);
  std::vector<double> vals{1.0};
  const std::vector<CellField> cells{{"bad", vals}};
  std::ostringstream out;
  EXPECT_THROW(write_vtk(out, m, cells), InvalidInput);
}
