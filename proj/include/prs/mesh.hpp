#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "prs/geometry.hpp"

namespace prs {

/// Axis-aligned rectangle; construction validates x_min < x_max and y_min < y_max.
struct Rect {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  void validate() const;
};

enum class GradingKind { Uniform, Shishkin };

struct Grading {
  GradingKind kind = GradingKind::Uniform;
  double tau = 0.0;  // transition distance from y_min; meaningful for Shishkin only
};

using Triangle = std::array<int, 3>;
using Edge = std::array<int, 2>;

/// Conforming triangulation of a rectangle with explicit facet entities.
///
/// Local numbering: facet k of an element is the edge opposite its local vertex k.
/// Facet endpoints are stored with the lower vertex index first; facet_elements
/// lists the adjacent elements in increasing order (second entry is -1 on the
/// boundary). The global facet normal points out of the first (lower-indexed)
/// adjacent element.
class TriMesh {
 public:
  /// Triangulates the tensor grid xs × ys, splitting every cell along its
  /// lower-left to upper-right diagonal. Coordinates must be strictly increasing.
  static TriMesh from_grid(const Rect& rect, std::span<const double> xs, std::span<const double> ys,
                           Grading grading);

  const Rect& rect() const { return rect_; }
  const Grading& grading() const { return grading_; }
  std::size_t n_vertices() const { return vertices_.size(); }
  std::size_t n_elements() const { return triangles_.size(); }
  std::size_t n_facets() const { return facets_.size(); }
  int nx() const { return nx_; }
  int ny() const { return ny_; }

  std::span<const Vec2> vertices() const { return vertices_; }
  std::span<const Triangle> triangles() const { return triangles_; }
  std::span<const Edge> facets() const { return facets_; }

  const Vec2& vertex(std::size_t v) const { return vertices_[v]; }
  const Triangle& triangle(std::size_t e) const { return triangles_[e]; }
  const Triangle& element_facets(std::size_t e) const { return element_facets_[e]; }
  const Edge& facet(std::size_t f) const { return facets_[f]; }
  const Edge& facet_elements(std::size_t f) const { return facet_elements_[f]; }
  bool is_boundary(std::size_t f) const { return facet_elements_[f][1] < 0; }
  const Vec2& facet_midpoint(std::size_t f) const { return midpoints_[f]; }
  const Vec2& facet_normal(std::size_t f) const { return normals_[f]; }
  double facet_length(std::size_t f) const { return lengths_[f]; }
  double area(std::size_t e) const { return areas_[e]; }
  Vec2 centroid(std::size_t e) const;

  /// Gradients of the three barycentric coordinates of element e (constant).
  const std::array<Vec2, 3>& grad_barycentric(std::size_t e) const { return grad_lambda_[e]; }

  /// +1 if the global normal of local facet k of element e points outward, -1 otherwise.
  double facet_sign(std::size_t e, int k) const {
    return facet_elements_[element_facets_[e][k]][0] == static_cast<int>(e) ? 1.0 : -1.0;
  }

  /// Local index (0..2) of global facet f within element e, or -1.
  int local_facet(std::size_t e, int f) const;

 private:
  Rect rect_;
  Grading grading_;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<Vec2> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Triangle> element_facets_;
  std::vector<Edge> facets_;
  std::vector<Edge> facet_elements_;
  std::vector<Vec2> midpoints_;
  std::vector<Vec2> normals_;
  std::vector<double> lengths_;
  std::vector<double> areas_;
  std::vector<std::array<Vec2, 3>> grad_lambda_;
};

struct MeshQuality {
  double max_angle = 0.0;         // radians
  double max_aspect_ratio = 0.0;  // longest edge / corresponding height
  std::size_t n_elements = 0;
  std::size_t n_facets = 0;
  std::size_t n_vertices = 0;
  double h_max = 0.0;
};

TriMesh build_uniform(const Rect& rect, int nx, int ny);

/// Piecewise uniform in y: ny/2 rows in [y_min, y_min + tau] and ny/2 rows above.
TriMesh build_shishkin(const Rect& rect, int nx, int ny, double tau);

MeshQuality quality(const TriMesh& mesh);

/// Largest interior angle of each element.
std::vector<double> element_max_angles(const TriMesh& mesh);

/// One CSV row: n_elements,n_facets,h_max,max_angle,max_aspect_ratio
std::string quality_csv_header();
std::string quality_csv_row(const MeshQuality& q);

struct CellField {
  std::string name;
  std::span<const double> values;
};

/// ASCII legacy VTK unstructured grid with triangle cells (type 5) and optional
/// scalar cell data.
void write_vtk(std::ostream& out, const TriMesh& mesh, std::span<const CellField> cell_data = {});

}  // namespace prs
