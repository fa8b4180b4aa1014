#pragma once

#include "platecheck/common.hpp"

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace platecheck {

/// Vertex indices of a triangle (2D) or tetrahedron (3D); unused slot is -1.
using Simplex = std::array<int, 4>;
/// Vertex indices of an edge (2D) or triangle (3D); unused slot is -1.
using Facet = std::array<int, 3>;

struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();
};

struct Located {
  std::size_t simplex = 0;
  Eigen::Vector4d barycentric = Eigen::Vector4d::Zero();
};

/// Simplicial mesh of a planar (dimension 2) or spatial (dimension 3)
/// domain. Points are stored as Vec3; 2D meshes keep z = 0.
///
/// Construction repairs negatively oriented simplices by swapping two
/// vertices and rejects degenerate ones. Interior facets must be shared by
/// exactly two simplices with opposite induced orientation; facets seen once
/// form the outward-oriented boundary.
class TriangulatedDomain {
 public:
  TriangulatedDomain(int dimension, std::vector<Vec3> vertices, std::vector<Simplex> simplices);

  int dimension() const { return dim_; }
  int vertices_per_simplex() const { return dim_ + 1; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t simplex_count() const { return simplices_.size(); }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Simplex>& simplices() const { return simplices_; }
  const std::vector<Facet>& boundary_facets() const { return boundary_; }
  const Vec3& vertex(std::size_t i) const { return vertices_[i]; }
  const Simplex& simplex(std::size_t s) const { return simplices_[s]; }

  /// Largest simplex diameter.
  double mesh_size() const { return mesh_size_; }
  double volume(std::size_t s) const { return volumes_[s]; }
  double total_volume() const { return total_volume_; }
  Vec3 centroid(std::size_t s) const;
  const Box& bounds() const { return bounds_; }
  /// Simplices incident to each vertex.
  const std::vector<std::vector<int>>& vertex_simplices() const { return vertex_simplices_; }
  /// Whether a vertex lies on a boundary facet.
  bool is_boundary_vertex(std::size_t v) const { return boundary_vertex_[v]; }

  /// Barycentric coordinates of p with respect to simplex s.
  Eigen::Vector4d barycentric(std::size_t s, const Vec3& p) const;

  /// Lowest-index simplex containing p (barycentric tolerance
  /// 1e-12 * mesh_size measured in length).
  std::optional<Located> locate(const Vec3& p) const;

 private:
  void build_locator();

  int dim_;
  std::vector<Vec3> vertices_;
  std::vector<Simplex> simplices_;
  std::vector<Facet> boundary_;
  std::vector<double> volumes_;
  std::vector<Eigen::Matrix3d> inverse_edges_;
  std::vector<double> min_height_;
  std::vector<std::vector<int>> vertex_simplices_;
  std::vector<bool> boundary_vertex_;
  double mesh_size_ = 0.0;
  double total_volume_ = 0.0;
  Box bounds_;

  // Uniform bucket grid over simplex bounding boxes.
  std::array<int, 3> grid_dims_{1, 1, 1};
  Vec3 grid_origin_ = Vec3::Zero();
  Vec3 grid_cell_ = Vec3::Ones();
  std::vector<std::vector<int>> buckets_;
};

using DomainPtr = std::shared_ptr<const TriangulatedDomain>;

/// Tetrahedral mesh of base x [bottom, bottom + height] with `levels`
/// layers. Vertex (layer l, base vertex v) has index l * base_vertices + v,
/// so layer 0 is vertex-identical to the base.
struct PrismMesh {
  DomainPtr base;
  int levels = 1;
  double height = 1.0;
  double bottom = 0.0;
  DomainPtr mesh;

  std::size_t base_vertex_count() const { return base->vertex_count(); }
  int vertex_index(int layer, int base_vertex) const {
    return layer * static_cast<int>(base->vertex_count()) + base_vertex;
  }
  double layer_coordinate(int layer) const { return bottom + height * layer / levels; }
};

/// A deformation sampled at mesh vertices, affine on each simplex. Target
/// points are stored as Vec3; a planar target keeps z = 0.
class PiecewiseAffineMap {
 public:
  PiecewiseAffineMap(DomainPtr domain, std::vector<Vec3> values, int target_dimension);

  const TriangulatedDomain& domain() const { return *domain_; }
  const DomainPtr& domain_ptr() const { return domain_; }
  int target_dimension() const { return target_dim_; }
  const std::vector<Vec3>& values() const { return values_; }
  const Vec3& value(std::size_t v) const { return values_[v]; }

  /// Per-simplex gradient, target_dimension x domain dimension block of a
  /// zero-padded 3x3 matrix.
  const Mat3& gradient(std::size_t s) const { return gradients_[s]; }
  /// Determinant of the square gradient block (requires equal dimensions).
  double jacobian(std::size_t s) const;

  Vec3 evaluate_in(std::size_t s, const Eigen::Vector4d& barycentric) const;
  std::optional<Vec3> evaluate(const Vec3& x) const;
  /// Image of a domain facet's vertices.
  std::array<Vec3, 3> facet_image(const Facet& f) const;
  /// Largest image-simplex diameter.
  double image_mesh_size() const;
  Box image_bounds() const;

 private:
  DomainPtr domain_;
  std::vector<Vec3> values_;
  int target_dim_;
  std::vector<Mat3> gradients_;
};

/// Evaluates f at every vertex of the domain.
PiecewiseAffineMap interpolate(DomainPtr domain, const std::function<Vec3(const Vec3&)>& f,
                               int target_dimension);

/// Binary set on a uniform grid. Cell (i,j,k) covers
/// origin + cell * [i,i+1) x [j,j+1) x [k,k+1).
class PixelSet {
 public:
  PixelSet() = default;
  PixelSet(int dimension, Vec3 origin, double cell, std::array<int, 3> dims);

  int dimension() const { return dim_; }
  const Vec3& origin() const { return origin_; }
  double cell() const { return cell_; }
  const std::array<int, 3>& dims() const { return dims_; }
  std::size_t size() const { return bits_.size(); }

  std::size_t index(int i, int j, int k = 0) const {
    return (static_cast<std::size_t>(k) * dims_[1] + j) * dims_[0] + i;
  }
  bool in_range(int i, int j, int k = 0) const {
    return i >= 0 && j >= 0 && k >= 0 && i < dims_[0] && j < dims_[1] && k < dims_[2];
  }
  bool get(int i, int j, int k = 0) const { return in_range(i, j, k) && bits_[index(i, j, k)]; }
  void set(int i, int j, int k = 0, bool on = true) { bits_[index(i, j, k)] = on; }
  bool get_flat(std::size_t idx) const { return bits_[idx]; }
  void set_flat(std::size_t idx, bool on) { bits_[idx] = on; }
  std::array<int, 3> coords(std::size_t idx) const;
  Vec3 cell_center(int i, int j, int k = 0) const;
  /// Cell containing p, if inside the grid.
  std::optional<std::array<int, 3>> cell_of(const Vec3& p) const;

  std::size_t count() const;
  /// (#occupied cells) * cell^dimension.
  double measure() const;
  bool empty() const { return count() == 0; }
  std::vector<std::array<int, 3>> occupied() const;
  bool same_grid(const PixelSet& other) const;

  PixelSet operator|(const PixelSet& other) const;
  PixelSet operator&(const PixelSet& other) const;
  bool subset_of(const PixelSet& other) const;
  bool operator==(const PixelSet& other) const = default;

 private:
  int dim_ = 2;
  Vec3 origin_ = Vec3::Zero();
  double cell_ = 1.0;
  std::array<int, 3> dims_{0, 0, 1};
  std::vector<std::uint8_t> bits_;
};

/// Pixel grid covering a box, with every cell whose center satisfies pred set.
PixelSet rasterize(int dimension, const Box& box, double cell,
                   const std::function<bool(const Vec3&)>& pred);

// ---- construction -------------------------------------------------------

/// Axis-aligned grid: 2 triangles per cell in 2D, 6 Kuhn tetrahedra in 3D.
TriangulatedDomain build_grid_domain(int dimension, const Box& box, std::array<int, 3> cells);
/// Square/cube grid with `resolution` cells per side.
TriangulatedDomain build_grid_domain(int dimension, const Box& box, int resolution);
/// Polar disk mesh: center vertex and `rings` rings of 6i vertices.
TriangulatedDomain build_disk_domain(const Vec3& center, double radius, int rings);
/// Cube grid pushed radially onto the ball of the given radius.
TriangulatedDomain build_ball_domain(const Vec3& center, double radius, int resolution);
/// Union of meshes; vertices closer than weld_tolerance are identified.
TriangulatedDomain merge_domains(std::span<const TriangulatedDomain> parts, double weld_tolerance);

PrismMesh extrude_cylinder(DomainPtr base, int levels, double height, double bottom = 0.0);

// ---- sampling and measure -----------------------------------------------

/// n reproducible points strictly inside the domain, stratified by simplex
/// volume (systematic sampling over the cumulative volume).
std::vector<Vec3> sample_interior(const TriangulatedDomain& domain, std::size_t n, std::uint64_t seed);

/// Cell-centered grid samples of the bounding box that fall inside the domain.
struct GridSamples {
  std::vector<Vec3> points;
  /// Grid coordinates (i,j) of each point.
  std::vector<std::array<int, 2>> cells;
  int nx = 0;
  int ny = 0;
  double spacing_x = 0.0;
  double spacing_y = 0.0;
};
GridSamples grid_samples(const TriangulatedDomain& domain, int nx, int ny);

struct MeasureEstimate {
  double value = 0.0;
  /// Half-width of the reported uncertainty band.
  double radius = 0.0;
};

/// Monte-Carlo measure of {x : pred(x)} with a 3-sigma binomial radius.
MeasureEstimate measure_of(const TriangulatedDomain& domain, const std::function<bool(const Vec3&)>& pred,
                           std::size_t samples, std::uint64_t seed);
/// Measure of a subset of equal-weight samples drawn from a domain of
/// total volume `domain_volume`.
MeasureEstimate measure_of(std::span<const bool> hits, double domain_volume);
/// Exact pixel measure; radius zero.
MeasureEstimate measure_of(const PixelSet& set);

}  // namespace platecheck
