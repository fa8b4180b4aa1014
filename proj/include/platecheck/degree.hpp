#pragma once

#include "platecheck/clipping.hpp"
#include "platecheck/geometry.hpp"

#include <map>
#include <optional>

namespace platecheck {

enum class DegreeMethod { jacobian_sum, boundary, integral };

const char* to_string(DegreeMethod m);

struct DegreeResult {
  int value = 0;
  DegreeMethod method = DegreeMethod::jacobian_sum;
  /// False when y is within tolerance of f(boundary) or not a regular value.
  bool regular = true;
  /// Distance from y to f(boundary).
  double margin = 0.0;
  /// Boundary method: |winding - value|. Integral method: |estimate - value|.
  double residual = 0.0;
  /// Integral method only: the raw quadrature value and its error estimate.
  double estimate = 0.0;
  double quadrature_error = 0.0;
};

struct DegreeOptions {
  /// Minimal admissible distance from y to f(boundary). Negative selects the
  /// default 1e-6 * diameter of the image bounding box.
  double boundary_tolerance = -1.0;
  /// Minimal |det| of a preimage simplex gradient, relative to the largest.
  double singular_tolerance = 1e-12;
  /// Barycentric slack for "y lies on the image of a facet" detection.
  double facet_tolerance = 1e-12;
};

/// Images of the outward boundary facets of a map, indexed for distance and
/// winding queries. Planar boundaries store edges as degenerate triangles.
class BoundaryImage {
 public:
  explicit BoundaryImage(const PiecewiseAffineMap& map);

  int dimension() const { return dim_; }
  std::size_t size() const { return triangles_.size(); }
  const std::vector<Triangle3>& triangles() const { return triangles_; }
  double diameter() const { return diameter_; }
  double default_tolerance() const { return 1e-6 * diameter_; }

  /// Distance from y to the boundary image.
  double distance(const Vec3& y) const;
  /// Distance capped at `radius` (+inf beyond).
  double distance_within(const Vec3& y, double radius) const;
  /// Distance from a segment to the boundary image, capped at radius.
  double segment_distance(const Vec3& a, const Vec3& b, double radius) const;
  /// Winding number (2D) or total solid angle over 4*pi (3D).
  double winding(const Vec3& y) const;

 private:
  int dim_;
  std::vector<Triangle3> triangles_;
  TriangleIndex index_;
  Box bounds_;
  double diameter_ = 0.0;
};

/// Signed solid angle of triangle (a,b,c) seen from the origin.
double solid_angle(const Vec3& a, const Vec3& b, const Vec3& c);

/// Sum of sgn(det grad f) over simplices whose image contains y.
DegreeResult degree_jacobian(const PiecewiseAffineMap& map, const Vec3& y, const DegreeOptions& options = {});

/// Winding / solid-angle degree from boundary values only.
DegreeResult degree_boundary(const PiecewiseAffineMap& map, const Vec3& y, const DegreeOptions& options = {});
DegreeResult degree_boundary(const BoundaryImage& boundary, const Vec3& y, double tolerance);

/// The bump (1 - |z-c|^2/r^2)^3 on B(c,r), normalized to unit integral.
struct Bump {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;

  double normalizer(int dim) const;
  double operator()(const Vec3& z, int dim) const;
};

struct IntegralOptions {
  /// Gauss-Legendre points per collapsed direction.
  int order = 6;
  /// Maximal recursive bisection depth for simplices cut by the bump support,
  /// counted from the first level no larger than the bump radius.
  int max_depth = 12;
  /// Absolute accuracy target for the whole integral.
  double tolerance = 1e-9;
};

/// Integral of phi(f(x)) det grad f(x) over the domain.
DegreeResult degree_integral(const PiecewiseAffineMap& map, const Bump& phi, const IntegralOptions& options = {},
                             const DegreeOptions& degree_options = {});

/// y shifted by tolerance/2 in a seeded random direction.
Vec3 perturb_target(const Vec3& y, double tolerance, int dimension, std::uint64_t seed);

/// Per-sample degrees deg(ext, U_hat, u2(x)).
struct DegreeField {
  std::vector<Vec3> points;
  std::vector<Vec3> images;
  std::vector<DegreeResult> results;
  /// Samples in the exclusion set E (image within tolerance of ext(boundary)
  /// or an inconclusive boundary evaluation).
  std::vector<bool> excluded;
  /// Grid coordinates when sampled on a grid (empty otherwise).
  std::vector<std::array<int, 2>> cells;
  int nx = 0;
  int ny = 0;
  double tolerance = 0.0;
  /// Area represented by each sample.
  double sample_weight = 0.0;

  std::size_t size() const { return points.size(); }
  std::size_t excluded_count() const;
  /// Sample counts per degree value (excluded samples omitted).
  std::map<int, std::size_t> level_counts() const;
};

/// Degree field on explicit sample points; each sample carries weight
/// domain_area / n.
DegreeField degree_field(const PiecewiseAffineMap& extension, const PiecewiseAffineMap& u2,
                         const std::vector<Vec3>& samples, const DegreeOptions& options = {});
/// Degree field on grid samples of u2's domain.
DegreeField degree_field(const PiecewiseAffineMap& extension, const PiecewiseAffineMap& u2, const GridSamples& grid,
                         const DegreeOptions& options = {});
DegreeField degree_field(const BoundaryImage& boundary, const PiecewiseAffineMap& u2, const GridSamples& grid,
                         double tolerance);

struct LevelSetViolation {
  std::size_t a = 0;
  std::size_t b = 0;
  double distance = 0.0;
  double allowed = 0.0;
};

/// For grid-adjacent samples with different degrees, checks that the segment
/// between their images passes within `slack * |segment| + field.tolerance`
/// of the boundary image.
std::vector<LevelSetViolation> level_set_boundary_check(const DegreeField& field, const BoundaryImage& boundary,
                                                        double slack = 0.25);

}  // namespace platecheck
