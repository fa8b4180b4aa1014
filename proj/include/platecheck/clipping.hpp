#pragma once

#include "platecheck/common.hpp"

#include <array>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

namespace platecheck {

using Triangle3 = std::array<Vec3, 3>;
using Tetra = std::array<Vec3, 4>;

double polygon_area(const std::vector<Vec2>& poly);

/// Sutherland-Hodgman clip of `subject` against a convex counter-clockwise
/// polygon.
std::vector<Vec2> clip_polygon(const std::vector<Vec2>& subject, const std::vector<Vec2>& convex_clip);

/// Area of the intersection of two planar triangles (either orientation).
double triangle_overlap_area(const std::array<Vec2, 3>& a, const std::array<Vec2, 3>& b);

/// Area of the intersection of two triangles in space. Non-coplanar
/// triangles meet in at most a segment and give 0; coplanarity is judged
/// with tolerance `plane_tol` (length).
double triangle_overlap_area(const Triangle3& a, const Triangle3& b, double plane_tol);

/// Volume of the intersection of two tetrahedra.
double tetra_overlap_volume(const Tetra& a, const Tetra& b);

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);
double point_triangle_distance(const Vec3& p, const Triangle3& t);
double segment_segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1);
bool segment_intersects_triangle(const Vec3& p0, const Vec3& p1, const Triangle3& t);
double segment_triangle_distance(const Vec3& p0, const Vec3& p1, const Triangle3& t);
double triangle_triangle_distance(const Triangle3& a, const Triangle3& b);

struct AabbBox {
  Vec3 lo;
  Vec3 hi;
};

/// Uniform spatial hash over axis-aligned boxes of items.
class SpatialHash {
 public:
  SpatialHash(double cell, const std::vector<AabbBox>& boxes);

  double cell() const { return cell_; }
  std::size_t size() const { return boxes_.size(); }
  const AabbBox& box(std::size_t i) const { return boxes_[i]; }
  /// Items whose boxes meet the query box (no duplicates, sorted).
  std::vector<int> query(const AabbBox& box) const;
  /// All pairs i<j with intersecting boxes (sorted).
  std::vector<std::pair<int, int>> candidate_pairs() const;

 private:
  using Key = std::array<long long, 3>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return static_cast<std::size_t>(k[0] * 73856093LL ^ k[1] * 19349663LL ^ k[2] * 83492791LL);
    }
  };
  Key key(const Vec3& p) const;

  double cell_;
  std::vector<AabbBox> boxes_;
  std::unordered_map<Key, std::vector<int>, KeyHash> grid_;
};

AabbBox bounding_box(std::initializer_list<Vec3> pts, double pad = 0.0);

/// Triangles with a hash for distance queries.
class TriangleIndex {
 public:
  TriangleIndex() = default;
  TriangleIndex(std::vector<Triangle3> triangles, double cell);

  std::size_t size() const { return triangles_.size(); }
  const Triangle3& triangle(std::size_t i) const { return triangles_[i]; }

  /// Minimal distance from p to triangles accepted by `keep`, searching up
  /// to `radius`; returns +inf when nothing lies within radius.
  double distance(const Vec3& p, double radius, const std::function<bool(int)>& keep = {}) const;
  /// Nearest accepted triangle within radius, or -1.
  int nearest(const Vec3& p, double radius, const std::function<bool(int)>& keep = {}) const;
  /// Minimal distance from a triangle to accepted indexed triangles.
  double distance(const Triangle3& t, double radius, const std::function<bool(int)>& keep = {}) const;
  /// Minimal distance from a segment to accepted indexed triangles.
  double distance(const Vec3& p0, const Vec3& p1, double radius, const std::function<bool(int)>& keep = {}) const;

 private:
  std::vector<Triangle3> triangles_;
  std::unique_ptr<SpatialHash> hash_;
};

}  // namespace platecheck
