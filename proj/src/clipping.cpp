#include "platecheck/clipping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace platecheck {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

std::array<Vec2, 3> ccw(std::array<Vec2, 3> t) {
  if (cross2(t[1] - t[0], t[2] - t[0]) < 0.0) std::swap(t[1], t[2]);
  return t;
}

struct Plane {
  Vec3 n;
  double d;  // inside: n.p <= d
};

// Convex polyhedron as a list of planar faces.
using Face = std::vector<Vec3>;

std::vector<Face> tetra_faces(const Tetra& t) {
  return {{t[1], t[2], t[3]}, {t[0], t[3], t[2]}, {t[0], t[1], t[3]}, {t[0], t[2], t[1]}};
}

std::vector<Plane> tetra_planes(const Tetra& t) {
  const Vec3 c = (t[0] + t[1] + t[2] + t[3]) / 4.0;
  std::vector<Plane> planes;
  for (const Face& f : tetra_faces(t)) {
    Vec3 n = (f[1] - f[0]).cross(f[2] - f[0]);
    const double len = n.norm();
    if (len == 0.0) continue;
    n /= len;
    double d = n.dot(f[0]);
    if (n.dot(c) > d) {
      n = -n;
      d = -d;
    }
    planes.push_back({n, d});
  }
  return planes;
}

std::vector<Face> clip_polyhedron(const std::vector<Face>& faces, const Plane& pl, double eps) {
  bool any_out = false, any_in = false;
  for (const Face& f : faces)
    for (const auto& p : f) {
      const double d = pl.n.dot(p) - pl.d;
      any_out = any_out || d > eps;
      any_in = any_in || d < -eps;
    }
  if (!any_out) return faces;
  if (!any_in) return {};
  std::vector<Face> out;
  std::vector<Vec3> cap;
  for (const Face& f : faces) {
    Face g;
    const std::size_t n = f.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3& a = f[i];
      const Vec3& b = f[(i + 1) % n];
      const double da = pl.n.dot(a) - pl.d, db = pl.n.dot(b) - pl.d;
      if (da <= eps) g.push_back(a);
      if ((da < -eps && db > eps) || (da > eps && db < -eps)) {
        const Vec3 x = a + (b - a) * (da / (da - db));
        g.push_back(x);
        cap.push_back(x);
      } else if (std::abs(da) <= eps) {
        cap.push_back(a);
      }
    }
    if (g.size() >= 3) out.push_back(std::move(g));
  }
  if (cap.size() >= 3) {
    Vec3 c = Vec3::Zero();
    for (const auto& p : cap) c += p;
    c /= static_cast<double>(cap.size());
    Vec3 u = pl.n.unitOrthogonal(), v = pl.n.cross(u);
    std::sort(cap.begin(), cap.end(), [&](const Vec3& a, const Vec3& b) {
      return std::atan2((a - c).dot(v), (a - c).dot(u)) < std::atan2((b - c).dot(v), (b - c).dot(u));
    });
    Face dedup;
    for (const auto& p : cap)
      if (dedup.empty() || (p - dedup.back()).norm() > eps) dedup.push_back(p);
    while (dedup.size() > 1 && (dedup.front() - dedup.back()).norm() <= eps) dedup.pop_back();
    if (dedup.size() >= 3) out.push_back(std::move(dedup));
  }
  return out;
}

double polyhedron_volume(const std::vector<Face>& faces) {
  if (faces.size() < 4) return 0.0;
  Vec3 c = Vec3::Zero();
  std::size_t count = 0;
  for (const Face& f : faces)
    for (const auto& p : f) {
      c += p;
      ++count;
    }
  c /= static_cast<double>(count);
  double vol = 0.0;
  for (const Face& f : faces)
    for (std::size_t i = 1; i + 1 < f.size(); ++i)
      vol += std::abs((f[i] - f[0]).cross(f[i + 1] - f[0]).dot(f[0] - c)) / 6.0;
  return vol;
}

}  // namespace

double polygon_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross2(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * std::abs(a);
}

std::vector<Vec2> clip_polygon(const std::vector<Vec2>& subject, const std::vector<Vec2>& convex_clip) {
  std::vector<Vec2> out = subject;
  const std::size_t m = convex_clip.size();
  for (std::size_t e = 0; e < m && !out.empty(); ++e) {
    const Vec2& a = convex_clip[e];
    const Vec2 edge = convex_clip[(e + 1) % m] - a;
    std::vector<Vec2> in = std::move(out);
    out.clear();
    for (std::size_t i = 0; i < in.size(); ++i) {
      const Vec2& p = in[i];
      const Vec2& q = in[(i + 1) % in.size()];
      const double sp = cross2(edge, p - a), sq = cross2(edge, q - a);
      if (sp >= 0.0) out.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) out.push_back(p + (q - p) * (sp / (sp - sq)));
    }
  }
  return out;
}

double triangle_overlap_area(const std::array<Vec2, 3>& a, const std::array<Vec2, 3>& b) {
  const auto ta = ccw(a), tb = ccw(b);
  return polygon_area(clip_polygon({ta.begin(), ta.end()}, {tb.begin(), tb.end()}));
}

double triangle_overlap_area(const Triangle3& a, const Triangle3& b, double plane_tol) {
  Vec3 n = (a[1] - a[0]).cross(a[2] - a[0]);
  const double len = n.norm();
  if (len == 0.0) return 0.0;
  n /= len;
  for (const auto& p : b)
    if (std::abs(n.dot(p - a[0])) > plane_tol) return 0.0;
  const Vec3 u = n.unitOrthogonal(), v = n.cross(u);
  auto proj = [&](const Triangle3& t) {
    return std::array<Vec2, 3>{Vec2((t[0] - a[0]).dot(u), (t[0] - a[0]).dot(v)),
                               Vec2((t[1] - a[0]).dot(u), (t[1] - a[0]).dot(v)),
                               Vec2((t[2] - a[0]).dot(u), (t[2] - a[0]).dot(v))};
  };
  return triangle_overlap_area(proj(a), proj(b));
}

double tetra_overlap_volume(const Tetra& a, const Tetra& b) {
  Vec3 lo_a = a[0], hi_a = a[0], lo_b = b[0], hi_b = b[0];
  double scale = 0.0;
  for (int i = 1; i < 4; ++i) {
    lo_a = lo_a.cwiseMin(a[i]);
    hi_a = hi_a.cwiseMax(a[i]);
    lo_b = lo_b.cwiseMin(b[i]);
    hi_b = hi_b.cwiseMax(b[i]);
  }
  if ((lo_a.array() > hi_b.array()).any() || (lo_b.array() > hi_a.array()).any()) return 0.0;
  scale = std::max((hi_a - lo_a).maxCoeff(), (hi_b - lo_b).maxCoeff());
  const double eps = 1e-13 * scale;
  std::vector<Face> poly = tetra_faces(a);
  for (const Plane& pl : tetra_planes(b)) {
    poly = clip_polyhedron(poly, pl, eps);
    if (poly.size() < 4) return 0.0;
  }
  return polyhedron_volume(poly);
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double l2 = ab.squaredNorm();
  const double t = l2 > 0.0 ? std::clamp((p - a).dot(ab) / l2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

double point_triangle_distance(const Vec3& p, const Triangle3& t) {
  const Vec3 n = (t[1] - t[0]).cross(t[2] - t[0]);
  const double n2 = n.squaredNorm();
  if (n2 > 0.0) {
    const Vec3 q = p - n * (n.dot(p - t[0]) / n2);
    const double c0 = (t[1] - t[0]).cross(q - t[0]).dot(n);
    const double c1 = (t[2] - t[1]).cross(q - t[1]).dot(n);
    const double c2 = (t[0] - t[2]).cross(q - t[2]).dot(n);
    if (c0 >= 0.0 && c1 >= 0.0 && c2 >= 0.0) return std::abs(n.dot(p - t[0])) / std::sqrt(n2);
  }
  return std::min({point_segment_distance(p, t[0], t[1]), point_segment_distance(p, t[1], t[2]),
                   point_segment_distance(p, t[2], t[0])});
}

double segment_segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
  const Vec3 d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
  const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  double s = 0.0, t = 0.0;
  if (a <= 0.0 && e <= 0.0) return r.norm();
  if (a <= 0.0) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 0.0) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2), denom = a * e - b * b;
      s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p0 + s * d1) - (q0 + t * d2)).norm();
}

bool segment_intersects_triangle(const Vec3& p0, const Vec3& p1, const Triangle3& t) {
  const Vec3 n = (t[1] - t[0]).cross(t[2] - t[0]);
  const double d0 = n.dot(p0 - t[0]), d1 = n.dot(p1 - t[0]);
  if ((d0 > 0.0 && d1 > 0.0) || (d0 < 0.0 && d1 < 0.0)) return false;
  if (d0 == d1) return false;
  const Vec3 q = p0 + (p1 - p0) * (d0 / (d0 - d1));
  const double c0 = (t[1] - t[0]).cross(q - t[0]).dot(n);
  const double c1 = (t[2] - t[1]).cross(q - t[1]).dot(n);
  const double c2 = (t[0] - t[2]).cross(q - t[2]).dot(n);
  return c0 >= 0.0 && c1 >= 0.0 && c2 >= 0.0;
}

double segment_triangle_distance(const Vec3& p0, const Vec3& p1, const Triangle3& t) {
  if (segment_intersects_triangle(p0, p1, t)) return 0.0;
  return std::min({point_triangle_distance(p0, t), point_triangle_distance(p1, t),
                   segment_segment_distance(p0, p1, t[0], t[1]), segment_segment_distance(p0, p1, t[1], t[2]),
                   segment_segment_distance(p0, p1, t[2], t[0])});
}

double triangle_triangle_distance(const Triangle3& a, const Triangle3& b) {
  double d = kInf;
  for (int i = 0; i < 3; ++i) {
    d = std::min(d, segment_triangle_distance(a[i], a[(i + 1) % 3], b));
    d = std::min(d, segment_triangle_distance(b[i], b[(i + 1) % 3], a));
    if (d == 0.0) return 0.0;
  }
  return d;
}

// ---- hashing ----------------------------------------------------------------

AabbBox bounding_box(std::initializer_list<Vec3> pts, double pad) {
  AabbBox b{*pts.begin(), *pts.begin()};
  for (const auto& p : pts) {
    b.lo = b.lo.cwiseMin(p);
    b.hi = b.hi.cwiseMax(p);
  }
  b.lo.array() -= pad;
  b.hi.array() += pad;
  return b;
}

SpatialHash::SpatialHash(double cell, const std::vector<AabbBox>& boxes) : cell_(cell), boxes_(boxes) {
  require(cell_ > 0.0 && std::isfinite(cell_), "spatial hash cell must be positive");
  for (std::size_t i = 0; i < boxes_.size(); ++i) {
    const Key a = key(boxes_[i].lo), b = key(boxes_[i].hi);
    for (long long x = a[0]; x <= b[0]; ++x)
      for (long long y = a[1]; y <= b[1]; ++y)
        for (long long z = a[2]; z <= b[2]; ++z) grid_[{x, y, z}].push_back(static_cast<int>(i));
  }
}

SpatialHash::Key SpatialHash::key(const Vec3& p) const {
  return {static_cast<long long>(std::floor(p.x() / cell_)), static_cast<long long>(std::floor(p.y() / cell_)),
          static_cast<long long>(std::floor(p.z() / cell_))};
}

std::vector<int> SpatialHash::query(const AabbBox& box) const {
  std::vector<int> out;
  const Key a = key(box.lo), b = key(box.hi);
  auto visit = [&](const std::vector<int>& items) {
    for (int i : items) {
      const AabbBox& o = boxes_[i];
      if ((o.lo.array() <= box.hi.array()).all() && (box.lo.array() <= o.hi.array()).all()) out.push_back(i);
    }
  };
  const double range = double(b[0] - a[0] + 1) * double(b[1] - a[1] + 1) * double(b[2] - a[2] + 1);
  if (range > static_cast<double>(grid_.size())) {
    for (const auto& [k, items] : grid_) {
      bool inside = true;
      for (int d = 0; d < 3; ++d) inside = inside && k[d] >= a[d] && k[d] <= b[d];
      if (inside) visit(items);
    }
  } else {
    for (long long x = a[0]; x <= b[0]; ++x)
      for (long long y = a[1]; y <= b[1]; ++y)
        for (long long z = a[2]; z <= b[2]; ++z) {
          auto it = grid_.find({x, y, z});
          if (it != grid_.end()) visit(it->second);
        }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::pair<int, int>> SpatialHash::candidate_pairs() const {
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < boxes_.size(); ++i)
    for (int j : query(boxes_[i]))
      if (j > static_cast<int>(i)) pairs.emplace_back(static_cast<int>(i), j);
  return pairs;
}

TriangleIndex::TriangleIndex(std::vector<Triangle3> triangles, double cell) : triangles_(std::move(triangles)) {
  std::vector<AabbBox> boxes;
  boxes.reserve(triangles_.size());
  for (const auto& t : triangles_) boxes.push_back(bounding_box({t[0], t[1], t[2]}));
  hash_ = std::make_unique<SpatialHash>(cell, boxes);
}

int TriangleIndex::nearest(const Vec3& p, double radius, const std::function<bool(int)>& keep) const {
  if (!hash_) return -1;
  double best = kInf;
  int arg = -1;
  for (int i : hash_->query(bounding_box({p}, radius))) {
    if (keep && !keep(i)) continue;
    const double d = point_triangle_distance(p, triangles_[i]);
    if (d < best) {
      best = d;
      arg = i;
    }
  }
  return best <= radius ? arg : -1;
}

double TriangleIndex::distance(const Vec3& p, double radius, const std::function<bool(int)>& keep) const {
  const int i = nearest(p, radius, keep);
  return i < 0 ? kInf : point_triangle_distance(p, triangles_[i]);
}

double TriangleIndex::distance(const Triangle3& t, double radius, const std::function<bool(int)>& keep) const {
  if (!hash_) return kInf;
  double best = kInf;
  for (int i : hash_->query(bounding_box({t[0], t[1], t[2]}, radius))) {
    if (keep && !keep(i)) continue;
    best = std::min(best, triangle_triangle_distance(t, triangles_[i]));
    if (best == 0.0) break;
  }
  return best <= radius ? best : kInf;
}

double TriangleIndex::distance(const Vec3& p0, const Vec3& p1, double radius, const std::function<bool(int)>& keep) const {
  if (!hash_) return kInf;
  double best = kInf;
  for (int i : hash_->query(bounding_box({p0, p1}, radius))) {
    if (keep && !keep(i)) continue;
    best = std::min(best, segment_triangle_distance(p0, p1, triangles_[i]));
    if (best == 0.0) break;
  }
  return best <= radius ? best : kInf;
}

}  // namespace platecheck
