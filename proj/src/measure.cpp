#include "platecheck/measure.hpp"

#include "platecheck/clipping.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <unordered_map>

namespace platecheck {

const char* to_string(PremeasureKind k) {
  switch (k) {
    case PremeasureKind::hausdorff: return "hausdorff";
    case PremeasureKind::spherical: return "spherical";
    case PremeasureKind::packing: return "packing";
  }
  return "?";
}

PremeasureKind premeasure_kind_from_string(const std::string& s) {
  if (s == "hausdorff" || s == "H") return PremeasureKind::hausdorff;
  if (s == "spherical" || s == "S") return PremeasureKind::spherical;
  if (s == "packing" || s == "P") return PremeasureKind::packing;
  fail(Errc::invalid_argument, "unknown pre-measure kind '" + s + "'");
}

double omega(double m) { return std::pow(std::numbers::pi, 0.5 * m) / std::tgamma(0.5 * m + 1.0); }

namespace {

struct CellCloud {
  int dim = 2;
  double cell = 1.0;
  double half_diag = 0.0;
  std::vector<Vec3> centers;
};

CellCloud cloud_of(const PixelSet& set) {
  CellCloud c;
  c.dim = set.dimension();
  c.cell = set.cell();
  c.half_diag = 0.5 * set.cell() * std::sqrt(static_cast<double>(c.dim));
  for (const auto& ijk : set.occupied()) c.centers.push_back(set.cell_center(ijk[0], ijk[1], ijk[2]));
  return c;
}

// Distance from p to the farthest point of the cell centered at c.
double far_corner(const Vec3& p, const Vec3& c, double cell, int dim) {
  Vec3 d = (c - p).cwiseAbs();
  for (int i = 0; i < 3; ++i) d[i] = i < dim ? d[i] + 0.5 * cell : 0.0;
  return d.norm();
}

// Diameter of a union of cells. Only cells extreme along x within their
// grid line can hold hull vertices.
double cells_diameter(const std::vector<Vec3>& centers, double cell, int dim) {
  if (centers.empty()) return 0.0;
  std::map<std::pair<long, long>, std::pair<std::size_t, std::size_t>> lines;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    const std::pair<long, long> key{std::lround(centers[i].y() / cell), std::lround(centers[i].z() / cell)};
    auto it = lines.find(key);
    if (it == lines.end()) {
      lines.emplace(key, std::make_pair(i, i));
      continue;
    }
    if (centers[i].x() < centers[it->second.first].x()) it->second.first = i;
    if (centers[i].x() > centers[it->second.second].x()) it->second.second = i;
  }
  std::vector<std::size_t> ext;
  for (const auto& [key, mm] : lines) {
    ext.push_back(mm.first);
    if (mm.second != mm.first) ext.push_back(mm.second);
  }
  double best = 0.0;
  for (std::size_t a = 0; a < ext.size(); ++a)
    for (std::size_t b = a; b < ext.size(); ++b) {
      Vec3 d = (centers[ext[a]] - centers[ext[b]]).cwiseAbs();
      for (int i = 0; i < 3; ++i) d[i] = i < dim ? d[i] + cell : 0.0;
      best = std::max(best, d.norm());
    }
  return best;
}

// Covering lattice with covering radius r: hexagonal in 2D, body-centered
// cubic in 3D.
struct Lattice {
  Mat3 B = Mat3::Identity();
  Mat3 Binv = Mat3::Identity();
  Vec3 shift = Vec3::Zero();
  int dim = 2;

  Lattice(int dimension, double r, const Vec3& anchor, int shift_index) : dim(dimension) {
    if (dim == 2) {
      const double a = std::sqrt(3.0) * r;
      B << a, 0.5 * a, 0, 0, 1.5 * r, 0, 0, 0, 1;
    } else {
      const double a = 4.0 * r / std::sqrt(5.0);
      B << a, 0, 0.5 * a, 0, a, 0.5 * a, 0, 0, 0.5 * a;
    }
    Binv = B.inverse();
    static const Vec3 kShifts[4] = {Vec3(0, 0, 0), Vec3(0.5, 0, 0), Vec3(0, 0.5, 0), Vec3(0.5, 0.5, 0.5)};
    Vec3 s = kShifts[shift_index];
    if (dim == 2) s.z() = 0.0;
    shift = anchor + B * s;
  }

  std::array<long, 3> nearest(const Vec3& p, Vec3& point) const {
    Vec3 q = Binv * (p - shift);
    if (dim == 2) q.z() = 0.0;
    std::array<long, 3> base{std::lround(q.x()), std::lround(q.y()), std::lround(q.z())};
    std::array<long, 3> best = base;
    double best_d = std::numeric_limits<double>::infinity();
    const int kz = dim == 3 ? 1 : 0;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -kz; dz <= kz; ++dz) {
          std::array<long, 3> k{base[0] + dx, base[1] + dy, base[2] + dz};
          const Vec3 x = shift + B * Vec3(static_cast<double>(k[0]), static_cast<double>(k[1]), static_cast<double>(k[2]));
          const double d = (x - p).squaredNorm();
          if (d < best_d) {
            best_d = d;
            best = k;
            point = x;
          }
        }
    return best;
  }
};

struct KeyHash {
  std::size_t operator()(const std::array<long, 3>& k) const {
    return static_cast<std::size_t>(k[0] * 73856093L ^ k[1] * 19349663L ^ k[2] * 83492791L);
  }
};

struct Cover {
  std::vector<CoverBall> balls;
  std::vector<double> diameters;
};

Cover lattice_cover(const CellCloud& cloud, const Lattice& lat, bool want_diameters) {
  std::unordered_map<std::array<long, 3>, std::size_t, KeyHash> slot;
  std::vector<Vec3> points;
  std::vector<std::vector<Vec3>> members;
  for (const Vec3& c : cloud.centers) {
    Vec3 p;
    const auto key = lat.nearest(c, p);
    auto [it, fresh] = slot.emplace(key, points.size());
    if (fresh) {
      points.push_back(p);
      members.emplace_back();
    }
    members[it->second].push_back(c);
  }
  Cover cover;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double r = 0.0;
    for (const Vec3& c : members[i]) r = std::max(r, far_corner(points[i], c, cloud.cell, cloud.dim));
    cover.balls.push_back({points[i], r});
    if (want_diameters) cover.diameters.push_back(cells_diameter(members[i], cloud.cell, cloud.dim));
  }
  return cover;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& p, const Vec2& q) { return p.x() < q.x() || (p.x() == q.x() && p.y() < q.y()); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  auto turn = [](const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && turn(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double points_diameter(const std::vector<Vec2>& pts) {
  const std::vector<Vec2> h = convex_hull(pts);
  double best = 0.0;
  for (std::size_t a = 0; a < h.size(); ++a)
    for (std::size_t b = a + 1; b < h.size(); ++b) best = std::max(best, (h[a] - h[b]).norm());
  return best;
}

// Planar cover whose pieces are the set clipped to the Voronoi hexagons of
// the lattice, so piece radii never exceed r.
Cover clipped_cover(const CellCloud& cloud, const Lattice& lat, double r, bool want_diameters) {
  std::vector<Vec2> hexagon;
  for (int k = 0; k < 6; ++k) {
    const double t = std::numbers::pi / 6.0 + k * std::numbers::pi / 3.0;
    hexagon.emplace_back(r * std::cos(t), r * std::sin(t));
  }
  const double h = 0.5 * cloud.cell;
  std::unordered_map<std::array<long, 3>, std::size_t, KeyHash> slot;
  std::vector<Vec2> points;
  std::vector<std::vector<Vec2>> verts;
  for (const Vec3& c : cloud.centers) {
    const std::vector<Vec2> square{Vec2(c.x() - h, c.y() - h), Vec2(c.x() + h, c.y() - h), Vec2(c.x() + h, c.y() + h),
                                   Vec2(c.x() - h, c.y() + h)};
    const Vec3 q = lat.Binv * (c - lat.shift);
    const long i0 = std::lround(q.x()), j0 = std::lround(q.y());
    for (long di = -3; di <= 3; ++di)
      for (long dj = -3; dj <= 3; ++dj) {
        const std::array<long, 3> key{i0 + di, j0 + dj, 0};
        const Vec3 x = lat.shift + lat.B * Vec3(static_cast<double>(key[0]), static_cast<double>(key[1]), 0.0);
        if ((x - c).head<2>().norm() > r + cloud.half_diag) continue;
        std::vector<Vec2> hex = hexagon;
        for (auto& v : hex) v += x.head<2>();
        const std::vector<Vec2> piece = clip_polygon(square, hex);
        if (piece.size() < 3 || polygon_area(piece) <= 1e-12 * cloud.cell * cloud.cell) continue;
        auto [it, fresh] = slot.emplace(key, points.size());
        if (fresh) {
          points.push_back(x.head<2>());
          verts.emplace_back();
        }
        verts[it->second].insert(verts[it->second].end(), piece.begin(), piece.end());
      }
  }
  Cover cover;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double rad = 0.0;
    for (const Vec2& v : verts[i]) rad = std::max(rad, (v - points[i]).norm());
    cover.balls.push_back({Vec3(points[i].x(), points[i].y(), cloud.centers.front().z()), std::min(rad, r)});
    if (want_diameters) cover.diameters.push_back(points_diameter(verts[i]));
  }
  return cover;
}

double cover_cost(const Cover& cover, PremeasureKind kind, double m) {
  double sum = 0.0;
  for (std::size_t i = 0; i < cover.balls.size(); ++i) {
    const double r = kind == PremeasureKind::hausdorff ? 0.5 * cover.diameters[i] : cover.balls[i].radius;
    sum += std::pow(r, m);
  }
  return sum;
}

double bbox_diameter(const CellCloud& cloud) {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
  for (const Vec3& c : cloud.centers) {
    lo = lo.cwiseMin(c);
    hi = hi.cwiseMax(c);
  }
  return (hi - lo).norm() + 2.0 * cloud.half_diag;
}

}  // namespace

std::vector<CoverBall> greedy_ball_cover(const PixelSet& set, double delta) {
  const int dim = set.dimension();
  const double cell = set.cell();
  std::vector<CoverBall> balls;
  std::vector<bool> covered(set.size(), false);
  const int reach = static_cast<int>(std::ceil(delta / cell)) + 1;
  const auto& dims = set.dims();
  for (std::size_t idx = 0; idx < set.size(); ++idx) {
    if (!set.get_flat(idx) || covered[idx]) continue;
    const auto c = set.coords(idx);
    const Vec3 center = set.cell_center(c[0], c[1], c[2]);
    balls.push_back({center, delta});
    const int kr = dim == 3 ? reach : 0;
    for (int k = std::max(0, c[2] - kr); k <= std::min(dims[2] - 1, c[2] + kr); ++k)
      for (int j = std::max(0, c[1] - reach); j <= std::min(dims[1] - 1, c[1] + reach); ++j)
        for (int i = std::max(0, c[0] - reach); i <= std::min(dims[0] - 1, c[0] + reach); ++i) {
          const std::size_t t = set.index(i, j, k);
          if (set.get_flat(t) && !covered[t] && far_corner(center, set.cell_center(i, j, k), cell, dim) <= delta)
            covered[t] = true;
        }
  }
  return balls;
}

CoverEstimate premeasure(const PixelSet& set, PremeasureKind kind, double m, double delta) {
  if (!(m >= 0.0)) fail(Errc::invalid_argument, "pre-measure dimension must be nonnegative", m);
  if (!(delta > set.cell())) fail(Errc::invalid_argument, "pre-measure scale must exceed the pixel size", delta);
  if (kind == PremeasureKind::packing && !std::isfinite(delta))
    fail(Errc::invalid_argument, "packing pre-measure needs a finite scale");
  CoverEstimate est;
  est.kind = kind;
  est.m = m;
  est.delta = delta;
  est.omega = omega(m);
  const CellCloud cloud = cloud_of(set);
  if (cloud.centers.empty()) return est;
  const Vec3 anchor = set.origin();

  if (kind == PremeasureKind::packing) {
    std::vector<CoverBall> best = greedy_ball_cover(set, delta);
    const double r = delta - cloud.half_diag;
    if (r > 0.0)
      for (int s = 0; s < 4; ++s) {
        const Cover c = lattice_cover(cloud, Lattice(cloud.dim, r, anchor, s), false);
        if (c.balls.size() < best.size()) {
          best = c.balls;
          for (auto& b : best) b.radius = delta;
        }
      }
    est.cover = best;
    est.value = est.omega * std::pow(delta, m) * static_cast<double>(best.size());
    return est;
  }

  const bool hausdorff = kind == PremeasureKind::hausdorff;
  double best_cost = std::numeric_limits<double>::infinity();
  auto consider = [&](Cover c) {
    for (std::size_t i = 0; i < c.balls.size(); ++i)
      if ((hausdorff ? 0.5 * c.diameters[i] : c.balls[i].radius) > delta) return;
    const double cost = cover_cost(c, kind, m);
    if (cost < best_cost) {
      best_cost = cost;
      est.cover = std::move(c.balls);
      est.diameters = std::move(c.diameters);
    }
  };

  // One piece per cell.
  {
    Cover c;
    for (const Vec3& x : cloud.centers) {
      c.balls.push_back({x, cloud.half_diag});
      if (hausdorff) c.diameters.push_back(2.0 * cloud.half_diag);
    }
    consider(std::move(c));
  }
  // The whole set as one piece.
  const double extent = bbox_diameter(cloud);
  {
    const double diam = hausdorff ? cells_diameter(cloud.centers, cloud.cell, cloud.dim) : 0.0;
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
    for (const Vec3& x : cloud.centers) {
      lo = lo.cwiseMin(x);
      hi = hi.cwiseMax(x);
    }
    const Vec3 mid = 0.5 * (lo + hi);
    double r = 0.0;
    for (const Vec3& x : cloud.centers) r = std::max(r, far_corner(mid, x, cloud.cell, cloud.dim));
    if ((hausdorff ? 0.5 * diam : r) <= delta) {
      Cover c;
      c.balls.push_back({mid, r});
      if (hausdorff) c.diameters.push_back(diam);
      consider(std::move(c));
    }
  }
  for (int j = -4;; ++j) {
    const double r = cloud.cell * std::pow(2.0, 0.25 * j);
    if (r > extent) break;
    if (cloud.dim == 2) {
      if (r > delta) break;
      for (int s = 0; s < 4; ++s) consider(clipped_cover(cloud, Lattice(2, r, anchor, s), r, hausdorff));
    } else {
      if (r + cloud.half_diag > delta) break;
      if (r >= cloud.cell) for (int s = 0; s < 4; ++s) consider(lattice_cover(cloud, Lattice(3, r, anchor, s), hausdorff));
    }
  }
  est.value = est.omega * best_cost;
  return est;
}

ComparabilityReport comparability_check(const PixelSet& set, double m, double delta, double C) {
  ComparabilityReport r;
  r.hausdorff = premeasure(set, PremeasureKind::hausdorff, m, delta).value;
  r.spherical = premeasure(set, PremeasureKind::spherical, m, delta).value;
  r.packing = premeasure(set, PremeasureKind::packing, m, delta).value;
  r.spherical_fixed = omega(m) * std::pow(delta, m) * static_cast<double>(greedy_ball_cover(set, delta).size());
  r.ratio = r.hausdorff > 0.0 ? r.spherical / r.hausdorff : 1.0;
  r.packing_ok = r.packing <= r.spherical_fixed * (1.0 + 1e-12);
  r.flagged = r.ratio > C || r.ratio < 1.0 / C || !r.packing_ok;
  return r;
}

double perimeter(const PixelSet& set) {
  const int dim = set.dimension();
  std::size_t faces = 0;
  for (const auto& c : set.occupied())
    for (int d = 0; d < dim; ++d)
      for (int s : {-1, 1}) {
        auto n = c;
        n[d] += s;
        if (!set.get(n[0], n[1], n[2])) ++faces;
      }
  return static_cast<double>(faces) * std::pow(set.cell(), dim - 1);
}

namespace {

using Offsets = std::vector<std::array<int, 3>>;

PixelSet padded(const PixelSet& set, int pad) {
  const int dim = set.dimension();
  Vec3 origin = set.origin();
  std::array<int, 3> dims = set.dims();
  for (int d = 0; d < dim; ++d) {
    origin[d] -= pad * set.cell();
    dims[d] += 2 * pad;
  }
  PixelSet out(dim, origin, set.cell(), dims);
  for (const auto& c : set.occupied()) out.set(c[0] + pad, c[1] + pad, dim == 3 ? c[2] + pad : 0);
  return out;
}

PixelSet blank_like(const PixelSet& set) { return PixelSet(set.dimension(), set.origin(), set.cell(), set.dims()); }

Offsets ball_offsets(int radius, int dim) {
  Offsets out;
  const int kr = dim == 3 ? radius : 0;
  for (int k = -kr; k <= kr; ++k)
    for (int j = -radius; j <= radius; ++j)
      for (int i = -radius; i <= radius; ++i)
        if (i * i + j * j + k * k <= radius * radius) out.push_back({i, j, k});
  return out;
}

PixelSet dilate(const PixelSet& set, const Offsets& offs) {
  PixelSet out = blank_like(set);
  for (const auto& c : set.occupied())
    for (const auto& o : offs)
      if (out.in_range(c[0] + o[0], c[1] + o[1], c[2] + o[2])) out.set(c[0] + o[0], c[1] + o[1], c[2] + o[2]);
  return out;
}

PixelSet erode(const PixelSet& set, const Offsets& offs) {
  PixelSet out = blank_like(set);
  for (const auto& c : set.occupied()) {
    bool keep = true;
    for (const auto& o : offs)
      if (!set.get(c[0] + o[0], c[1] + o[1], c[2] + o[2])) {
        keep = false;
        break;
      }
    if (keep) out.set(c[0], c[1], c[2]);
  }
  return out;
}

template <class Visit>
void face_neighbors(const PixelSet& set, const std::array<int, 3>& c, Visit visit) {
  for (int d = 0; d < set.dimension(); ++d)
    for (int s : {-1, 1}) {
      auto n = c;
      n[d] += s;
      if (set.in_range(n[0], n[1], n[2])) visit(n);
    }
}

// Labels face-connected components of cells whose bit equals `value`.
std::vector<int> label(const PixelSet& set, bool value, int& count) {
  std::vector<int> lab(set.size(), -1);
  count = 0;
  for (std::size_t start = 0; start < set.size(); ++start) {
    if (set.get_flat(start) != value || lab[start] >= 0) continue;
    std::deque<std::size_t> queue{start};
    lab[start] = count;
    while (!queue.empty()) {
      const auto c = set.coords(queue.front());
      queue.pop_front();
      face_neighbors(set, c, [&](const std::array<int, 3>& n) {
        const std::size_t t = set.index(n[0], n[1], n[2]);
        if (set.get_flat(t) == value && lab[t] < 0) {
          lab[t] = count;
          queue.push_back(t);
        }
      });
    }
    ++count;
  }
  return lab;
}

PixelSet fill_holes(const PixelSet& set) {
  int count = 0;
  const std::vector<int> lab = label(set, false, count);
  std::vector<bool> outer(count, false);
  for (std::size_t t = 0; t < set.size(); ++t) {
    if (lab[t] < 0) continue;
    const auto c = set.coords(t);
    for (int d = 0; d < set.dimension(); ++d)
      if (c[d] == 0 || c[d] == set.dims()[d] - 1) outer[lab[t]] = true;
  }
  PixelSet out = set;
  for (std::size_t t = 0; t < set.size(); ++t)
    if (lab[t] >= 0 && !outer[lab[t]]) out.set_flat(t, true);
  return out;
}

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Cells meeting the convex hull of the occupied cells (planar), or the
// bounding box (3D).
PixelSet hull_of(const PixelSet& set) {
  PixelSet out = blank_like(set);
  const auto occ = set.occupied();
  if (occ.empty()) return out;
  if (set.dimension() == 3) {
    std::array<int, 3> lo = occ.front(), hi = occ.front();
    for (const auto& c : occ)
      for (int d = 0; d < 3; ++d) {
        lo[d] = std::min(lo[d], c[d]);
        hi[d] = std::max(hi[d], c[d]);
      }
    for (int k = lo[2]; k <= hi[2]; ++k)
      for (int j = lo[1]; j <= hi[1]; ++j)
        for (int i = lo[0]; i <= hi[0]; ++i) out.set(i, j, k);
    return out;
  }
  std::vector<Vec2> pts;
  for (const auto& c : occ)
    for (int a = 0; a <= 1; ++a)
      for (int b = 0; b <= 1; ++b) pts.emplace_back(c[0] + a, c[1] + b);
  std::sort(pts.begin(), pts.end(), [](const Vec2& p, const Vec2& q) { return p.x() < q.x() || (p.x() == q.x() && p.y() < q.y()); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  int lo0 = occ.front()[0], hi0 = lo0, lo1 = occ.front()[1], hi1 = lo1;
  for (const auto& c : occ) {
    lo0 = std::min(lo0, c[0]);
    hi0 = std::max(hi0, c[0]);
    lo1 = std::min(lo1, c[1]);
    hi1 = std::max(hi1, c[1]);
  }
  for (int j = lo1; j <= hi1; ++j)
    for (int i = lo0; i <= hi0; ++i) {
      const Vec2 p(i + 0.5, j + 0.5);
      bool inside = true;
      for (std::size_t e = 0; e < hull.size() && inside; ++e)
        inside = cross(hull[e], hull[(e + 1) % hull.size()], p) >= -1e-9;
      if (inside) out.set(i, j);
    }
  return out | set;
}

PixelSet component(const PixelSet& set, const std::vector<int>& lab, int id) {
  PixelSet out = blank_like(set);
  for (std::size_t t = 0; t < set.size(); ++t)
    if (lab[t] == id) out.set_flat(t, true);
  return out;
}

// Best of the single-set candidates; `closings` radii are 1, 2, 4, ...
std::pair<PixelSet, std::string> best_single(const PixelSet& set, int budget, double& best) {
  std::pair<PixelSet, std::string> choice{set, "set"};
  best = perimeter(set);
  auto consider = [&](PixelSet cand, std::string name) {
    const double p = perimeter(cand);
    if (p < best) {
      best = p;
      choice = {std::move(cand), std::move(name)};
    }
  };
  consider(fill_holes(set), "fill");
  for (int e = 0; e < budget; ++e) {
    const Offsets offs = ball_offsets(1 << e, set.dimension());
    consider(fill_holes(erode(dilate(set, offs), offs)), "closing:" + std::to_string(1 << e));
  }
  consider(fill_holes(hull_of(set)), "hull");
  return choice;
}

}  // namespace

Cap1Estimate cap1_estimate(const PixelSet& set, int budget) {
  if (budget < 0) fail(Errc::invalid_argument, "cap1 search budget must be nonnegative", budget);
  Cap1Estimate est;
  const int pad = budget > 0 ? (1 << (budget - 1)) + 2 : 2;
  const PixelSet grid = padded(set, pad);
  if (grid.empty()) {
    est.witness = grid;
    est.candidate = "empty";
    return est;
  }
  double best = 0.0;
  auto [witness, name] = best_single(grid, budget, best);
  est.value = best;
  est.witness = std::move(witness);
  est.candidate = std::move(name);
  auto consider = [&](const PixelSet& cand, const std::string& label_name) {
    const double p = perimeter(cand);
    if (p < est.value) {
      est.value = p;
      est.witness = cand;
      est.candidate = label_name;
    }
  };

  int count = 0;
  const std::vector<int> lab = label(grid, true, count);
  constexpr int kMaxComponents = 24;
  if (count > 1 && count <= kMaxComponents) {
    std::vector<PixelSet> parts;
    for (int c = 0; c < count; ++c) parts.push_back(component(grid, lab, c));
    PixelSet each = blank_like(grid);
    for (const auto& part : parts) {
      double p = 0.0;
      each = each | best_single(part, budget, p).first;
    }
    consider(fill_holes(each), "components");
    for (int a = 0; a < count; ++a)
      for (int b = a + 1; b < count; ++b)
        consider(fill_holes(grid | hull_of(parts[a] | parts[b])),
                 "merge:" + std::to_string(a) + "+" + std::to_string(b));
  }
  return est;
}

double cap1_lower_bound(const PixelSet& set) {
  require(set.dimension() == 2, "cap1 lower bound is planar only");
  const auto occ = set.occupied();
  if (occ.empty()) return 0.0;
  const double h = set.cell();
  double best = 0.0;
  for (int k = 0; k < 16; ++k) {
    const double t = std::numbers::pi * k / 16.0;
    const Vec2 u(std::cos(t), std::sin(t));
    const double half = 0.5 * h * (std::abs(u.x()) + std::abs(u.y()));
    std::vector<std::pair<double, double>> iv;
    for (const auto& c : occ) {
      const Vec3 x = set.cell_center(c[0], c[1]);
      const double s = x.x() * u.x() + x.y() * u.y();
      iv.emplace_back(s - half, s + half);
    }
    std::sort(iv.begin(), iv.end());
    double len = 0.0, lo = iv.front().first, hi = iv.front().second;
    for (const auto& [a, b] : iv) {
      if (a > hi) {
        len += hi - lo;
        lo = a;
        hi = b;
      } else {
        hi = std::max(hi, b);
      }
    }
    len += hi - lo;
    best = std::max(best, 2.0 * len);
  }
  return best;
}

IsoperimetricReport isoperimetric_check(const PixelSet& E, const PixelSet& U) {
  require(E.same_grid(U), "isoperimetric check needs E and U on one grid");
  const int n = U.dimension();
  const double cell_area = std::pow(U.cell(), n - 1);
  IsoperimetricReport r;
  PixelSet rim = blank_like(U);
  std::size_t faces = 0;
  for (const auto& c : U.occupied()) {
    const bool in = E.get(c[0], c[1], c[2]);
    (in ? r.inside : r.outside) += std::pow(U.cell(), n);
    if (!in) continue;
    face_neighbors(U, c, [&](const std::array<int, 3>& m) {
      if (U.get(m[0], m[1], m[2]) && !E.get(m[0], m[1], m[2])) {
        ++faces;
        rim.set(c[0], c[1], c[2]);
      }
    });
  }
  r.relative_perimeter = static_cast<double>(faces) * cell_area;
  r.relative_cap1 = rim.empty() ? 0.0 : cap1_estimate(rim).value;
  const double low = std::min(r.inside, r.outside);
  r.trivial = low == 0.0;
  r.left = std::pow(low, (n - 1.0) / n);
  auto ratio = [&](double right) {
    if (r.left == 0.0) return 0.0;
    return right > 0.0 ? r.left / right : std::numeric_limits<double>::infinity();
  };
  r.constant_perimeter = ratio(r.relative_perimeter);
  r.constant_cap1 = ratio(r.relative_cap1);
  return r;
}

IsoperimetricDrift isoperimetric_family(const std::vector<PixelSet>& family, const PixelSet& U, double max_drift) {
  IsoperimetricDrift out;
  out.reports.resize(family.size());
  parallel_for(family.size(), [&](std::size_t i) { out.reports[i] = isoperimetric_check(family[i], U); });
  double lo_p = std::numeric_limits<double>::infinity(), hi_p = 0.0, lo_c = lo_p, hi_c = 0.0;
  for (const auto& r : out.reports) {
    if (r.trivial) continue;
    lo_p = std::min(lo_p, r.constant_perimeter);
    hi_p = std::max(hi_p, r.constant_perimeter);
    lo_c = std::min(lo_c, r.constant_cap1);
    hi_c = std::max(hi_c, r.constant_cap1);
  }
  if (hi_p > 0.0) out.drift_perimeter = hi_p / lo_p;
  if (hi_c > 0.0) out.drift_cap1 = hi_c / lo_c;
  out.flagged = !(out.drift_perimeter <= max_drift) || !(out.drift_cap1 <= max_drift);
  return out;
}

Cap1Chain cap1_hausdorff_chain(const std::vector<PixelSet>& family) {
  Cap1Chain chain;
  chain.cap1.resize(family.size());
  chain.hausdorff.resize(family.size());
  parallel_for(family.size(), [&](std::size_t i) {
    chain.cap1[i] = cap1_estimate(family[i]).value;
    const double m = family[i].dimension() - 1.0;
    chain.hausdorff[i] =
        premeasure(family[i], PremeasureKind::hausdorff, m, std::numeric_limits<double>::infinity()).value;
  });
  for (std::size_t i = 0; i < family.size(); ++i)
    if (chain.hausdorff[i] > 0.0) chain.C = std::max(chain.C, chain.cap1[i] / chain.hausdorff[i]);
  return chain;
}

MonotonicityReport premeasure_monotonicity(const std::vector<PixelSet>& sets, const std::vector<PixelSet>& nested,
                                           double m, const std::vector<double>& deltas) {
  MonotonicityReport rep;
  std::vector<double> ds = deltas;
  std::sort(ds.begin(), ds.end());
  constexpr double kSlack = 1e-12;
  for (const auto& set : sets)
    for (auto kind : {PremeasureKind::hausdorff, PremeasureKind::spherical, PremeasureKind::packing}) {
      double prev = std::numeric_limits<double>::infinity();
      for (double d : ds) {
        if (kind == PremeasureKind::packing && !std::isfinite(d)) continue;
        const double v = premeasure(set, kind, m, d).value;
        ++rep.checks;
        if (v > prev * (1 + kSlack)) ++(kind == PremeasureKind::packing ? rep.packing_delta_violations : rep.delta_violations);
        prev = v;
      }
    }
  for (std::size_t i = 1; i < nested.size(); ++i)
    for (auto kind : {PremeasureKind::hausdorff, PremeasureKind::spherical})
      for (double d : ds) {
        ++rep.checks;
        if (premeasure(nested[i - 1], kind, m, d).value > premeasure(nested[i], kind, m, d).value * (1 + kSlack))
          ++rep.set_violations;
      }
  return rep;
}

}  // namespace platecheck
