#include "platecheck/interpenetration.hpp"
#include "platecheck/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace platecheck {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double box_diameter(const Box& b) { return (b.hi - b.lo).norm(); }

std::vector<Triangle3> image_triangles(const PiecewiseAffineMap& map) {
  const auto& dom = map.domain();
  require(dom.dimension() == 2, "image triangles need a planar domain");
  std::vector<Triangle3> out;
  out.reserve(dom.simplex_count());
  for (const Simplex& s : dom.simplices()) out.push_back({map.value(s[0]), map.value(s[1]), map.value(s[2])});
  return out;
}

TriangleIndex image_index(const PiecewiseAffineMap& map) {
  const double cell = std::max(map.image_mesh_size(), 1e-9 * std::max(box_diameter(map.image_bounds()), 1e-300));
  return TriangleIndex(image_triangles(map), cell);
}

AabbBox box_of(const std::vector<Vec3>& pts) {
  AabbBox b{pts[0], pts[0]};
  for (const Vec3& p : pts) {
    b.lo = b.lo.cwiseMin(p);
    b.hi = b.hi.cwiseMax(p);
  }
  return b;
}

std::vector<Vec3> simplex_image(const PiecewiseAffineMap& map, std::size_t s) {
  const Simplex& sx = map.domain().simplex(s);
  std::vector<Vec3> pts;
  for (int i = 0; i < map.domain().vertices_per_simplex(); ++i) pts.push_back(map.value(sx[i]));
  return pts;
}

// Minimal distance from the given facet images to an index, capped.
double capped_distance(const std::vector<Triangle3>& facets, const TriangleIndex& index, double cap) {
  double best = cap;
  for (const Triangle3& t : facets) best = std::min(best, index.distance(t, best));
  return best;
}

}  // namespace

InvertibilityReport invertibility_ae_check(const PiecewiseAffineMap& map, std::size_t max_witnesses) {
  const auto& dom = map.domain();
  const int dd = dom.dimension();
  const int td = map.target_dimension();
  require((dd == 2 && (td == 2 || td == 3)) || (dd == 3 && td == 3), "unsupported dimensions for invertibility check");
  const std::size_t ns = dom.simplex_count();
  InvertibilityReport rep;
  if (ns < 2) return rep;
  std::vector<AabbBox> boxes(ns);
  for (std::size_t s = 0; s < ns; ++s) boxes[s] = box_of(simplex_image(map, s));
  const double diam = std::max(box_diameter(map.image_bounds()), 1e-300);
  const double cell = std::max(map.image_mesh_size(), 1e-9 * diam);
  const double plane_tol = 1e-9 * diam;
  SpatialHash hash(cell, boxes);
  const auto pairs = hash.candidate_pairs();
  rep.candidate_pairs = pairs.size();
  std::vector<OverlapPair> found;
  for (const auto& [a, b] : pairs) {
    const auto pa = simplex_image(map, a);
    const auto pb = simplex_image(map, b);
    double m = 0.0;
    if (dd == 3) {
      m = tetra_overlap_volume({pa[0], pa[1], pa[2], pa[3]}, {pb[0], pb[1], pb[2], pb[3]});
    } else if (td == 2) {
      m = triangle_overlap_area(std::array<Vec2, 3>{pa[0].head<2>(), pa[1].head<2>(), pa[2].head<2>()},
                                std::array<Vec2, 3>{pb[0].head<2>(), pb[1].head<2>(), pb[2].head<2>()});
    } else {
      m = triangle_overlap_area(Triangle3{pa[0], pa[1], pa[2]}, Triangle3{pb[0], pb[1], pb[2]}, plane_tol);
    }
    const double scale = std::min(dom.volume(a), dom.volume(b));
    if (m <= 1e-12 * scale) continue;
    rep.overlap += m;
    found.push_back({static_cast<std::size_t>(a), static_cast<std::size_t>(b), m});
  }
  std::sort(found.begin(), found.end(), [](const OverlapPair& x, const OverlapPair& y) {
    return x.measure != y.measure ? x.measure > y.measure : std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  if (found.size() > max_witnesses) found.resize(max_witnesses);
  rep.witnesses = std::move(found);
  return rep;
}

const char* to_string(CapMode m) { return m == CapMode::cone ? "cone" : "normal_offset"; }

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::simple_interpenetration: return "simple-interpenetration";
    case Verdict::boundary_degenerate: return "boundary-degenerate";
    case Verdict::no_evidence: break;
  }
  return "no-evidence";
}

Extension build_extension(const PiecewiseAffineMap& u1, const ExtensionSpec& spec) {
  require(u1.domain().dimension() == 2 && u1.target_dimension() == 3, "extension needs a surface map into 3D");
  require(spec.levels >= 2, "extension needs at least two levels");
  require(spec.thickness > 0.0, "extension thickness must be positive");
  Extension ext;
  ext.prism = extrude_cylinder(u1.domain_ptr(), spec.levels, 1.0, 0.0);
  const std::size_t nb = u1.domain().vertex_count();
  std::vector<Vec3> normals;
  if (spec.mode == CapMode::normal_offset) normals = vertex_normals(u1);
  std::vector<Vec3> values(ext.prism.mesh->vertex_count());
  for (int l = 0; l <= spec.levels; ++l) {
    const double t = static_cast<double>(l) / spec.levels;
    for (std::size_t v = 0; v < nb; ++v) {
      const Vec3& p = u1.value(v);
      values[ext.prism.vertex_index(l, static_cast<int>(v))] =
          spec.mode == CapMode::cone ? Vec3((1.0 - t) * p + t * spec.apex) : Vec3(p + t * spec.thickness * normals[v]);
    }
  }
  ext.map = std::make_shared<PiecewiseAffineMap>(ext.prism.mesh, std::move(values), 3);
  return ext;
}

Extension with_base(const Extension& ext, const std::vector<Vec3>& base_values) {
  const std::size_t nb = ext.prism.base_vertex_count();
  require(base_values.size() == nb, "base values must match the base vertex count");
  std::vector<Vec3> values = ext.map->values();
  std::copy(base_values.begin(), base_values.end(), values.begin());
  Extension out;
  out.prism = ext.prism;
  out.map = std::make_shared<PiecewiseAffineMap>(ext.prism.mesh, std::move(values), 3);
  return out;
}

namespace {

void require_disjoint(const TriangulatedDomain& a, const TriangulatedDomain& b) {
  std::vector<AabbBox> boxes;
  for (std::size_t s = 0; s < b.simplex_count(); ++s) {
    const Simplex& sx = b.simplex(s);
    boxes.push_back(box_of({b.vertex(sx[0]), b.vertex(sx[1]), b.vertex(sx[2])}));
  }
  SpatialHash hash(std::max(b.mesh_size(), 1e-12), boxes);
  for (std::size_t s = 0; s < a.simplex_count(); ++s) {
    const Simplex& sx = a.simplex(s);
    const std::array<Vec2, 3> ta{a.vertex(sx[0]).head<2>(), a.vertex(sx[1]).head<2>(), a.vertex(sx[2]).head<2>()};
    for (int t : hash.query(box_of({a.vertex(sx[0]), a.vertex(sx[1]), a.vertex(sx[2])}))) {
      const Simplex& sy = b.simplex(t);
      const std::array<Vec2, 3> tb{b.vertex(sy[0]).head<2>(), b.vertex(sy[1]).head<2>(), b.vertex(sy[2]).head<2>()};
      if (triangle_overlap_area(ta, tb) > 1e-12 * std::min(a.volume(s), b.volume(t)))
        fail(Errc::invalid_argument, "U1 and U2 overlap");
    }
  }
}

}  // namespace

InterpenetrationReport check_simple_interpenetration(const PiecewiseAffineMap& u1, const PiecewiseAffineMap& u2,
                                                     const ExtensionSpec& spec, const SimpleOptions& options) {
  return check_simple_interpenetration(build_extension(u1, spec), u1, u2, options);
}

InterpenetrationReport check_simple_interpenetration(const Extension& ext, const PiecewiseAffineMap& u1,
                                                     const PiecewiseAffineMap& u2, const SimpleOptions& options) {
  require(u2.domain().dimension() == 2 && u2.target_dimension() == 3, "u2 must map a planar domain into 3D");
  require(options.grid >= 2, "grid must have at least two samples per side");
  require_disjoint(u1.domain(), u2.domain());
  InterpenetrationReport rep;
  const std::size_t nb = ext.prism.base_vertex_count();
  const auto& mesh = *ext.prism.mesh;
  std::vector<Triangle3> off_rim, off_base;
  for (const Facet& f : mesh.boundary_facets()) {
    const auto img = ext.map->facet_image(f);
    const Triangle3 t{img[0], img[1], img[2]};
    const bool any0 = static_cast<std::size_t>(f[0]) < nb || static_cast<std::size_t>(f[1]) < nb ||
                      static_cast<std::size_t>(f[2]) < nb;
    const bool all0 = static_cast<std::size_t>(f[0]) < nb && static_cast<std::size_t>(f[1]) < nb &&
                      static_cast<std::size_t>(f[2]) < nb;
    if (!any0) off_rim.push_back(t);
    if (!all0) off_base.push_back(t);
  }
  const double diam = std::max(box_diameter(ext.map->image_bounds()), 1e-300);
  rep.margin_cap = 0.05 * diam;
  rep.margin_base = capped_distance(off_rim, image_index(u1), rep.margin_cap);
  rep.margin_u2 = capped_distance(off_base, image_index(u2), rep.margin_cap);

  const GridSamples grid = grid_samples(u2.domain(), options.grid, options.grid);
  rep.field = degree_field(*ext.map, u2, grid, options.degree);
  const double area = u2.domain().total_volume();
  rep.threshold = options.min_fraction * area;
  const std::size_t n = rep.field.size();
  std::unique_ptr<bool[]> hits(new bool[n]);
  for (std::size_t i = 0; i < n; ++i) hits[i] = rep.field.excluded[i];
  rep.excluded = measure_of(std::span<const bool>(hits.get(), n), area);
  std::vector<int> qualifying;
  for (const auto& [k, count] : rep.field.level_counts()) {
    for (std::size_t i = 0; i < n; ++i) hits[i] = !rep.field.excluded[i] && rep.field.results[i].value == k;
    LevelMeasure lm;
    lm.k = k;
    lm.samples = count;
    lm.measure = measure_of(std::span<const bool>(hits.get(), n), area);
    rep.levels.push_back(lm);
    if (lm.measure.value - lm.measure.radius > rep.threshold) qualifying.push_back(k);
  }
  const double tol = 1e-9 * diam;
  if (rep.margin_base <= tol || rep.margin_u2 <= tol) {
    rep.verdict = Verdict::boundary_degenerate;
    return rep;
  }
  if (qualifying.size() >= 2) {
    // Prefer a pair of nonzero degrees.
    std::stable_partition(qualifying.begin(), qualifying.end(), [](int k) { return k != 0; });
    rep.witnesses = {qualifying[0], qualifying[1]};
    rep.uses_k0 = qualifying[0] == 0 || qualifying[1] == 0;
    rep.verdict = Verdict::simple_interpenetration;
  }
  return rep;
}

double boundary_distance(const TriangulatedDomain& domain, const Vec3& x) {
  require(domain.dimension() == 2, "boundary distance needs a planar domain");
  double best = kInf;
  for (const Facet& f : domain.boundary_facets())
    best = std::min(best, point_segment_distance(x, domain.vertex(f[0]), domain.vertex(f[1])));
  return best;
}

double inradius(const TriangulatedDomain& domain) {
  double best = 0.0;
  for (const Vec3& v : domain.vertices()) best = std::max(best, boundary_distance(domain, v));
  return best;
}

double cutoff(const TriangulatedDomain& domain, const Vec3& x, double delta) {
  require(delta > 0.0, "cutoff width must be positive");
  const double t = std::min(boundary_distance(domain, x) / delta, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

CollarChoice choose_collar(const PiecewiseAffineMap& u1, const PiecewiseAffineMap& u2, double delta,
                           int max_halvings) {
  const auto& dom = u1.domain();
  CollarChoice out;
  out.delta = delta > 0.0 ? delta : 0.1 * inradius(dom);
  std::vector<double> dist(dom.vertex_count());
  for (std::size_t v = 0; v < dist.size(); ++v) dist[v] = boundary_distance(dom, dom.vertex(v));
  const TriangleIndex index = image_index(u2);
  const double cap = 0.05 * std::max(box_diameter(u1.image_bounds()), box_diameter(u2.image_bounds()));
  const double tol = 1e-9 * cap;
  for (out.halvings = 0;; ++out.halvings) {
    std::vector<Triangle3> collar;
    for (const Simplex& s : dom.simplices())
      if (dist[s[0]] < out.delta || dist[s[1]] < out.delta || dist[s[2]] < out.delta)
        collar.push_back({u1.value(s[0]), u1.value(s[1]), u1.value(s[2])});
    out.clearance = capped_distance(collar, index, cap);
    out.ok = out.clearance > tol;
    if (out.ok || out.halvings >= max_halvings) break;
    out.delta *= 0.5;
  }
  return out;
}

namespace {

// Barycentric weights of the point of triangle t closest to p.
Vec3 closest_weights(const Vec3& p, const Triangle3& t) {
  const Vec3 ab = t[1] - t[0], ac = t[2] - t[0], ap = p - t[0];
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return {1, 0, 0};
  const Vec3 bp = p - t[1];
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return {0, 1, 0};
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) {
    const double v = d1 / (d1 - d3);
    return {1 - v, v, 0};
  }
  const Vec3 cp = p - t[2];
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return {0, 0, 1};
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) {
    const double w = d2 / (d2 - d6);
    return {1 - w, 0, w};
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return {0, 1 - w, w};
  }
  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return {1 - v - w, v, w};
}

struct Coincidence {
  const PiecewiseAffineMap& u;
  TriangleIndex index;

  double domain_distance(int t, const Vec3& x) const {
    const Simplex& s = u.domain().simplex(t);
    const auto& d = u.domain();
    return point_triangle_distance(x, {d.vertex(s[0]), d.vertex(s[1]), d.vertex(s[2])});
  }

  // Preimage of the nearest point to p on image triangles accepted by keep.
  std::optional<Vec3> project(const Vec3& p, double radius, const std::function<bool(int)>& keep) const {
    const int t = index.nearest(p, radius, keep);
    if (t < 0) return std::nullopt;
    const Vec3 w = closest_weights(p, index.triangle(t));
    const Simplex& s = u.domain().simplex(t);
    return Vec3(w[0] * u.domain().vertex(s[0]) + w[1] * u.domain().vertex(s[1]) + w[2] * u.domain().vertex(s[2]));
  }
};

// Degree samples stay inside the polyhedral sphere.
constexpr double kSampleRadius = 0.45;

Vec3 physical_to_domain(const Vec3& p, double h) { return {p.x(), p.y(), p.z() / h}; }

std::optional<Vec3> eval_physical(const ScaledDeformation& d, const Vec3& p) {
  return d.y->evaluate(physical_to_domain(p, d.h));
}

// Lattice points of the physical ball B(center, radius).
std::vector<Vec3> ball_lattice(const Vec3& center, double radius, int n) {
  const double step = radius / n;
  std::vector<Vec3> out;
  for (int i = -n; i < n; ++i)
    for (int j = -n; j < n; ++j)
      for (int k = -n; k < n; ++k) {
        const Vec3 off((i + 0.5) * step, (j + 0.5) * step, (k + 0.5) * step);
        if (off.norm() <= radius) out.push_back(center + off);
      }
  return out;
}

std::vector<Triangle3> icosphere(const Vec3& c, double r, int refinements) {
  const double g = (1.0 + std::sqrt(5.0)) / 2.0;
  const std::vector<Vec3> v{{-1, g, 0}, {1, g, 0}, {-1, -g, 0}, {1, -g, 0}, {0, -1, g}, {0, 1, g},
                            {0, -1, -g}, {0, 1, -g}, {g, 0, -1}, {g, 0, 1}, {-g, 0, -1}, {-g, 0, 1}};
  const int f[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                        {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                        {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  std::vector<Triangle3> tris;
  for (const auto& t : f) tris.push_back({v[t[0]].normalized(), v[t[1]].normalized(), v[t[2]].normalized()});
  for (int level = 0; level < refinements; ++level) {
    std::vector<Triangle3> next;
    for (const Triangle3& t : tris) {
      const Vec3 ab = (t[0] + t[1]).normalized(), bc = (t[1] + t[2]).normalized(), ca = (t[2] + t[0]).normalized();
      next.insert(next.end(), {{t[0], ab, ca}, {ab, t[1], bc}, {ca, bc, t[2]}, {ab, bc, ca}});
    }
    tris = std::move(next);
  }
  for (Triangle3& t : tris)
    for (Vec3& p : t) p = c + r * p;
  return tris;
}

}  // namespace

double default_tau(const PiecewiseAffineMap& u_h, double h) { return std::min(2.0 * u_h.image_mesh_size(), h / 2.0); }

FhReport find_far_coincidences(const PiecewiseAffineMap& u_h, double h, double tau, const FarOptions& options) {
  require(u_h.domain().dimension() == 2 && u_h.target_dimension() == 3, "far coincidences need a surface map");
  require(h > 0.0, "h must be positive");
  require(tau > 0.0, "tau must be positive");
  FhReport rep;
  rep.h = h;
  rep.tau = tau;
  const double g = options.pixel > 0.0 ? options.pixel : h / 4.0;
  const Box& b = u_h.domain().bounds();
  const std::array<int, 3> dims{std::max(1, static_cast<int>(std::ceil((b.hi.x() - b.lo.x()) / g))),
                                std::max(1, static_cast<int>(std::ceil((b.hi.y() - b.lo.y()) / g))), 1};
  rep.F = PixelSet(2, Vec3(b.lo.x(), b.lo.y(), 0.0), g, dims);
  double slope = 0.0;
  for (std::size_t s = 0; s < u_h.domain().simplex_count(); ++s)
    slope = std::max(slope, u_h.gradient(s).leftCols<2>().norm());
  rep.tau_warning = tau < 0.5 * g * slope;
  const Coincidence co{u_h, image_index(u_h)};
  for (int j = 0; j < dims[1]; ++j)
    for (int i = 0; i < dims[0]; ++i) {
      const Vec3 x = rep.F.cell_center(i, j);
      const auto loc = u_h.domain().locate(x);
      if (!loc) continue;
      const Vec3 p = u_h.evaluate_in(loc->simplex, loc->barycentric);
      const auto partner = co.project(p, tau, [&](int t) { return co.domain_distance(t, x) > 2.0 * h; });
      if (!partner) continue;
      rep.F.set(i, j, 0, true);
      rep.partners.push_back(*partner);
    }
  if (rep.F.count() > 0) {
    rep.cap1_upper = cap1_estimate(rep.F, options.cap1_budget).value;
    rep.cap1_lower = cap1_lower_bound(rep.F);
  }
  return rep;
}

double ball_energy(const ScaledDeformation& d, const Vec3& center, double radius, int points_per_radius) {
  require(radius > 0.0 && points_per_radius >= 1, "ball energy needs a positive radius and lattice");
  const double w = std::pow(radius / points_per_radius, 3);
  double sum = 0.0;
  for (const Vec3& p : ball_lattice(center, radius, points_per_radius)) {
    const auto loc = d.prism.mesh->locate(physical_to_domain(p, d.h));
    if (!loc) continue;
    const double e = dist_SO3(scaled_gradient(d, loc->simplex));
    sum += w * e * e;
  }
  return sum;
}

void classify_good_bad(FhReport& report, const PiecewiseAffineMap& u_h, const ScaledDeformation& y_h) {
  const double h = report.h;
  report.points.clear();
  report.good = report.bad = 0;
  report.energy = h * dist_energy(y_h);
  report.comparability = kCap1Comparability;
  report.threshold = report.cap1_lower > 0.0
                         ? 4.0 * h * report.energy * report.comparability / report.cap1_lower
                         : kInf;
  const auto cells = report.F.occupied();
  if (cells.empty()) return;
  std::vector<Vec3> pts(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) pts[i] = report.F.cell_center(cells[i][0], cells[i][1]);

  // Farthest-point centers at separation h/5.
  std::vector<std::size_t> centers{0};
  std::vector<double> gap(pts.size(), kInf);
  for (;;) {
    const Vec3& c = pts[centers.back()];
    std::size_t far = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      gap[i] = std::min(gap[i], (pts[i] - c).norm());
      if (gap[i] > gap[far]) far = i;
    }
    if (gap[far] < h / 5.0) break;
    centers.push_back(far);
  }

  const Coincidence co{u_h, image_index(u_h)};
  const double radius = 2.0 * report.tau;
  for (std::size_t ci : centers) {
    GoodBadPoint gp;
    Vec3 x = pts[ci], xb = report.partners[ci];
    // Alternating projection onto the coincidence set.
    for (int it = 0; it < 3; ++it) {
      const auto px = u_h.evaluate(x);
      if (!px) break;
      const auto nb = co.project(*px, radius, [&](int t) { return co.domain_distance(t, x) > 2.0 * h; });
      if (!nb) break;
      xb = *nb;
      const auto pb = u_h.evaluate(xb);
      if (!pb) break;
      const auto nx = co.project(*pb, radius, [&](int t) { return co.domain_distance(t, xb) > 2.0 * h; });
      if (!nx) break;
      x = *nx;
    }
    gp.x = x;
    gp.partner = xb;
    gp.ball_energy = ball_energy(y_h, Vec3(x.x(), x.y(), 0.0), h / 10.0) +
                     ball_energy(y_h, Vec3(xb.x(), xb.y(), 0.0), h / 10.0);
    gp.good = gp.ball_energy <= report.threshold;
    (gp.good ? report.good : report.bad) += 1;
    report.points.push_back(gp);
  }
  report.majority_good = report.cap1_lower > 0.0 && 2 * report.good >= report.good + report.bad;
}

AffinePair affine_compare(const ScaledDeformation& y_h, const Vec3& x0, const Vec3& x0bar, int points_per_radius) {
  const double h = y_h.h;
  const Vec3 c(x0.x(), x0.y(), 0.0), cb(x0bar.x(), x0bar.y(), 0.0);
  FitOptions fo;
  fo.thickness = h;
  fo.points_per_radius = points_per_radius;
  AffinePair out;
  out.A = rigidity_fit(*y_h.y, c, h / 2.0, fo);
  out.Abar = rigidity_fit(*y_h.y, cb, h / 2.0, fo);
  std::vector<Vec3> images;
  for (const Vec3& p : ball_lattice(c, h / 2.0, points_per_radius)) {
    const auto y = eval_physical(y_h, p);
    if (!y) continue;
    out.sup_deviation = std::max(out.sup_deviation, (*y - out.A.apply(p)).norm());
    if ((p - c).norm() <= kSampleRadius * h) images.push_back(*y);
  }
  out.gap = (out.A.apply(c) - out.Abar.apply(cb)).norm();
  if (out.gap > h / 4.0) {
    out.rejected = true;
    out.diagnostic = "affine maps differ by more than h/4 at the centers";
    return out;
  }
  std::vector<Triangle3> sphere;
  for (const Triangle3& t : icosphere(cb, h / 2.0, 2)) {
    Triangle3 img;
    for (int i = 0; i < 3; ++i) {
      const auto y = eval_physical(y_h, t[i]);
      if (!y) {
        out.diagnostic = "comparison ball leaves the plate";
        return out;
      }
      img[i] = *y;
    }
    sphere.push_back(img);
  }
  std::size_t ones = 0;
  for (const Vec3& y : images) {
    double omega_sum = 0.0;
    for (const Triangle3& t : sphere) omega_sum += solid_angle(t[0] - y, t[1] - y, t[2] - y);
    if (std::lround(omega_sum / (4.0 * std::numbers::pi)) == 1) ++ones;
  }
  out.fraction = images.empty() ? 0.0 : static_cast<double>(ones) / images.size();
  return out;
}

double noninvertibility_volume(FhReport& report, const ScaledDeformation& y_h, int points_per_radius) {
  report.pairs.clear();
  report.volume = 0.0;
  const double ball = omega(3) * std::pow(report.h / 2.0, 3);
  for (const GoodBadPoint& gp : report.points) {
    if (!gp.good) continue;
    AffinePair ap = affine_compare(y_h, gp.x, gp.partner, points_per_radius);
    if (!ap.rejected) report.volume += ap.fraction * ball;
    report.pairs.push_back(std::move(ap));
  }
  return report.volume;
}

namespace {

// Values of u at the vertices of another planar domain.
std::vector<Vec3> restrict_to(const PiecewiseAffineMap& u, const TriangulatedDomain& dom) {
  std::vector<Vec3> out(dom.vertex_count());
  for (std::size_t v = 0; v < out.size(); ++v) {
    const auto y = u.evaluate(dom.vertex(v));
    if (!y) fail(Errc::inconsistency, "subdomain vertex outside the plate midplane");
    out[v] = *y;
  }
  return out;
}

double degree_l1(const DegreeField& a, const DegreeField& b) {
  if (a.size() != b.size()) fail(Errc::inconsistency, "degree fields on different grids");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.excluded[i] || b.excluded[i]) continue;
    sum += std::abs(a.results[i].value - b.results[i].value) * a.sample_weight;
  }
  return sum;
}

}  // namespace

PipelineReport run_pipeline(const CrossingScenario& sc, const std::vector<double>& hs, const PipelineOptions& opt) {
  require(hs.size() >= 3, "pipeline needs at least three thickness values");
  for (double h : hs) require(h > 0.0, "thickness values must be positive");
  PipelineReport rep;
  const Extension ext = build_extension(*sc.u1, opt.extension);
  rep.limit = check_simple_interpenetration(ext, *sc.u1, *sc.u2, opt.simple);
  rep.collar = choose_collar(*sc.u1, *sc.u2, opt.extension.delta);
  const auto& U1 = *sc.U1;
  std::vector<double> chi(U1.vertex_count());
  for (std::size_t v = 0; v < chi.size(); ++v) chi[v] = cutoff(U1, U1.vertex(v), rep.collar.delta);

  std::vector<double> energies;
  for (double h : hs) {
    PipelineRow row;
    row.h = h;
    const ScaledDeformation y = sc.sequence(h);
    row.energy_Ih = energy_Ih(y, default_density());
    energies.push_back(row.energy_Ih);

    std::vector<Vec3> phys = y.prism.mesh->vertices();
    for (Vec3& p : phys) p.z() *= h;
    auto phys_dom = std::make_shared<TriangulatedDomain>(3, std::move(phys), y.prism.mesh->simplices());
    const TruncationResult tr = lipschitz_truncate(PiecewiseAffineMap(phys_dom, y.y->values(), 3), opt.K);
    row.truncation_mismatch = tr.mismatch_measure;
    const ScaledDeformation yt = make_scaled(y.prism, tr.map->values(), h);
    row.dist_energy = dist_energy(yt);
    const PiecewiseAffineMap u_h = midplane_average(yt);

    std::vector<Vec3> base = restrict_to(u_h, U1);
    for (std::size_t v = 0; v < base.size(); ++v) base[v] = chi[v] * base[v] + (1.0 - chi[v]) * sc.u1->value(v);
    const Extension ext_h = with_base(ext, base);
    const PiecewiseAffineMap u2_h(sc.U2, restrict_to(u_h, *sc.U2), 3);
    const GridSamples grid = grid_samples(*sc.U2, opt.simple.grid, opt.simple.grid);
    row.degree_l1 = degree_l1(degree_field(*ext_h.map, u2_h, grid, opt.simple.degree), rep.limit.field);

    const double tau = opt.tau > 0.0 ? opt.tau : default_tau(u_h, h);
    row.far = find_far_coincidences(u_h, h, tau, opt.far);
    classify_good_bad(row.far, u_h, yt);
    row.volume = noninvertibility_volume(row.far, yt, opt.affine_points_per_radius);
    row.volume_over_h2 = row.volume / (h * h);
    row.volume_pass = opt.c > 0.0 ? row.volume >= opt.c * h * h : row.volume > 0.0;
    rep.rows.push_back(std::move(row));
  }
  rep.scaling = scaling_check(hs, energies, opt.epsilon);

  const double area = sc.U2->total_volume();
  rep.degree_converges = rep.rows.back().degree_l1 <= 0.05 * area;
  bool far_ok = true, good_ok = true, volume_ok = true;
  for (const auto& r : rep.rows) {
    far_ok = far_ok && r.far.F.count() > 0 && r.far.cap1_lower > 0.0;
    good_ok = good_ok && r.far.majority_good;
    volume_ok = volume_ok && r.volume_pass;
  }
  if (rep.limit.verdict != Verdict::simple_interpenetration) rep.failed_step = "simple-interpenetration";
  else if (!rep.collar.ok) rep.failed_step = "collar";
  else if (!rep.scaling.pass) rep.failed_step = "energy-scaling";
  else if (!rep.degree_converges) rep.failed_step = "degree-convergence";
  else if (!far_ok) rep.failed_step = "far-coincidences";
  else if (!good_ok) rep.failed_step = "good-points";
  else if (!volume_ok) rep.failed_step = "noninvertibility-volume";
  rep.pass = rep.failed_step.empty();
  return rep;
}

}  // namespace platecheck
