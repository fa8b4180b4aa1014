#include "platecheck/pathology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace platecheck {

namespace {

constexpr double kPi = std::numbers::pi;
const Vec3 kCenter(0.5, 0.5, 0.0);
// Fraction of the excursion parameter spent on each slit, and the ring
// parameter at which the fill disk has shrunk to a point.
constexpr double kSlit = 0.2;
constexpr double kPhase = 0.5;

// Square-polar coordinates of x in the unit block: ring parameter s (1 on
// the block boundary) and the boundary point P on the ray from the center.
double square_polar(const Vec3& x, Vec3& P) {
  const Vec3 d = x - kCenter;
  const double s = 2.0 * std::max(std::abs(d.x()), std::abs(d.y()));
  P = s > 0.0 ? Vec3(kCenter + d / s) : kCenter;
  return s;
}

Vec3 excursion_path(double u, const Vec3& lo, const Vec3& hi, const Vec3& q, double r) {
  if (u <= kSlit) return lo + (u / kSlit) * (q - lo);
  if (u >= 1.0 - kSlit) return q + ((u - 1.0 + kSlit) / kSlit) * (hi - q);
  const double t = -0.5 * kPi - 2.0 * kPi * (u - kSlit) / (1.0 - 2.0 * kSlit);
  return q + Vec3(0.0, r, 0.0) + r * Vec3(std::cos(t), std::sin(t), 0.0);
}

TriangulatedDomain grid(const Box& box, int nx, int ny) { return build_grid_domain(2, box, {nx, ny, 1}); }

TriangulatedDomain transformed(const TriangulatedDomain& d, double scale, const Vec3& offset) {
  std::vector<Vec3> v = d.vertices();
  for (auto& x : v) x = scale * x + offset;
  return TriangulatedDomain(2, std::move(v), d.simplices());
}

}  // namespace

void validate(const MSParams& p) {
  if (!(p.rho > 0.0 && p.rho < 0.5)) fail(Errc::invalid_argument, "cavity radius fraction must lie in (0, 1/2)", p.rho);
  if (p.k < 0) fail(Errc::invalid_argument, "period index must be nonnegative", p.k);
  if (!(p.side > 0.0)) fail(Errc::invalid_argument, "strip side must be positive", p.side);
  if (!(p.bend_radius > kMinBendRadius))
    fail(Errc::invalid_argument, "bend radius too small: the strip overlaps itself unless the radius exceeds " +
                                     std::to_string(kMinBendRadius),
         kMinBendRadius);
  if (p.block_segments < 2 || p.block_segments % 2 != 0)
    fail(Errc::invalid_argument, "block segments must be even and at least 2", p.block_segments);
  if (p.block_rings < 2) fail(Errc::invalid_argument, "blocks need at least 2 rings", p.block_rings);
  if (p.cluster_points < 8) fail(Errc::invalid_argument, "slit needs at least 8 points", p.cluster_points);
  if (!(p.cluster_width > 0.0 && p.cluster_width < 1.0 / p.block_segments))
    fail(Errc::invalid_argument, "slit width must be positive and below one block segment", p.cluster_width);
  if (!(p.fill_fraction > 0.0 && p.fill_fraction < 1.0))
    fail(Errc::invalid_argument, "fill fraction must lie in (0, 1)", p.fill_fraction);
  if (!(p.hole > 0.0 && p.hole < 1.0)) fail(Errc::invalid_argument, "puncture parameter must lie in (0, 1)", p.hole);
}

double ms_body_length(const MSParams& p) { return 2.0 * kPi * p.bend_radius + 1.0; }

TriangulatedDomain ms_block_domain(const MSParams& p) {
  const int m = p.block_segments, E = p.cluster_points;
  const double lo = 0.5 - 0.5 * p.cluster_width;
  std::vector<double> xs;
  for (int i = 0; i < m; ++i)
    if (std::abs(static_cast<double>(i) / m - 0.5) > 0.5 * p.cluster_width) xs.push_back(static_cast<double>(i) / m);
  for (int j = 0; j <= E; ++j) xs.push_back(lo + p.cluster_width * j / E);
  std::sort(xs.begin(), xs.end());

  std::vector<Vec3> perim;
  for (double x : xs) perim.emplace_back(x, 0.0, 0.0);
  for (int i = 0; i < m; ++i) perim.emplace_back(1.0, static_cast<double>(i) / m, 0.0);
  for (double x : xs) perim.emplace_back(1.0 - x, 1.0, 0.0);
  for (int i = 0; i < m; ++i) perim.emplace_back(0.0, 1.0 - static_cast<double>(i) / m, 0.0);

  const int P = static_cast<int>(perim.size()), M = p.block_rings;
  std::vector<Vec3> verts;
  for (int i = 0; i <= M; ++i) {
    const double s = p.hole + (1.0 - p.hole) * i / M;
    for (const Vec3& q : perim) verts.push_back(kCenter + s * (q - kCenter));
  }
  std::vector<Simplex> tris;
  for (int i = 0; i < M; ++i)
    for (int q = 0; q < P; ++q) {
      const int a = i * P + q, b = i * P + (q + 1) % P, c = (i + 1) * P + (q + 1) % P, d = (i + 1) * P + q;
      tris.push_back({a, b, c, -1});
      tris.push_back({a, c, d, -1});
    }
  return TriangulatedDomain(2, std::move(verts), std::move(tris));
}

Vec3 cavitation_point(const Vec3& x, double rho) {
  Vec3 P;
  const double s = square_polar(x, P);
  const Vec3 d = P - kCenter;
  const double r = d.norm();
  if (r == 0.0) return kCenter;
  return kCenter + ((1.0 - s) * rho + s * r) * (d / r);
}

PiecewiseAffineMap cavitation_block(double rho, const MSParams& p) {
  MSParams q = p;
  q.rho = rho;
  validate(q);
  auto dom = std::make_shared<TriangulatedDomain>(ms_block_domain(q));
  return interpolate(dom, [&](const Vec3& x) { return cavitation_point(x, rho); }, 2);
}

Vec3 fill_point(const Vec3& x, const MSParams& p) {
  Vec3 P;
  const double s = square_polar(x, P);
  const double sigma = std::clamp((s - p.hole) / (1.0 - p.hole), 0.0, 1.0);
  const double lo = 0.5 - 0.5 * p.cluster_width, hi = 0.5 + 0.5 * p.cluster_width;
  const double tol = 1e-9 * p.cluster_width;
  if (std::abs(P.y()) > 1e-12 || P.x() <= lo + tol || P.x() >= hi - tol) return P;

  const double u = (P.x() - lo) / p.cluster_width;
  const Vec3 Bm(lo, 0, 0), Bp(hi, 0, 0), B0(0.5, 0, 0);
  const double rf = p.fill_fraction * p.rho;
  const Vec3 b = kCenter - Vec3(0.0, rf, 0.0);
  if (sigma <= kPhase) return excursion_path(u, Bm, Bp, b, rf * (1.0 - sigma / kPhase));
  const double lambda = (1.0 - sigma) / (1.0 - kPhase);
  const Vec3 q = B0 + lambda * (b - B0);
  const Vec3 straight = Bm + u * (Bp - Bm);
  return lambda * excursion_path(u, Bm, Bp, q, 0.0) + (1.0 - lambda) * straight;
}

PiecewiseAffineMap fill_block(const MSParams& p) {
  validate(p);
  auto dom = std::make_shared<TriangulatedDomain>(ms_block_domain(p));
  return interpolate(dom, [&](const Vec3& x) { return fill_point(x, p); }, 2);
}

Vec3 ms_limit_point(const MSParams& p, const Vec3& x) {
  const Vec3 xs = x / p.side;
  const double L = ms_body_length(p), R = p.bend_radius;
  if (xs.x() <= 1.0) return x;
  if (xs.x() >= 1.0 + L) return p.side * Vec3(xs.x() - 1.0 - L, xs.y(), 0.0);
  const double s = xs.x() - 1.0, off = xs.y() - 0.5;
  Vec3 g, N;
  if (s <= kPi * R) {
    const double phi = -0.5 * kPi + s / R;
    g = Vec3(1.0, 0.5 + R, 0.0) + R * Vec3(std::cos(phi), std::sin(phi), 0.0);
    N = -Vec3(std::cos(phi), std::sin(phi), 0.0);
  } else if (s <= kPi * R + 1.0) {
    g = Vec3(1.0 - (s - kPi * R), 0.5 + 2.0 * R, 0.0);
    N = Vec3(0.0, -1.0, 0.0);
  } else {
    const double phi = 0.5 * kPi + (s - kPi * R - 1.0) / R;
    g = Vec3(0.0, 0.5 + R, 0.0) + R * Vec3(std::cos(phi), std::sin(phi), 0.0);
    N = -Vec3(std::cos(phi), std::sin(phi), 0.0);
  }
  return p.side * (g + off * N);
}

Vec3 ms_element_point(const MSParams& p, const Vec3& x) {
  const Vec3 xs = x / p.side;
  const double L = ms_body_length(p);
  const int n = 1 << p.k;
  const double cell = 1.0 / n;
  auto block = [&](double bx, double by, auto&& local_map) {
    const int bi = std::clamp(static_cast<int>(std::floor(bx * n)), 0, n - 1);
    const int bj = std::clamp(static_cast<int>(std::floor(by * n)), 0, n - 1);
    const Vec3 o(bi * cell, bj * cell, 0.0);
    const Vec3 local = (Vec3(bx, by, 0.0) - o) / cell;
    return Vec3(p.side * (o + cell * local_map(local)));
  };
  if (xs.x() <= 1.0) return block(xs.x(), xs.y(), [&](const Vec3& l) { return cavitation_point(l, p.rho); });
  if (xs.x() >= 1.0 + L)
    return block(xs.x() - 1.0 - L, xs.y(), [&](const Vec3& l) { return fill_point(l, p); });
  return ms_limit_point(p, x);
}

PiecewiseAffineMap ms_element(const MSParams& p) {
  validate(p);
  const double L = ms_body_length(p);
  const int n = 1 << p.k;
  const double cell = p.side / n;
  const TriangulatedDomain block = ms_block_domain(p);
  std::vector<TriangulatedDomain> parts;
  for (int bj = 0; bj < n; ++bj)
    for (int bi = 0; bi < n; ++bi) {
      parts.push_back(transformed(block, cell, Vec3(bi * cell, bj * cell, 0.0)));
      parts.push_back(transformed(block, cell, Vec3((1.0 + L) * p.side + bi * cell, bj * cell, 0.0)));
    }
  const int ny = n * p.block_segments;
  const int nx = static_cast<int>(std::ceil(L * ny));
  parts.push_back(grid(Box{Vec3(p.side, 0, 0), Vec3((1.0 + L) * p.side, p.side, 0)}, nx, ny));
  auto dom = std::make_shared<TriangulatedDomain>(merge_domains(parts, 1e-9 * p.side));
  return interpolate(dom, [&](const Vec3& x) { return ms_element_point(p, x); }, 2);
}

PiecewiseAffineMap ms_limit(const MSParams& p, int resolution) {
  validate(p);
  if (resolution < 1) fail(Errc::invalid_argument, "resolution must be positive", resolution);
  const double L = ms_body_length(p), a = p.side;
  std::vector<TriangulatedDomain> parts;
  parts.push_back(grid(Box{Vec3(0, 0, 0), Vec3(a, a, 0)}, resolution, resolution));
  parts.push_back(grid(Box{Vec3(a, 0, 0), Vec3((1 + L) * a, a, 0)}, static_cast<int>(std::ceil(L * resolution)), resolution));
  parts.push_back(grid(Box{Vec3((1 + L) * a, 0, 0), Vec3((2 + L) * a, a, 0)}, resolution, resolution));
  auto dom = std::make_shared<TriangulatedDomain>(merge_domains(parts, 1e-9 * a));
  return interpolate(dom, [&](const Vec3& x) { return ms_limit_point(p, x); }, 2);
}

PiecewiseAffineMap thicken(const PiecewiseAffineMap& planar, int levels, double height) {
  require(planar.domain().dimension() == 2, "thicken expects a planar map");
  const PrismMesh prism = extrude_cylinder(planar.domain_ptr(), levels, height);
  std::vector<Vec3> values(prism.mesh->vertex_count());
  for (int l = 0; l <= levels; ++l)
    for (std::size_t v = 0; v < prism.base_vertex_count(); ++v) {
      const Vec3& f = planar.value(v);
      values[prism.vertex_index(l, static_cast<int>(v))] = Vec3(f.x(), f.y(), prism.layer_coordinate(l));
    }
  return PiecewiseAffineMap(prism.mesh, std::move(values), 3);
}

ScaledDeformation kirchhoff_ansatz(const PiecewiseAffineMap& u, double h, const KirchhoffOptions& options) {
  if (u.domain().dimension() != 2 || u.target_dimension() != 3)
    fail(Errc::invalid_argument, "Kirchhoff ansatz needs a midsurface map from 2D into 3D");
  if (!(h > 0.0)) fail(Errc::invalid_argument, "thickness must be positive", h);
  const IsometryReport iso = isometry_residual_and_II(u);
  const double worst = *std::max_element(iso.residual.begin(), iso.residual.end());
  if (worst > options.isometry_tolerance)
    fail(Errc::invalid_argument, "midsurface is not isometric within tolerance", worst);
  const PrismMesh prism = plate_prism(u.domain_ptr(), options.levels);
  const double w = options.wrinkle_wavelength;
  std::vector<Vec3> values(prism.mesh->vertex_count());
  for (int l = 0; l <= options.levels; ++l)
    for (std::size_t v = 0; v < prism.base_vertex_count(); ++v) {
      const Vec3& x = u.domain().vertex(v);
      double offset = h * prism.layer_coordinate(l);
      if (options.wrinkle != 0.0)
        offset += h * options.wrinkle * std::sin(2 * kPi * x.x() / w) * std::sin(2 * kPi * x.y() / w);
      values[prism.vertex_index(l, static_cast<int>(v))] = u.value(v) + offset * iso.normals[v];
    }
  return make_scaled(prism, std::move(values), h);
}

CrossingScenario crossing_scenario(const CrossingParams& c) {
  if (!(c.separation > 0.0)) fail(Errc::invalid_argument, "U1 and U2 must be separated", c.separation);
  if (!(c.width > 0.0 && c.width < 1.0)) fail(Errc::invalid_argument, "arc width must lie in (0, 1)", c.width);
  if (!(c.radius > 0.0 && c.arc_length > 0.0)) fail(Errc::invalid_argument, "arc radius and length must be positive");
  if (c.flat_cells < 1 || c.arc_cells < 1 || c.width_cells < 1)
    fail(Errc::invalid_argument, "cell counts must be positive");
  const double x0 = 1.0 + c.separation, y0 = 0.5 * (1.0 - c.width);
  const double theta = c.angle_deg * kPi / 180.0;
  const Vec3 T(std::cos(theta), 0.0, std::sin(theta)), N(-std::sin(theta), 0.0, std::cos(theta));
  const double r = c.radius, L = c.arc_length;

  auto flat = [](const Vec3& x) { return Vec3(x.x(), x.y(), 0.0); };
  auto arc = [=](const Vec3& x) {
    const double s = x.x() - x0 - 0.5 * L;
    const Vec3 g = Vec3(0.5, 0.0, c.lift) + r * (std::sin(s / r) * T + (1.0 - std::cos(s / r)) * N);
    return Vec3(g.x(), x.y(), g.z());
  };

  CrossingScenario sc;
  const TriangulatedDomain d1 = build_grid_domain(2, Box{Vec3(0, 0, 0), Vec3(1, 1, 0)}, c.flat_cells);
  const TriangulatedDomain d2 =
      build_grid_domain(2, Box{Vec3(x0, y0, 0), Vec3(x0 + L, y0 + c.width, 0)}, {c.arc_cells, c.width_cells, 1});
  sc.U1 = std::make_shared<TriangulatedDomain>(d1);
  sc.U2 = std::make_shared<TriangulatedDomain>(d2);
  const std::vector<TriangulatedDomain> parts{d1, d2};
  sc.S = std::make_shared<TriangulatedDomain>(merge_domains(parts, 1e-9));
  sc.u1 = std::make_shared<PiecewiseAffineMap>(interpolate(sc.U1, flat, 3));
  sc.u2 = std::make_shared<PiecewiseAffineMap>(interpolate(sc.U2, arc, 3));
  const double split = 1.0 + 0.5 * c.separation;
  sc.u = std::make_shared<PiecewiseAffineMap>(
      interpolate(sc.S, [&](const Vec3& x) { return x.x() < split ? flat(x) : arc(x); }, 3));
  sc.sequence.u = sc.u;
  sc.sequence.options = c.kirchhoff;
  return sc;
}

}  // namespace platecheck
