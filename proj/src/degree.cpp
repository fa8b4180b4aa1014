#include "platecheck/degree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

namespace platecheck {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const Vec3 kShift = Vec3(0.5773502691896258, 0.3141592653589793, 0.7536187847381281).normalized();

struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre rule on [0,1].
const GaussRule& gauss_rule(int n) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussRule rule;
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    rule.x.push_back(0.5 * (1.0 - z));
    rule.w.push_back(1.0 / ((1.0 - z * z) * dp * dp));
  }
  return cache.emplace(n, rule).first->second;
}

double simplex_volume(int dim, const std::array<Vec3, 4>& v) {
  if (dim == 2) {
    const Vec3 e1 = v[1] - v[0], e2 = v[2] - v[0];
    return 0.5 * std::abs(e1.x() * e2.y() - e1.y() * e2.x());
  }
  Mat3 e;
  e << v[1] - v[0], v[2] - v[0], v[3] - v[0];
  return std::abs(e.determinant()) / 6.0;
}

// Integral of phi over the simplex with vertices v, by a collapsed
// Gauss-Legendre rule with n points per direction.
double simplex_quadrature(int dim, const std::array<Vec3, 4>& v, const Bump& phi, int n) {
  const GaussRule& g = gauss_rule(n);
  const double vol = simplex_volume(dim, v);
  double sum = 0.0;
  if (dim == 2) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double u = g.x[i], s = g.x[j] * (1.0 - u);
        const Vec3 z = (1.0 - u - s) * v[0] + u * v[1] + s * v[2];
        sum += g.w[i] * g.w[j] * (1.0 - u) * phi(z, 2);
      }
    return 2.0 * vol * sum;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double u = g.x[i], s = g.x[j] * (1.0 - u), t = g.x[k] * (1.0 - u) * (1.0 - g.x[j]);
        const Vec3 z = (1.0 - u - s - t) * v[0] + u * v[1] + s * v[2] + t * v[3];
        sum += g.w[i] * g.w[j] * g.w[k] * (1.0 - u) * (1.0 - u) * (1.0 - g.x[j]) * phi(z, 3);
      }
  return 6.0 * vol * sum;
}

double point_simplex_distance(int dim, const std::array<Vec3, 4>& v, const Vec3& p) {
  if (dim == 2) return point_triangle_distance(p, {v[0], v[1], v[2]});
  Mat3 e;
  e << v[1] - v[0], v[2] - v[0], v[3] - v[0];
  const Vec3 l = e.fullPivLu().solve(p - v[0]);
  if (l.minCoeff() >= 0.0 && l.sum() <= 1.0) return 0.0;
  return std::min({point_triangle_distance(p, {v[1], v[2], v[3]}), point_triangle_distance(p, {v[0], v[2], v[3]}),
                   point_triangle_distance(p, {v[0], v[1], v[3]}), point_triangle_distance(p, {v[0], v[1], v[2]})});
}

struct Integrator {
  int dim;
  const Bump& phi;
  const IntegralOptions& opt;
  double leaf_tolerance;  // per unit volume
  double error = 0.0;

  double run(const std::array<Vec3, 4>& v, int depth) {
    const int k = dim + 1;
    double dmax = 0.0;
    for (int i = 0; i < k; ++i) dmax = std::max(dmax, (v[i] - phi.center).norm());
    if (dmax <= phi.radius) return simplex_quadrature(dim, v, phi, opt.order);
    if (point_simplex_distance(dim, v, phi.center) >= phi.radius) return 0.0;
    int bi = 0, bj = 1;
    double best = -1.0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        const double len = (v[i] - v[j]).squaredNorm();
        if (len > best) {
          best = len;
          bi = i;
          bj = j;
        }
      }
    // Depth counts only once the simplex is no larger than the bump.
    const bool small = std::sqrt(best) <= phi.radius;
    if (small) {
      const double q1 = simplex_quadrature(dim, v, phi, opt.order);
      const double q2 = simplex_quadrature(dim, v, phi, opt.order + 2);
      const double vol = simplex_volume(dim, v);
      if (std::abs(q1 - q2) <= leaf_tolerance * vol || depth >= opt.max_depth) {
        error += std::abs(q1 - q2);
        return q2;
      }
    }
    const Vec3 m = 0.5 * (v[bi] + v[bj]);
    std::array<Vec3, 4> a = v, b = v;
    a[bj] = m;
    b[bi] = m;
    const int next = small ? depth + 1 : 0;
    return run(a, next) + run(b, next);
  }
};

double resolve_tolerance(const DegreeOptions& options, const BoundaryImage& boundary) {
  return options.boundary_tolerance >= 0.0 ? options.boundary_tolerance : boundary.default_tolerance();
}

}  // namespace

const char* to_string(DegreeMethod m) {
  switch (m) {
    case DegreeMethod::jacobian_sum: return "jacobian-sum";
    case DegreeMethod::boundary: return "boundary";
    case DegreeMethod::integral: return "integral";
  }
  return "unknown";
}

double solid_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double la = a.norm(), lb = b.norm(), lc = c.norm();
  const double num = a.dot(b.cross(c));
  const double den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
  return 2.0 * std::atan2(num, den);
}

// ---- BoundaryImage --------------------------------------------------------

BoundaryImage::BoundaryImage(const PiecewiseAffineMap& map) : dim_(map.domain().dimension()) {
  require(dim_ == map.target_dimension(), "boundary degree needs equal domain and target dimension");
  const auto& facets = map.domain().boundary_facets();
  triangles_.reserve(facets.size());
  double extent = 0.0;
  for (const Facet& f : facets) {
    auto img = map.facet_image(f);
    if (dim_ == 2) img[2] = img[1];
    triangles_.push_back({img[0], img[1], img[2]});
    for (int i = 0; i < 3; ++i) extent += (img[i] - img[(i + 1) % 3]).norm();
  }
  bounds_ = map.image_bounds();
  diameter_ = std::max((bounds_.hi - bounds_.lo).norm(), 1e-300);
  const double cell = triangles_.empty() ? diameter_ : std::max(extent / (3.0 * triangles_.size()), 1e-9 * diameter_);
  index_ = TriangleIndex(triangles_, cell);
}

double BoundaryImage::distance_within(const Vec3& y, double radius) const { return index_.distance(y, radius); }

double BoundaryImage::distance(const Vec3& y) const {
  if (triangles_.empty()) return kInf;
  const double outside = (y - y.cwiseMax(bounds_.lo).cwiseMin(bounds_.hi)).norm();
  const double cell = index_.size() ? diameter_ / 64.0 : diameter_;
  double r = std::max(outside, cell);
  for (int i = 0; i < 4; ++i, r *= 2.0) {
    const double d = index_.distance(y, r);
    if (d < kInf) return d;
  }
  double best = kInf;
  for (const auto& t : triangles_) best = std::min(best, point_triangle_distance(y, t));
  return best;
}

double BoundaryImage::segment_distance(const Vec3& a, const Vec3& b, double radius) const {
  return index_.distance(a, b, radius);
}

double BoundaryImage::winding(const Vec3& y) const {
  double total = 0.0;
  if (dim_ == 2) {
    for (const auto& t : triangles_) {
      const Vec3 a = t[0] - y, b = t[1] - y;
      total += std::atan2(a.x() * b.y() - a.y() * b.x(), a.x() * b.x() + a.y() * b.y());
    }
    return total / (2.0 * std::numbers::pi);
  }
  for (const auto& t : triangles_) total += solid_angle(t[0] - y, t[1] - y, t[2] - y);
  return total / (4.0 * std::numbers::pi);
}

// ---- degree formulas ------------------------------------------------------

DegreeResult degree_boundary(const BoundaryImage& boundary, const Vec3& y, double tolerance) {
  DegreeResult r;
  r.method = DegreeMethod::boundary;
  r.margin = boundary.distance(y);
  if (r.margin < tolerance) fail(Errc::boundary_proximity, "target point too close to the boundary image", r.margin);
  const double w = boundary.winding(y);
  r.value = static_cast<int>(std::lround(w));
  r.residual = std::abs(w - r.value);
  r.estimate = w;
  if (r.residual >= 0.1) fail(Errc::inconsistency, "winding number is not close to an integer", r.residual);
  return r;
}

DegreeResult degree_boundary(const PiecewiseAffineMap& map, const Vec3& y, const DegreeOptions& options) {
  BoundaryImage boundary(map);
  return degree_boundary(boundary, y, resolve_tolerance(options, boundary));
}

DegreeResult degree_jacobian(const PiecewiseAffineMap& map, const Vec3& y, const DegreeOptions& options) {
  const TriangulatedDomain& dom = map.domain();
  const int dim = dom.dimension();
  BoundaryImage boundary(map);
  DegreeResult r;
  r.method = DegreeMethod::jacobian_sum;
  r.margin = boundary.distance(y);
  if (r.margin < resolve_tolerance(options, boundary))
    fail(Errc::boundary_proximity, "target point too close to the boundary image", r.margin);

  double max_det = 0.0;
  for (std::size_t s = 0; s < dom.simplex_count(); ++s) max_det = std::max(max_det, std::abs(map.jacobian(s)));
  const double singular = options.singular_tolerance * max_det;
  const double eps = options.facet_tolerance;
  const double scale = boundary.diameter();

  int total = 0;
  for (std::size_t s = 0; s < dom.simplex_count(); ++s) {
    const Simplex& sx = dom.simplex(s);
    std::array<Vec3, 4> v{};
    Vec3 lo = map.value(sx[0]), hi = lo;
    for (int i = 0; i <= dim; ++i) {
      v[i] = map.value(sx[i]);
      lo = lo.cwiseMin(v[i]);
      hi = hi.cwiseMax(v[i]);
    }
    const double pad = eps * scale;
    bool outside = false;
    for (int d = 0; d < dim; ++d) outside = outside || y[d] < lo[d] - pad || y[d] > hi[d] + pad;
    if (outside) continue;
    const double det = map.jacobian(s);
    if (std::abs(det) <= singular) {
      if (point_simplex_distance(dim, v, y) <= pad)
        fail(Errc::irregular_value, "target has a preimage on a degenerate simplex", std::abs(det));
      continue;
    }
    Mat3 e = Mat3::Identity();
    for (int i = 1; i <= dim; ++i) e.col(i - 1) = v[i] - v[0];
    const Mat3 inv = e.inverse();
    const Vec3 mu = inv * (y - v[0]);
    const Vec3 dmu = inv * kShift;
    std::array<double, 4> lam{1.0 - mu.x() - mu.y() - (dim == 3 ? mu.z() : 0.0), mu.x(), mu.y(), mu.z()};
    std::array<double, 4> dlam{-dmu.x() - dmu.y() - (dim == 3 ? dmu.z() : 0.0), dmu.x(), dmu.y(), dmu.z()};
    // Targets on facet images are resolved by an infinitesimal shift of y
    // along a fixed generic direction.
    double dscale = 0.0;
    for (int i = 0; i <= dim; ++i) dscale = std::max(dscale, std::abs(dlam[i]));
    bool inside = true;
    for (int i = 0; i <= dim && inside; ++i) {
      if (lam[i] > eps) continue;
      if (lam[i] < -eps) {
        inside = false;
      } else if (std::abs(dlam[i]) <= 1e-12 * dscale) {
        fail(Errc::irregular_value, "target lies on a facet image parallel to the tie-break direction", lam[i]);
      } else {
        inside = dlam[i] > 0.0;
      }
    }
    if (inside) total += det > 0.0 ? 1 : -1;
  }
  r.value = total;
  return r;
}

double Bump::normalizer(int dim) const {
  if (dim == 2) return std::numbers::pi * radius * radius / 4.0;
  return 64.0 * std::numbers::pi * radius * radius * radius / 315.0;
}

double Bump::operator()(const Vec3& z, int dim) const {
  Vec3 d = z - center;
  if (dim == 2) d.z() = 0.0;
  const double t = 1.0 - d.squaredNorm() / (radius * radius);
  return t > 0.0 ? t * t * t / normalizer(dim) : 0.0;
}

DegreeResult degree_integral(const PiecewiseAffineMap& map, const Bump& phi, const IntegralOptions& options,
                             const DegreeOptions& degree_options) {
  const TriangulatedDomain& dom = map.domain();
  const int dim = dom.dimension();
  require(phi.radius > 0.0, "bump radius must be positive");
  require(options.order >= 1, "quadrature order must be positive");
  BoundaryImage boundary(map);
  DegreeResult r;
  r.method = DegreeMethod::integral;
  r.margin = boundary.distance(phi.center);
  const double tol = resolve_tolerance(degree_options, boundary);
  if (r.margin - phi.radius < tol)
    fail(Errc::invalid_test_function, "bump support meets the boundary image", r.margin - phi.radius);

  const double support = dim == 2 ? std::numbers::pi * phi.radius * phi.radius
                                  : 4.0 / 3.0 * std::numbers::pi * std::pow(phi.radius, 3);
  Integrator integ{dim, phi, options, options.tolerance / support};
  double total = 0.0;
  for (std::size_t s = 0; s < dom.simplex_count(); ++s) {
    const Simplex& sx = dom.simplex(s);
    std::array<Vec3, 4> v{};
    bool far = true;
    for (int i = 0; i <= dim; ++i) v[i] = map.value(sx[i]);
    Vec3 lo = v[0], hi = v[0];
    for (int i = 1; i <= dim; ++i) {
      lo = lo.cwiseMin(v[i]);
      hi = hi.cwiseMax(v[i]);
    }
    const Vec3 nearest = phi.center.cwiseMax(lo).cwiseMin(hi);
    Vec3 gap = nearest - phi.center;
    if (dim == 2) gap.z() = 0.0;
    far = gap.norm() >= phi.radius;
    if (far) continue;
    const double det = map.jacobian(s);
    if (det == 0.0) continue;
    total += (det > 0.0 ? 1.0 : -1.0) * integ.run(v, 0);
  }
  r.estimate = total;
  r.quadrature_error = integ.error;
  r.value = static_cast<int>(std::lround(total));
  r.residual = std::abs(total - r.value);
  return r;
}

Vec3 perturb_target(const Vec3& y, double tolerance, int dimension, std::uint64_t seed) {
  Rng rng(seed);
  Vec3 d(rng.normal(), rng.normal(), dimension == 3 ? rng.normal() : 0.0);
  if (d.norm() == 0.0) d = Vec3::UnitX();
  return y + 0.5 * tolerance * d.normalized();
}

// ---- fields -----------------------------------------------------------------

std::size_t DegreeField::excluded_count() const {
  return static_cast<std::size_t>(std::count(excluded.begin(), excluded.end(), true));
}

std::map<int, std::size_t> DegreeField::level_counts() const {
  std::map<int, std::size_t> counts;
  for (std::size_t i = 0; i < results.size(); ++i)
    if (!excluded[i]) ++counts[results[i].value];
  return counts;
}

namespace {

void evaluate_field(DegreeField& field, const BoundaryImage& boundary, const PiecewiseAffineMap& u2) {
  const std::size_t n = field.points.size();
  field.images.assign(n, Vec3::Zero());
  field.results.assign(n, DegreeResult{});
  std::vector<char> excluded(n, 0);
  parallel_for(n, [&](std::size_t i) {
    auto y = u2.evaluate(field.points[i]);
    if (!y) fail(Errc::invalid_argument, "degree field sample outside the map domain");
    field.images[i] = *y;
    DegreeResult& r = field.results[i];
    r.method = DegreeMethod::boundary;
    r.margin = boundary.distance(*y);
    if (r.margin < field.tolerance) {
      r.regular = false;
      excluded[i] = 1;
      return;
    }
    const double w = boundary.winding(*y);
    r.value = static_cast<int>(std::lround(w));
    r.residual = std::abs(w - r.value);
    r.estimate = w;
    if (r.residual >= 0.1) {
      r.regular = false;
      excluded[i] = 1;
    }
  });
  field.excluded.assign(excluded.begin(), excluded.end());
}

}  // namespace

DegreeField degree_field(const PiecewiseAffineMap& extension, const PiecewiseAffineMap& u2,
                         const std::vector<Vec3>& samples, const DegreeOptions& options) {
  require(extension.domain().dimension() == 3, "extension must live on a 3D prism mesh");
  require(u2.target_dimension() == extension.target_dimension(), "u2 must map into the extension's target space");
  BoundaryImage boundary(extension);
  DegreeField field;
  field.points = samples;
  field.tolerance = resolve_tolerance(options, boundary);
  field.sample_weight = samples.empty() ? 0.0 : u2.domain().total_volume() / static_cast<double>(samples.size());
  evaluate_field(field, boundary, u2);
  return field;
}

DegreeField degree_field(const BoundaryImage& boundary, const PiecewiseAffineMap& u2, const GridSamples& grid,
                         double tolerance) {
  DegreeField field;
  field.points = grid.points;
  field.cells = grid.cells;
  field.nx = grid.nx;
  field.ny = grid.ny;
  field.tolerance = tolerance;
  field.sample_weight = grid.spacing_x * grid.spacing_y;
  evaluate_field(field, boundary, u2);
  return field;
}

DegreeField degree_field(const PiecewiseAffineMap& extension, const PiecewiseAffineMap& u2, const GridSamples& grid,
                         const DegreeOptions& options) {
  require(extension.domain().dimension() == 3, "extension must live on a 3D prism mesh");
  require(u2.target_dimension() == extension.target_dimension(), "u2 must map into the extension's target space");
  BoundaryImage boundary(extension);
  return degree_field(boundary, u2, grid, resolve_tolerance(options, boundary));
}

std::vector<LevelSetViolation> level_set_boundary_check(const DegreeField& field, const BoundaryImage& boundary,
                                                        double slack) {
  std::vector<LevelSetViolation> out;
  if (field.cells.empty()) return out;
  std::map<std::array<int, 2>, std::size_t> at;
  for (std::size_t i = 0; i < field.cells.size(); ++i) at[field.cells[i]] = i;
  for (std::size_t a = 0; a < field.cells.size(); ++a) {
    if (field.excluded[a]) continue;
    const auto [i, j] = field.cells[a];
    for (const auto& nb : {std::array<int, 2>{i + 1, j}, std::array<int, 2>{i, j + 1}}) {
      auto it = at.find(nb);
      if (it == at.end()) continue;
      const std::size_t b = it->second;
      if (field.excluded[b] || field.results[a].value == field.results[b].value) continue;
      const Vec3 &ya = field.images[a], &yb = field.images[b];
      const double allowed = slack * (ya - yb).norm() + field.tolerance;
      const double d = boundary.segment_distance(ya, yb, allowed);
      if (!(d <= allowed)) out.push_back({a, b, d, allowed});
    }
  }
  return out;
}

}  // namespace platecheck
