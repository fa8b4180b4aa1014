#include "doctest.h"
#include "platecheck/degree.hpp"

#include <cmath>
#include <numbers>

using namespace platecheck;

namespace {

// Disk mesh rotated off the coordinate axes so that (1/2,0) is interior to a triangle.
DomainPtr rotated_disk(int rings, double angle) {
  auto d = build_disk_domain(Vec3::Zero(), 1.0, rings);
  std::vector<Vec3> v = d.vertices();
  const double c = std::cos(angle), s = std::sin(angle);
  for (auto& p : v) p = Vec3(c * p.x() - s * p.y(), s * p.x() + c * p.y(), 0.0);
  return std::make_shared<TriangulatedDomain>(2, v, d.simplices());
}

Vec3 complex_square(const Vec3& x) { return Vec3(x.x() * x.x() - x.y() * x.y(), 2 * x.x() * x.y(), 0.0); }

DomainPtr ball(int res) { return std::make_shared<TriangulatedDomain>(build_ball_domain(Vec3::Zero(), 1.0, res)); }

DomainPtr square(int res) {
  return std::make_shared<TriangulatedDomain>(build_grid_domain(2, Box{Vec3(0, 0, 0), Vec3(1, 1, 0)}, res));
}

}  // namespace

TEST_CASE("jacobian degree examples") {
  auto disk = rotated_disk(8, 0.1);
  auto id = interpolate(disk, [](const Vec3& x) { return x; }, 2);
  CHECK(degree_jacobian(id, Vec3::Zero()).value == 1);
  auto neg = interpolate(ball(4), [](const Vec3& x) { return Vec3(-x); }, 3);
  CHECK(degree_jacobian(neg, Vec3(0.01, 0.02, 0.03)).value == -1);
  auto sq = interpolate(disk, complex_square, 2);
  CHECK(degree_jacobian(sq, Vec3(0.25, 0, 0)).value == 2);
  CHECK(degree_jacobian(id, Vec3(3, 3, 0)).value == 0);
}

TEST_CASE("boundary degree examples") {
  auto sqd = square(4);
  auto id = interpolate(sqd, [](const Vec3& x) { return x; }, 2);
  auto r = degree_boundary(id, Vec3(0.5, 0.5, 0));
  CHECK(r.value == 1);
  CHECK(r.residual < 1e-12);
  auto disk = rotated_disk(8, 0.1);
  auto sq = interpolate(disk, complex_square, 2);
  CHECK(degree_boundary(sq, Vec3(0.25, 0, 0)).value == 2);
  auto neg = interpolate(ball(4), [](const Vec3& x) { return Vec3(-x); }, 3);
  CHECK(degree_boundary(neg, Vec3::Zero()).value == -1);
  CHECK(degree_boundary(neg, Vec3(2, 0, 0)).value == 0);
}

TEST_CASE("boundary proximity is an error carrying the margin") {
  auto id = interpolate(square(2), [](const Vec3& x) { return x; }, 2);
  DegreeOptions opt;
  opt.boundary_tolerance = 0.1;
  try {
    degree_boundary(id, Vec3(0.05, 0.5, 0), opt);
    FAIL("expected boundary-proximity");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::boundary_proximity);
    CHECK(e.value() == doctest::Approx(0.05));
  }
  CHECK_THROWS_AS(degree_jacobian(id, Vec3(0.05, 0.5, 0), opt), Error);
}

TEST_CASE("targets on facet images are resolved deterministically") {
  auto id = interpolate(square(2), [](const Vec3& x) { return x; }, 2);
  CHECK(degree_jacobian(id, Vec3(0.5, 0.5, 0)).value == 1);
  CHECK(degree_jacobian(id, Vec3(0.25, 0.5, 0)).value == 1);
  const Vec3 y = perturb_target(Vec3(0.5, 0.5, 0), 1e-3, 2, 5);
  CHECK((y - Vec3(0.5, 0.5, 0)).norm() == doctest::Approx(5e-4));
  CHECK(degree_jacobian(id, y).value == 1);
}

TEST_CASE("irregular value on a degenerate simplex") {
  auto dom = square(3);
  std::vector<Vec3> v = dom->vertices();
  // Push vertex (2/3,2/3) onto the line through (1/3,1/3) and (2/3,1/3).
  for (auto& p : v)
    if ((p - Vec3(2.0 / 3, 2.0 / 3, 0)).norm() < 1e-9) p = Vec3(1.0, 1.0 / 3, 0);
  PiecewiseAffineMap f(dom, v, 2);
  try {
    degree_jacobian(f, Vec3(0.5, 1.0 / 3, 0));
    FAIL("expected irregular value");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::irregular_value);
  }
}

TEST_CASE("integral degree examples") {
  auto disk = rotated_disk(8, 0.1);
  auto id = interpolate(disk, [](const Vec3& x) { return x; }, 2);
  auto r = degree_integral(id, Bump{Vec3::Zero(), 0.3});
  CHECK(std::abs(r.estimate - 1.0) < 1e-6);
  auto twice = interpolate(ball(4), [](const Vec3& x) { return Vec3(2 * x); }, 3);
  auto r2 = degree_integral(twice, Bump{Vec3::Zero(), 0.5});
  CHECK(std::abs(r2.estimate - 1.0) < 1e-6);
  auto sq = interpolate(disk, complex_square, 2);
  auto r3 = degree_integral(sq, Bump{Vec3(0.25, 0, 0), 0.1});
  CHECK(std::abs(r3.estimate - 2.0) < 1e-3);
  CHECK_THROWS_AS(degree_integral(id, Bump{Vec3(0.9, 0, 0), 0.3}), Error);
}

TEST_CASE("bump normalization") {
  for (int dim : {2, 3}) {
    Bump b{Vec3::Zero(), 0.7};
    // Midpoint sum over a fine grid.
    const int n = dim == 2 ? 400 : 80;
    const double hcell = 1.4 / n;
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < (dim == 3 ? n : 1); ++k) {
          Vec3 z(-0.7 + (i + 0.5) * hcell, -0.7 + (j + 0.5) * hcell, dim == 3 ? -0.7 + (k + 0.5) * hcell : 0.0);
          sum += b(z, dim);
        }
    CHECK(sum * std::pow(hcell, dim) == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("cross-method agreement on perturbed identities") {
  auto dom = square(6);
  Rng rng(11);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    Mat3 a = Mat3::Identity();
    a.topLeftCorner<2, 2>() += 0.3 * Eigen::Matrix2d::Random();
    if (trial % 2) a.row(0) *= -1.0;
    std::vector<Vec3> vals;
    for (const auto& p : dom->vertices())
      vals.push_back(a * p + Vec3(0.01 * rng.normal(), 0.01 * rng.normal(), 0.0));
    PiecewiseAffineMap f(dom, vals, 2);
    const Vec3 y(rng.uniform(-0.2, 1.2), rng.uniform(-0.2, 1.2), 0.0);
    try {
      const int j = degree_jacobian(f, y).value;
      CHECK(j == degree_boundary(f, y).value);
      ++checked;
    } catch (const Error&) {
    }
  }
  CHECK(checked >= 45);
}

TEST_CASE("homotopy invariance and locality") {
  auto dom = square(5);
  auto f0 = interpolate(dom, [](const Vec3& x) { return x; }, 2);
  auto f1 = interpolate(dom, [](const Vec3& x) { return Vec3(x.x() + 0.05 * std::sin(7 * x.y()), x.y() + 0.03 * x.x() * x.x(), 0); }, 2);
  const Vec3 y(0.43, 0.57, 0.0);
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    std::vector<Vec3> v;
    for (std::size_t i = 0; i < dom->vertex_count(); ++i) v.push_back((1 - t) * f0.value(i) + t * f1.value(i));
    CHECK(degree_boundary(PiecewiseAffineMap(dom, v, 2), y).value == 1);
  }
  // Perturb an interior vertex far from y.
  std::vector<Vec3> v = f0.values();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!dom->is_boundary_vertex(i) && (dom->vertex(i) - Vec3(0.8, 0.2, 0)).norm() < 0.01) v[i] += Vec3(0.05, -0.05, 0);
  CHECK(degree_jacobian(PiecewiseAffineMap(dom, v, 2), y).value == 1);
}

TEST_CASE("component constancy along a path") {
  auto disk = rotated_disk(8, 0.1);
  auto sq = interpolate(disk, complex_square, 2);
  BoundaryImage b(sq);
  for (int i = 0; i <= 20; ++i) {
    const double a = 2 * std::numbers::pi * i / 20;
    const Vec3 y(0.4 * std::cos(a), 0.4 * std::sin(a), 0);
    CHECK(degree_boundary(b, y, 1e-6).value == 2);
  }
}

namespace {

struct Slab {
  PrismMesh prism;
  std::shared_ptr<PiecewiseAffineMap> ext;
};

Slab make_slab(int res, int levels) {
  auto base = std::make_shared<TriangulatedDomain>(build_grid_domain(2, Box{Vec3(0, 0, 0), Vec3(1, 1, 0)}, res));
  Slab s;
  s.prism = extrude_cylinder(base, levels, 1.0);
  s.ext = std::make_shared<PiecewiseAffineMap>(interpolate(s.prism.mesh, [](const Vec3& x) { return x; }, 3));
  return s;
}

DomainPtr u2_domain(int res) {
  return std::make_shared<TriangulatedDomain>(build_grid_domain(2, Box{Vec3(2, 0, 0), Vec3(3, 1, 0)}, res));
}

}  // namespace

TEST_CASE("degree field on the slab") {
  auto slab = make_slab(4, 2);
  auto dom = u2_domain(8);
  auto below = interpolate(dom, [](const Vec3& x) { return Vec3(x.x() - 2, x.y(), -0.5); }, 3);
  auto grid = grid_samples(*dom, 16, 16);
  auto f0 = degree_field(*slab.ext, below, grid);
  CHECK(f0.excluded_count() == 0);
  CHECK(f0.level_counts() == std::map<int, std::size_t>{{0, 256}});

  auto crossing = interpolate(dom, [](const Vec3& x) { return Vec3(0.3 + 0.4 * (x.x() - 2), x.y() * 0.8 + 0.1, 2 * (x.x() - 2) - 0.5); }, 3);
  auto f1 = degree_field(*slab.ext, crossing, grid);
  auto counts = f1.level_counts();
  REQUIRE(counts.count(0));
  REQUIRE(counts.count(1));
  // Inside the slab for x1 - 2 in (1/4, 3/4): half of U2.
  CHECK(counts[1] * f1.sample_weight == doctest::Approx(0.5).epsilon(0.07));
  BoundaryImage bnd(*slab.ext);
  CHECK(level_set_boundary_check(f1, bnd).empty());

  DegreeField corrupted = f1;
  corrupted.results[8 * 16 + 2].value += 1;
  CHECK(!level_set_boundary_check(corrupted, bnd).empty());

  auto tangent = interpolate(dom, [](const Vec3& x) { return Vec3(x.x() - 2, x.y(), 1 + (x.x() - 2.5) * (x.x() - 2.5)); }, 3);
  auto g9 = grid_samples(*dom, 9, 9);
  auto f2 = degree_field(*slab.ext, tangent, g9);
  std::size_t on_line = 0;
  for (std::size_t i = 0; i < f2.size(); ++i)
    if (f2.cells[i][0] == 4) {
      ++on_line;
      CHECK(f2.excluded[i]);
    }
  CHECK(on_line == 9);
  CHECK(f2.level_counts().count(1) == 0);
}
