#include "doctest.h"
#include "platecheck/interpenetration.hpp"

#include <cmath>

using namespace platecheck;

namespace {

DomainPtr rect(double x0, double x1, double y0, double y1, int nx, int ny) {
  return std::make_shared<TriangulatedDomain>(
      build_grid_domain(2, Box{Vec3(x0, y0, 0), Vec3(x1, y1, 0)}, {nx, ny, 1}));
}

PiecewiseAffineMap flat_sheet() {
  return interpolate(rect(0, 1, 0, 1, 8, 8), [](const Vec3& x) { return Vec3(x.x(), x.y(), 0); }, 3);
}

// Vertical sheet over [2,3] x [0,1] through the line x = 0.5, spanning z in [z0, z0 + 1].
PiecewiseAffineMap vertical_sheet(double z0) {
  return interpolate(
      rect(2, 3, 0, 1, 8, 8), [=](const Vec3& x) { return Vec3(0.5, 0.25 + 0.5 * x.y(), z0 + x.x() - 2.0); }, 3);
}

}  // namespace

TEST_CASE("identity maps have no overlap") {
  auto sq = rect(0, 1, 0, 1, 6, 6);
  CHECK(invertibility_ae_check(interpolate(sq, [](const Vec3& x) { return x; }, 2)).overlap == 0.0);
  auto cube = std::make_shared<TriangulatedDomain>(build_grid_domain(3, Box{Vec3::Zero(), Vec3::Ones()}, 3));
  CHECK(invertibility_ae_check(interpolate(cube, [](const Vec3& x) { return x; }, 3)).overlap == 0.0);
}

TEST_CASE("folded strip overlaps with measure one") {
  auto strip = rect(0, 2, 0, 1, 16, 8);
  auto fold = [](const Vec3& x) { return Vec3(std::min(x.x(), 2.0 - x.x()), x.y(), 0); };
  const auto planar = invertibility_ae_check(interpolate(strip, fold, 2));
  CHECK(planar.overlap == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_FALSE(planar.witnesses.empty());
  CHECK(planar.witnesses.size() <= 16);
  const auto spatial = invertibility_ae_check(interpolate(strip, fold, 3));
  CHECK(spatial.overlap == doctest::Approx(1.0).epsilon(1e-9));

  auto bar = std::make_shared<TriangulatedDomain>(build_grid_domain(3, Box{Vec3::Zero(), Vec3(2, 1, 1)}, {4, 2, 2}));
  auto fold3 = [](const Vec3& x) { return Vec3(std::min(x.x(), 2.0 - x.x()), x.y(), x.z()); };
  CHECK(invertibility_ae_check(interpolate(bar, fold3, 3)).overlap == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("randomized injective maps have zero overlap") {
  auto cube = std::make_shared<TriangulatedDomain>(build_grid_domain(3, Box{Vec3::Zero(), Vec3::Ones()}, 3));
  auto sq = rect(0, 1, 0, 1, 8, 8);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const Mat3 R = random_rotation(rng);
    const Vec3 b(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
    const double a = rng.uniform(0.0, 0.1);
    auto f = [&](const Vec3& x) {
      return Vec3(R * Vec3(x.x() + a * std::sin(3 * x.y()), x.y() + a * std::sin(2 * x.z()), x.z()) + b);
    };
    CHECK(invertibility_ae_check(interpolate(cube, f, 3)).overlap <= 1e-12);
    CHECK(invertibility_ae_check(interpolate(sq, f, 3)).overlap <= 1e-12);
  }
}

TEST_CASE("extension reproduces u1 on its base") {
  const auto u1 = flat_sheet();
  for (CapMode mode : {CapMode::normal_offset, CapMode::cone}) {
    ExtensionSpec spec;
    spec.mode = mode;
    spec.apex = Vec3(0.5, 0.5, 2.0);
    const Extension ext = build_extension(u1, spec);
    for (std::size_t v = 0; v < u1.domain().vertex_count(); ++v) CHECK(ext.map->value(v) == u1.value(v));
    const auto top = ext.map->value(ext.prism.vertex_index(spec.levels, 0));
    CHECK((top - (mode == CapMode::cone ? spec.apex : Vec3(0, 0, 1))).norm() < 1e-12);
  }
  ExtensionSpec bad;
  bad.levels = 1;
  CHECK_THROWS_AS(build_extension(u1, bad), Error);
}

TEST_CASE("crossing sheet is a simple interpenetration") {
  const auto u1 = flat_sheet();
  const auto rep = check_simple_interpenetration(u1, vertical_sheet(-0.5), ExtensionSpec{});
  CHECK(rep.verdict == Verdict::simple_interpenetration);
  CHECK(rep.uses_k0);
  CHECK(std::abs(rep.witnesses[0]) == 1);
  CHECK(rep.witnesses[1] == 0);
  CHECK(rep.margin_base > 0.0);
  CHECK(rep.margin_u2 > 0.0);
  for (const auto& l : rep.levels) CHECK(l.measure.value == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("sheet above the slab gives no evidence") {
  const auto rep = check_simple_interpenetration(flat_sheet(), vertical_sheet(1.5), ExtensionSpec{});
  CHECK(rep.verdict == Verdict::no_evidence);
  REQUIRE(rep.levels.size() == 1);
  CHECK(rep.levels[0].k == 0);
}

TEST_CASE("sheet touching the slab top is boundary degenerate") {
  auto u2 = interpolate(
      rect(2, 3, 0, 1, 4, 4), [](const Vec3& x) { return Vec3(0.25 + 0.5 * (x.x() - 2), 0.25 + 0.5 * x.y(), 1.0); },
      3);
  const auto rep = check_simple_interpenetration(flat_sheet(), u2, ExtensionSpec{});
  CHECK(rep.verdict == Verdict::boundary_degenerate);
  CHECK(rep.margin_u2 <= 1e-9);
}

TEST_CASE("overlapping domains are rejected") {
  auto u2 = interpolate(rect(0.5, 1.5, 0, 1, 4, 4), [](const Vec3& x) { return Vec3(x.x(), x.y(), 3); }, 3);
  CHECK_THROWS_AS(check_simple_interpenetration(flat_sheet(), u2, ExtensionSpec{}), Error);
}

TEST_CASE("cutoff vanishes on the boundary and is one inside") {
  const auto sq = rect(0, 1, 0, 1, 8, 8);
  CHECK(inradius(*sq) == doctest::Approx(0.5));
  CHECK(cutoff(*sq, Vec3(0, 0.3, 0), 0.1) == 0.0);
  CHECK(cutoff(*sq, Vec3(0.5, 0.5, 0), 0.1) == 1.0);
  CHECK(cutoff(*sq, Vec3(0.05, 0.5, 0), 0.1) == doctest::Approx(0.5));
  const auto c = choose_collar(flat_sheet(), vertical_sheet(-0.5), -1.0);
  CHECK(c.ok);
  CHECK(c.delta == doctest::Approx(0.05));
}

TEST_CASE("far coincidences of the crossing lie on both sheets") {
  const auto sc = crossing_scenario();
  const double h = 1.0 / 16;
  const auto y = sc.sequence(h);
  const auto u_h = midplane_average(y);
  FhReport f = find_far_coincidences(u_h, h, default_tau(u_h, h));
  CHECK_FALSE(f.tau_warning);
  REQUIRE(f.F.count() > 0);
  CHECK(f.partners.size() == f.F.count());
  bool in_u1 = false, in_u2 = false;
  for (const auto& c : f.F.occupied()) (f.F.cell_center(c[0], c[1]).x() <= 1.0 ? in_u1 : in_u2) = true;
  CHECK(in_u1);
  CHECK(in_u2);
  CHECK(f.cap1_lower > 0.0);
  CHECK(f.cap1_lower <= f.cap1_upper);
  classify_good_bad(f, u_h, y);
  CHECK(f.majority_good);
  CHECK(f.good + f.bad == f.points.size());
  for (const auto& p : f.points) CHECK((p.x - p.partner).norm() > 2 * h);
  const double vol = noninvertibility_volume(f, y);
  CHECK(vol > 0.0);
}

TEST_CASE("far coincidences of an injective sheet are empty") {
  const auto u = flat_sheet();
  const auto f = find_far_coincidences(u, 0.05, 0.02);
  CHECK(f.F.count() == 0);
}

TEST_CASE("affine comparison rejects distant pieces") {
  auto base = rect(0, 1, 0, 1, 8, 8);
  const auto prism = plate_prism(base, 1);
  const double h = 0.1;
  const auto y = make_scaled(prism, [&](const Vec3& x) { return Vec3(x.x(), x.y(), h * x.z()); }, h);
  const auto same = affine_compare(y, Vec3(0.5, 0.5, 0), Vec3(0.5, 0.5, 0));
  CHECK_FALSE(same.rejected);
  CHECK(same.fraction == doctest::Approx(1.0));
  CHECK(same.sup_deviation < 1e-9);
  const auto apart = affine_compare(y, Vec3(0.3, 0.5, 0), Vec3(0.7, 0.5, 0));
  CHECK(apart.rejected);
  CHECK(apart.gap == doctest::Approx(0.4));
}

TEST_CASE("crossing pipeline passes every premise") {
  PipelineOptions opt;
  opt.simple.grid = 32;
  const auto rep = run_pipeline(crossing_scenario(), {1.0 / 8, 1.0 / 16, 1.0 / 32}, opt);
  CHECK(rep.failed_step == "");
  CHECK(rep.pass);
  CHECK(rep.scaling.slope == doctest::Approx(2.0).epsilon(0.05));
  for (const auto& r : rep.rows) {
    CHECK(r.degree_l1 == 0.0);
    CHECK(r.volume > 0.0);
  }
  CHECK_THROWS_AS(run_pipeline(crossing_scenario(), {0.1, 0.05}, opt), Error);
}
