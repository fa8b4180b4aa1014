#include "doctest.h"
#include "platecheck/elasticity.hpp"

#include <cmath>
#include <numbers>

using namespace platecheck;

namespace {

DomainPtr square(int res) {
  return std::make_shared<TriangulatedDomain>(build_grid_domain(2, Box{Vec3(0, 0, 0), Vec3(1, 1, 0)}, res));
}

DomainPtr cube(int res) {
  return std::make_shared<TriangulatedDomain>(build_grid_domain(3, Box{Vec3(0, 0, 0), Vec3(1, 1, 1)}, res));
}

Mat3 rot(double angle, Vec3 axis) { return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix(); }

}  // namespace

TEST_CASE("scaled gradient examples") {
  auto prism = plate_prism(square(3), 2);
  for (double h : {1.0, 0.5, 0.01}) {
    auto d = make_scaled(prism, [h](const Vec3& x) { return Vec3(x.x(), x.y(), h * x.z()); }, h);
    for (std::size_t s = 0; s < prism.mesh->simplex_count(); ++s) CHECK((scaled_gradient(d, s) - Mat3::Identity()).norm() < 1e-12);
  }
  auto d = make_scaled(prism, [](const Vec3& x) { return x; }, 0.5);
  CHECK((scaled_gradient(d, 0).col(2) - Vec3(0, 0, 2)).norm() < 1e-12);
  const Mat3 R = rot(0.7, Vec3(1, 2, 3));
  auto r = make_scaled(prism, [&](const Vec3& x) { return Vec3(R * x); }, 1.0);
  CHECK((scaled_gradient(r, 3) - R).norm() < 1e-12);
}

TEST_CASE("dist_SO3 examples") {
  CHECK(dist_SO3(Mat3::Identity()) == doctest::Approx(0.0));
  CHECK(dist_SO3(Eigen::Vector3d(2, 1, 1).asDiagonal().toDenseMatrix()) == doctest::Approx(1.0));
  const Mat3 refl = Eigen::Vector3d(-1, 1, 1).asDiagonal().toDenseMatrix();
  CHECK(dist_SO3(refl) == doctest::Approx(2.0));
  Mat3 bad = Mat3::Identity();
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(dist_SO3(bad), Error);
}

TEST_CASE("dist_SO3 of a reflection against brute-force rotation search") {
  const Mat3 refl = Eigen::Vector3d(-1, 1, 1).asDiagonal().toDenseMatrix();
  Rng rng(3);
  double best = 1e9;
  for (int i = 0; i < 1000000; ++i) best = std::min(best, (refl - random_rotation(rng)).norm());
  CHECK(best >= dist_SO3(refl) - 1e-12);
  CHECK(best - dist_SO3(refl) < 1e-3);
}

TEST_CASE("frame indifference and zero set") {
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    Mat3 F = Mat3::Random();
    const Mat3 Q = random_rotation(rng);
    CHECK(std::abs(dist_SO3(Q * F) - dist_SO3(F)) < 1e-9);
    CHECK(std::abs(dist_SO3(F * Q) - dist_SO3(F)) < 1e-9);
    CHECK(dist_SO3(Q) < 1e-12);
    CHECK((nearest_rotation(F).transpose() * nearest_rotation(F) - Mat3::Identity()).norm() < 1e-10);
    CHECK(nearest_rotation(F).determinant() == doctest::Approx(1.0));
  }
  CHECK(dist_SO3(Eigen::Vector3d(1, 1, -1).asDiagonal().toDenseMatrix()) > 1.0);
}

TEST_CASE("default density screen") {
  auto s = screen_density(default_density(), 200, 1);
  CHECK(s.zero_at_identity);
  CHECK(s.right_invariant);
  CHECK(s.left_invariant);
  CHECK(s.coercive);
  CHECK(s.x3_independent);
  StoredEnergyDensity skew{"skew", [](const Vec3& x, const Mat3& F) { return (F - Mat3::Identity()).squaredNorm() * (1 + x.z()); }, 1.0};
  auto t = screen_density(skew, 200, 1);
  CHECK(!t.right_invariant);
  CHECK(!t.left_invariant);
  CHECK(!t.x3_independent);
}

TEST_CASE("energy examples") {
  auto prism = plate_prism(square(3), 2);
  const double h = 0.1;
  auto k = make_scaled(prism, [h](const Vec3& x) { return Vec3(x.x(), x.y(), h * x.z()); }, h);
  CHECK(energy_Ih(k, default_density()) < 1e-20);
  Mat3 F0;
  F0 << 1.2, 0.1, 0, 0, 0.9, 0.2, 0.1, 0, 1.1;
  auto c = make_scaled(prism, [&](const Vec3& x) { return Vec3(F0 * Vec3(x.x(), x.y(), h * x.z())); }, h);
  CHECK(energy_Ih(c, default_density()) == doctest::Approx(dist_SO3(F0) * dist_SO3(F0)));
  // Invariance under rigid motions applied after the deformation.
  auto w = make_scaled(prism, [h](const Vec3& x) { return Vec3(x.x() + 0.1 * x.y() * x.y(), x.y(), h * x.z() * (1 + x.x())); }, h);
  const Mat3 R = rot(1.1, Vec3(0.3, -1, 2));
  std::vector<Vec3> moved;
  for (const auto& v : w.y->values()) moved.push_back(R * v + Vec3(1, 2, 3));
  auto wm = make_scaled(prism, moved, h);
  CHECK(energy_Ih(wm, default_density()) == doctest::Approx(energy_Ih(w, default_density())).epsilon(1e-10));
}

TEST_CASE("scaling check examples") {
  auto quad = scaling_check({0.1, 0.05, 0.025}, {0.01, 0.0025, 0.000625}, 1.0);
  CHECK(quad.slope == doctest::Approx(2.0));
  CHECK(quad.pass);
  auto flat = scaling_check({0.1, 0.05, 0.025}, {1.0, 1.0, 1.0}, 0.01);
  CHECK(flat.slope == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(!flat.pass);
  auto zero = scaling_check({0.1, 0.05, 0.025}, {0.0, 0.0, 0.0}, 1.0);
  CHECK(zero.exact_rigid);
  CHECK(zero.pass);
  CHECK_THROWS_AS(scaling_check({0.1, 0.05}, {1, 1}, 1.0), Error);
}

TEST_CASE("rigidity fit of rigid motions") {
  auto c = cube(3);
  Rng rng(4);
  for (int i = 0; i < 5; ++i) {
    const Mat3 Q = random_rotation(rng);
    const Vec3 t(rng.normal(), rng.normal(), rng.normal());
    auto v = interpolate(c, [&](const Vec3& x) { return Vec3(Q * x + t); }, 3);
    auto fit = rigidity_fit(v, Vec3(0.5, 0.5, 0.5), 0.4);
    CHECK(fit.residual <= 1e-10);
    CHECK((fit.R - Q).norm() < 1e-10);
    CHECK((fit.b - t).norm() < 1e-10);
  }
  auto v = interpolate(c, [](const Vec3& x) { return x; }, 3);
  CHECK_THROWS_AS(rigidity_fit(v, Vec3(5, 5, 5), 0.1), Error);
}

TEST_CASE("rigidity fit optimality and reflection") {
  auto c = cube(4);
  const Mat3 Q = rot(0.4, Vec3(1, 1, 0));
  auto pert = [&](double eps) {
    return interpolate(c, [&, eps](const Vec3& x) {
      return Vec3(Q * x + eps * Vec3(std::sin(3 * x.y()), x.x() * x.z(), std::cos(2 * x.x())));
    }, 3);
  };
  Rng rng(8);
  auto v = pert(0.05);
  auto fit = rigidity_fit(v, Vec3(0.5, 0.5, 0.5), 0.45);
  for (int i = 0; i < 1000; ++i) CHECK(fit.residual <= rigidity_misfit(v, fit, random_rotation(rng)) + 1e-12);
  // Residual scales linearly in eps.
  std::vector<double> ratios;
  for (double eps : {1e-3, 5e-4, 2.5e-4}) ratios.push_back(rigidity_fit(pert(eps), Vec3(0.5, 0.5, 0.5), 0.45).residual / eps);
  for (double r : ratios) CHECK(r == doctest::Approx(ratios[0]).epsilon(0.01));

  const Mat3 refl = Eigen::Vector3d(-1, 1, 1).asDiagonal().toDenseMatrix();
  auto m = interpolate(c, [&](const Vec3& x) { return Vec3(refl * x); }, 3);
  auto rf = rigidity_fit_domain(m);
  CHECK(rf.R.determinant() == doctest::Approx(1.0));
  CHECK(rf.residual == doctest::Approx(dist_SO3(refl) * std::sqrt(rf.volume)));
  CHECK(rf.residual == doctest::Approx(rf.dist_norm));
  for (int i = 0; i < 200; ++i) CHECK(rf.residual <= rigidity_misfit(m, rf, random_rotation(rng)) + 1e-12);
}

TEST_CASE("rigidity constant scan") {
  const TriangulatedDomain dom = build_grid_domain(3, Box{Vec3(0, 0, 0), Vec3(1, 1, 1)}, 3);
  std::vector<std::function<Vec3(const Vec3&)>> rigid{[](const Vec3& x) { return Vec3(rot(0.3, Vec3(0, 0, 1)) * x); }};
  auto r = rigidity_constant_scan(rigid, dom, {1.0, 0.5});
  for (const auto& row : r.rows) CHECK(row.exact_rigid);
  std::vector<std::function<Vec3(const Vec3&)>> family;
  for (double a : {0.05, 0.1, 0.2})
    family.push_back([a](const Vec3& x) { return Vec3(x.x() + a * std::sin(2 * x.y()), x.y() + a * x.x() * x.z(), x.z() - a * x.y() * x.y()); });
  auto s = rigidity_constant_scan(family, dom, {1.0, 0.5, 0.25});
  CHECK(s.spread < 0.1);
  for (const auto& row : s.rows) CHECK(row.constant > 0.0);
  auto single = rigidity_constant_scan({family[0]}, dom, {1.0, 2.0});
  CHECK(std::isfinite(single.rows[0].constant));
}

TEST_CASE("midplane average") {
  auto base = square(3);
  auto prism = plate_prism(base, 3);
  auto a = make_scaled(prism, [](const Vec3& x) { return Vec3(x.x() * 2, x.y(), x.x() * x.y()); }, 0.2);
  auto avg = midplane_average(a);
  for (std::size_t i = 0; i < base->vertex_count(); ++i) {
    const Vec3 x = base->vertex(i);
    CHECK((avg.value(i) - Vec3(2 * x.x(), x.y(), x.x() * x.y())).norm() < 1e-14);
  }
  auto b = make_scaled(prism, [](const Vec3& x) { return x; }, 0.2);
  for (const auto& v : midplane_average(b).values()) CHECK(std::abs(v.z()) < 1e-15);
  // Affine reparametrization of the in-plane variables commutes with averaging.
  auto g = [](const Vec3& x) { return Vec3(std::sin(x.x()), x.y() * x.x(), x.z() * (1 + x.y())); };
  auto c = make_scaled(prism, g, 0.3);
  auto base2 = std::make_shared<TriangulatedDomain>(build_grid_domain(2, Box{Vec3(1, 2, 0), Vec3(3, 3, 0)}, 3));
  auto prism2 = plate_prism(base2, 3);
  auto affine = [](const Vec3& x) { return Vec3((x.x() - 1) / 2, x.y() - 2, x.z()); };
  auto c2 = make_scaled(prism2, [&](const Vec3& x) { return g(affine(x)); }, 0.3);
  auto m1 = midplane_average(c), m2 = midplane_average(c2);
  for (std::size_t i = 0; i < base->vertex_count(); ++i) CHECK((m1.value(i) - m2.value(i)).norm() < 1e-14);
}

TEST_CASE("shortness residual") {
  auto b = square(4);
  for (double r : shortness_residual(interpolate(b, [](const Vec3&) { return Vec3(1, 2, 3); }, 3))) CHECK(r == 0.0);
  for (double r : shortness_residual(interpolate(b, [](const Vec3& x) { return Vec3(x.x(), x.y(), 0); }, 3))) CHECK(r == doctest::Approx(0.0));
  for (double r : shortness_residual(interpolate(b, [](const Vec3& x) { return Vec3(2 * x.x(), x.y(), 0); }, 3))) CHECK(r == doctest::Approx(3.0));
}

TEST_CASE("isometry residual and second fundamental form") {
  auto flat = isometry_residual_and_II(interpolate(square(4), [](const Vec3& x) { return Vec3(x.x(), x.y(), 0); }, 3));
  for (std::size_t s = 0; s < flat.residual.size(); ++s) {
    CHECK(flat.residual[s] < 1e-14);
    CHECK(flat.second_form[s].norm() < 1e-14);
  }
  const double r = 0.5;
  auto cyl = interpolate(square(128), [r](const Vec3& x) { return Vec3(r * std::sin(x.x() / r), x.y(), r * std::cos(x.x() / r)); }, 3);
  auto rep = isometry_residual_and_II(cyl);
  double max_res = 0.0;
  std::size_t good = 0, interior = 0;
  for (std::size_t s = 0; s < rep.residual.size(); ++s) {
    max_res = std::max(max_res, rep.residual[s]);
    // Boundary vertex normals see one-sided facets; judge interior simplices.
    bool touches = false;
    for (int i = 0; i < 3; ++i) touches = touches || cyl.domain().is_boundary_vertex(cyl.domain().simplex(s)[i]);
    if (touches) continue;
    const Mat2 sym = 0.5 * (rep.second_form[s] + rep.second_form[s].transpose());
    Eigen::SelfAdjointEigenSolver<Mat2> es(sym);
    const auto ev = es.eigenvalues().cwiseAbs();
    ++interior;
    if (std::abs(ev.minCoeff()) < 0.02 / r && std::abs(ev.maxCoeff() - 1 / r) < 0.02 / r) ++good;
  }
  CHECK(max_res < 1e-3);
  CHECK(good == interior);
  auto base_ok = std::make_shared<TriangulatedDomain>(build_grid_domain(2, Box{Vec3(0.3, 0, 0), Vec3(1.3, 1, 0)}, 8));
  auto sp = isometry_residual_and_II(interpolate(base_ok, [](const Vec3& x) {
    const double th = x.x(), ph = x.y();
    return Vec3(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
  }, 3));
  double worst = 0.0;
  for (double v : sp.residual) worst = std::max(worst, v);
  CHECK(worst > 0.1);
  auto degenerate = interpolate(square(2), [](const Vec3& x) { return Vec3(x.x(), 0, 0); }, 3);
  CHECK_THROWS_AS(isometry_residual_and_II(degenerate), Error);
}

TEST_CASE("von Karman extraction round trips") {
  auto base = square(4);
  auto prism = plate_prism(base, 2);
  const double h = 0.05, beta = 3.0;
  auto id = make_scaled(prism, [h](const Vec3& x) { return Vec3(x.x(), x.y(), h * x.z()); }, h);
  auto f = vk_extract(id, beta);
  for (std::size_t i = 0; i < base->vertex_count(); ++i) {
    CHECK(f.u.value(i).norm() < 1e-14);
    CHECK(std::abs(f.v.values[i]) < 1e-14);
  }
  const Vec3 a(0.3, -0.2, 0);
  auto shifted = make_scaled(prism, [&](const Vec3& x) { return Vec3(x.x() + std::pow(h, beta - 2) * a.x(), x.y() + std::pow(h, beta - 2) * a.y(), h * x.z()); }, h);
  const auto fs = vk_extract(shifted, beta);
  for (const auto& u : fs.u.values()) CHECK((u - a).norm() < 1e-12);
  auto g = [](const Vec3& x) { return x.x() * x.x() - 0.5 * x.y(); };
  auto bent = make_scaled(prism, [&](const Vec3& x) { return Vec3(x.x(), x.y(), h * x.z() + std::pow(h, beta / 2 - 1) * g(x)); }, h);
  auto fb = vk_extract(bent, beta);
  for (std::size_t i = 0; i < base->vertex_count(); ++i) CHECK(std::abs(fb.v.values[i] - g(base->vertex(i))) < 1e-12);
  CHECK_THROWS_AS(vk_extract(id, 2.0), Error);
  CHECK_THROWS_AS(vk_extract(id, 4.5), Error);
}

TEST_CASE("von Karman constraint residual") {
  auto base = square(6);
  auto zero_u = interpolate(base, [](const Vec3&) { return Vec3::Zero(); }, 2);
  ScalarField c{base, std::vector<double>(base->vertex_count(), 2.5)};
  for (double r : vk_constraint_residual(zero_u, c).residual) CHECK(r <= 1e-10);
  ScalarField lin{base, {}};
  for (const auto& p : base->vertices()) lin.values.push_back(p.x());
  auto u = interpolate(base, [](const Vec3& x) { return Vec3(-x.x() / 2, 0, 0); }, 2);
  for (double r : vk_constraint_residual(u, lin).residual) CHECK(r <= 1e-10);
  ScalarField saddle{base, {}};
  for (const auto& p : base->vertices()) saddle.values.push_back(p.x() * p.y());
  auto res = vk_constraint_residual(zero_u, saddle);
  for (double r : res.residual) CHECK(r > 0.0);
  // Central finite-difference Hessian of x1 x2.
  auto v = [](double x, double y) { return x * y; };
  const double e = 1e-3, x0 = 0.4, y0 = 0.6;
  const double hxx = (v(x0 + e, y0) - 2 * v(x0, y0) + v(x0 - e, y0)) / (e * e);
  const double hyy = (v(x0, y0 + e) - 2 * v(x0, y0) + v(x0, y0 - e)) / (e * e);
  const double hxy = (v(x0 + e, y0 + e) - v(x0 + e, y0 - e) - v(x0 - e, y0 + e) + v(x0 - e, y0 - e)) / (4 * e * e);
  const double fd = hxx * hyy - hxy * hxy;
  int interior = 0;
  for (std::size_t i = 0; i < base->vertex_count(); ++i) {
    if (base->is_boundary_vertex(i)) continue;
    ++interior;
    CHECK(std::abs(res.hessian_det[i] - fd) < 1e-6);
  }
  CHECK(interior > 0);
}
