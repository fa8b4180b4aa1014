#include "platecheck/degree.hpp"
#include "platecheck/elasticity.hpp"
#include "platecheck/interpenetration.hpp"
#include "platecheck/measure.hpp"
#include "platecheck/pathology.hpp"
#include "platecheck/report.hpp"
#include "platecheck/truncation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>

using namespace platecheck;

namespace {

// Pinned tolerances.
constexpr double kIntegralTol = 1e-3;
constexpr double kRigidTol = 1e-10;
constexpr double kScanSpread = 0.1;
constexpr double kTruncC1 = 1.0;
constexpr double kRatioSpread = 2.0;
constexpr double kIsoDrift = 2.0;
constexpr double kOverlapTol = 1e-3;
constexpr double kLimitRel = 0.02;
constexpr double kSlopeLo = 1.8, kSlopeHi = 2.2;
constexpr double kLevelFraction = 0.05;
constexpr double kCapFloor = 1.0;
constexpr double kVolumeC = 3.9;
constexpr double kVkTol = 1e-10;
constexpr double kHessTol = 1e-6;
constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = true;
  Json details = Json::object();
  std::string note;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) note = what;
    pass = pass && ok;
  }
};

DomainPtr square(int res) {
  return std::make_shared<TriangulatedDomain>(build_grid_domain(2, Box{Vec3(0, 0, 0), Vec3(1, 1, 0)}, res));
}

DomainPtr cube(int res) {
  return std::make_shared<TriangulatedDomain>(build_grid_domain(3, Box{Vec3(0, 0, 0), Vec3(1, 1, 1)}, res));
}

Vec3 complex_square(const Vec3& x) { return Vec3(x.x() * x.x() - x.y() * x.y(), 2 * x.x() * x.y(), 0.0); }

// ---- 1 ----

PiecewiseAffineMap random_map(int trial, Rng& rng) {
  static const auto sq = square(6);
  static const auto ball = std::make_shared<TriangulatedDomain>(build_ball_domain(Vec3::Zero(), 1.0, 4));
  static const auto disk = [] {
    auto d = build_disk_domain(Vec3::Zero(), 1.0, 8);
    std::vector<Vec3> v = d.vertices();
    const double c = std::cos(0.1), s = std::sin(0.1);
    for (auto& p : v) p = Vec3(c * p.x() - s * p.y(), s * p.x() + c * p.y(), 0.0);
    return std::make_shared<TriangulatedDomain>(2, v, d.simplices());
  }();
  switch (trial % 4) {
    case 0: {
      Mat3 a = Mat3::Identity();
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) a(i, j) += rng.uniform(-0.3, 0.3);
      if (rng.uniform() < 0.5) a.row(0) *= -1.0;
      std::vector<Vec3> v;
      for (const auto& p : sq->vertices()) v.push_back(a * p + Vec3(0.01 * rng.normal(), 0.01 * rng.normal(), 0));
      return PiecewiseAffineMap(sq, v, 2);
    }
    case 1: {
      const double fold = rng.uniform(0.55, 0.9);
      return interpolate(sq, [&](const Vec3& x) { return Vec3(x.x() < fold ? x.x() : 2 * fold - x.x(), x.y(), 0); }, 2);
    }
    case 2: {
      const double s = rng.uniform(0.5, 1.5);
      return interpolate(disk, [&](const Vec3& x) { return Vec3(s * complex_square(x)); }, 2);
    }
    default: {
      std::vector<Vec3> v;
      for (const auto& p : ball->vertices())
        v.push_back(p + Vec3(0.02 * rng.normal(), 0.02 * rng.normal(), 0.02 * rng.normal()));
      return PiecewiseAffineMap(ball, v, 3);
    }
  }
}

Outcome degree_cross_validation() {
  Outcome o;
  Rng rng(kSeed);
  int agree = 0, evaluated = 0, skipped = 0, integral_ok = 0;
  double worst_integral = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = random_map(trial, rng);
    const Box b = f.image_bounds();
    const int dim = f.target_dimension();
    Vec3 y = Vec3::Zero();
    for (int i = 0; i < dim; ++i) y[i] = rng.uniform(b.lo[i] + 0.1 * (b.hi[i] - b.lo[i]), b.hi[i] - 0.1 * (b.hi[i] - b.lo[i]));
    try {
      const auto j = degree_jacobian(f, y);
      const auto bd = degree_boundary(f, y);
      ++evaluated;
      agree += j.value == bd.value;
      const double r = std::min(0.5 * bd.margin, 0.1);
      IntegralOptions io;
      io.tolerance = 1e-5;
      const auto in = degree_integral(f, Bump{y, r}, io);
      const double err = std::abs(in.estimate - j.value);
      worst_integral = std::max(worst_integral, err);
      integral_ok += err <= kIntegralTol;
    } catch (const Error& e) {
      if (e.code() != Errc::boundary_proximity) throw;
      ++skipped;
    }
  }
  o.require(evaluated >= 90, "fewer than 90 maps evaluated");
  o.require(agree == evaluated, "jacobian and boundary degrees disagree");
  o.require(integral_ok == evaluated, "integral degree outside tolerance");

  // Homotopy invariance on 50 pairs.
  const auto sq = square(5);
  int homotopies = 0, invariant = 0;
  for (int pair = 0; pair < 50; ++pair) {
    std::vector<Vec3> v0, v1;
    const double a = rng.uniform(-0.1, 0.1), b = rng.uniform(-0.1, 0.1);
    for (const auto& p : sq->vertices()) {
      v0.push_back(p + Vec3(0.01 * rng.normal(), 0.01 * rng.normal(), 0));
      v1.push_back(Vec3(p.x() + a * std::sin(5 * p.y()), p.y() + b * p.x() * p.x(), 0));
    }
    const Vec3 y(rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8), 0);
    int first = 0;
    bool same = true;
    for (int s = 0; s <= 8; ++s) {
      const double t = s / 8.0;
      std::vector<Vec3> v;
      for (std::size_t i = 0; i < v0.size(); ++i) v.push_back((1 - t) * v0[i] + t * v1[i]);
      const int d = degree_boundary(PiecewiseAffineMap(sq, v, 2), y).value;
      if (s == 0) first = d;
      same = same && d == first;
    }
    ++homotopies;
    invariant += same;
  }
  o.require(invariant == homotopies, "degree changed along a homotopy");
  o.details = {{"evaluated", evaluated}, {"skipped", skipped}, {"agree", agree},
               {"integral_within_tolerance", integral_ok}, {"worst_integral_error", number(worst_integral)},
               {"homotopies", homotopies}, {"invariant", invariant}};
  return o;
}

// ---- 2 ----

Outcome level_set_property() {
  Outcome o;
  const auto sc = crossing_scenario();
  const Extension ext = build_extension(*sc.u1, ExtensionSpec{});
  SimpleOptions opt;
  opt.grid = 128;
  const auto rep = check_simple_interpenetration(ext, *sc.u1, *sc.u2, opt);
  const BoundaryImage bnd(*ext.map);
  const auto clean = level_set_boundary_check(rep.field, bnd);
  o.require(clean.empty(), "violations on the clean field");

  // Flip one sample whose grid neighbours share its degree.
  const auto& f = rep.field;
  std::map<std::pair<int, int>, std::size_t> at;
  for (std::size_t i = 0; i < f.size(); ++i) at[{f.cells[i][0], f.cells[i][1]}] = i;
  std::size_t flip = f.size();
  for (std::size_t i = 0; i < f.size() && flip == f.size(); ++i) {
    if (f.excluded[i] || f.results[i].value != 1) continue;
    bool interior = true;
    for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      const auto it = at.find({f.cells[i][0] + di, f.cells[i][1] + dj});
      interior = interior && it != at.end() && !f.excluded[it->second] && f.results[it->second].value == 1;
    }
    if (interior) flip = i;
  }
  o.require(flip < f.size(), "no interior sample to flip");
  std::size_t flipped = 0;
  if (flip < f.size()) {
    DegreeField bad = f;
    bad.results[flip].value += 1;
    flipped = level_set_boundary_check(bad, bnd).size();
  }
  o.require(flipped >= 1, "injected flip not detected");
  o.details = {{"samples", f.size()}, {"violations", clean.size()}, {"violations_after_flip", flipped}};
  return o;
}

// ---- 3 ----

Mat3 rot(double angle, const Vec3& axis) { return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix(); }

Outcome rigidity() {
  Outcome o;
  const auto c = cube(3);
  Rng rng(kSeed + 3);
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const Mat3 Q = random_rotation(rng);
    const Vec3 t(rng.normal(), rng.normal(), rng.normal());
    const auto v = interpolate(c, [&](const Vec3& x) { return Vec3(Q * x + t); }, 3);
    worst = std::max(worst, rigidity_fit(v, Vec3(0.5, 0.5, 0.5), 0.4).residual);
  }
  o.require(worst <= kRigidTol, "rigid motion residual above tolerance");

  const auto c4 = cube(4);
  int optimal_fail = 0;
  for (double eps : {0.02, 0.05, 0.1}) {
    const Mat3 Q = rot(0.4 + eps, Vec3(1, 1, 0));
    const auto v = interpolate(
        c4, [&](const Vec3& x) { return Vec3(Q * x + eps * Vec3(std::sin(3 * x.y()), x.x() * x.z(), std::cos(2 * x.x()))); },
        3);
    const auto fit = rigidity_fit(v, Vec3(0.5, 0.5, 0.5), 0.45);
    for (int i = 0; i < 1000; ++i) optimal_fail += fit.residual > rigidity_misfit(v, fit, random_rotation(rng)) + 1e-12;
  }
  o.require(optimal_fail == 0, "a sampled rotation beats the fit");

  const TriangulatedDomain dom = build_grid_domain(3, Box{Vec3(0, 0, 0), Vec3(1, 1, 1)}, 3);
  std::vector<std::function<Vec3(const Vec3&)>> family;
  for (double a : {0.05, 0.1, 0.2})
    family.push_back([a](const Vec3& x) {
      return Vec3(x.x() + a * std::sin(2 * x.y()), x.y() + a * x.x() * x.z(), x.z() - a * x.y() * x.y());
    });
  const auto scan = rigidity_constant_scan(family, dom, {1.0, 0.5, 0.25});
  o.require(scan.spread < kScanSpread, "rigidity constant varies across scales");
  o.details = {{"worst_rigid_residual", number(worst)}, {"optimality_failures", optimal_fail},
               {"scan_spread", number(scan.spread)}};
  return o;
}

// ---- 4 ----

Outcome truncation() {
  Outcome o;
  const double K = 2.0;
  std::vector<PiecewiseAffineMap> family;
  for (int res : {8, 16, 32, 64}) {
    const auto dom = square(res);
    std::vector<Vec3> v = dom->vertices();
    std::size_t best = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      if ((v[i] - Vec3(0.5, 0.5, 0)).norm() < (v[best] - Vec3(0.5, 0.5, 0)).norm()) best = i;
    v[best].x() += 10.0 * K / res;
    family.emplace_back(dom, v, 2);
  }
  std::size_t changed_good = 0;
  double worst_bound = 0.0;
  for (const auto& f : family) {
    const auto r = lipschitz_truncate(f, K);
    worst_bound = std::max(worst_bound, r.lipschitz_bound / K);
    const auto& dom = f.domain();
    for (std::size_t s = 0; s < dom.simplex_count(); ++s) {
      if (r.bad[s]) continue;
      for (int i = 0; i < 3; ++i) changed_good += r.map->value(dom.simplex(s)[i]) != f.value(dom.simplex(s)[i]);
    }
  }
  const auto sweep = truncation_bound_sweep(family, K);
  o.require(changed_good == 0, "good region changed");
  o.require(worst_bound <= kTruncC1 * (1 + 1e-12), "gradient bound exceeds C1 K");
  o.require(sweep.violations == 0, "mismatch exceeds C2 excess");
  o.require(sweep.ratio_spread <= kRatioSpread, "C2 not stable within a factor 2");
  o.details = {{"C1", number(kTruncC1)}, {"worst_bound_over_K", number(worst_bound)}, {"C2", number(sweep.C2)},
               {"ratio_spread", number(sweep.ratio_spread)}, {"changed_good_values", changed_good}};
  return o;
}

// ---- 5 ----

PixelSet pgrid(int res) { return PixelSet(2, Vec3::Zero(), 1.0 / res, {res, res, 1}); }

PixelSet pblock(int res, int i0, int j0, int k) {
  PixelSet s = pgrid(res);
  for (int j = j0; j < j0 + k; ++j)
    for (int i = i0; i < i0 + k; ++i) s.set(i, j);
  return s;
}

PixelSet psegment(int res) {
  PixelSet s = pgrid(res);
  for (int i = 0; i < res; ++i) s.set(i, res / 2);
  return s;
}

Outcome measure_chain() {
  Outcome o;
  std::vector<PixelSet> sets{psegment(64), pblock(64, 10, 10, 20), pblock(64, 3, 40, 5) | psegment(64)};
  std::vector<PixelSet> nested{pblock(64, 20, 20, 4), pblock(64, 18, 18, 8), pblock(64, 18, 18, 8) | psegment(64)};
  const auto mono = premeasure_monotonicity(sets, nested, 1, {1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4, INFINITY});
  o.require(mono.checks > 0 && mono.delta_violations == 0, "premeasure not monotone in delta");
  o.require(mono.set_violations == 0, "premeasure not monotone in sets");

  std::vector<PixelSet> curves;
  const Box unit{Vec3(0, 0, 0), Vec3(1, 1, 0)};
  for (int c = 0; c < 20; ++c) {
    const double a = 0.05 + 0.015 * c, w = 2.0 + 0.5 * c;
    curves.push_back(rasterize(2, unit, 1.0 / 96, [&](const Vec3& x) {
      return std::abs(x.y() - 0.5 - a * std::sin(w * x.x())) < 1.0 / 96;
    }));
  }
  const auto chain = cap1_hausdorff_chain(curves);
  std::size_t chain_fail = 0;
  for (std::size_t i = 0; i < curves.size(); ++i) chain_fail += chain.cap1[i] > chain.C * chain.hausdorff[i] + 1e-12;
  o.require(chain.C > 0.0 && std::isfinite(chain.C) && chain_fail == 0, "cap1 chain violated");

  const PixelSet U = pblock(128, 0, 0, 128);
  std::vector<PixelSet> family;
  for (int k : {64, 32, 16, 8, 4}) family.push_back(pblock(128, 20, 30, k));
  const auto drift = isoperimetric_family(family, U, kIsoDrift);
  o.require(!drift.flagged && drift.drift_perimeter <= kIsoDrift && drift.drift_cap1 <= kIsoDrift,
            "isoperimetric constant drifts");
  o.details = {{"monotonicity_checks", mono.checks}, {"chain_C", number(chain.C)}, {"curves", curves.size()},
               {"drift_perimeter", number(drift.drift_perimeter)}, {"drift_cap1", number(drift.drift_cap1)}};
  return o;
}

// ---- 6 ----

Outcome muller_spector() {
  Outcome o;
  Json overlaps = Json::array();
  double prev = INFINITY;
  bool decreasing = true;
  std::vector<double> energies, hs;
  for (int k = 0; k <= 3; ++k) {
    MSParams p;
    p.k = k;
    const auto e = ms_element(p);
    const double ov = invertibility_ae_check(e).overlap;
    overlaps.push_back(number(ov));
    o.require(ov < kOverlapTol, "sequence element overlaps");
    double sup = 0.0;
    for (const Vec3& v : e.domain().vertices())
      sup = std::max(sup, (ms_element_point(p, v) - ms_limit_point(p, v)).norm());
    decreasing = decreasing && sup < prev;
    prev = sup;
    energies.push_back(dist_energy(thicken(e)));
    hs.push_back(std::pow(0.5, k));
  }
  o.require(decreasing, "sup distance to the limit not decreasing");
  MSParams p;
  const auto lim = ms_limit(p);
  const double lov = invertibility_ae_check(lim).overlap;
  o.require(std::abs(lov - 1.0) <= kLimitRel, "limit overlap differs from the end square area");
  const auto d = degree_jacobian(thicken(lim), Vec3(0.5, 0.5, 0.5));
  o.require(d.regular && d.value == 2, "limit degree at the doubled point is not 2");
  bool all_fail = true;
  for (double eps : {0.01, 0.1, 0.5, 1.0}) all_fail = all_fail && !scaling_check(hs, energies, eps).pass;
  o.require(all_fail, "sequence passes the energy scaling check");
  o.details = {{"element_overlaps", overlaps}, {"limit_overlap", number(lov)}, {"limit_degree", d.value},
               {"last_sup_distance", number(prev)}, {"energy_slope", number(scaling_check(hs, energies, 0.01).slope)}};
  return o;
}

// ---- 7 ----

Outcome pipeline() {
  Outcome o;
  PipelineOptions opt;
  opt.c = kVolumeC;
  const auto sc = crossing_scenario();
  const auto r = run_pipeline(sc, {1.0 / 16, 1.0 / 32, 1.0 / 64}, opt);
  o.require(r.scaling.pass && r.scaling.slope >= kSlopeLo && r.scaling.slope <= kSlopeHi, "energy scaling slope");
  o.require(r.limit.verdict == Verdict::simple_interpenetration, "limit is not a simple interpenetration");
  const double area = sc.U2->total_volume();
  int big = 0;
  for (const auto& l : r.limit.levels) big += l.measure.value >= kLevelFraction * area;
  o.require(big >= 2, "fewer than two level sets of measure 0.05 |U2|");
  double cap_min = INFINITY;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    cap_min = std::min(cap_min, row.far.cap1_lower);
    o.require(row.volume_over_h2 >= kVolumeC, "noninvertibility volume below c h^2");
    rows.push_back({{"h", number(row.h)}, {"cap1_lower", number(row.far.cap1_lower)},
                    {"good", row.far.good}, {"bad", row.far.bad}, {"volume_over_h2", number(row.volume_over_h2)}});
  }
  o.require(cap_min >= kCapFloor, "F_h capacity not bounded below");
  o.require(r.pass, "pipeline step failed: " + r.failed_step);
  o.details = {{"slope", number(r.scaling.slope)}, {"levels_above_threshold", big}, {"c", number(kVolumeC)},
               {"cap1_floor", number(kCapFloor)}, {"rows", rows}};
  return o;
}

// ---- 8 ----

Outcome no_false_positives() {
  Outcome o;
  Rng rng(kSeed + 8);
  int simple = 0, nonzero = 0;
  Json rows = Json::array();
  for (int i = 0; i < 20; ++i) {
    CrossingParams cp;
    cp.angle_deg = rng.uniform(0.0, 90.0);
    cp.lift = rng.uniform(1.4, 2.0);
    cp.separation = rng.uniform(0.3, 0.8);
    cp.flat_cells = 16;
    cp.arc_cells = 40;
    cp.width_cells = 8;
    const auto sc = crossing_scenario(cp);
    SimpleOptions so;
    so.grid = 32;
    const auto rep = check_simple_interpenetration(*sc.u1, *sc.u2, ExtensionSpec{}, so);
    simple += rep.verdict == Verdict::simple_interpenetration;
    const double h = 1.0 / 16;
    const auto y = sc.sequence(h);
    const auto u_h = midplane_average(y);
    auto far = find_far_coincidences(u_h, h, default_tau(u_h, h));
    classify_good_bad(far, u_h, y);
    const double vol = noninvertibility_volume(far, y);
    nonzero += vol != 0.0;
    rows.push_back({{"verdict", to_string(rep.verdict)}, {"volume", number(vol)}});
  }
  o.require(simple == 0, "injective scenario reported as simple interpenetration");
  o.require(nonzero == 0, "injective scenario has positive noninvertibility volume");
  o.details = {{"scenarios", rows}};
  return o;
}

// ---- 9 ----

Outcome von_karman() {
  Outcome o;
  const auto base = square(4);
  const auto prism = plate_prism(base, 2);
  const double h = 0.05, beta = 3.0;
  double worst = 0.0;
  const auto id = make_scaled(prism, [h](const Vec3& x) { return Vec3(x.x(), x.y(), h * x.z()); }, h);
  const auto f = vk_extract(id, beta);
  for (std::size_t i = 0; i < base->vertex_count(); ++i)
    worst = std::max({worst, f.u.value(i).norm(), std::abs(f.v.values[i])});
  const Vec3 a(0.3, -0.2, 0);
  const double s = std::pow(h, beta - 2);
  const auto shifted = make_scaled(
      prism, [&](const Vec3& x) { return Vec3(x.x() + s * a.x(), x.y() + s * a.y(), h * x.z()); }, h);
  const auto fs = vk_extract(shifted, beta);
  for (const auto& u : fs.u.values()) worst = std::max(worst, (u - a).norm());
  auto g = [](const Vec3& x) { return x.x() * x.x() - 0.5 * x.y(); };
  const auto bent = make_scaled(
      prism, [&](const Vec3& x) { return Vec3(x.x(), x.y(), h * x.z() + std::pow(h, beta / 2 - 1) * g(x)); }, h);
  const auto fb = vk_extract(bent, beta);
  for (std::size_t i = 0; i < base->vertex_count(); ++i)
    worst = std::max(worst, std::abs(fb.v.values[i] - g(base->vertex(i))));
  o.require(worst <= 1e-12, "extraction round trip");

  const auto b6 = square(6);
  double zero_res = 0.0;
  const auto zero_u = interpolate(b6, [](const Vec3&) { return Vec3::Zero(); }, 2);
  for (double r : vk_constraint_residual(zero_u, ScalarField{b6, std::vector<double>(b6->vertex_count(), 2.5)}).residual)
    zero_res = std::max(zero_res, r);
  ScalarField lin{b6, {}};
  for (const auto& p : b6->vertices()) lin.values.push_back(p.x());
  const auto u = interpolate(b6, [](const Vec3& x) { return Vec3(-x.x() / 2, 0, 0); }, 2);
  for (double r : vk_constraint_residual(u, lin).residual) zero_res = std::max(zero_res, r);
  o.require(zero_res <= kVkTol, "analytic zero-residual cases");

  ScalarField saddle{b6, {}};
  for (const auto& p : b6->vertices()) saddle.values.push_back(p.x() * p.y());
  const auto res = vk_constraint_residual(zero_u, saddle);
  auto v = [](double x, double y) { return x * y; };
  const double e = 1e-3, x0 = 0.4, y0 = 0.6;
  const double hxx = (v(x0 + e, y0) - 2 * v(x0, y0) + v(x0 - e, y0)) / (e * e);
  const double hyy = (v(x0, y0 + e) - 2 * v(x0, y0) + v(x0, y0 - e)) / (e * e);
  const double hxy = (v(x0 + e, y0 + e) - v(x0 + e, y0 - e) - v(x0 - e, y0 + e) + v(x0 - e, y0 - e)) / (4 * e * e);
  const double fd = hxx * hyy - hxy * hxy;
  double worst_hess = 0.0;
  for (std::size_t i = 0; i < b6->vertex_count(); ++i)
    if (!b6->is_boundary_vertex(i)) worst_hess = std::max(worst_hess, std::abs(res.hessian_det[i] - fd));
  o.require(worst_hess <= kHessTol, "Hessian determinant differs from finite differences");
  o.details = {{"round_trip_error", number(worst)}, {"zero_residual", number(zero_res)},
               {"hessian_error", number(worst_hess)}};
  return o;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion> kCriteria{
    {1, "degree cross-validation", degree_cross_validation},
    {2, "level set boundary property", level_set_property},
    {3, "rigidity fits and scan", rigidity},
    {4, "Lipschitz truncation bounds", truncation},
    {5, "measure chain", measure_chain},
    {6, "Muller-Spector reproduction", muller_spector},
    {7, "crossing pipeline", pipeline},
    {8, "no false positives", no_false_positives},
    {9, "von Karman surface", von_karman},
};

Json run_suite(std::vector<Outcome>& outcomes, std::vector<double>& seconds) {
  Json rep = make_report("acceptance", kSeed);
  for (const auto& [name, v] : std::vector<std::pair<const char*, double>>{
           {"integral", kIntegralTol}, {"rigid", kRigidTol}, {"scan_spread", kScanSpread}, {"truncation_C1", kTruncC1},
           {"ratio_spread", kRatioSpread}, {"isoperimetric_drift", kIsoDrift}, {"overlap", kOverlapTol},
           {"limit_relative", kLimitRel}, {"slope_low", kSlopeLo}, {"slope_high", kSlopeHi},
           {"level_fraction", kLevelFraction}, {"cap1_floor", kCapFloor}, {"volume_c", kVolumeC},
           {"vk_residual", kVkTol}, {"hessian", kHessTol}})
    set_tolerance(rep, name, v);
  Json results = Json::array();
  for (const auto& c : kCriteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.note = std::string("exception: ") + e.what();
    }
    seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    results.push_back({{"criterion", c.id}, {"name", c.name}, {"pass", out.pass}, {"note", out.note},
                       {"details", out.details}});
    outcomes.push_back(std::move(out));
  }
  rep["result"] = results;
  return rep;
}

}  // namespace

int main() {
  std::vector<Outcome> first, second;
  std::vector<double> t1, t2;
  const std::string a = render_report(run_suite(first, t1));
  const std::string b = render_report(run_suite(second, t2));
  bool all = true;
  for (std::size_t i = 0; i < kCriteria.size(); ++i) {
    const auto& o = first[i];
    all = all && o.pass;
    std::printf("criterion %d %s: %s (%.1f s)%s%s\n", kCriteria[i].id, kCriteria[i].name, o.pass ? "PASS" : "FAIL",
                t1[i], o.note.empty() ? "" : ": ", o.note.c_str());
  }
  const bool same = a == b;
  all = all && same;
  std::printf("criterion 10 determinism: %s%s\n", same ? "PASS" : "FAIL",
              same ? "" : ": reports of two identical runs differ");
  std::ofstream("acceptance_report.json", std::ios::binary) << a;
  return all ? 0 : 1;
}
