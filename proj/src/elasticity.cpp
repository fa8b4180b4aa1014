#include "platecheck/elasticity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace platecheck {

PrismMesh plate_prism(DomainPtr base, int levels) { return extrude_cylinder(std::move(base), levels, 1.0, -0.5); }

ScaledDeformation make_scaled(const PrismMesh& prism, std::vector<Vec3> values, double h) {
  require(h > 0.0 && h <= 1.0, "thickness h must lie in (0, 1]");
  require(std::abs(prism.bottom + 0.5) < 1e-12 && std::abs(prism.height - 1.0) < 1e-12,
          "plate prism must span x3 in [-1/2, 1/2]");
  ScaledDeformation d;
  d.prism = prism;
  d.h = h;
  d.y = std::make_shared<PiecewiseAffineMap>(prism.mesh, std::move(values), 3);
  return d;
}

ScaledDeformation make_scaled(const PrismMesh& prism, const std::function<Vec3(const Vec3&)>& y, double h) {
  std::vector<Vec3> values;
  values.reserve(prism.mesh->vertex_count());
  for (const auto& p : prism.mesh->vertices()) values.push_back(y(p));
  return make_scaled(prism, std::move(values), h);
}

Mat3 scaled_gradient(const ScaledDeformation& d, std::size_t s) {
  Mat3 g = d.y->gradient(s);
  g.col(2) /= d.h;
  return g;
}

namespace {

struct SignedSvd {
  Mat3 U;
  Mat3 V;
  Vec3 sigma;  // last entry negated when det F < 0
};

SignedSvd signed_svd(const Mat3& F) {
  require(F.allFinite(), "matrix has non-finite entries");
  Eigen::JacobiSVD<Mat3> svd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SignedSvd out{svd.matrixU(), svd.matrixV(), svd.singularValues()};
  if (out.U.determinant() * out.V.determinant() < 0.0) {
    out.sigma[2] = -out.sigma[2];
    out.U.col(2) = -out.U.col(2);
  }
  return out;
}

}  // namespace

double dist_SO3(const Mat3& F) {
  const SignedSvd s = signed_svd(F);
  return (s.sigma - Vec3::Ones()).norm();
}

Mat3 nearest_rotation(const Mat3& F) {
  const SignedSvd s = signed_svd(F);
  return s.U * s.V.transpose();
}

StoredEnergyDensity default_density() {
  StoredEnergyDensity w;
  w.name = "dist2";
  w.W = [](const Vec3&, const Mat3& F) {
    const double d = dist_SO3(F);
    return d * d;
  };
  w.c = 1.0;
  return w;
}

DensityScreen screen_density(const StoredEnergyDensity& W, int samples, std::uint64_t seed, double tol) {
  require(static_cast<bool>(W.W), "energy density has no evaluator");
  DensityScreen out;
  Rng rng(seed);
  for (int i = 0; i < samples; ++i) {
    const Vec3 x(rng.uniform(), rng.uniform(), rng.uniform(-0.5, 0.5));
    Mat3 F;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) F(r, c) = (r == c ? 1.0 : 0.0) + 0.5 * rng.normal();
    const Mat3 R = random_rotation(rng);
    const double w = W.W(x, F);
    const double scale = std::max(1.0, std::abs(w));
    out.worst_identity = std::max(out.worst_identity, std::abs(W.W(x, Mat3::Identity())));
    out.worst_right = std::max(out.worst_right, std::abs(W.W(x, F * R) - w) / scale);
    out.worst_left = std::max(out.worst_left, std::abs(W.W(x, R * F) - w) / scale);
    const double d = dist_SO3(F);
    out.worst_coercivity = std::max(out.worst_coercivity, W.c * d * d - w);
    const Vec3 x2(x.x(), x.y(), rng.uniform(-0.5, 0.5));
    out.worst_x3 = std::max(out.worst_x3, std::abs(W.W(x2, F) - w) / scale);
  }
  out.zero_at_identity = out.worst_identity <= tol;
  out.right_invariant = out.worst_right <= tol;
  out.left_invariant = out.worst_left <= tol;
  out.coercive = out.worst_coercivity <= tol;
  out.x3_independent = out.worst_x3 <= tol;
  return out;
}

double energy_Ih(const ScaledDeformation& d, const StoredEnergyDensity& W) {
  const TriangulatedDomain& dom = d.y->domain();
  std::vector<double> parts(dom.simplex_count());
  parallel_for(parts.size(), [&](std::size_t s) { parts[s] = dom.volume(s) * W.W(dom.centroid(s), scaled_gradient(d, s)); });
  double total = 0.0;
  for (double p : parts) total += p;
  return total;
}

double dist_energy(const ScaledDeformation& d) { return energy_Ih(d, default_density()); }

double dist_energy(const PiecewiseAffineMap& v) {
  require(v.domain().dimension() == 3 && v.target_dimension() == 3, "dist energy needs a 3D map");
  double total = 0.0;
  for (std::size_t s = 0; s < v.domain().simplex_count(); ++s) {
    const double dd = dist_SO3(v.gradient(s));
    total += v.domain().volume(s) * dd * dd;
  }
  return total;
}

ScalingCheck scaling_check(const std::vector<double>& h, const std::vector<double>& energy, double eps,
                           double tolerance) {
  require(h.size() == energy.size(), "h and energy ladders differ in length");
  require(h.size() >= 3, "scaling check needs at least three values of h");
  for (std::size_t i = 1; i < h.size(); ++i) require(h[i] < h[i - 1], "h values must be decreasing");
  ScalingCheck out;
  out.required = 1.0 + eps - tolerance;
  if (std::all_of(energy.begin(), energy.end(), [](double e) { return e == 0.0; })) {
    out.exact_rigid = true;
    out.pass = true;
    return out;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    require(h[i] > 0.0, "h must be positive");
    const double x = std::log(h[i]);
    const double y = std::log(std::max(energy[i], std::numeric_limits<double>::min()));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  out.intercept = (sy - out.slope * sx) / n;
  out.pass = out.slope >= out.required;
  return out;
}

// ---- rigidity -------------------------------------------------------------

namespace {

struct WeightedGradient {
  Mat3 G;
  double w;
  Vec3 x;  // physical point
  Vec3 y;  // image
};

std::vector<WeightedGradient> ball_quadrature(const PiecewiseAffineMap& v, const Vec3& center, double radius,
                                              const FitOptions& opt) {
  require(radius > 0.0, "ball radius must be positive");
  require(opt.points_per_radius >= 1, "fit lattice needs at least one point per radius");
  const int dim = v.domain().dimension();
  const int n = opt.points_per_radius;
  const double step = radius / n;
  const double w = std::pow(step, dim);
  std::vector<WeightedGradient> out;
  for (int i = -n; i < n; ++i)
    for (int j = -n; j < n; ++j)
      for (int k = (dim == 3 ? -n : 0); k < (dim == 3 ? n : 1); ++k) {
        Vec3 off((i + 0.5) * step, (j + 0.5) * step, dim == 3 ? (k + 0.5) * step : 0.0);
        if (off.norm() > radius) continue;
        const Vec3 phys = center + off;
        Vec3 x = phys;
        if (dim == 3) x.z() /= opt.thickness;
        auto loc = v.domain().locate(x);
        if (!loc) continue;
        Mat3 G = v.gradient(loc->simplex);
        if (dim == 3) G.col(2) /= opt.thickness;
        out.push_back({G, w, phys, v.evaluate_in(loc->simplex, loc->barycentric)});
      }
  return out;
}

RigidityFit fit_from(const std::vector<WeightedGradient>& q) {
  if (q.empty()) fail(Errc::empty_region, "fit region contains no part of the domain");
  RigidityFit fit;
  Mat3 mean = Mat3::Zero();
  for (const auto& p : q) {
    mean += p.w * p.G;
    fit.volume += p.w;
  }
  mean /= fit.volume;
  fit.mean_gradient = mean;
  fit.R = nearest_rotation(mean);
  double res = 0.0, dist = 0.0;
  Vec3 b = Vec3::Zero();
  for (const auto& p : q) {
    res += p.w * (p.G - fit.R).squaredNorm();
    const double dd = dist_SO3(p.G);
    dist += p.w * dd * dd;
    b += p.w * (p.y - fit.R * p.x);
  }
  fit.residual = std::sqrt(res);
  fit.dist_norm = std::sqrt(dist);
  fit.b = b / fit.volume;
  return fit;
}

std::vector<WeightedGradient> domain_quadrature(const PiecewiseAffineMap& v) {
  require(v.domain().dimension() == 3 && v.target_dimension() == 3, "rigidity fit needs a 3D map");
  std::vector<WeightedGradient> q;
  const auto& dom = v.domain();
  for (std::size_t s = 0; s < dom.simplex_count(); ++s) {
    const Vec3 c = dom.centroid(s);
    q.push_back({v.gradient(s), dom.volume(s), c, v.gradient(s) * (c - dom.vertex(dom.simplex(s)[0])) + v.value(dom.simplex(s)[0])});
  }
  return q;
}

}  // namespace

RigidityFit rigidity_fit(const PiecewiseAffineMap& v, const Vec3& center, double radius, const FitOptions& options) {
  require(v.target_dimension() == 3 && v.domain().dimension() == 3, "rigidity fit needs a 3D map");
  RigidityFit fit = fit_from(ball_quadrature(v, center, radius, options));
  fit.id = options.id;
  fit.center = center;
  fit.radius = radius;
  return fit;
}

RigidityFit rigidity_fit_domain(const PiecewiseAffineMap& v) {
  RigidityFit fit = fit_from(domain_quadrature(v));
  fit.radius = std::numeric_limits<double>::infinity();
  return fit;
}

double rigidity_misfit(const PiecewiseAffineMap& v, const RigidityFit& fit, const Mat3& Q, const FitOptions& options) {
  const auto q = std::isinf(fit.radius) ? domain_quadrature(v) : ball_quadrature(v, fit.center, fit.radius, options);
  double res = 0.0;
  for (const auto& p : q) res += p.w * (p.G - Q).squaredNorm();
  return std::sqrt(res);
}

RigidityScan rigidity_constant_scan(const std::vector<std::function<Vec3(const Vec3&)>>& family,
                                    const TriangulatedDomain& domain, const std::vector<double>& scales) {
  require(scales.size() >= 2, "rigidity scan needs at least two scales");
  require(!family.empty(), "rigidity scan needs a map family");
  require(domain.dimension() == 3, "rigidity scan needs a 3D domain");
  RigidityScan scan;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double s : scales) {
    require(s > 0.0, "scales must be positive");
    std::vector<Vec3> verts = domain.vertices();
    for (auto& p : verts) p *= s;
    auto scaled = std::make_shared<TriangulatedDomain>(3, std::move(verts), domain.simplices());
    RigidityScanRow row;
    row.scale = s;
    row.exact_rigid = true;
    for (const auto& v : family) {
      auto map = interpolate(scaled, [&](const Vec3& x) { return Vec3(s * v(x / s)); }, 3);
      const RigidityFit fit = rigidity_fit_domain(map);
      if (fit.dist_norm <= 1e-12 * std::sqrt(fit.volume)) continue;
      row.exact_rigid = false;
      row.constant = std::max(row.constant, fit.residual / fit.dist_norm);
    }
    if (!row.exact_rigid) {
      lo = std::min(lo, row.constant);
      hi = std::max(hi, row.constant);
    }
    scan.rows.push_back(row);
  }
  scan.spread = hi > 0.0 ? (hi - lo) / lo : 0.0;
  return scan;
}

// ---- plate reductions -------------------------------------------------------

PiecewiseAffineMap midplane_average(const ScaledDeformation& d) {
  const PrismMesh& p = d.prism;
  require(p.mesh && p.mesh->vertex_count() == p.base->vertex_count() * (p.levels + 1),
          "deformation mesh is not layered in x3");
  if (&d.y->domain() != p.mesh.get()) fail(Errc::unsupported_mesh, "deformation is not defined on its prism mesh");
  const std::size_t nb = p.base->vertex_count();
  std::vector<Vec3> avg(nb, Vec3::Zero());
  for (int l = 0; l <= p.levels; ++l) {
    const double w = (l == 0 || l == p.levels ? 0.5 : 1.0) / p.levels;
    for (std::size_t v = 0; v < nb; ++v) avg[v] += w * d.y->value(p.vertex_index(l, static_cast<int>(v)));
  }
  return PiecewiseAffineMap(p.base, std::move(avg), 3);
}

std::vector<double> shortness_residual(const PiecewiseAffineMap& u) {
  require(u.domain().dimension() == 2, "shortness residual needs a planar domain");
  std::vector<double> out(u.domain().simplex_count());
  for (std::size_t s = 0; s < out.size(); ++s) {
    const Eigen::Matrix<double, 3, 2> G = u.gradient(s).leftCols<2>();
    const Mat2 m = G.transpose() * G - Mat2::Identity();
    Eigen::SelfAdjointEigenSolver<Mat2> es(m);
    out[s] = std::max(0.0, es.eigenvalues().maxCoeff());
  }
  return out;
}

std::vector<Vec3> vertex_normals(const PiecewiseAffineMap& u, double tolerance) {
  require(u.domain().dimension() == 2 && u.target_dimension() == 3, "normals need a surface map into 3D");
  const auto& dom = u.domain();
  std::vector<Vec3> normals(dom.vertex_count(), Vec3::Zero());
  for (std::size_t s = 0; s < dom.simplex_count(); ++s) {
    const Vec3 n = u.gradient(s).col(0).cross(u.gradient(s).col(1));
    if (n.norm() < tolerance) fail(Errc::singular_parametrization, "degenerate surface normal", n.norm());
    for (int i = 0; i < 3; ++i) normals[dom.simplex(s)[i]] += dom.volume(s) * n.normalized();
  }
  for (auto& n : normals) {
    if (n.norm() < tolerance) fail(Errc::singular_parametrization, "vertex normals cancel", n.norm());
    n.normalize();
  }
  return normals;
}

IsometryReport isometry_residual_and_II(const PiecewiseAffineMap& u, double tolerance) {
  IsometryReport out;
  out.normals = vertex_normals(u, tolerance);
  PiecewiseAffineMap nu(u.domain_ptr(), out.normals, 3);
  const std::size_t ns = u.domain().simplex_count();
  out.residual.resize(ns);
  out.second_form.resize(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    const Eigen::Matrix<double, 3, 2> G = u.gradient(s).leftCols<2>();
    const Eigen::Matrix<double, 3, 2> N = nu.gradient(s).leftCols<2>();
    out.residual[s] = (G.transpose() * G - Mat2::Identity()).norm();
    out.second_form[s] = G.transpose() * N;
  }
  return out;
}

Vec2 ScalarField::gradient(std::size_t s) const {
  const Simplex& sx = domain->simplex(s);
  Mat2 e;
  e.col(0) = (domain->vertex(sx[1]) - domain->vertex(sx[0])).head<2>();
  e.col(1) = (domain->vertex(sx[2]) - domain->vertex(sx[0])).head<2>();
  const Vec2 dv(values[sx[1]] - values[sx[0]], values[sx[2]] - values[sx[0]]);
  return e.transpose().inverse() * dv;
}

VonKarmanFields vk_extract(const ScaledDeformation& d, double beta) {
  if (!(beta > 2.0 && beta < 4.0)) fail(Errc::invalid_argument, "beta must lie in (2, 4)", beta);
  const PiecewiseAffineMap avg = midplane_average(d);
  const auto& base = d.prism.base;
  const double su = std::pow(d.h, 2.0 - beta), sv = std::pow(d.h, 1.0 - beta / 2.0);
  std::vector<Vec3> uv(base->vertex_count());
  std::vector<double> vv(base->vertex_count());
  for (std::size_t i = 0; i < uv.size(); ++i) {
    const Vec3 a = avg.value(i), x = base->vertex(i);
    uv[i] = Vec3(su * (a.x() - x.x()), su * (a.y() - x.y()), 0.0);
    vv[i] = sv * a.z();
  }
  return {PiecewiseAffineMap(base, std::move(uv), 2), ScalarField{base, std::move(vv)}};
}

VonKarmanResidual vk_constraint_residual(const PiecewiseAffineMap& u, const ScalarField& v) {
  require(u.domain().dimension() == 2 && u.target_dimension() == 2, "in-plane field must be planar");
  require(v.domain && v.values.size() == v.domain->vertex_count(), "scalar field size mismatch");
  require(v.domain->simplex_count() == u.domain().simplex_count(), "fields live on different meshes");
  VonKarmanResidual out;
  const auto& dom = *v.domain;
  out.residual.resize(dom.simplex_count());
  for (std::size_t s = 0; s < dom.simplex_count(); ++s) {
    const Mat2 gu = u.gradient(s).topLeftCorner<2, 2>();
    const Vec2 gv = v.gradient(s);
    out.residual[s] = (0.5 * (gu + gu.transpose()) + 0.5 * gv * gv.transpose()).norm();
  }
  // Least-squares quadratic fit over the two-ring of each interior vertex.
  std::vector<std::set<int>> adj(dom.vertex_count());
  for (const Simplex& sx : dom.simplices())
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) adj[sx[i]].insert(sx[j]);
  out.hessian_det.assign(dom.vertex_count(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t p = 0; p < dom.vertex_count(); ++p) {
    if (dom.is_boundary_vertex(p)) continue;
    std::set<int> ring = adj[p];
    for (int q : adj[p]) ring.insert(adj[q].begin(), adj[q].end());
    ring.erase(static_cast<int>(p));
    if (ring.size() < 6) continue;
    Eigen::MatrixXd A(ring.size() + 1, 6);
    Eigen::VectorXd rhs(ring.size() + 1);
    int row = 0;
    const Vec3 o = dom.vertex(p);
    auto add = [&](int q) {
      const double dx = dom.vertex(q).x() - o.x(), dy = dom.vertex(q).y() - o.y();
      A.row(row) << 1.0, dx, dy, 0.5 * dx * dx, dx * dy, 0.5 * dy * dy;
      rhs[row] = v.values[q];
      ++row;
    };
    add(static_cast<int>(p));
    for (int q : ring) add(q);
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(rhs);
    out.hessian_det[p] = c[3] * c[5] - c[4] * c[4];
  }
  return out;
}

}  // namespace platecheck
