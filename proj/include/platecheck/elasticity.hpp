#pragma once

#include "platecheck/geometry.hpp"

#include <functional>
#include <string>

namespace platecheck {

/// A plate deformation y on Omega = S x [-1/2, 1/2] together with the
/// thickness h. Physical points are (x', h x3).
struct ScaledDeformation {
  PrismMesh prism;
  std::shared_ptr<const PiecewiseAffineMap> y;
  double h = 1.0;
};

/// Prism over `base` spanning x3 in [-1/2, 1/2].
PrismMesh plate_prism(DomainPtr base, int levels);

ScaledDeformation make_scaled(const PrismMesh& prism, std::vector<Vec3> values, double h);
ScaledDeformation make_scaled(const PrismMesh& prism, const std::function<Vec3(const Vec3&)>& y, double h);

/// (grad' y, (1/h) d3 y) on simplex s.
Mat3 scaled_gradient(const ScaledDeformation& d, std::size_t s);

/// Frobenius distance from F to SO(3).
double dist_SO3(const Mat3& F);
/// Closest rotation (polar factor with determinant correction).
Mat3 nearest_rotation(const Mat3& F);

struct StoredEnergyDensity {
  std::string name = "dist2";
  std::function<double(const Vec3& x, const Mat3& F)> W;
  /// Coercivity constant: W(x,F) >= c dist^2(F, SO(3)).
  double c = 1.0;
};

/// W(x,F) = dist^2(F, SO(3)).
StoredEnergyDensity default_density();

/// Outcome of sampled checks of conditions on W. Left and right invariance
/// are reported separately.
struct DensityScreen {
  bool zero_at_identity = true;
  bool right_invariant = true;
  bool left_invariant = true;
  bool coercive = true;
  bool x3_independent = true;
  double worst_identity = 0.0;
  double worst_right = 0.0;
  double worst_left = 0.0;
  double worst_coercivity = 0.0;
  double worst_x3 = 0.0;
};
DensityScreen screen_density(const StoredEnergyDensity& W, int samples, std::uint64_t seed, double tol = 1e-9);

/// Integral of W(x, grad_h y) over Omega (W evaluated at simplex centroids).
double energy_Ih(const ScaledDeformation& d, const StoredEnergyDensity& W);
/// ||dist(grad_h y, SO(3))||^2 in L2(Omega).
double dist_energy(const ScaledDeformation& d);
/// ||dist(grad v, SO(3))||^2 over the whole domain of a 3D map.
double dist_energy(const PiecewiseAffineMap& v);

struct ScalingCheck {
  bool pass = false;
  bool exact_rigid = false;
  double slope = 0.0;
  double intercept = 0.0;
  double required = 0.0;
};
/// Least-squares slope of log(energy) against log(h); passes iff
/// slope >= 1 + eps - tolerance.
ScalingCheck scaling_check(const std::vector<double>& h, const std::vector<double>& energy, double eps,
                           double tolerance = 0.1);

struct RigidityFit {
  int id = 0;
  Mat3 R = Mat3::Identity();
  Vec3 b = Vec3::Zero();
  /// ||grad v - R|| in L2 of the fitted region.
  double residual = 0.0;
  /// ||dist(grad v, SO(3))|| in L2 of the fitted region.
  double dist_norm = 0.0;
  /// Measure of the fitted region and the mean gradient.
  double volume = 0.0;
  Mat3 mean_gradient = Mat3::Zero();
  Vec3 center = Vec3::Zero();
  double radius = 0.0;

  Vec3 apply(const Vec3& x) const { return R * x + b; }
};

struct FitOptions {
  /// Quadrature lattice points per ball radius.
  int points_per_radius = 8;
  /// Physical point of domain point x is (x1, x2, thickness * x3); gradients
  /// are scaled accordingly. 1 for ordinary 3D maps, h for plates.
  double thickness = 1.0;
  int id = 0;
};

/// Best rotation and translation for v on the physical ball B(center, radius)
/// intersected with the domain, by lattice quadrature.
RigidityFit rigidity_fit(const PiecewiseAffineMap& v, const Vec3& center, double radius, const FitOptions& options = {});
/// Same over the whole domain with exact simplex volumes.
RigidityFit rigidity_fit_domain(const PiecewiseAffineMap& v);
/// ||grad v - Q|| in L2 over the region used by `fit` (same quadrature).
double rigidity_misfit(const PiecewiseAffineMap& v, const RigidityFit& fit, const Mat3& Q, const FitOptions& options = {});

struct RigidityScanRow {
  double scale = 1.0;
  double constant = 0.0;
  bool exact_rigid = false;
};
struct RigidityScan {
  std::vector<RigidityScanRow> rows;
  /// (max - min) / min over rows with a finite constant.
  double spread = 0.0;
};
/// For each scale s, the largest ratio ||grad v - R|| / ||dist(grad v, SO(3))||
/// over the family, with members rescaled to v_s(x) = s v(x / s) on s U.
RigidityScan rigidity_constant_scan(const std::vector<std::function<Vec3(const Vec3&)>>& family,
                                    const TriangulatedDomain& domain, const std::vector<double>& scales);

/// Vertex-wise average over the x3 fibers (trapezoid rule, exact for the
/// piecewise-linear fibers).
PiecewiseAffineMap midplane_average(const ScaledDeformation& d);

/// Per-simplex largest eigenvalue of grad u^T grad u - I, clipped at 0.
std::vector<double> shortness_residual(const PiecewiseAffineMap& u);

struct IsometryReport {
  /// ||grad u^T grad u - I||_F per simplex.
  std::vector<double> residual;
  /// grad u^T grad nu per simplex.
  std::vector<Mat2> second_form;
  /// Area-weighted vertex normals.
  std::vector<Vec3> normals;
};
/// Per-simplex normals u,1 x u,2 averaged to vertices.
std::vector<Vec3> vertex_normals(const PiecewiseAffineMap& u, double tolerance = 1e-12);
IsometryReport isometry_residual_and_II(const PiecewiseAffineMap& u, double tolerance = 1e-12);

/// Scalar piecewise-linear field on a planar domain.
struct ScalarField {
  DomainPtr domain;
  std::vector<double> values;

  Vec2 gradient(std::size_t s) const;
};

struct VonKarmanFields {
  PiecewiseAffineMap u;  // planar displacement, target dimension 2
  ScalarField v;
};
/// u_h = h^(2-beta) (avg(y') - x'), v_h = h^(1-beta/2) avg(y3).
VonKarmanFields vk_extract(const ScaledDeformation& d, double beta);

struct VonKarmanResidual {
  /// ||sym grad u + 1/2 grad v (x) grad v||_F per simplex.
  std::vector<double> residual;
  /// det of the least-squares quadratic Hessian of v per interior vertex
  /// (NaN on boundary vertices).
  std::vector<double> hessian_det;
};
VonKarmanResidual vk_constraint_residual(const PiecewiseAffineMap& u, const ScalarField& v);

}  // namespace platecheck
