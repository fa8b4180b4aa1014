#pragma once

#include "platecheck/elasticity.hpp"
#include "platecheck/geometry.hpp"

namespace platecheck {

/// One realization of the Mueller-Spector strip. Lengths are in units of
/// `side` (end square side = strip width).
///
/// Layout of the reference strip: left end [0,1]^2, body [1, 1+L] x [0,1]
/// with L = 2 pi R + 1, right end [1+L, 2+L] x [0,1]. The body follows a
/// stadium-shaped loop of radius R that brings the right end back onto the
/// left end. Left end blocks open a cavity of radius rho; right end blocks
/// squeeze their material into a disk of radius fill_fraction * rho, joined
/// to the block boundary by a slit of width cluster_width.
struct MSParams {
  double side = 1.0;
  double rho = 0.3;
  int k = 0;
  double bend_radius = 1.0;
  int block_segments = 8;
  int block_rings = 6;
  int cluster_points = 32;
  double cluster_width = 1e-3;
  double fill_fraction = 0.95;
  /// Ring parameter of the puncture boundary inside each block.
  double hole = 0.05;
};

/// Smallest admissible bend radius (exclusive), in units of side.
constexpr double kMinBendRadius = 0.5;

void validate(const MSParams& p);

/// Body length L = 2 pi R + 1 (units of side).
double ms_body_length(const MSParams& p);

/// Square-polar mesh of the unit square with a puncture, used by every block.
TriangulatedDomain ms_block_domain(const MSParams& p);

/// Unit-square block: identity on the boundary, opening the puncture into a
/// disk of radius rho.
Vec3 cavitation_point(const Vec3& x, double rho);
PiecewiseAffineMap cavitation_block(double rho, const MSParams& p = {});

/// Unit-square block: identity on the boundary, material squeezed into the
/// disk of radius fill_fraction * rho around the center.
Vec3 fill_point(const Vec3& x, const MSParams& p);
PiecewiseAffineMap fill_block(const MSParams& p);

/// Element of the sequence (period 2^-k) and its strong limit.
Vec3 ms_element_point(const MSParams& p, const Vec3& x);
Vec3 ms_limit_point(const MSParams& p, const Vec3& x);
PiecewiseAffineMap ms_element(const MSParams& p);
/// Limit on a hole-free strip mesh with `resolution` cells per side.
PiecewiseAffineMap ms_limit(const MSParams& p, int resolution = 16);

/// (x', x3) -> (f(x'), x3) on base x [0, height].
PiecewiseAffineMap thicken(const PiecewiseAffineMap& planar, int levels = 1, double height = 1.0);

struct KirchhoffOptions {
  /// Prism layers through the thickness.
  int levels = 1;
  /// Adds h * wrinkle * eta(x') * nu(x') with eta = sin(2 pi x1 / l) sin(2 pi x2 / l).
  double wrinkle = 0.0;
  double wrinkle_wavelength = 0.25;
  /// Largest admissible |grad u^T grad u - I| on any simplex.
  double isometry_tolerance = 1e-2;
};

/// y_h(x', x3) = u(x') + h x3 nu(x') with area-weighted vertex normals.
ScaledDeformation kirchhoff_ansatz(const PiecewiseAffineMap& u, double h, const KirchhoffOptions& options = {});

struct RecoverySequence {
  std::shared_ptr<const PiecewiseAffineMap> u;
  KirchhoffOptions options;

  ScaledDeformation operator()(double h) const { return kirchhoff_ansatz(*u, h, options); }
};

struct CrossingParams {
  double separation = 0.5;
  double angle_deg = 90.0;
  /// Height of the arc midpoint above the flat sheet.
  double lift = 0.0;
  double radius = 1.0;
  double arc_length = 0.6;
  double width = 0.5;
  /// Cells per side of U1, along the arc and across U2.
  int flat_cells = 32;
  int arc_cells = 154;
  int width_cells = 16;
  KirchhoffOptions kirchhoff;
};

/// U1 = [0,1]^2 with the flat sheet u1(x) = (x1, x2, 0); U2 = [1+s, 1+s+L] x
/// [(1-w)/2, (1+w)/2] with u2 an arc of a cylinder whose axis is parallel to
/// e2, crossing the plane z = lift at (0.5, x2, lift) with the given angle.
struct CrossingScenario {
  DomainPtr U1;
  DomainPtr U2;
  DomainPtr S;
  std::shared_ptr<const PiecewiseAffineMap> u1;
  std::shared_ptr<const PiecewiseAffineMap> u2;
  std::shared_ptr<const PiecewiseAffineMap> u;
  RecoverySequence sequence;
};
CrossingScenario crossing_scenario(const CrossingParams& params = {});

}  // namespace platecheck
