#pragma once

#include "platecheck/geometry.hpp"

#include <limits>
#include <string>

namespace platecheck {

enum class PremeasureKind { hausdorff, spherical, packing };

const char* to_string(PremeasureKind k);
PremeasureKind premeasure_kind_from_string(const std::string& s);

/// pi^(m/2) / Gamma(m/2 + 1).
double omega(double m);

struct CoverBall {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

/// Upper bound for a pre-measure of a pixel set (cells are closed boxes)
/// together with the cover that realizes it.
struct CoverEstimate {
  PremeasureKind kind = PremeasureKind::spherical;
  double m = 1.0;
  double delta = 0.0;
  double value = 0.0;
  double omega = 0.0;
  /// Balls covering the set. For the Hausdorff kind each ball encloses one
  /// cover piece and `diameters` holds the piece diameters.
  std::vector<CoverBall> cover;
  std::vector<double> diameters;
};

/// Hausdorff and spherical kinds: the cheapest of a family of covers (the
/// whole set as one piece when allowed, and shrink-wrapped Voronoi pieces of
/// shifted covering lattices with radii cell * 2^(j/4)). Packing kind:
/// omega(m) delta^m times the smaller of a greedy and a lattice count of
/// radius-delta balls. delta may be +inf except for the packing kind.
CoverEstimate premeasure(const PixelSet& set, PremeasureKind kind, double m, double delta);

/// Greedy cover by balls of radius exactly delta: each ball is centered on the
/// first uncovered cell and claims every cell it contains.
std::vector<CoverBall> greedy_ball_cover(const PixelSet& set, double delta);

struct ComparabilityReport {
  double hausdorff = 0.0;
  double spherical = 0.0;
  double packing = 0.0;
  /// omega(m) delta^m times the greedy radius-delta count.
  double spherical_fixed = 0.0;
  /// spherical / hausdorff (1 for empty sets).
  double ratio = 1.0;
  bool packing_ok = true;
  bool flagged = false;
};
/// Flags ratio outside [1/C, C] or packing above spherical_fixed.
ComparabilityReport comparability_check(const PixelSet& set, double m, double delta, double C = 4.0);

/// (#exposed cell faces) * cell^(n-1).
double perimeter(const PixelSet& set);

struct Cap1Estimate {
  double value = 0.0;
  /// Superset realizing value, on a grid padded around the input.
  PixelSet witness;
  std::string candidate;
};
/// Smallest perimeter over supersets: the set, hole filling, closings with
/// balls of 1, 2, ..., 2^(budget-1) cells, the convex hull (bounding box in
/// 3D), pairwise component hulls and per-component choices.
Cap1Estimate cap1_estimate(const PixelSet& set, int budget = 5);

/// Planar sets: 2 * max over 16 directions of the measure of the projection
/// of the set. Any superset has at least this perimeter.
double cap1_lower_bound(const PixelSet& set);

struct IsoperimetricReport {
  double inside = 0.0;
  double outside = 0.0;
  /// min(inside, outside)^((n-1)/n).
  double left = 0.0;
  /// Faces between E and U \ E, times cell^(n-1).
  double relative_perimeter = 0.0;
  /// cap1_estimate of the cells of E adjacent to U \ E.
  double relative_cap1 = 0.0;
  double constant_perimeter = 0.0;
  double constant_cap1 = 0.0;
  /// min(inside, outside) == 0.
  bool trivial = false;
};
IsoperimetricReport isoperimetric_check(const PixelSet& E, const PixelSet& U);

struct IsoperimetricDrift {
  std::vector<IsoperimetricReport> reports;
  /// max / min of constant_perimeter and of constant_cap1 over nontrivial members.
  double drift_perimeter = 1.0;
  double drift_cap1 = 1.0;
  bool flagged = false;
};
IsoperimetricDrift isoperimetric_family(const std::vector<PixelSet>& family, const PixelSet& U, double max_drift = 2.0);

struct Cap1Chain {
  std::vector<double> cap1;
  std::vector<double> hausdorff;
  /// max cap1 / H^(n-1)_inf over the family.
  double C = 0.0;
};
Cap1Chain cap1_hausdorff_chain(const std::vector<PixelSet>& family);

/// Monotonicity failures of premeasure over increasing deltas and nested sets.
struct MonotonicityReport {
  /// Hausdorff and spherical kinds.
  int delta_violations = 0;
  /// Packing kind; omega(m) delta^m grows with delta, so this is informational.
  int packing_delta_violations = 0;
  int set_violations = 0;
  int checks = 0;
};
/// Each set is checked across `deltas` for every kind; consecutive sets of
/// `nested` (increasing) are compared for the hausdorff and spherical kinds.
MonotonicityReport premeasure_monotonicity(const std::vector<PixelSet>& sets, const std::vector<PixelSet>& nested,
                                           double m, const std::vector<double>& deltas);

}  // namespace platecheck
