#pragma once

#include "platecheck/degree.hpp"
#include "platecheck/elasticity.hpp"
#include "platecheck/geometry.hpp"
#include "platecheck/measure.hpp"
#include "platecheck/pathology.hpp"

#include <string>

namespace platecheck {

// ---- a.e. invertibility -------------------------------------------------

struct OverlapPair {
  std::size_t a = 0;
  std::size_t b = 0;
  double measure = 0.0;
};

struct InvertibilityReport {
  /// Sum over all pairs of distinct simplices of the measure of the
  /// intersection of their images (area for planar and 2D-into-3D maps).
  double overlap = 0.0;
  /// Largest contributing pairs.
  std::vector<OverlapPair> witnesses;
  std::size_t candidate_pairs = 0;
};
InvertibilityReport invertibility_ae_check(const PiecewiseAffineMap& map, std::size_t max_witnesses = 16);

// ---- extension and simple interpenetration ------------------------------

enum class CapMode { normal_offset, cone };
const char* to_string(CapMode m);

struct ExtensionSpec {
  double thickness = 1.0;
  CapMode mode = CapMode::normal_offset;
  Vec3 apex = Vec3(0, 0, 1);
  /// Layers of the prism over U1.
  int levels = 2;
  /// Collar width of the cutoff; negative selects 10% of the inradius of U1.
  double delta = -1.0;
};

struct Extension {
  PrismMesh prism;
  std::shared_ptr<const PiecewiseAffineMap> map;
};

/// u1-hat on U1 x [0,1]; layer 0 reproduces u1 exactly.
Extension build_extension(const PiecewiseAffineMap& u1, const ExtensionSpec& spec);
/// Same extension with the layer-0 values replaced.
Extension with_base(const Extension& ext, const std::vector<Vec3>& base_values);

enum class Verdict { simple_interpenetration, no_evidence, boundary_degenerate };
const char* to_string(Verdict v);

struct LevelMeasure {
  int k = 0;
  std::size_t samples = 0;
  MeasureEstimate measure;
};

struct SimpleOptions {
  /// Grid samples per side of the bounding box of U2.
  int grid = 64;
  /// Level sets count when measure - radius exceeds min_fraction * |U2|.
  double min_fraction = 0.01;
  DegreeOptions degree;
};

struct InterpenetrationReport {
  Verdict verdict = Verdict::no_evidence;
  std::vector<LevelMeasure> levels;
  /// Two qualifying degree values (meaningful for simple_interpenetration).
  std::array<int, 2> witnesses{0, 0};
  /// The verdict relies on a degree-0 level set.
  bool uses_k0 = false;
  /// Distance from the extension boundary away from its base rim to u1(U1),
  /// and from the whole extension boundary except the base to u2(U2). Both
  /// are capped at `margin_cap`.
  double margin_base = 0.0;
  double margin_u2 = 0.0;
  double margin_cap = 0.0;
  MeasureEstimate excluded;
  double threshold = 0.0;
  DegreeField field;
};

/// Rejects overlapping U1, U2 (invalid_argument).
InterpenetrationReport check_simple_interpenetration(const PiecewiseAffineMap& u1, const PiecewiseAffineMap& u2,
                                                     const ExtensionSpec& spec, const SimpleOptions& options = {});
/// Same with a prebuilt extension of u1.
InterpenetrationReport check_simple_interpenetration(const Extension& ext, const PiecewiseAffineMap& u1,
                                                     const PiecewiseAffineMap& u2, const SimpleOptions& options = {});

// ---- cutoff -------------------------------------------------------------

/// Largest distance from a vertex of the domain to its boundary.
double inradius(const TriangulatedDomain& domain);
/// Distance from x to the boundary of a planar domain.
double boundary_distance(const TriangulatedDomain& domain, const Vec3& x);
/// C1 profile 3t^2 - 2t^3 of min(dist(x, boundary) / delta, 1); slope <= 1.5 / delta.
double cutoff(const TriangulatedDomain& domain, const Vec3& x, double delta);

struct CollarChoice {
  double delta = 0.0;
  int halvings = 0;
  /// Distance between u1 on the collar simplices and u2(U2).
  double clearance = 0.0;
  bool ok = false;
};
/// Starts from spec.delta (or 10% of the inradius) and halves until the
/// collar image clears u2(U2), at most `max_halvings` times.
CollarChoice choose_collar(const PiecewiseAffineMap& u1, const PiecewiseAffineMap& u2, double delta,
                           int max_halvings = 8);

// ---- far coincidences and good points -----------------------------------

struct GoodBadPoint {
  Vec3 x = Vec3::Zero();
  Vec3 partner = Vec3::Zero();
  /// Integral of dist^2(grad y_h, SO(3)) over the two balls of radius h/10.
  double ball_energy = 0.0;
  bool good = false;
};

struct AffinePair {
  RigidityFit A;
  RigidityFit Abar;
  double sup_deviation = 0.0;
  double gap = 0.0;
  bool rejected = false;
  std::string diagnostic;
  double fraction = 0.0;
};

struct FhReport {
  double h = 0.0;
  double tau = 0.0;
  PixelSet F;
  /// Partner of every F pixel (same order as F.occupied()).
  std::vector<Vec3> partners;
  double cap1_upper = 0.0;
  double cap1_lower = 0.0;
  /// tau is below the image spacing of the pixel samples.
  bool tau_warning = false;

  // Filled by classify_good_bad.
  std::vector<GoodBadPoint> points;
  std::size_t good = 0;
  std::size_t bad = 0;
  double energy = 0.0;
  double comparability = 0.0;
  double threshold = 0.0;
  /// cap1_lower > 0 and good >= (good + bad) / 2.
  bool majority_good = false;

  // Filled by noninvertibility_volume.
  std::vector<AffinePair> pairs;
  double volume = 0.0;
};

struct FarOptions {
  /// Pixel size of F_h; nonpositive selects h / 4.
  double pixel = -1.0;
  /// Search budget for the cap1 estimate.
  int cap1_budget = 4;
};

/// F_h: pixels x of S with some x-bar, |x - x-bar| > 2h, whose image lies
/// within tau of u_h(x). Candidates x-bar range over image triangles whose
/// domain triangle lies entirely beyond 2h from x.
FhReport find_far_coincidences(const PiecewiseAffineMap& u_h, double h, double tau, const FarOptions& options = {});

/// Default tau: twice the image mesh size, at most h/2.
double default_tau(const PiecewiseAffineMap& u_h, double h);

/// Integral of dist^2(grad z_h, SO(3)) over the physical ball, where z_h is
/// the physical plate deformation of d.
double ball_energy(const ScaledDeformation& d, const Vec3& center, double radius, int points_per_radius = 4);

/// 2 pi / sqrt(3): cap1(A) <= C H^1_inf(A) for planar A (Jung's theorem).
constexpr double kCap1Comparability = 3.6275987284684357;

/// Farthest-point centers from F_h at separation h/5 with partners snapped
/// to the coincidence set, split by the good-point criterion.
void classify_good_bad(FhReport& report, const PiecewiseAffineMap& u_h, const ScaledDeformation& y_h);


/// Rigid fits on the physical balls B((x0,0), h/2), B((x0bar,0), h/2) and
/// the fraction of sampled x in B((x0,0), 0.45h) with
/// deg(y_h on B-bar, y_h(x)) = 1.
AffinePair affine_compare(const ScaledDeformation& y_h, const Vec3& x0, const Vec3& x0bar, int points_per_radius = 4);

/// Sums fraction * omega(3) (h/2)^3 over good points; fills report.pairs.
double noninvertibility_volume(FhReport& report, const ScaledDeformation& y_h, int points_per_radius = 4);

// ---- pipeline -----------------------------------------------------------

struct PipelineOptions {
  ExtensionSpec extension;
  SimpleOptions simple;
  /// Truncation threshold for the physical gradient.
  double K = 2.0;
  /// Image tolerance; nonpositive selects default_tau at each h.
  double tau = -1.0;
  FarOptions far;
  /// Pinned lower constant for the non-injectivity volume against h^2.
  double c = 0.0;
  /// Target decay exponent epsilon for the energy scaling premise.
  double epsilon = 0.5;
  int affine_points_per_radius = 4;
};

struct PipelineRow {
  double h = 0.0;
  double energy_Ih = 0.0;
  double dist_energy = 0.0;
  double truncation_mismatch = 0.0;
  double degree_l1 = 0.0;
  FhReport far;
  double volume = 0.0;
  double volume_over_h2 = 0.0;
  bool volume_pass = false;
};

struct PipelineReport {
  ScalingCheck scaling;
  CollarChoice collar;
  InterpenetrationReport limit;
  std::vector<PipelineRow> rows;
  /// Name of the first failed premise, empty if none.
  std::string failed_step;
  bool degree_converges = false;
  bool pass = false;
};

PipelineReport run_pipeline(const CrossingScenario& scenario, const std::vector<double>& hs,
                            const PipelineOptions& options = {});

}  // namespace platecheck
