#pragma once

#include "platecheck/geometry.hpp"

namespace platecheck {

struct TruncationResult {
  std::shared_ptr<const PiecewiseAffineMap> map;
  double K = 0.0;
  /// Largest operator 2-norm of the truncated map's gradients.
  double lipschitz_bound = 0.0;
  /// lipschitz_bound / K.
  double C1 = 0.0;
  /// Volume of the simplices on which the truncated map differs from f.
  double mismatch_measure = 0.0;
  /// Integral of |grad f| over {|grad f| >= K}.
  double excess_energy = 0.0;
  /// Volume of {|grad f| > K} and of the final (dilated) bad region.
  double bad_volume = 0.0;
  double dilated_volume = 0.0;
  /// Lipschitz constant of f measured on the good vertex set.
  double good_lipschitz = 0.0;
  std::vector<bool> bad;
  int rounds = 0;
  /// Every simplex ended up bad; the map is the constant mean value.
  bool degenerate = false;
};

/// Operator 2-norm of the gradient block of simplex s.
double gradient_norm(const PiecewiseAffineMap& f, std::size_t s);

/// Replaces f on {|grad f| > K}, dilated by one simplex layer, with the
/// componentwise midpoint of the largest L-Lipschitz minorant and smallest
/// majorant of the good vertex values (L measured on the good set). Rounds
/// repeat with the offending simplices added until every gradient is <= K.
TruncationResult lipschitz_truncate(const PiecewiseAffineMap& f, double K);

struct TruncationSweepRow {
  double excess_energy = 0.0;
  double mismatch_measure = 0.0;
  double C1 = 0.0;
};
struct TruncationSweep {
  std::vector<TruncationSweepRow> rows;
  /// max mismatch / excess over rows with positive excess.
  double C2 = 0.0;
  /// max / min of that ratio (1 when fewer than two rows qualify).
  double ratio_spread = 1.0;
  /// Rows with zero excess and nonzero mismatch, or mismatch > C2 excess.
  int violations = 0;
};
TruncationSweep truncation_bound_sweep(const std::vector<PiecewiseAffineMap>& family, double K);

}  // namespace platecheck
