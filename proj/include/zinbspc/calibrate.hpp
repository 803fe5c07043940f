#pragma once

#include <cstdint>
#include <limits>
#include <optional>

#include "zinbspc/chart.hpp"
#include "zinbspc/runlength.hpp"

namespace zinbspc {

/// Which side of a discreteness step to report when the target ARL0 falls
/// inside it.
enum class PlateauPolicy { Nearest, Below, Above };

struct CalibrationSpec {
  double lambda = 0.1;
  int n = 1;
  ZinbParams params;  ///< in-control
  double target_arl0 = 500.0;
  std::int64_t reps = 10'000;
  /// Acceptance band on |ARL - target|; zero selects max(0.5, 1% of target).
  double tol_arl = 0.0;
  double l_lo = 0.5;
  double l_hi = 12.0;
  /// The bracket may grow to l_hi * growth_cap before giving up.
  double growth_cap = 4.0;
  std::uint64_t master_seed = 20240101;
  unsigned threads = 0;
  std::int64_t max_rl = 1'000'000;
  PlateauPolicy plateau_policy = PlateauPolicy::Nearest;

  void validate() const;
  double tolerance() const;
};

/// The target sits inside a jump of ARL(L). Both neighbouring steps are
/// reported; `l_star` in the result follows the plateau policy.
struct Plateau {
  double arl_below = 0.0;
  double arl_above = 0.0;
  double l_below = 0.0;
  double l_above = 0.0;
};

struct CalibrationResult {
  double l_star = 0.0;
  double ucl = 0.0;
  double achieved_arl = 0.0;
  double achieved_sdrl = 0.0;
  int evaluations = 0;
  bool converged = false;
  std::optional<Plateau> plateau;
  RunLengthSummary summary;  ///< final evaluation at l_star
};

/// Bisection on L with common random numbers: every evaluation reuses
/// master_seed, so ARL(L) is a nondecreasing step function of L.
/// Throws BracketError when the target is not reachable within the
/// (expanded) bracket.
CalibrationResult calibrate_L(const CalibrationSpec& spec);

/// 1 / P(mean of n counts > ucl), computed from the exact pmf
/// (n-fold convolution for n > 1). Infinity when the tail mass is zero.
double shewhart_arl_exact(const ZinbParams& params, double ucl, int n = 1);

/// Exact Shewhart (lambda = 1) calibration. The ARL is a step function of
/// the UCL with jumps where n * UCL crosses an integer; the step selected
/// by the plateau policy is reported and l_star is the midpoint of the L
/// interval producing it.
CalibrationResult calibrate_shewhart_exact(const CalibrationSpec& spec);

}  // namespace zinbspc
