#pragma once

#include <cstdint>

#include "zinbspc/distributions.hpp"

namespace zinbspc {

/// EWMA chart design for subgroup means of ZINB counts. lambda == 1 is the
/// Shewhart chart.
struct ChartConfig {
  double lambda = 0.1;
  double L = 3.0;
  int n = 1;
  ZinbParams params;  // in-control parameters

  void validate() const;
  bool is_shewhart() const { return lambda == 1.0; }
};

/// Limits in units of the subgroup mean.
struct ControlLimits {
  double ucl = 0.0;
  double cl = 0.0;
  double lcl = 0.0;
};

/// Asymptotic limits: CL = E(Y), half-width
/// L * sqrt(lambda * Var(Y) / (n * (2 - lambda))), LCL clamped at zero.
ControlLimits compute_limits(const ChartConfig& config);

/// Standard deviation of the steady-state EWMA statistic.
double ewma_sigma(const ChartConfig& config);

struct EwmaState {
  double z = 0.0;
  std::int64_t t = 0;

  /// Z_0 = CL.
  static EwmaState start(const ControlLimits& limits) { return {limits.cl, 0}; }
};

inline EwmaState ewma_step(EwmaState state, double ybar, double lambda) {
  return {lambda * ybar + (1.0 - lambda) * state.z, state.t + 1};
}

/// Upper one-sided rule: strict exceedance of the UCL.
inline bool signals(const EwmaState& state, const ControlLimits& limits) {
  return state.z > limits.ucl;
}

}  // namespace zinbspc
