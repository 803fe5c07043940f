#include "zinbspc/chart.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "zinbspc/error.hpp"

namespace zinbspc {

void ChartConfig::validate() const {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw DomainError("lambda must lie in (0, 1], got " + std::to_string(lambda));
  }
  if (!(L > 0.0) || !std::isfinite(L)) {
    throw DomainError("L must be positive, got " + std::to_string(L));
  }
  if (n < 1) throw DomainError("subgroup size must be at least 1");
  params.validate();
}

double ewma_sigma(const ChartConfig& config) {
  config.validate();
  return std::sqrt(config.lambda * zinb_variance(config.params) /
                   (config.n * (2.0 - config.lambda)));
}

ControlLimits compute_limits(const ChartConfig& config) {
  const double width = config.L * ewma_sigma(config);
  const double cl = zinb_mean(config.params);
  return {cl + width, cl, std::max(0.0, cl - width)};
}

}  // namespace zinbspc
