#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zinbspc/calibrate.hpp"
#include "zinbspc/chart.hpp"
#include "zinbspc/inference.hpp"

namespace zinbspc {

struct MonitorOptions {
  /// Observations 1..phase1_end form Phase I.
  std::size_t phase1_end = 0;
  double lambda = 0.1;
  /// Fixed L; when absent, L is calibrated to target_arl0.
  std::optional<double> L;
  double target_arl0 = 500.0;
  /// Family fitted on Phase I; absent selects by BIC.
  std::optional<Family> family;
  PConvention convention = PConvention::InflationAdjusted;
  /// Restart the EWMA at the centre line when Phase II begins.
  bool reset_at_phase2 = false;
  std::int64_t calibration_reps = 10'000;
  std::uint64_t master_seed = 20240101;
  unsigned threads = 0;
  PlateauPolicy plateau_policy = PlateauPolicy::Nearest;
};

struct MonitorPoint {
  std::size_t index = 0;  ///< 1-based position in the input
  double ybar = 0.0;
  double z = 0.0;
  bool signal = false;
};

struct MonitoringRun {
  std::size_t phase1_end = 0;
  ChartConfig config;
  ControlLimits limits;
  std::vector<MonitorPoint> points;
  std::vector<std::size_t> ooc_indices;     ///< Phase II signals
  std::vector<std::size_t> phase1_signals;  ///< shown, not reported as OOC
  FitResult fit;
  std::optional<CalibrationResult> calibration;
  std::vector<std::string> warnings;
};

/// Phase I fewer than this many observations triggers a warning.
inline constexpr std::size_t kMinPhase1 = 30;

/// Fits Phase I, builds the chart (n = 1) and runs it over every
/// observation. Throws DomainError unless 1 <= phase1_end < data.size().
MonitoringRun monitor(std::span<const std::int64_t> data, const MonitorOptions& options);

/// Runs a fixed chart over the data without any fitting.
MonitoringRun run_chart(std::span<const std::int64_t> data, std::size_t phase1_end,
                        const ChartConfig& config, bool reset_at_phase2 = false);

}  // namespace zinbspc
