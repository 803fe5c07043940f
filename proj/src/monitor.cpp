#include "zinbspc/monitor.hpp"

#include "zinbspc/error.hpp"

namespace zinbspc {

MonitoringRun run_chart(std::span<const std::int64_t> data, std::size_t phase1_end,
                        const ChartConfig& config, bool reset_at_phase2) {
  config.validate();
  if (config.n != 1) throw DomainError("monitoring uses individual observations (n = 1)");
  MonitoringRun run;
  run.phase1_end = phase1_end;
  run.config = config;
  run.limits = compute_limits(config);
  EwmaState state = EwmaState::start(run.limits);
  run.points.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t index = i + 1;
    if (reset_at_phase2 && index == phase1_end + 1) state = EwmaState::start(run.limits);
    const auto y = static_cast<double>(data[i]);
    state = ewma_step(state, y, config.lambda);
    const bool hit = signals(state, run.limits);
    run.points.push_back({index, y, state.z, hit});
    if (hit) (index > phase1_end ? run.ooc_indices : run.phase1_signals).push_back(index);
  }
  return run;
}

MonitoringRun monitor(std::span<const std::int64_t> data, const MonitorOptions& options) {
  if (options.phase1_end < 1 || options.phase1_end >= data.size()) {
    throw DomainError("phase1_end must satisfy 1 <= phase1_end < number of observations");
  }
  if (!(options.lambda > 0.0 && options.lambda <= 1.0)) {
    throw DomainError("lambda must lie in (0, 1]");
  }
  std::vector<std::string> warnings;
  if (options.phase1_end < kMinPhase1) {
    warnings.push_back("InsufficientPhase1: only " + std::to_string(options.phase1_end) +
                       " Phase I observations");
  }

  const auto phase1 = data.first(options.phase1_end);
  FitResult fitted = options.family ? fit(*options.family, phase1) : select_model(phase1).best;

  ChartConfig config;
  config.lambda = options.lambda;
  config.n = 1;
  config.params = to_zinb_params(fitted, options.convention);

  std::optional<CalibrationResult> calibration;
  if (options.L) {
    config.L = *options.L;
  } else {
    CalibrationSpec spec;
    spec.lambda = options.lambda;
    spec.n = 1;
    spec.params = config.params;
    spec.target_arl0 = options.target_arl0;
    spec.reps = options.calibration_reps;
    spec.master_seed = options.master_seed;
    spec.threads = options.threads;
    spec.plateau_policy = options.plateau_policy;
    calibration = config.lambda == 1.0 ? calibrate_shewhart_exact(spec) : calibrate_L(spec);
    config.L = calibration->l_star;
    if (calibration->plateau) {
      warnings.push_back("target ARL0 falls on a discreteness plateau; using ARL0 " +
                         std::to_string(calibration->achieved_arl));
    }
  }

  MonitoringRun run = run_chart(data, options.phase1_end, config, options.reset_at_phase2);
  for (const auto& w : fitted.warnings) warnings.push_back(w);
  run.fit = std::move(fitted);
  run.calibration = std::move(calibration);
  run.warnings = std::move(warnings);
  return run;
}

}  // namespace zinbspc
