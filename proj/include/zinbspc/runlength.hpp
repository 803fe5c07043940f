#pragma once

#include <cstdint>
#include <span>

#include "zinbspc/chart.hpp"
#include "zinbspc/distributions.hpp"

namespace zinbspc {

/// One Monte Carlo run-length study: limits come from `chart` (built on the
/// in-control parameters), data come from `truth`.
struct SimulationJob {
  ChartConfig chart;
  ZinbParams truth;
  std::int64_t reps = 10'000;
  std::int64_t max_rl = 1'000'000;
  std::uint64_t master_seed = 20240101;
  unsigned threads = 0;  ///< 0 selects the hardware concurrency

  void validate() const;
};

struct RunLengthSummary {
  double arl = 0.0;
  double sdrl = 0.0;
  double se_arl = 0.0;
  std::int64_t reps = 0;
  std::int64_t censored = 0;  ///< replications that hit max_rl
  std::int64_t max_rl = 0;
};

/// Run length of replication `replication`: the first 1-based period whose
/// EWMA of subgroup means exceeds the UCL, or max_rl when censored. The
/// random stream is derived from (master_seed, replication) only.
std::int64_t simulate_run_length(const SimulationJob& job,
                                 const ControlLimits& limits,
                                 std::uint64_t replication);

/// Mean, sample SD and standard error over `reps` replications. Identical
/// for a given seed whatever the thread count.
RunLengthSummary estimate_arl(const SimulationJob& job);

RunLengthSummary summarize_run_lengths(std::span<const std::int64_t> run_lengths,
                                       std::int64_t max_rl);

struct BoundedArl {
  RunLengthSummary summary;  ///< over the replications actually run
  bool exceeded = false;     ///< proven: mean run length > threshold
};

/// Like estimate_arl, but replications are processed in fixed index blocks
/// and the study stops as soon as the running sum of run lengths alone
/// proves the full-sample mean exceeds `threshold`. The stopping decision
/// depends only on the seed.
BoundedArl estimate_arl_until(const SimulationJob& job, double threshold);

}  // namespace zinbspc
