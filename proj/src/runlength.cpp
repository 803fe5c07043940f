#include "zinbspc/runlength.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "zinbspc/error.hpp"
#include "zinbspc/parallel.hpp"
#include "zinbspc/rng.hpp"

namespace zinbspc {

namespace {

constexpr std::int64_t kBlock = 512;

void run_block(const SimulationJob& job, const ControlLimits& limits,
               std::int64_t begin, std::int64_t end,
               std::vector<std::int64_t>& out) {
  parallel_for(static_cast<std::size_t>(end - begin), job.threads,
               [&](std::size_t i) {
                 const auto rep = static_cast<std::int64_t>(i) + begin;
                 out[static_cast<std::size_t>(rep)] =
                     simulate_run_length(job, limits, static_cast<std::uint64_t>(rep));
               });
}

}  // namespace

void SimulationJob::validate() const {
  chart.validate();
  truth.validate();
  if (reps < 1) throw DomainError("reps must be at least 1");
  if (max_rl < 1) throw DomainError("max_rl must be at least 1");
}

std::int64_t simulate_run_length(const SimulationJob& job,
                                 const ControlLimits& limits,
                                 std::uint64_t replication) {
  RandomStream rng = RandomStream::for_replication(job.master_seed, replication);
  const double lambda = job.chart.lambda;
  const int n = job.chart.n;
  const double inv_n = 1.0 / n;
  EwmaState state = EwmaState::start(limits);
  for (std::int64_t t = 1; t <= job.max_rl; ++t) {
    std::int64_t total = 0;
    for (int i = 0; i < n; ++i) total += zinb_sample(job.truth, rng);
    state = ewma_step(state, static_cast<double>(total) * inv_n, lambda);
    if (signals(state, limits)) return t;
  }
  return job.max_rl;
}

RunLengthSummary summarize_run_lengths(std::span<const std::int64_t> run_lengths,
                                       std::int64_t max_rl) {
  RunLengthSummary s;
  s.reps = static_cast<std::int64_t>(run_lengths.size());
  s.max_rl = max_rl;
  if (run_lengths.empty()) return s;
  std::int64_t total = 0;
  for (const auto rl : run_lengths) {
    total += rl;
    if (rl >= max_rl) ++s.censored;
  }
  const double n = static_cast<double>(s.reps);
  s.arl = static_cast<double>(total) / n;
  double ss = 0.0;
  for (const auto rl : run_lengths) {
    const double d = static_cast<double>(rl) - s.arl;
    ss += d * d;
  }
  s.sdrl = s.reps > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.se_arl = s.sdrl / std::sqrt(n);
  return s;
}

RunLengthSummary estimate_arl(const SimulationJob& job) {
  job.validate();
  const ControlLimits limits = compute_limits(job.chart);
  std::vector<std::int64_t> run_lengths(static_cast<std::size_t>(job.reps));
  run_block(job, limits, 0, job.reps, run_lengths);
  return summarize_run_lengths(run_lengths, job.max_rl);
}

BoundedArl estimate_arl_until(const SimulationJob& job, double threshold) {
  job.validate();
  const ControlLimits limits = compute_limits(job.chart);
  std::vector<std::int64_t> run_lengths(static_cast<std::size_t>(job.reps));
  const double bound = threshold * static_cast<double>(job.reps);
  std::int64_t total = 0;
  std::int64_t done = 0;
  while (done < job.reps) {
    const std::int64_t end = std::min(job.reps, done + kBlock);
    run_block(job, limits, done, end, run_lengths);
    for (std::int64_t i = done; i < end; ++i) {
      total += run_lengths[static_cast<std::size_t>(i)];
    }
    done = end;
    if (static_cast<double>(total) > bound) {
      BoundedArl out;
      out.summary = summarize_run_lengths(
          std::span(run_lengths).first(static_cast<std::size_t>(done)), job.max_rl);
      out.exceeded = true;
      return out;
    }
  }
  BoundedArl out;
  out.summary = summarize_run_lengths(run_lengths, job.max_rl);
  out.exceeded = out.summary.arl > threshold;
  return out;
}

}  // namespace zinbspc
