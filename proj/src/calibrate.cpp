#include "zinbspc/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "zinbspc/error.hpp"

namespace zinbspc {

namespace {

constexpr double kWidthFloor = 1e-3;
constexpr int kMaxBisections = 60;

struct Evaluation {
  double arl = 0.0;
  int side = 0;  // -1 below the band, 0 inside, +1 above
  bool complete = true;
};

SimulationJob job_for(const CalibrationSpec& spec, double L, std::int64_t max_rl) {
  SimulationJob job;
  job.chart = ChartConfig{spec.lambda, L, spec.n, spec.params};
  job.truth = spec.params;
  job.reps = spec.reps;
  job.max_rl = max_rl;
  job.master_seed = spec.master_seed;
  job.threads = spec.threads;
  return job;
}

// Probabilities of S = Y_1 + ... + Y_n for S = 0..max_sum.
std::vector<double> subgroup_sum_pmf(const ZinbParams& params, int n,
                                     std::int64_t max_sum) {
  const auto size = static_cast<std::size_t>(max_sum + 1);
  std::vector<double> single(size);
  for (std::size_t y = 0; y < size; ++y) {
    single[y] = zinb_pmf(params, static_cast<std::int64_t>(y));
  }
  std::vector<double> acc = single;
  std::vector<double> next(size);
  for (int i = 1; i < n; ++i) {
    for (std::size_t s = 0; s < size; ++s) {
      double v = 0.0;
      for (std::size_t y = 0; y <= s; ++y) v += single[y] * acc[s - y];
      next[s] = v;
    }
    acc.swap(next);
  }
  return acc;
}

double geometric_sd(double arl) {
  const double q = 1.0 / arl;
  return std::sqrt(1.0 - q) / q;
}

}  // namespace

void CalibrationSpec::validate() const {
  ChartConfig{lambda, 1.0, n, params}.validate();
  if (!(target_arl0 > 1.0)) throw DomainError("target ARL0 must exceed 1");
  if (tol_arl < 0.0) throw DomainError("tol_arl must be nonnegative");
  if (!(l_lo > 0.0 && l_lo < l_hi)) throw DomainError("L bracket must satisfy 0 < L_lo < L_hi");
  if (growth_cap < 1.0) throw DomainError("growth_cap must be at least 1");
  if (reps < 1 || max_rl < 1) throw DomainError("reps and max_rl must be positive");
}

double CalibrationSpec::tolerance() const {
  return tol_arl > 0.0 ? tol_arl : std::max(0.5, 0.01 * target_arl0);
}

double shewhart_arl_exact(const ZinbParams& params, double ucl, int n) {
  params.validate();
  if (n < 1) throw DomainError("subgroup size must be at least 1");
  if (ucl < 0.0) return 1.0;
  double tail;
  if (n == 1) {
    tail = zinb_upper_tail(params, static_cast<std::int64_t>(std::floor(ucl)));
  } else {
    // Signal iff S > n * ucl, i.e. S > floor(n * ucl).
    const auto m = static_cast<std::int64_t>(std::floor(n * ucl));
    const auto pmf = subgroup_sum_pmf(params, n, m);
    double cdf = 0.0;
    for (const double v : pmf) cdf += v;
    tail = 1.0 - cdf;
  }
  if (!(tail > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 / tail;
}

CalibrationResult calibrate_shewhart_exact(const CalibrationSpec& spec) {
  spec.validate();
  if (spec.lambda != 1.0) throw DomainError("exact calibration requires lambda = 1");
  const double tol = spec.tolerance();
  const int n = spec.n;
  const double cl = zinb_mean(spec.params);
  const double width = ewma_sigma(ChartConfig{1.0, 1.0, n, spec.params});
  const double l_max = spec.l_hi * spec.growth_cap;

  // Step s: signal iff the subgroup sum reaches s, i.e. n * UCL in [s-1, s).
  const auto first = static_cast<std::int64_t>(std::floor(n * cl)) + 1;
  const auto last = static_cast<std::int64_t>(std::floor(n * (cl + l_max * width))) + 1;
  const auto pmf = subgroup_sum_pmf(spec.params, n, last);
  std::vector<double> cdf(pmf.size());
  std::partial_sum(pmf.begin(), pmf.end(), cdf.begin());

  auto step_arl = [&](std::int64_t s) {
    const double tail = 1.0 - cdf[static_cast<std::size_t>(s - 1)];
    return tail > 0.0 ? 1.0 / tail : std::numeric_limits<double>::infinity();
  };
  auto step_l = [&](std::int64_t s) {
    const double lo = std::max(0.0, ((s - 1.0) / n - cl) / width);
    const double hi = std::min(l_max, (static_cast<double>(s) / n - cl) / width);
    return 0.5 * (lo + hi);
  };

  CalibrationResult result;
  std::int64_t above = -1;
  for (std::int64_t s = first; s <= last; ++s) {
    ++result.evaluations;
    if (step_arl(s) >= spec.target_arl0) {
      above = s;
      break;
    }
  }
  if (above < 0) {
    std::ostringstream os;
    os << "target ARL0 " << spec.target_arl0 << " exceeds every Shewhart step up to L = " << l_max;
    throw BracketError(os.str());
  }
  const double arl_above = step_arl(above);
  std::int64_t chosen = above;
  if (above == first) {
    if (arl_above - spec.target_arl0 > tol) {
      std::ostringstream os;
      os << "target ARL0 " << spec.target_arl0 << " is below the smallest achievable ARL "
         << arl_above;
      throw BracketError(os.str());
    }
  } else {
    const double arl_below = step_arl(above - 1);
    const bool above_ok = arl_above - spec.target_arl0 <= tol;
    const bool below_ok = spec.target_arl0 - arl_below <= tol;
    if (!above_ok && !below_ok) {
      result.plateau = Plateau{arl_below, arl_above, step_l(above - 1), step_l(above)};
      switch (spec.plateau_policy) {
        case PlateauPolicy::Below: chosen = above - 1; break;
        case PlateauPolicy::Above: chosen = above; break;
        case PlateauPolicy::Nearest:
          chosen = (spec.target_arl0 - arl_below <= arl_above - spec.target_arl0)
                       ? above - 1 : above;
          break;
      }
    } else if (!above_ok) {
      chosen = above - 1;
    }
  }
  result.l_star = step_l(chosen);
  result.ucl = cl + result.l_star * width;
  result.achieved_arl = step_arl(chosen);
  result.achieved_sdrl = geometric_sd(result.achieved_arl);
  result.converged = true;
  result.summary.arl = result.achieved_arl;
  result.summary.sdrl = result.achieved_sdrl;
  return result;
}

CalibrationResult calibrate_L(const CalibrationSpec& spec) {
  spec.validate();
  const double target = spec.target_arl0;
  const double tol = spec.tolerance();
  // Run lengths are truncated while searching; truncation keeps ARL(L)
  // monotone and only matters for L far above the answer.
  const std::int64_t search_cap =
      std::min(spec.max_rl, std::max<std::int64_t>(1000, static_cast<std::int64_t>(std::ceil(20.0 * target))));

  CalibrationResult result;
  auto evaluate = [&](double L) {
    ++result.evaluations;
    const BoundedArl b = estimate_arl_until(job_for(spec, L, search_cap), target + tol);
    Evaluation e;
    e.arl = b.summary.arl;
    e.complete = !b.exceeded || b.summary.reps == spec.reps;
    if (b.exceeded) {
      e.side = 1;
    } else if (e.arl < target - tol) {
      e.side = -1;
    }
    return e;
  };
  auto finish = [&](double L) {
    ++result.evaluations;
    const RunLengthSummary s = estimate_arl(job_for(spec, L, spec.max_rl));
    result.l_star = L;
    result.ucl = compute_limits(ChartConfig{spec.lambda, L, spec.n, spec.params}).ucl;
    result.achieved_arl = s.arl;
    result.achieved_sdrl = s.sdrl;
    result.summary = s;
    result.converged = true;
    return result;
  };

  double lo = spec.l_lo;
  Evaluation at_lo = evaluate(lo);
  while (at_lo.side > 0) {
    if (lo < 1e-3) {
      throw BracketError("target ARL0 is below the ARL at the smallest L tried");
    }
    lo *= 0.5;
    at_lo = evaluate(lo);
  }
  if (at_lo.side == 0) return finish(lo);

  const double l_max = spec.l_hi * spec.growth_cap;
  double hi = std::max(spec.l_hi, lo);
  Evaluation at_hi = evaluate(hi);
  while (at_hi.side < 0) {
    if (hi >= l_max) {
      std::ostringstream os;
      os << "target ARL0 " << target << " not reached for L up to " << l_max;
      throw BracketError(os.str());
    }
    lo = hi;
    at_lo = at_hi;
    hi = std::min(hi * 1.5, l_max);
    at_hi = evaluate(hi);
  }
  if (at_hi.side == 0) return finish(hi);

  for (int i = 0; i < kMaxBisections && hi - lo > kWidthFloor; ++i) {
    const double mid = 0.5 * (lo + hi);
    const Evaluation e = evaluate(mid);
    if (e.side == 0) return finish(mid);
    if (e.side > 0) {
      hi = mid;
      at_hi = e;
    } else {
      lo = mid;
      at_lo = e;
    }
  }

  // The target falls inside a jump of ARL(L).
  if (!at_hi.complete) {
    ++result.evaluations;
    at_hi.arl = estimate_arl(job_for(spec, hi, search_cap)).arl;
  }
  Plateau plateau{at_lo.arl, at_hi.arl, lo, hi};
  double chosen = hi;
  switch (spec.plateau_policy) {
    case PlateauPolicy::Below: chosen = lo; break;
    case PlateauPolicy::Above: chosen = hi; break;
    case PlateauPolicy::Nearest:
      chosen = (target - at_lo.arl <= at_hi.arl - target) ? lo : hi;
      break;
  }
  finish(chosen);
  result.plateau = plateau;
  return result;
}

}  // namespace zinbspc
