#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "zinbspc/rng.hpp"

namespace zinbspc {

/// Zero-inflated negative binomial in the (k, p, theta) form used by the
/// charts: with probability theta the count is a structural zero, otherwise
/// it is the number of failures before the k-th success with success
/// probability p. Real-valued k is allowed.
struct ZinbParams {
  double k = 1.0;
  double p = 0.5;
  double theta = 0.0;

  /// Throws DomainError unless k > 0, 0 < p < 1 and 0 <= theta < 1.
  void validate() const;
  double mean() const;
  double variance() const;

  friend bool operator==(const ZinbParams&, const ZinbParams&) = default;
};

double zinb_logpmf(const ZinbParams& params, std::int64_t y);
double zinb_pmf(const ZinbParams& params, std::int64_t y);
double zinb_mean(const ZinbParams& params);
double zinb_variance(const ZinbParams& params);
/// P(Y > y); accurate in the upper tail (summed directly, not as 1 - cdf).
double zinb_upper_tail(const ZinbParams& params, std::int64_t y);

/// Draws one count. The non-inflated branch is a Gamma(k, (1-p)/p) mixed
/// Poisson, so non-integer k is supported.
std::int64_t zinb_sample(const ZinbParams& params, RandomStream& rng);

enum class Family { Poisson, NegBinomial, ZIPoisson, ZINegBinomial };

std::string_view family_name(Family family);
/// Accepts "poisson", "nb", "zip", "zinb" (case-insensitive).
std::optional<Family> parse_family(std::string_view name);

/// Count model in mean parameterization.
///
/// mu is the mean of the non-inflated component. NB and ZINB use size k
/// with component success probability k / (mu + k); k = +inf is the
/// Poisson limit. theta is the zero-inflation probability (zero for the
/// non-inflated families).
struct CountModel {
  Family family = Family::Poisson;
  double mu = 1.0;
  double k = 1.0;
  double theta = 0.0;

  static CountModel poisson(double mu);
  static CountModel negative_binomial(double mu, double k);
  static CountModel zip(double mu, double theta);
  static CountModel zinb(double mu, double k, double theta);

  void validate() const;
  int free_param_count() const;
  bool has_size() const {
    return family == Family::NegBinomial || family == Family::ZINegBinomial;
  }
  bool has_inflation() const {
    return family == Family::ZIPoisson || family == Family::ZINegBinomial;
  }
  /// Marginal mean and variance.
  double mean() const;
  double variance() const;
};

double model_logpmf(const CountModel& model, std::int64_t y);
double model_pmf(const CountModel& model, std::int64_t y);
std::int64_t model_sample(const CountModel& model, RandomStream& rng);

namespace detail {
/// log NB(y; mu, alpha = 1/k). alpha == 0 gives the Poisson log-pmf.
/// Stable for tiny alpha where lgamma differences cancel.
double nb_logpmf_alpha(std::int64_t y, double mu, double alpha,
                       double log_factorial_y);
double poisson_logpmf(std::int64_t y, double mu, double log_factorial_y);
}  // namespace detail

}  // namespace zinbspc
