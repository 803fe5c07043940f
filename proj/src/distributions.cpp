#include "zinbspc/distributions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "zinbspc/error.hpp"

namespace zinbspc {

namespace {

[[noreturn]] void domain_fail(const std::string& what, double value) {
  std::ostringstream os;
  os << what << " (got " << value << ")";
  throw DomainError(os.str());
}

void require_count(std::int64_t y) {
  if (y < 0) domain_fail("count must be nonnegative", static_cast<double>(y));
}

double log_factorial(std::int64_t y) {
  return std::lgamma(static_cast<double>(y) + 1.0);
}

// log(theta + (1 - theta) * exp(log_p0)) without underflow for tiny p0.
double inflated_zero(double theta, double log_p0) {
  if (theta == 0.0) return log_p0;
  return std::log(theta + (1.0 - theta) * std::exp(log_p0));
}

}  // namespace

void ZinbParams::validate() const {
  if (!(k > 0.0) || !std::isfinite(k)) domain_fail("ZINB k must be positive and finite", k);
  if (!(p > 0.0 && p < 1.0)) domain_fail("ZINB p must lie in (0, 1)", p);
  if (!(theta >= 0.0 && theta < 1.0)) domain_fail("ZINB theta must lie in [0, 1)", theta);
}

double ZinbParams::mean() const { return zinb_mean(*this); }
double ZinbParams::variance() const { return zinb_variance(*this); }

double zinb_logpmf(const ZinbParams& params, std::int64_t y) {
  params.validate();
  require_count(y);
  const double log_p0 = params.k * std::log(params.p);
  if (y == 0) return inflated_zero(params.theta, log_p0);
  const double yd = static_cast<double>(y);
  return std::log1p(-params.theta) + std::lgamma(yd + params.k) -
         std::lgamma(params.k) - log_factorial(y) + log_p0 +
         yd * std::log1p(-params.p);
}

double zinb_pmf(const ZinbParams& params, std::int64_t y) {
  return std::exp(zinb_logpmf(params, y));
}

double zinb_mean(const ZinbParams& params) {
  params.validate();
  const auto& [k, p, theta] = params;
  return k * (1.0 - theta) * (1.0 - p) / p;
}

double zinb_variance(const ZinbParams& params) {
  params.validate();
  const auto& [k, p, theta] = params;
  return k * (1.0 - theta) * (1.0 - p) * (1.0 + (1.0 - p) * theta * k) /
         (p * p);
}

double zinb_upper_tail(const ZinbParams& params, std::int64_t y) {
  params.validate();
  if (y < 0) return 1.0;
  // Terms of the NB part satisfy f(j+1) = f(j) * (j + k) / (j + 1) * (1 - p)
  // for j >= 1; past the mode they decay geometrically.
  const double q = 1.0 - params.p;
  const double mode = std::max(0.0, (params.k - 1.0) * q / params.p);
  std::int64_t j = y + 1;
  double term = zinb_pmf(params, j);
  double total = 0.0;
  for (;;) {
    total += term;
    const double jd = static_cast<double>(j);
    const double ratio = (jd + params.k) / (jd + 1.0) * q;
    term *= ratio;
    ++j;
    // Later ratios never exceed max(ratio, q), so the remaining mass is
    // bounded by a geometric series.
    const double bound_ratio = std::max(ratio, q);
    if (jd > mode && bound_ratio < 1.0) {
      if (term / (1.0 - bound_ratio) <= 1e-17 * total || term == 0.0) break;
    }
  }
  return std::min(1.0, total);
}

std::int64_t zinb_sample(const ZinbParams& params, RandomStream& rng) {
  if (params.theta > 0.0 && rng.uniform() < params.theta) return 0;
  const double rate = rng.gamma(params.k, (1.0 - params.p) / params.p);
  return rng.poisson(rate);
}

std::string_view family_name(Family family) {
  switch (family) {
    case Family::Poisson: return "Poisson";
    case Family::NegBinomial: return "NB";
    case Family::ZIPoisson: return "ZIP";
    case Family::ZINegBinomial: return "ZINB";
  }
  return "?";
}

std::optional<Family> parse_family(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "poisson") return Family::Poisson;
  if (lower == "nb" || lower == "negbinomial") return Family::NegBinomial;
  if (lower == "zip") return Family::ZIPoisson;
  if (lower == "zinb") return Family::ZINegBinomial;
  return std::nullopt;
}

CountModel CountModel::poisson(double mu) {
  CountModel m{Family::Poisson, mu, std::numeric_limits<double>::infinity(), 0.0};
  m.validate();
  return m;
}

CountModel CountModel::negative_binomial(double mu, double k) {
  CountModel m{Family::NegBinomial, mu, k, 0.0};
  m.validate();
  return m;
}

CountModel CountModel::zip(double mu, double theta) {
  CountModel m{Family::ZIPoisson, mu, std::numeric_limits<double>::infinity(), theta};
  m.validate();
  return m;
}

CountModel CountModel::zinb(double mu, double k, double theta) {
  CountModel m{Family::ZINegBinomial, mu, k, theta};
  m.validate();
  return m;
}

void CountModel::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) domain_fail("model mean must be positive", mu);
  if (has_size() && !(k > 0.0)) domain_fail("model size k must be positive", k);
  if (has_inflation()) {
    if (!(theta >= 0.0 && theta < 1.0)) domain_fail("model theta must lie in [0, 1)", theta);
  } else if (theta != 0.0) {
    domain_fail("non-inflated family carries theta", theta);
  }
}

int CountModel::free_param_count() const {
  switch (family) {
    case Family::Poisson: return 1;
    case Family::NegBinomial: return 2;
    case Family::ZIPoisson: return 2;
    case Family::ZINegBinomial: return 3;
  }
  return 0;
}

double CountModel::mean() const { return (1.0 - theta) * mu; }

double CountModel::variance() const {
  const double alpha = has_size() ? 1.0 / k : 0.0;
  return (1.0 - theta) * mu * (1.0 + mu * (theta + alpha));
}

namespace detail {

double poisson_logpmf(std::int64_t y, double mu, double log_factorial_y) {
  return static_cast<double>(y) * std::log(mu) - mu - log_factorial_y;
}

double nb_logpmf_alpha(std::int64_t y, double mu, double alpha,
                       double log_factorial_y) {
  if (alpha == 0.0) return poisson_logpmf(y, mu, log_factorial_y);
  const double yd = static_cast<double>(y);
  if (alpha < 1e-4) {
    // Gamma ratio expanded as a finite product to avoid cancellation
    // between lgamma(y + k) and lgamma(k) when k is huge.
    double acc = 0.0;
    for (std::int64_t j = 1; j < y; ++j) {
      acc += std::log1p(static_cast<double>(j) * alpha);
    }
    const double l1 = std::log1p(mu * alpha);
    return acc - yd * l1 - log_factorial_y + yd * std::log(mu) - l1 / alpha;
  }
  const double k = 1.0 / alpha;
  return std::lgamma(yd + k) - std::lgamma(k) - log_factorial_y -
         k * std::log1p(mu / k) + yd * std::log(mu / (k + mu));
}

}  // namespace detail

double model_logpmf(const CountModel& model, std::int64_t y) {
  model.validate();
  require_count(y);
  const double lf = log_factorial(y);
  const double alpha = model.has_size() ? 1.0 / model.k : 0.0;
  const double base = detail::nb_logpmf_alpha(y, model.mu, alpha, lf);
  if (!model.has_inflation()) return base;
  if (y == 0) return inflated_zero(model.theta, base);
  return std::log1p(-model.theta) + base;
}

double model_pmf(const CountModel& model, std::int64_t y) {
  return std::exp(model_logpmf(model, y));
}

std::int64_t model_sample(const CountModel& model, RandomStream& rng) {
  if (model.theta > 0.0 && rng.uniform() < model.theta) return 0;
  double rate = model.mu;
  if (model.has_size() && std::isfinite(model.k)) {
    rate = rng.gamma(model.k, model.mu / model.k);
  }
  return rng.poisson(rate);
}

}  // namespace zinbspc
