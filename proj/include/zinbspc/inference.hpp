#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "zinbspc/distributions.hpp"

namespace zinbspc {

struct FitResult {
  CountModel model;
  double loglik = 0.0;
  double bic = 0.0;
  /// Estimated mean of the non-inflated component (equals the marginal mean
  /// for Poisson and NB).
  double mean_hat = 0.0;
  /// 95% Wald interval for mean_hat, built on the log scale.
  std::pair<double, double> mean_ci{0.0, 0.0};
  /// k(1 - theta) / (mu + k(1 - theta)) for the NB families.
  std::optional<double> p_hat;
  /// Standard errors of (log mu, log k, logit theta); NaN where the
  /// parameter is absent or sits on the boundary.
  std::vector<double> se_transformed;
  std::int64_t n_obs = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

/// Maximum likelihood fit of one intercept-only family.
FitResult fit(Family family, std::span<const std::int64_t> data);

struct ModelSelection {
  FitResult best;
  std::vector<FitResult> ranked;  ///< ascending BIC
  std::vector<std::string> notes; ///< families dropped after a failed fit
};

/// Fits all four families and ranks them by BIC.
ModelSelection select_model(std::span<const std::int64_t> data);

/// How a fitted model is turned into chart parameters (k, p, theta).
enum class PConvention {
  /// p = k(1 - theta) / (mu + k(1 - theta)); the chart's ZINB mean then
  /// equals the fitted component mean mu.
  InflationAdjusted,
  /// p = k / (mu + k), the success probability of the fitted NB component.
  Component,
};

/// Poisson and ZIP fits map to k = 1e6 (the Poisson limit of the ZINB).
ZinbParams to_zinb_params(const FitResult& fit, PConvention convention = PConvention::InflationAdjusted);

struct NaiveCv {
  double mean = 0.0;
  double variance = 0.0;        ///< denominator N - 1
  std::optional<double> cv;     ///< absent when the mean is zero
};

NaiveCv naive_cv(std::span<const std::int64_t> data);

enum class DispersionForm { Linear, Quadratic };

/// Regression-based test of Var(Y) = mu + c f(mu) against c = 0 for an
/// intercept-only Poisson model.
struct AuxiliaryTest {
  double c_hat = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;          ///< two-sided
  double p_value_greater = 1.0;  ///< one-sided, H1: c > 0
};

AuxiliaryTest dispersion_test_auxiliary(std::span<const std::int64_t> data,
                                        DispersionForm form = DispersionForm::Linear);

/// Likelihood-ratio test of NB against Poisson, with the boundary-corrected
/// p-value 0.5 * P(chi2_1 > LR).
struct LrTest {
  double lr_stat = 0.0;
  double p_value = 0.5;
  double size_k = 0.0;   ///< fitted NB size (infinite at the Poisson boundary)
  double alpha = 0.0;    ///< 1 / size_k
};

LrTest dispersion_test_lr(std::span<const std::int64_t> data);

struct DispersionReport {
  NaiveCv naive;
  AuxiliaryTest auxiliary;
  LrTest lr;
};

DispersionReport dispersion_report(std::span<const std::int64_t> data);

double normal_upper_tail(double z);
double chi_square1_upper_tail(double x);

}  // namespace zinbspc
