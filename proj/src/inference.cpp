#include "zinbspc/inference.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "zinbspc/error.hpp"
#include "zinbspc/optimize.hpp"

namespace zinbspc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kZ975 = 1.959963984540054;

/// Frequency table of the sample; every likelihood is a weighted sum over
/// distinct values.
struct CountTable {
  std::vector<std::int64_t> values;
  std::vector<double> weights;
  std::vector<double> log_factorials;
  std::int64_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
  double zero_fraction = 0.0;

  explicit CountTable(std::span<const std::int64_t> data) {
    if (data.empty()) throw DomainError("cannot fit an empty sample");
    std::map<std::int64_t, std::int64_t> freq;
    for (const auto y : data) {
      if (y < 0) throw DomainError("counts must be nonnegative");
      ++freq[y];
    }
    n = static_cast<std::int64_t>(data.size());
    double sum = 0.0;
    for (const auto& [y, c] : freq) {
      values.push_back(y);
      weights.push_back(static_cast<double>(c));
      log_factorials.push_back(std::lgamma(static_cast<double>(y) + 1.0));
      sum += static_cast<double>(y) * static_cast<double>(c);
    }
    mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double d = static_cast<double>(values[i]) - mean;
      ss += weights[i] * d * d;
    }
    variance = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
    zero_fraction = values.front() == 0 ? weights.front() / static_cast<double>(n) : 0.0;
    if (!(mean > 0.0)) throw DomainError("all counts are zero; no count model is identifiable");
  }

  /// Log-likelihood with NB component (mu, alpha = 1/k) and inflation theta.
  double loglik(double mu, double alpha, double theta) const {
    if (!(mu > 0.0) || !std::isfinite(mu) || alpha < 0.0 || !(theta >= 0.0 && theta < 1.0)) {
      return -kInf;
    }
    const double log_keep = std::log1p(-theta);
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const std::int64_t y = values[i];
      const double base = detail::nb_logpmf_alpha(y, mu, alpha, log_factorials[i]);
      double term;
      if (theta == 0.0) {
        term = base;
      } else if (y == 0) {
        term = std::log(theta + (1.0 - theta) * std::exp(base));
      } else {
        term = log_keep + base;
      }
      total += weights[i] * term;
    }
    return total;
  }
};

// Natural parameters from the optimizer's unconstrained coordinates.
// alpha = s^2 and theta = sin^2(u) reach the nested boundaries exactly.
struct Natural {
  double mu = 1.0;
  double alpha = 0.0;
  double theta = 0.0;
};

double theta_from(double u) {
  const double s = std::sin(u);
  return s * s;
}

double u_from(double theta) { return std::asin(std::sqrt(std::clamp(theta, 0.0, 1.0))); }

Natural decode(Family family, const std::vector<double>& x) {
  Natural out;
  out.mu = std::exp(x[0]);
  switch (family) {
    case Family::Poisson: break;
    case Family::NegBinomial: out.alpha = x[1] * x[1]; break;
    case Family::ZIPoisson: out.theta = theta_from(x[1]); break;
    case Family::ZINegBinomial:
      out.alpha = x[1] * x[1];
      out.theta = theta_from(x[2]);
      break;
  }
  return out;
}

std::vector<double> encode(Family family, const Natural& p) {
  const double lm = std::log(p.mu);
  const double s = std::sqrt(std::max(0.0, p.alpha));
  switch (family) {
    case Family::Poisson: return {lm};
    case Family::NegBinomial: return {lm, s};
    case Family::ZIPoisson: return {lm, u_from(p.theta)};
    case Family::ZINegBinomial: return {lm, s, u_from(p.theta)};
  }
  return {lm};
}

struct Optimum {
  Natural params;
  double loglik = -kInf;
  bool converged = false;
};

class Fitter {
 public:
  explicit Fitter(std::span<const std::int64_t> data) : table_(data) {}

  const CountTable& table() const { return table_; }

  const Optimum& optimum(Family family) {
    auto& slot = cache_[static_cast<std::size_t>(family)];
    if (!slot) slot = solve(family);
    return *slot;
  }

  FitResult result(Family family) {
    const Optimum& opt = optimum(family);
    FitResult out;
    const Natural& p = opt.params;
    const double k = p.alpha > 0.0 ? 1.0 / p.alpha : kInf;
    switch (family) {
      case Family::Poisson: out.model = CountModel::poisson(p.mu); break;
      case Family::NegBinomial: out.model = CountModel::negative_binomial(p.mu, k); break;
      case Family::ZIPoisson: out.model = CountModel::zip(p.mu, p.theta); break;
      case Family::ZINegBinomial: out.model = CountModel::zinb(p.mu, k, p.theta); break;
    }
    out.loglik = opt.loglik;
    out.n_obs = table_.n;
    out.bic = -2.0 * out.loglik +
              out.model.free_param_count() * std::log(static_cast<double>(table_.n));
    out.mean_hat = p.mu;
    out.converged = opt.converged;
    if (out.model.has_size()) {
      const double kk = k * (1.0 - p.theta);
      out.p_hat = std::isfinite(k) ? kk / (p.mu + kk) : 1.0;
      if (k > 1e4) {
        out.warnings.push_back("BoundaryWarning: size k > 1e4, fit is effectively Poisson-type");
      }
    }
    if (out.model.has_inflation() && p.theta < 1e-6) {
      out.warnings.push_back("BoundaryWarning: theta < 1e-6, fit is effectively non-inflated");
    }
    standard_errors(family, p, out);
    return out;
  }

 private:
  double negloglik(Family family, const std::vector<double>& x) const {
    const Natural p = decode(family, x);
    return -table_.loglik(p.mu, p.alpha, p.theta);
  }

  Optimum solve(Family family) {
    const double m = table_.mean;
    const double v = table_.variance;
    Optimum best;
    if (family == Family::Poisson) {
      best.params = {m, 0.0, 0.0};
      best.loglik = table_.loglik(m, 0.0, 0.0);
      best.converged = true;
      return best;
    }

    const double alpha_mom = std::max(0.05, (v - m) / (m * m));
    std::vector<Natural> starts;
    switch (family) {
      case Family::NegBinomial:
        starts.push_back(optimum(Family::Poisson).params);
        starts.push_back({m, alpha_mom, 0.0});
        starts.push_back({m, 1.0, 0.0});
        starts.push_back({m * 1.2, 2.0 * alpha_mom, 0.0});
        break;
      case Family::ZIPoisson: {
        starts.push_back(optimum(Family::Poisson).params);
        const double excess = v / m - 1.0;
        const double mu_mom = std::max(m, m + excess);
        starts.push_back({mu_mom, 0.0, std::clamp(1.0 - m / mu_mom, 0.01, 0.95)});
        const double z = std::clamp(table_.zero_fraction, 0.01, 0.9);
        starts.push_back({m / (1.0 - z), 0.0, z});
        starts.push_back({m * 1.5, 0.0, 0.3});
        break;
      }
      case Family::ZINegBinomial: {
        starts.push_back(optimum(Family::NegBinomial).params);
        starts.push_back(optimum(Family::ZIPoisson).params);
        const Natural zip = optimum(Family::ZIPoisson).params;
        starts.push_back({zip.mu, 0.5 * alpha_mom, zip.theta});
        const double z = std::clamp(table_.zero_fraction, 0.01, 0.9);
        const double p0 = std::pow(1.0 + alpha_mom * m, -1.0 / alpha_mom);
        const double theta0 = std::clamp((z - p0) / (1.0 - p0), 0.01, 0.9);
        starts.push_back({m / (1.0 - theta0), 0.5 * alpha_mom, theta0});
        starts.push_back({m * 1.3, alpha_mom, 0.3});
        break;
      }
      case Family::Poisson: break;
    }

    NelderMeadOptions options;
    options.f_tol = 1e-8;
    options.max_iterations = 10'000;
    auto objective = [&](const std::vector<double>& x) { return negloglik(family, x); };
    for (const Natural& s : starts) {
      options.initial_step = 0.3;
      NelderMeadResult r = nelder_mead(objective, encode(family, s), options);
      // Restart from the optimum with a fresh simplex to escape collapse.
      options.initial_step = 0.05;
      NelderMeadResult r2 = nelder_mead(objective, r.x, options);
      if (!std::isfinite(r2.value)) continue;
      if (-r2.value > best.loglik) {
        best.params = decode(family, r2.x);
        best.loglik = -r2.value;
        best.converged = r.converged && r2.converged;
      } else if (-r2.value == best.loglik) {
        best.converged = best.converged || (r.converged && r2.converged);
      }
    }
    if (!std::isfinite(best.loglik)) {
      throw ConvergenceError(std::string("no start converged for ") +
                             std::string(family_name(family)));
    }
    return best;
  }

  // Wald standard errors from the observed information in
  // (log mu, log alpha, logit theta); boundary parameters are held fixed.
  void standard_errors(Family family, const Natural& p, FitResult& out) const {
    out.se_transformed.assign(3, kNaN);
    const bool free_alpha = (family == Family::NegBinomial || family == Family::ZINegBinomial) &&
                            p.alpha > 1e-8;
    const bool free_theta = (family == Family::ZIPoisson || family == Family::ZINegBinomial) &&
                            p.theta > 1e-8;
    std::vector<int> index{0};
    if (free_alpha) index.push_back(1);
    if (free_theta) index.push_back(2);
    const std::array<double, 3> origin{std::log(p.mu), free_alpha ? std::log(p.alpha) : 0.0,
                                       free_theta ? std::log(p.theta / (1.0 - p.theta)) : 0.0};
    auto nll = [&](std::array<double, 3> z) {
      const double mu = std::exp(z[0]);
      const double alpha = free_alpha ? std::exp(z[1]) : p.alpha;
      const double theta = free_theta ? 1.0 / (1.0 + std::exp(-z[2])) : p.theta;
      return -table_.loglik(mu, alpha, theta);
    };
    const double h = 1e-4;
    const auto dim = static_cast<Eigen::Index>(index.size());
    Eigen::MatrixXd info(dim, dim);
    const double f0 = nll(origin);
    for (Eigen::Index a = 0; a < dim; ++a) {
      for (Eigen::Index b = a; b < dim; ++b) {
        const int i = index[static_cast<std::size_t>(a)];
        const int j = index[static_cast<std::size_t>(b)];
        double d;
        if (i == j) {
          auto up = origin, dn = origin;
          up[i] += h;
          dn[i] -= h;
          d = (nll(up) - 2.0 * f0 + nll(dn)) / (h * h);
        } else {
          auto pp = origin, pm = origin, mp = origin, mm = origin;
          pp[i] += h; pp[j] += h;
          pm[i] += h; pm[j] -= h;
          mp[i] -= h; mp[j] += h;
          mm[i] -= h; mm[j] -= h;
          d = (nll(pp) - nll(pm) - nll(mp) + nll(mm)) / (4.0 * h * h);
        }
        info(a, b) = d;
        info(b, a) = d;
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success) {
      out.mean_ci = {kNaN, kNaN};
      out.warnings.push_back("observed information is not positive definite; no mean CI");
      return;
    }
    const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(dim, dim));
    for (Eigen::Index a = 0; a < dim; ++a) {
      out.se_transformed[static_cast<std::size_t>(index[static_cast<std::size_t>(a)])] =
          std::sqrt(cov(a, a));
    }
    const double se = out.se_transformed[0];
    out.mean_ci = {p.mu * std::exp(-kZ975 * se), p.mu * std::exp(kZ975 * se)};
  }

  CountTable table_;
  std::array<std::optional<Optimum>, 4> cache_;
};

constexpr std::array<Family, 4> kFamilies{Family::Poisson, Family::NegBinomial,
                                          Family::ZIPoisson, Family::ZINegBinomial};

}  // namespace

FitResult fit(Family family, std::span<const std::int64_t> data) {
  Fitter fitter(data);
  return fitter.result(family);
}

ModelSelection select_model(std::span<const std::int64_t> data) {
  Fitter fitter(data);
  ModelSelection out;
  for (const Family f : kFamilies) {
    try {
      out.ranked.push_back(fitter.result(f));
    } catch (const ConvergenceError& e) {
      out.notes.push_back(std::string(family_name(f)) + " excluded: " + e.what());
    }
  }
  if (out.ranked.empty()) throw ConvergenceError("no family could be fitted");
  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [](const FitResult& a, const FitResult& b) { return a.bic < b.bic; });
  out.best = out.ranked.front();
  return out;
}

ZinbParams to_zinb_params(const FitResult& fit, PConvention convention) {
  constexpr double kPoissonSize = 1e6;
  const CountModel& m = fit.model;
  const double k = std::min(m.has_size() ? m.k : kInf, kPoissonSize);
  const double theta = m.theta;
  double p;
  if (convention == PConvention::InflationAdjusted) {
    const double kk = k * (1.0 - theta);
    p = kk / (m.mu + kk);
  } else {
    p = k / (m.mu + k);
  }
  ZinbParams out{k, p, theta};
  out.validate();
  return out;
}

NaiveCv naive_cv(std::span<const std::int64_t> data) {
  if (data.empty()) throw DomainError("naive_cv needs at least one observation");
  NaiveCv out;
  double sum = 0.0;
  for (const auto y : data) sum += static_cast<double>(y);
  const double n = static_cast<double>(data.size());
  out.mean = sum / n;
  double ss = 0.0;
  for (const auto y : data) {
    const double d = static_cast<double>(y) - out.mean;
    ss += d * d;
  }
  out.variance = data.size() > 1 ? ss / (n - 1.0) : 0.0;
  if (out.mean != 0.0) out.cv = std::sqrt(out.variance) / out.mean;
  return out;
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double chi_square1_upper_tail(double x) {
  if (x <= 0.0) return 1.0;
  return std::erfc(std::sqrt(0.5 * x));
}

AuxiliaryTest dispersion_test_auxiliary(std::span<const std::int64_t> data,
                                        DispersionForm form) {
  if (data.size() < 2) throw DomainError("auxiliary dispersion test needs at least two observations");
  double sum = 0.0;
  for (const auto y : data) sum += static_cast<double>(y);
  const double n = static_cast<double>(data.size());
  const double mu = sum / n;
  if (!(mu > 0.0)) throw DomainError("auxiliary dispersion test needs a positive mean");

  // Regress ((y - mu)^2 - y) / mu on f(mu) / mu through the origin. With an
  // intercept-only model the regressor is constant (1 or mu).
  const double x = form == DispersionForm::Linear ? 1.0 : mu;
  double sxy = 0.0;
  for (const auto y : data) {
    const double yd = static_cast<double>(y);
    sxy += x * (((yd - mu) * (yd - mu) - yd) / mu);
  }
  const double sxx = n * x * x;
  AuxiliaryTest out;
  out.c_hat = sxy / sxx;
  double rss = 0.0;
  for (const auto y : data) {
    const double yd = static_cast<double>(y);
    const double r = ((yd - mu) * (yd - mu) - yd) / mu - out.c_hat * x;
    rss += r * r;
  }
  const double se = std::sqrt(rss / (n - 1.0) / sxx);
  if (se > 0.0) {
    out.t_stat = out.c_hat / se;
  } else {
    out.t_stat = out.c_hat == 0.0 ? 0.0 : std::copysign(kInf, out.c_hat);
  }
  out.p_value = std::min(1.0, 2.0 * normal_upper_tail(std::fabs(out.t_stat)));
  out.p_value_greater = normal_upper_tail(out.t_stat);
  return out;
}

LrTest dispersion_test_lr(std::span<const std::int64_t> data) {
  Fitter fitter(data);
  const Optimum& pois = fitter.optimum(Family::Poisson);
  const Optimum& nb = fitter.optimum(Family::NegBinomial);
  LrTest out;
  out.lr_stat = std::max(0.0, 2.0 * (nb.loglik - pois.loglik));
  out.p_value = 0.5 * chi_square1_upper_tail(out.lr_stat);
  out.alpha = nb.params.alpha;
  out.size_k = nb.params.alpha > 0.0 ? 1.0 / nb.params.alpha : kInf;
  return out;
}

DispersionReport dispersion_report(std::span<const std::int64_t> data) {
  return {naive_cv(data), dispersion_test_auxiliary(data), dispersion_test_lr(data)};
}

}  // namespace zinbspc
