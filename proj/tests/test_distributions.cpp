#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "zinbspc/distributions.hpp"
#include "zinbspc/error.hpp"

using namespace zinbspc;

namespace {

double nb_pmf(double k, double p, int y) {
  return std::exp(std::lgamma(y + k) - std::lgamma(k) - std::lgamma(y + 1.0) + k * std::log(p) +
                  y * std::log1p(-p));
}

double poisson_pmf(double mu, int y) {
  return std::exp(y * std::log(mu) - mu - std::lgamma(y + 1.0));
}

}  // namespace

TEST(ZinbPmf, HandValues) {
  const ZinbParams p{1.0, 0.4, 0.85};
  EXPECT_NEAR(zinb_pmf(p, 0), 0.85 + 0.15 * 0.4, 1e-15);
  EXPECT_NEAR(zinb_pmf(p, 1), 0.15 * 0.4 * 0.6, 1e-15);
  EXPECT_NEAR(zinb_pmf(p, 0), 0.91, 1e-12);
  EXPECT_NEAR(zinb_pmf(p, 1), 0.036, 1e-12);
}

TEST(ZinbPmf, NoInflationIsNegativeBinomial) {
  const ZinbParams p{2.0, 0.5, 0.0};
  for (int y = 0; y < 60; ++y) EXPECT_NEAR(zinb_pmf(p, y), nb_pmf(2.0, 0.5, y), 1e-14);
}

TEST(ZinbPmf, LogPmfConsistent) {
  const ZinbParams p{2.7, 0.23, 0.4};
  for (int y = 0; y < 400; ++y) {
    const double pmf = zinb_pmf(p, y);
    if (pmf > 1e-300) EXPECT_NEAR(std::exp(zinb_logpmf(p, y)) / pmf, 1.0, 1e-12);
  }
}

TEST(ZinbPmf, NormalizesOverGrid) {
  for (double k : {0.3, 1.0, 2.0, 5.0, 13.5}) {
    for (double pr : {0.05, 0.2, 0.4, 0.9}) {
      for (double th : {0.0, 0.24, 0.85}) {
        const ZinbParams p{k, pr, th};
        double total = 0.0;
        std::int64_t y = 0;
        for (; zinb_upper_tail(p, y) > 1e-12; ++y) total += zinb_pmf(p, y);
        total += zinb_pmf(p, y);
        EXPECT_GE(total, 1.0 - 1e-9) << k << ' ' << pr << ' ' << th;
        EXPECT_LE(total, 1.0 + 1e-9);
      }
    }
  }
}

TEST(ZinbPmf, UpperTailMatchesComplement) {
  for (double k : {0.4, 1.0, 5.0}) {
    const ZinbParams p{k, 0.3, 0.5};
    double cdf = 0.0;
    for (int y = 0; y < 40; ++y) {
      cdf += zinb_pmf(p, y);
      EXPECT_NEAR(zinb_upper_tail(p, y), 1.0 - cdf, 1e-12) << k << ' ' << y;
    }
    EXPECT_EQ(zinb_upper_tail(p, -1), 1.0);
  }
}

TEST(ZinbPmf, GeometricTailForUnitSize) {
  // k = 1: P(Y > y) = (1 - theta)(1 - p)^(y + 1).
  const ZinbParams p{1.0, 0.4, 0.85};
  for (int y = 0; y < 30; ++y) {
    EXPECT_NEAR(zinb_upper_tail(p, y) / (0.15 * std::pow(0.6, y + 1)), 1.0, 1e-11);
  }
}

TEST(ZinbMoments, HandValues) {
  const ZinbParams p{1.0, 0.4, 0.85};
  EXPECT_NEAR(zinb_mean(p), 0.225, 1e-15);
  EXPECT_NEAR(zinb_variance(p), 0.849375, 1e-14);
}

TEST(ZinbMoments, MeanVanishesAsInflationApproachesOne) {
  const ZinbParams p{3.0, 0.3, 1.0 - 1e-12};
  EXPECT_LT(zinb_mean(p), 1e-10);
}

TEST(ZinbMoments, OverdispersedWhenInflated) {
  for (double k : {0.2, 1.0, 3.0, 20.0}) {
    for (double pr : {0.1, 0.5, 0.95}) {
      for (double th : {0.01, 0.3, 0.9}) {
        const ZinbParams p{k, pr, th};
        EXPECT_GE(zinb_variance(p), zinb_mean(p));
      }
    }
  }
}

TEST(ZinbMoments, MatchPmfSums) {
  const ZinbParams p{2.5, 0.35, 0.3};
  double m1 = 0.0, m2 = 0.0;
  for (int y = 0; y < 2000; ++y) {
    const double f = zinb_pmf(p, y);
    m1 += y * f;
    m2 += static_cast<double>(y) * y * f;
  }
  EXPECT_NEAR(zinb_mean(p), m1, 1e-10);
  EXPECT_NEAR(zinb_variance(p), m2 - m1 * m1, 1e-9);
}

TEST(ZinbParamsValidation, RejectsOutOfSupport) {
  EXPECT_THROW(ZinbParams({0.0, 0.5, 0.1}).validate(), DomainError);
  EXPECT_THROW(ZinbParams({1.0, 1.0, 0.1}).validate(), DomainError);
  EXPECT_THROW(ZinbParams({1.0, 0.0, 0.1}).validate(), DomainError);
  EXPECT_THROW(ZinbParams({1.0, 0.5, 1.0}).validate(), DomainError);
  EXPECT_THROW(ZinbParams({1.0, 0.5, -0.1}).validate(), DomainError);
  EXPECT_THROW(zinb_pmf({1.0, 0.5, 0.1}, -1), DomainError);
}

TEST(ZinbSample, MeanMatchesFormula) {
  const ZinbParams p{1.0, 0.4, 0.85};
  RandomStream rng(11);
  const int n = 1'000'000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += static_cast<double>(zinb_sample(p, rng));
  EXPECT_NEAR(s / n, 0.225, 3.0 * std::sqrt(0.849375 / n));
}

TEST(ZinbSample, ZeroFrequencyMatchesPmf) {
  const ZinbParams p{2.0, 0.4, 0.85};
  RandomStream rng(12);
  const int n = 1'000'000;
  int zeros = 0;
  for (int i = 0; i < n; ++i) zeros += zinb_sample(p, rng) == 0;
  const double f0 = zinb_pmf(p, 0);
  EXPECT_NEAR(static_cast<double>(zeros) / n, f0, 3.0 * std::sqrt(f0 * (1.0 - f0) / n));
}

TEST(ZinbSample, NearlyCertainInflationGivesZeros) {
  const ZinbParams p{2.0, 0.4, std::nextafter(1.0, 0.0)};
  RandomStream rng(13);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(zinb_sample(p, rng), 0);
}

TEST(ZinbSample, RealSizeMoments) {
  const ZinbParams p{2.37, 0.21, 0.24};
  RandomStream rng(14);
  const int n = 200'000;
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = static_cast<double>(zinb_sample(p, rng));
    s += y;
    ss += y * y;
  }
  const double mean = s / n;
  const double var = (ss - n * mean * mean) / (n - 1);
  EXPECT_NEAR(mean, zinb_mean(p), 4.0 * std::sqrt(zinb_variance(p) / n));
  EXPECT_NEAR(var / zinb_variance(p), 1.0, 0.05);
}

TEST(Family, NamesRoundTrip) {
  for (Family f : {Family::Poisson, Family::NegBinomial, Family::ZIPoisson, Family::ZINegBinomial}) {
    EXPECT_EQ(parse_family(family_name(f)), f);
  }
  EXPECT_EQ(parse_family("ZINB"), Family::ZINegBinomial);
  EXPECT_EQ(parse_family("Poisson"), Family::Poisson);
  EXPECT_FALSE(parse_family("gamma").has_value());
}

TEST(CountModel, PoissonLogPmfAtZero) {
  EXPECT_NEAR(model_logpmf(CountModel::poisson(1.0), 0), -1.0, 1e-15);
}

TEST(CountModel, ZipWithoutInflationIsPoisson) {
  const auto zip = CountModel::zip(3.3, 0.0);
  const auto pois = CountModel::poisson(3.3);
  for (int y = 0; y < 40; ++y) EXPECT_DOUBLE_EQ(model_logpmf(zip, y), model_logpmf(pois, y));
}

TEST(CountModel, ZinbWithoutInflationIsNb) {
  const auto zinb = CountModel::zinb(4.0, 1.7, 0.0);
  const auto nb = CountModel::negative_binomial(4.0, 1.7);
  for (int y = 0; y < 40; ++y) EXPECT_NEAR(model_logpmf(zinb, y), model_logpmf(nb, y), 1e-13);
}

TEST(CountModel, NbNormalizes) {
  const auto nb = CountModel::negative_binomial(1.5, 2.0);
  double total = 0.0;
  for (int y = 0; y <= 500; ++y) total += model_pmf(nb, y);
  EXPECT_NEAR(total, 1.0, 1e-10);
}

TEST(CountModel, MatchesKpParameterization) {
  // mu = 6, k = 2 is p = k / (mu + k) = 0.25.
  const auto m = CountModel::zinb(6.0, 2.0, 0.3);
  const ZinbParams z{2.0, 0.25, 0.3};
  for (int y = 0; y < 50; ++y) EXPECT_NEAR(model_pmf(m, y), zinb_pmf(z, y), 1e-14);
  EXPECT_NEAR(m.mean(), zinb_mean(z), 1e-12);
  EXPECT_NEAR(m.variance(), zinb_variance(z), 1e-12);
}

TEST(CountModel, LargeSizeApproachesPoisson) {
  const auto nb = CountModel::negative_binomial(4.0, 1e9);
  for (int y = 0; y < 30; ++y) EXPECT_NEAR(model_pmf(nb, y), poisson_pmf(4.0, y), 1e-8);
}

TEST(CountModel, AllFamiliesNormalize) {
  const std::vector<CountModel> models{CountModel::poisson(7.0), CountModel::negative_binomial(7.0, 0.6),
                                       CountModel::zip(7.0, 0.4), CountModel::zinb(7.0, 0.6, 0.4)};
  for (const auto& m : models) {
    double total = 0.0;
    for (int y = 0; y < 5000; ++y) total += model_pmf(m, y);
    EXPECT_NEAR(total, 1.0, 1e-9) << family_name(m.family);
  }
}

TEST(CountModel, SampleMomentsAllFamilies) {
  const std::vector<CountModel> models{CountModel::poisson(4.0), CountModel::negative_binomial(4.0, 1.5),
                                       CountModel::zip(4.0, 0.3), CountModel::zinb(4.0, 1.5, 0.3)};
  const int n = 200'000;
  for (const auto& m : models) {
    RandomStream rng(21);
    double s = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double y = static_cast<double>(model_sample(m, rng));
      s += y;
      ss += y * y;
    }
    const double mean = s / n;
    const double var = (ss - n * mean * mean) / (n - 1);
    EXPECT_NEAR(mean, m.mean(), 4.0 * std::sqrt(m.variance() / n)) << family_name(m.family);
    EXPECT_NEAR(var / m.variance(), 1.0, 0.04) << family_name(m.family);
  }
}

TEST(CountModel, FreeParameterCounts) {
  EXPECT_EQ(CountModel::poisson(1.0).free_param_count(), 1);
  EXPECT_EQ(CountModel::negative_binomial(1.0, 1.0).free_param_count(), 2);
  EXPECT_EQ(CountModel::zip(1.0, 0.1).free_param_count(), 2);
  EXPECT_EQ(CountModel::zinb(1.0, 1.0, 0.1).free_param_count(), 3);
}

TEST(CountModel, RejectsInvalid) {
  EXPECT_THROW(CountModel::poisson(0.0), DomainError);
  EXPECT_THROW(CountModel::negative_binomial(1.0, -1.0), DomainError);
  EXPECT_THROW(CountModel::zip(1.0, 1.0), DomainError);
}
