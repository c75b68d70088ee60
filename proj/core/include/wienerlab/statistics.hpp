#pragma once

#include <cstddef>
#include <span>

namespace wienerlab::stats {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

Moments sample_moments(std::span<const double> values);
double correlation(std::span<const double> x, std::span<const double> y);

double normal_cdf(double x) noexcept;

/// Two-sided Kolmogorov-Smirnov distance to N(0,1).
double ks_statistic_normal(std::span<const double> values);
/// Asymptotic p-value of distance `d` at sample size n (Stephens' small-n
/// correction).
double ks_pvalue(double d, std::size_t n) noexcept;
/// Smallest distance rejected at level alpha.
double ks_critical_value(double alpha, std::size_t n);

}  // namespace wienerlab::stats
