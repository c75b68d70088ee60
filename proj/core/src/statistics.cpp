#include "wienerlab/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "wienerlab/errors.hpp"

namespace wienerlab::stats {

Moments sample_moments(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw PreconditionError("sample_moments: need at least 2 values");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(n);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  const double nd = static_cast<double>(n);
  Moments m;
  m.mean = mean;
  m.variance = m2 / (nd - 1.0);
  const double pop2 = m2 / nd;
  if (pop2 > 0.0) {
    m.skewness = (m3 / nd) / std::pow(pop2, 1.5);
    m.excess_kurtosis = (m4 / nd) / (pop2 * pop2) - 3.0;
  }
  return m;
}

double correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw PreconditionError("correlation: need equal lengths >= 2");
  }
  const double nd = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= nd;
  my /= nd;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic_normal(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double nd = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf(sorted[i]);
    d = std::max(d, static_cast<double>(i + 1) / nd - f);
    d = std::max(d, f - static_cast<double>(i) / nd);
  }
  return d;
}

double ks_pvalue(double d, std::size_t n) noexcept {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_critical_value(double alpha, std::size_t n) {
  if (!(alpha > 0.0 && alpha < 1.0) || n == 0) {
    throw PreconditionError("ks_critical_value: need 0 < alpha < 1 and n > 0");
  }
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ks_pvalue(mid, n) > alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace wienerlab::stats
