#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "decaywatch/errors.hpp"

namespace decaywatch {

// Minimal goodness-of-fit toolbox: regularized incomplete gamma for
// chi-square tail probabilities, Pearson chi-square with small-bin pooling,
// the two-sample variant, and the one-sample Kolmogorov-Smirnov statistic.

namespace detail {

inline constexpr int kGammaMaxIter = 500;
inline constexpr double kGammaEps = 1e-14;

// Lower regularized gamma P(a,x) by series (valid for x < a+1).
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < kGammaMaxIter; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kGammaEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma Q(a,x) by modified Lentz continued fraction
// (valid for x >= a+1).
inline double gamma_q_cf(double a, double x) {
  const double tiny = std::numeric_limits<double>::min() / kGammaEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kGammaMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kGammaEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

inline double gamma_q(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw std::invalid_argument("gamma_q: need a > 0 and x >= 0");
  }
  if (x == 0.0) return 1.0;
  return (x < a + 1.0) ? 1.0 - detail::gamma_p_series(a, x) : detail::gamma_q_cf(a, x);
}

// Upper tail probability of a chi-square variate with df degrees of freedom.
inline double chi_square_p_value(double statistic, int df) {
  if (df < 1) {
    throw std::invalid_argument("chi_square_p_value: df must be at least 1");
  }
  return gamma_q(0.5 * df, 0.5 * statistic);
}

struct ChiSquareResult {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
};

namespace detail {

// Pools each discarded bin into the nearest retained bin (ties toward the
// lower index).  `retained` flags which bins stand on their own.
template <typename T>
void pool_into_retained(const std::vector<bool>& retained, std::vector<T>& values) {
  const std::size_t n = values.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (retained[i]) continue;
    std::size_t best = n;
    std::size_t best_dist = n + 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (!retained[j]) continue;
      const std::size_t dist = (j > i) ? j - i : i - j;
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    values[best] += values[i];
    values[i] = T{};
  }
}

}  // namespace detail

inline constexpr double kMinExpectedCount = 5.0;

// Pearson chi-square of observed counts against expected probabilities.
// Bins with expected count below kMinExpectedCount are pooled into their
// nearest retained neighbour; df = retained bins - 1.
inline ChiSquareResult chi_square_gof(const std::vector<std::int64_t>& observed,
                                      const std::vector<double>& expected_probs,
                                      std::int64_t total) {
  if (observed.size() != expected_probs.size()) {
    throw std::invalid_argument("chi_square_gof: dimension mismatch");
  }
  const std::size_t n = observed.size();
  std::vector<double> expected(n);
  std::vector<bool> retained(n);
  int kept = 0;
  for (std::size_t i = 0; i < n; ++i) {
    expected[i] = expected_probs[i] * static_cast<double>(total);
    retained[i] = expected[i] >= kMinExpectedCount;
    kept += retained[i] ? 1 : 0;
  }
  if (kept < 2) {
    throw InsufficientDataError("chi_square_gof: fewer than two bins reach the expected-count "
                                "threshold of 5");
  }
  std::vector<double> obs(n);
  for (std::size_t i = 0; i < n; ++i) obs[i] = static_cast<double>(observed[i]);
  detail::pool_into_retained(retained, obs);
  detail::pool_into_retained(retained, expected);

  ChiSquareResult res;
  for (std::size_t i = 0; i < n; ++i) {
    if (!retained[i]) continue;
    const double diff = obs[i] - expected[i];
    res.statistic += diff * diff / expected[i];
  }
  res.degrees_of_freedom = kept - 1;
  res.p_value = chi_square_p_value(res.statistic, res.degrees_of_freedom);
  return res;
}

// Two-sample chi-square for a pair of histograms over the same bins; sample
// sizes may differ.  Bins whose combined count is below kMinExpectedCount
// are pooled as above.
inline ChiSquareResult two_sample_chi_square(const std::vector<std::int64_t>& hist_a,
                                             const std::vector<std::int64_t>& hist_b) {
  if (hist_a.size() != hist_b.size()) {
    throw std::invalid_argument("two_sample_chi_square: dimension mismatch");
  }
  const std::size_t n = hist_a.size();
  double total_a = 0.0;
  double total_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total_a += static_cast<double>(hist_a[i]);
    total_b += static_cast<double>(hist_b[i]);
  }
  if (total_a <= 0.0 || total_b <= 0.0) {
    throw InsufficientDataError("two_sample_chi_square: empty histogram");
  }
  std::vector<double> a(n);
  std::vector<double> b(n);
  std::vector<bool> retained(n);
  int kept = 0;
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = static_cast<double>(hist_a[i]);
    b[i] = static_cast<double>(hist_b[i]);
    retained[i] = a[i] + b[i] >= kMinExpectedCount;
    kept += retained[i] ? 1 : 0;
  }
  if (kept < 2) {
    throw InsufficientDataError("two_sample_chi_square: fewer than two usable bins");
  }
  detail::pool_into_retained(retained, a);
  detail::pool_into_retained(retained, b);

  const double scale_a = std::sqrt(total_b / total_a);
  const double scale_b = std::sqrt(total_a / total_b);
  ChiSquareResult res;
  for (std::size_t i = 0; i < n; ++i) {
    if (!retained[i]) continue;
    const double diff = scale_a * a[i] - scale_b * b[i];
    res.statistic += diff * diff / (a[i] + b[i]);
  }
  res.degrees_of_freedom = kept - 1;
  res.p_value = chi_square_p_value(res.statistic, res.degrees_of_freedom);
  return res;
}

// One-sample Kolmogorov-Smirnov statistic: sup |F_n - F| over the sample,
// with F supplied as a callable CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
  if (samples.empty()) {
    throw std::invalid_argument("ks_statistic: empty sample");
  }
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, f - static_cast<double>(i) / n);
    d = std::max(d, static_cast<double>(i + 1) / n - f);
  }
  return d;
}

inline double ks_statistic_exponential(std::vector<double> samples, double rate) {
  return ks_statistic(std::move(samples),
                      [rate](double x) { return -std::expm1(-rate * x); });
}

// Large-sample critical value D_crit = c(alpha)/sqrt(n) at the 1% level.
inline constexpr double kKs1PercentCoefficient = 1.63;

inline double ks_critical_1pct(std::size_t n) {
  return kKs1PercentCoefficient / std::sqrt(static_cast<double>(n));
}

}  // namespace decaywatch
