#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "fairdiv/errors.hpp"

namespace fairdiv {

/// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw PreconditionError("KS needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double worst = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    worst = std::max(worst, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return worst;
}

/// One-sample KS statistic against a continuous CDF.
inline double ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw PreconditionError("KS needs a nonempty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const double f = cdf(sample[k]);
    worst = std::max({worst, static_cast<double>(k + 1) / n - f, f - static_cast<double>(k) / n});
  }
  return worst;
}

struct Interval {
  double low;
  double high;
};

/// Wilson score interval at z = 1.96.
inline Interval wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0 || successes > trials) throw PreconditionError("wilson_interval needs 0 <= successes <= trials, trials >= 1");
  constexpr double z = 1.96;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  double low = std::max(0.0, center - half);
  double high = std::min(1.0, center + half);
  if (successes == 0) low = 0.0;
  if (successes == trials) high = 1.0;
  return {std::min(low, p), std::max(high, p)};
}

}  // namespace fairdiv
