#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "core.hpp"

namespace graphlap {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  /// Set when a y value is zero: no log-log fit exists.
  bool degenerate = false;
};

/// Ordinary least squares of log y on log x.
inline RateFit fit_log_log_slope(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 2)
    throw Error(ErrorKind::DegenerateInput, "rate fit needs at least two pairs");
  RateFit fit;
  for (const auto &[x, y] : pairs) {
    if (!(x > 0.0) || !(y >= 0.0) || !std::isfinite(x) || !std::isfinite(y))
      throw Error(ErrorKind::DegenerateInput,
                  "rate fit needs positive finite pairs");
    if (y == 0.0)
      fit.degenerate = true;
  }
  if (fit.degenerate)
    return fit;

  const double n = static_cast<double>(pairs.size());
  double mx = 0.0, my = 0.0;
  for (const auto &[x, y] : pairs) {
    mx += std::log(x);
    my += std::log(y);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto &[x, y] : pairs) {
    const double dx = std::log(x) - mx, dy = std::log(y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) {
    fit.degenerate = true;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  return fit;
}

inline double normal_cdf(double x, double sigma = 1.0) {
  return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0)));
}

/// P(K > lambda) for the Kolmogorov distribution; both series are truncated
/// once a term drops below 1e-10.
inline double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0)
    return 1.0;
  if (lambda < 1.0) {
    // P(K <= l) = sqrt(2 pi) / l * sum_k exp(-(2k-1)^2 pi^2 / (8 l^2))
    const double c = -pi * pi / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int k = 1; k < 1000; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(c * odd * odd);
      cdf += term;
      if (term < 1e-10)
        break;
    }
    cdf *= std::sqrt(two_pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  // P(K > l) = 2 sum_k (-1)^{k-1} exp(-2 k^2 l^2)
  double sum = 0.0;
  for (int k = 1; k < 1000; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-10)
      break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against Normal(0, sigma^2) with the
/// asymptotic p-value P(K > sqrt(n) D).
inline KsResult ks_normality(std::span<const double> samples, double sigma) {
  if (samples.size() < 20)
    throw Error(ErrorKind::TooFewSamples, "KS test needs at least 20 samples");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw Error(ErrorKind::InvalidArgument, "KS sigma must be positive");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = normal_cdf(sorted[i], sigma);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max({d, hi - cdf, cdf - lo});
  }
  return {d, kolmogorov_survival(std::sqrt(n) * d)};
}

struct MeanVariance {
  double mean = 0.0;
  double variance = 0.0; // unbiased (n - 1)
};

inline MeanVariance mean_variance(std::span<const double> xs) {
  MeanVariance mv;
  if (xs.empty())
    return mv;
  for (double x : xs)
    mv.mean += x;
  mv.mean /= static_cast<double>(xs.size());
  if (xs.size() < 2)
    return mv;
  for (double x : xs)
    mv.variance += (x - mv.mean) * (x - mv.mean);
  mv.variance /= static_cast<double>(xs.size() - 1);
  return mv;
}

} // namespace graphlap
