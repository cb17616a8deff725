#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace knnlab::stats {

// A Monte Carlo (or replication) estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double se = 0.0;  // standard error of `value`
  long n = 0;       // samples behind the estimate
};

// Pairwise (cascade) summation. Used wherever replication results are
// aggregated: the result depends only on the order of the input vector, not
// on how the work was scheduled, and rounding error grows like log n.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 16) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

inline double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("stats::mean: empty input");
  return pairwise_sum(v) / static_cast<double>(v.size());
}

// Sample mean and its standard error (sd / sqrt(n)).
inline Estimate mean_se(std::span<const double> v) {
  if (v.size() < 2) throw std::invalid_argument("stats::mean_se: need >= 2 samples");
  const double m = mean(v);
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - m;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / static_cast<double>(v.size() - 1);
  return {m, std::sqrt(var / static_cast<double>(v.size())),
          static_cast<long>(v.size())};
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares for y = intercept + slope * x.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("stats::fit_line: need >= 2 matching points");
  const double xm = mean(x);
  const double ym = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  if (sxx == 0.0) throw std::invalid_argument("stats::fit_line: degenerate x");
  const double slope = sxy / sxx;
  return {slope, ym - slope * xm};
}

}  // namespace knnlab::stats
