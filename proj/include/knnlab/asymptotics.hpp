#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "knnlab/stats.hpp"

// Combinatorial and asymptotic identities used by the rate analysis, each
// paired with a simulation cross-check:
//
//   beta_fn         B(a, b) = (b-1)! / (a (a+1) ... (a+b-1)) for integer b
//   stirling_ratio  n! / ((1 + 3/d)(2 + 3/d) ... (n + 3/d)), of order n^{-3/d}
//   nn_moment       (1/k) E sum_{i<=k} |X_(i) - X|^{2 gamma}  (uniform cube)
//   cross_term      E sum_{i != j <= k} (X_(i),s - X_s)(X_(j),s - X_s), both
//                   as a literal simulation and as the ordered-region
//                   integral with the exact combinatorial weight
//   cross_term_rate log-log slope of the normalized cross term vs k/n

namespace knnlab::asymptotics {

// Exact small-argument product, log-gamma for large b (no overflow up to
// b ~ 1e6 and beyond). alpha <= 0 throws std::domain_error.
double beta_fn(double alpha, long b);

// Telescoping exact form when 3/d is an integer (d = 1 or 3), log-gamma
// otherwise. n^{3/d} * stirling_ratio(n, d) -> Gamma(1 + 3/d) from below.
double stirling_ratio(long n, int d);

struct MomentEstimate {
  double gamma = 1.0;
  long n = 0;
  long k = 0;
  int d = 1;
  double value = 0.0;  // MC estimate of the averaged 2*gamma distance moment
  double se = 0.0;
  double bound = 0.0;  // c1 * (k/n)^{2 gamma / d} for the supplied c1
};

// Per replication: draw a query X and n data points, average the 2*gamma
// power of the k nearest squared distances (via knn_core). reps >= 100.
MomentEstimate nn_moment(double gamma, long n, long k, int d, int reps,
                         std::uint64_t seed, double c1 = 1.0);

struct CrossTermResult {
  stats::Estimate direct;       // literal plug-in simulation
  stats::Estimate conditioned;  // ordered-region form, combinatorial weight
  long attempts = 0;            // tuples drawn for the conditioned estimate
  long accepted = 0;            // tuples that landed in the ordered region
};

// The two estimators target the same expectation; agreement within combined
// error is the machine check of the counting identity. Requires
// 2 <= k <= n - 1 and d >= 1. `reps` sizes the direct estimate; the
// conditioned pass scales its attempt budget by the inverse acceptance
// probability k! (n-k-1)! / n! (capped to keep runtime bounded).
CrossTermResult cross_term(int n, int k, int d, int axis, long reps,
                           std::uint64_t seed);

struct ScalePoint {
  long n = 0;
  long k = 0;
};

struct CrossTermRate {
  std::vector<double> t_abs;  // |T(n,k)| per scale, T normalized by k^2
  std::vector<double> se;
  double slope = 0.0;  // of log |T| against log(k/n)
};

// Direct simulation of T(n,k) = (1/k^2) E sum_axes sum_{i != j} (...) over a
// schedule of at least 3 scales; the fitted slope should stay above 3/d less
// a noise margin.
CrossTermRate cross_term_rate(int d, std::span<const ScalePoint> schedule,
                              int reps, std::uint64_t seed);

}  // namespace knnlab::asymptotics
