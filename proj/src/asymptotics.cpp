#include "knnlab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "knnlab/knn_core.hpp"
#include "knnlab/rng.hpp"
#include "knnlab/sampler.hpp"

namespace knnlab::asymptotics {

double beta_fn(double alpha, long b) {
  if (!(alpha > 0.0)) throw std::domain_error("beta_fn: alpha must be positive");
  if (b < 1) throw std::invalid_argument("beta_fn: b must be >= 1");
  if (b <= 18) {
    // (b-1)! and the rising product are exact in doubles at this size, so
    // rational values (e.g. B(2,3) = 1/12) come out correctly rounded
    double num = 1.0;
    for (long i = 2; i < b; ++i) num *= static_cast<double>(i);
    double den = 1.0;
    for (long i = 0; i < b; ++i) den *= alpha + static_cast<double>(i);
    return num / den;
  }
  return std::exp(std::lgamma(static_cast<double>(b)) + std::lgamma(alpha) -
                  std::lgamma(alpha + static_cast<double>(b)));
}

double stirling_ratio(long n, int d) {
  if (n < 1) throw std::invalid_argument("stirling_ratio: n must be >= 1");
  if (d < 1) throw std::invalid_argument("stirling_ratio: d must be >= 1");
  if (3 % d == 0) {
    // 3/d integer: the product telescopes to m! / ((n+1) ... (n+m))
    const int m = 3 / d;
    double num = 1.0;
    for (int i = 2; i <= m; ++i) num *= i;
    double den = 1.0;
    for (int i = 1; i <= m; ++i) den *= static_cast<double>(n) + i;
    return num / den;
  }
  const double c = 3.0 / d;
  return std::exp(std::lgamma(static_cast<double>(n) + 1.0) +
                  std::lgamma(1.0 + c) -
                  std::lgamma(static_cast<double>(n) + 1.0 + c));
}

MomentEstimate nn_moment(double gamma, long n, long k, int d, int reps,
                         std::uint64_t seed, double c1) {
  if (!(gamma > 0.0)) throw std::invalid_argument("nn_moment: gamma must be positive");
  if (d < 1) throw std::invalid_argument("nn_moment: d must be >= 1");
  if (k < 1 || k > n) throw std::invalid_argument("nn_moment: need 1 <= k <= n");
  if (reps < 100) throw std::invalid_argument("nn_moment: reps must be >= 100");

  std::vector<double> per_rep(static_cast<std::size_t>(reps));
  std::vector<double> x(static_cast<std::size_t>(d));
  for (int rep = 0; rep < reps; ++rep) {
    const std::uint64_t s = rng::derive(seed, 0x4d4f4d, static_cast<std::uint64_t>(rep));
    rng::Stream gen(s);
    sampling::Dataset data;
    data.dim = d;
    data.n = n;
    data.xs.resize(static_cast<std::size_t>(n) * d);
    data.ys.assign(static_cast<std::size_t>(n), 0.0);
    for (double& v : data.xs) v = gen.uniform();
    for (int j = 0; j < d; ++j) x[static_cast<std::size_t>(j)] = gen.uniform();
    const knn::KnnModel model(std::move(data));
    const auto nbrs = model.neighbors(x, k);
    double acc = 0.0;
    for (const auto& nb : nbrs) acc += std::pow(nb.dist_sq, gamma);
    per_rep[static_cast<std::size_t>(rep)] = acc / static_cast<double>(k);
  }
  const stats::Estimate e = stats::mean_se(per_rep);
  MomentEstimate out;
  out.gamma = gamma;
  out.n = n;
  out.k = k;
  out.d = d;
  out.value = e.value;
  out.se = e.se;
  out.bound = c1 * std::pow(static_cast<double>(k) / static_cast<double>(n),
                            2.0 * gamma / d);
  return out;
}

namespace {

// squared distance between two d-vectors held in flat storage
double dist_sq(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int j = 0; j < d; ++j) {
    const double t = a[j] - b[j];
    s += t * t;
  }
  return s;
}

// sum over ordered pairs i != j of delta_i * delta_j
double pair_sum(std::span<const double> delta) {
  double lin = 0.0, sq = 0.0;
  for (double v : delta) {
    lin += v;
    sq += v * v;
  }
  return lin * lin - sq;
}

}  // namespace

CrossTermResult cross_term(int n, int k, int d, int axis, long reps,
                           std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("cross_term: d must be >= 1");
  if (k < 2 || k > n - 1)
    throw std::invalid_argument("cross_term: need 2 <= k <= n - 1");
  if (axis < 0 || axis >= d)
    throw std::invalid_argument("cross_term: axis out of range");
  if (reps < 1000) throw std::invalid_argument("cross_term: reps must be >= 1000");

  CrossTermResult out;

  // ---- literal simulation --------------------------------------------
  {
    rng::Stream gen(rng::derive(seed, 0xd12ec7));
    std::vector<double> pts(static_cast<std::size_t>(n) * d);
    std::vector<double> x(static_cast<std::size_t>(d));
    std::vector<knn::Neighbor> all(static_cast<std::size_t>(n));
    std::vector<double> delta(static_cast<std::size_t>(k));
    double sum = 0.0, sum_sq = 0.0;
    for (long rep = 0; rep < reps; ++rep) {
      for (double& v : pts) v = gen.uniform();
      for (int j = 0; j < d; ++j) x[static_cast<std::size_t>(j)] = gen.uniform();
      for (int i = 0; i < n; ++i)
        all[static_cast<std::size_t>(i)] = {dist_sq(pts.data() + i * d, x.data(), d), i};
      std::nth_element(all.begin(), all.begin() + (k - 1), all.end(), knn::closer);
      for (int i = 0; i < k; ++i)
        delta[static_cast<std::size_t>(i)] =
            pts[static_cast<std::size_t>(all[static_cast<std::size_t>(i)].index) * d + axis] -
            x[static_cast<std::size_t>(axis)];
      const double g = pair_sum(delta);
      sum += g;
      sum_sq += g * g;
    }
    const double m = sum / static_cast<double>(reps);
    const double var = std::max(0.0, (sum_sq - reps * m * m) / (reps - 1.0));
    out.direct = {m, std::sqrt(var / static_cast<double>(reps)), reps};
  }

  // ---- ordered-region form -------------------------------------------
  // Integrate over the event D = {first k points inside the ball through
  // point k+1, the rest outside} and reweight by n (n-1) ... (n-k) / k!,
  // which is exactly the inverse acceptance probability of D.
  {
    const double log_p = std::lgamma(k + 1.0) + std::lgamma(static_cast<double>(n - k)) -
                         std::lgamma(n + 1.0);
    const double weight = std::exp(-log_p);
    const double accept_p = std::exp(log_p);
    const long want = static_cast<long>(
        std::min(3.0e8, std::max(static_cast<double>(reps),
                                 static_cast<double>(reps) / accept_p / 50.0)));

    rng::Stream gen(rng::derive(seed, 0xc0d17e));
    std::vector<double> x(static_cast<std::size_t>(d)), far(static_cast<std::size_t>(d));
    std::vector<double> near(static_cast<std::size_t>(k) * d);
    std::vector<double> delta(static_cast<std::size_t>(k));
    long accepted = 0;
    double sum = 0.0, sum_sq = 0.0;
    for (long attempt = 0; attempt < want; ++attempt) {
      for (int j = 0; j < d; ++j) x[static_cast<std::size_t>(j)] = gen.uniform();
      for (int j = 0; j < d; ++j) far[static_cast<std::size_t>(j)] = gen.uniform();
      const double r_sq = dist_sq(far.data(), x.data(), d);
      bool ok = true;
      for (int i = 0; i < k && ok; ++i) {
        double* row = near.data() + i * d;
        for (int j = 0; j < d; ++j) row[j] = gen.uniform();
        ok = dist_sq(row, x.data(), d) < r_sq;
      }
      // remaining n - k - 1 points must fall strictly outside the ball
      for (int i = 0; i < n - k - 1 && ok; ++i) {
        double probe_sq = 0.0;
        for (int j = 0; j < d; ++j) {
          const double t = gen.uniform() - x[static_cast<std::size_t>(j)];
          probe_sq += t * t;
        }
        ok = probe_sq > r_sq;
      }
      if (!ok) continue;
      ++accepted;
      for (int i = 0; i < k; ++i)
        delta[static_cast<std::size_t>(i)] =
            near[static_cast<std::size_t>(i) * d + axis] - x[static_cast<std::size_t>(axis)];
      const double g = pair_sum(delta);
      sum += g;
      sum_sq += g * g;
    }
    const double nn = static_cast<double>(want);
    const double m = sum / nn;  // mean of g * 1_D over all attempts
    const double var = std::max(0.0, (sum_sq - nn * m * m) / (nn - 1.0));
    out.conditioned = {weight * m, weight * std::sqrt(var / nn), want};
    out.attempts = want;
    out.accepted = accepted;
  }
  return out;
}

CrossTermRate cross_term_rate(int d, std::span<const ScalePoint> schedule,
                              int reps, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("cross_term_rate: d must be >= 1");
  if (schedule.size() < 3)
    throw std::invalid_argument("cross_term_rate: need at least 3 scales");
  if (reps < 1000)
    throw std::invalid_argument("cross_term_rate: reps must be >= 1000");
  for (const auto& sp : schedule)
    if (sp.k < 2 || sp.k > sp.n - 1)
      throw std::invalid_argument("cross_term_rate: need 2 <= k <= n - 1");

  CrossTermRate out;
  std::vector<double> log_kn, log_t;
  for (std::size_t s = 0; s < schedule.size(); ++s) {
    const long n = schedule[s].n;
    const long k = schedule[s].k;
    rng::Stream gen(rng::derive(seed, 0x5c41e5, s));
    std::vector<double> pts(static_cast<std::size_t>(n) * d);
    std::vector<double> x(static_cast<std::size_t>(d));
    std::vector<knn::Neighbor> all(static_cast<std::size_t>(n));
    std::vector<double> delta(static_cast<std::size_t>(k));
    double sum = 0.0, sum_sq = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      for (double& v : pts) v = gen.uniform();
      for (int j = 0; j < d; ++j) x[static_cast<std::size_t>(j)] = gen.uniform();
      for (long i = 0; i < n; ++i)
        all[static_cast<std::size_t>(i)] = {dist_sq(pts.data() + i * d, x.data(), d), i};
      std::nth_element(all.begin(), all.begin() + (k - 1), all.end(), knn::closer);
      double g_total = 0.0;
      for (int axis = 0; axis < d; ++axis) {
        for (long i = 0; i < k; ++i)
          delta[static_cast<std::size_t>(i)] =
              pts[static_cast<std::size_t>(all[static_cast<std::size_t>(i)].index) * d + axis] -
              x[static_cast<std::size_t>(axis)];
        g_total += pair_sum(delta);
      }
      const double t = g_total / (static_cast<double>(k) * static_cast<double>(k));
      sum += t;
      sum_sq += t * t;
    }
    const double m = sum / reps;
    const double var = std::max(0.0, (sum_sq - reps * m * m) / (reps - 1.0));
    out.t_abs.push_back(std::fabs(m));  // sign dropped at the MC noise floor
    out.se.push_back(std::sqrt(var / reps));
    log_kn.push_back(std::log(static_cast<double>(k) / static_cast<double>(n)));
    log_t.push_back(std::log(out.t_abs.back()));
  }
  out.slope = stats::fit_line(log_kn, log_t).slope;
  return out;
}

}  // namespace knnlab::asymptotics
