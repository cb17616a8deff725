#include "knnlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "knnlab/rng.hpp"

namespace knnlab::geometry {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

void check_dim(int d) {
  if (d < 1 || d > 60) throw std::invalid_argument("geometry: need 1 <= d <= 60");
}

void check_pair(const BallCubePair& pair) {
  if (pair.center.empty() || pair.center.size() != pair.witness.size())
    throw std::invalid_argument("geometry: malformed ball/cube pair");
  for (double v : pair.center)
    if (!(v >= 0.0 && v <= 1.0))
      throw std::domain_error("geometry: ball center outside the unit cube");
}

// exact binomial for the closed-form branches (d stays desk-sized)
double binom(int n, int k) {
  unsigned long long r = 1;
  for (int i = 1; i <= k; ++i)
    r = r * static_cast<unsigned long long>(n - k + i) / static_cast<unsigned long long>(i);
  return static_cast<double>(r);
}

double pow_neg2(int e) {  // (-2)^e
  const double mag = std::exp2(static_cast<double>(e));
  return (e % 2 == 0) ? mag : -mag;
}

// draws a point uniform in the ball of radius r at `center`; gaussian
// direction, radius scaled by U^{1/d}
void ball_point(rng::Stream& gen, std::span<const double> center, double r,
                std::span<double> out) {
  const int d = static_cast<int>(center.size());
  double nrm = 0.0;
  do {
    nrm = 0.0;
    for (int j = 0; j < d; ++j) {
      out[j] = gen.gaussian();
      nrm += out[j] * out[j];
    }
  } while (nrm == 0.0);
  const double scale = r * std::pow(gen.uniform(), 1.0 / d) / std::sqrt(nrm);
  for (int j = 0; j < d; ++j) out[j] = center[j] + scale * out[j];
}

bool in_cube(std::span<const double> x) {
  for (double v : x)
    if (v < 0.0 || v > 1.0) return false;
  return true;
}

// second-branch constant: ∫_0^{1/2} t^d (1-2t)^{d-1} dt by exact binomial
// expansion of (1-2t)^{d-1}
double tail_integral(int d) {
  double s = 0.0;
  for (int i = 0; i <= d - 1; ++i)
    s += binom(d - 1, i) * pow_neg2(d - 1 - i) * std::exp2(-(2.0 * d - i)) /
         (2.0 * d - i);
  return s;
}

}  // namespace

double unit_ball_volume(int d) {
  if (d < 0) throw std::invalid_argument("unit_ball_volume: d must be >= 0");
  if (d == 0) return 1.0;
  return std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

GeometrySpec constants(int d) {
  check_dim(d);
  GeometrySpec g;
  g.d = d;
  g.e2 = unit_ball_volume(d);
  g.e1 = unit_ball_volume(d - 1) / (d + 1);
  g.e3 = std::min(std::exp2(-d),
                  std::exp2(-2.0 * d) * std::pow(static_cast<double>(d), -d / 2.0));
  g.c2 = 2.0 * g.e1 / std::pow(g.e2 * g.e3, (d + 1.0) / d);
  g.c3 = 2.0 * d * std::pow(g.e2, -1.0 / d);
  return g;
}

double BallCubePair::radius_sq() const {
  double s = 0.0;
  for (std::size_t j = 0; j < center.size(); ++j) {
    const double d = center[j] - witness[j];
    s += d * d;
  }
  return s;
}

double BallCubePair::radius() const { return std::sqrt(radius_sq()); }

double BallCubePair::boundary_gap() const {
  double g = 1.0;
  for (double v : center) g = std::min({g, v, 1.0 - v});
  return g;
}

stats::Estimate vol_G(const BallCubePair& pair, long mc_points,
                      std::uint64_t seed) {
  check_pair(pair);
  if (mc_points < 1000)
    throw std::invalid_argument("vol_G: mc_points must be >= 1000");
  const double r = pair.radius();
  if (r == 0.0) return {0.0, 0.0, 0};

  const int d = pair.dim();
  if (d == 1) {
    const double u = pair.center[0];
    const double len = std::min(1.0, u + r) - std::max(0.0, u - r);
    return {len, 0.0, 0};
  }
  const double vol_h = unit_ball_volume(d) * std::pow(r, d);
  rng::Stream gen(seed);
  std::vector<double> w(static_cast<std::size_t>(d));
  long hits = 0;
  for (long i = 0; i < mc_points; ++i) {
    ball_point(gen, pair.center, r, w);
    if (in_cube(w)) ++hits;
  }
  const double q = static_cast<double>(hits) / static_cast<double>(mc_points);
  const double se = vol_h * std::sqrt(q * (1.0 - q) / static_cast<double>(mc_points));
  return {vol_h * q, se, mc_points};
}

stats::Estimate lemma_ratio(const BallCubePair& pair, long mc_points,
                            std::uint64_t seed) {
  check_pair(pair);
  const double r = pair.radius();
  if (r == 0.0) throw std::domain_error("lemma_ratio: radius must be positive");
  const stats::Estimate g = vol_G(pair, mc_points, seed);
  const double vol_h = unit_ball_volume(pair.dim()) * std::pow(r, pair.dim());
  return {g.value / vol_h, g.se / vol_h, g.n};
}

stats::Estimate boundary_moment(const BallCubePair& pair, int axis,
                                long mc_points, std::uint64_t seed) {
  check_pair(pair);
  if (axis < 0 || axis >= pair.dim())
    throw std::invalid_argument("boundary_moment: axis out of range");
  if (mc_points < 1000)
    throw std::invalid_argument("boundary_moment: mc_points must be >= 1000");
  const double r = pair.radius();
  if (r == 0.0) return {0.0, 0.0, 0};

  const int d = pair.dim();
  const double vol_h = unit_ball_volume(d) * std::pow(r, d);
  rng::Stream gen(seed);
  std::vector<double> w(static_cast<std::size_t>(d));
  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < mc_points; ++i) {
    ball_point(gen, pair.center, r, w);
    const double a = in_cube(w) ? (w[static_cast<std::size_t>(axis)] -
                                   pair.center[static_cast<std::size_t>(axis)])
                                : 0.0;
    sum += a;
    sum_sq += a * a;
  }
  const double n = static_cast<double>(mc_points);
  const double m = sum / n;
  const double var = std::max(0.0, (sum_sq - n * m * m) / (n - 1.0));
  return {vol_h * m, vol_h * std::sqrt(var / n), mc_points};
}

double F_closed(double u, int d) {
  check_dim(d);
  if (!(u >= 0.0 && u <= 1.0 + 1e-12))
    throw std::domain_error("F_closed: u must lie in [0, 1]");
  u = std::min(u, 1.0);
  if (u == 0.0) return 0.0;

  const double e2 = unit_ball_volume(d);
  const double ustar = e2 * std::exp2(-d);
  if (u <= ustar) {
    // polynomial branch: every cube face contributes the same clip profile
    double s = 0.0;
    for (int i = 0; i <= d - 1; ++i) {
      const double coef = binom(d - 1, i) * pow_neg2(d - 1 - i) *
                          (1.0 / (d - i) - 1.0 / (2.0 * d - i)) /
                          std::pow(e2, (d - i) / static_cast<double>(d));
      s += coef * std::pow(u, (2.0 * d - i) / d);
    }
    return 2.0 * d * s;
  }
  // affine branch: the clip profile is saturated
  return u - 2.0 * d * e2 * tail_integral(d);
}

double f_density(double u, int d) {
  check_dim(d);
  if (!(u >= 0.0 && u <= 1.0 + 1e-12))
    throw std::domain_error("f_density: u must lie in [0, 1]");
  const double e2 = unit_ball_volume(d);
  const double ustar = e2 * std::exp2(-d);
  if (u == 0.0 || u == 1.0 || u == ustar) return 0.0;  // breakpoint convention
  if (u < ustar) {
    double s = 0.0;
    for (int i = 0; i <= d - 1; ++i) {
      const double coef = binom(d - 1, i) * pow_neg2(d - 1 - i) *
                          (1.0 / (d - i) - 1.0 / (2.0 * d - i)) /
                          std::pow(e2, (d - i) / static_cast<double>(d));
      s += (4.0 * d - 2.0 * i) * coef * std::pow(u, (d - i) / static_cast<double>(d));
    }
    return s;
  }
  return 1.0;
}

namespace {

// shared engine behind F_mc and f_table: one sweep of pair draws, the
// clipped volume of each exiting ball evaluated once
std::vector<double> exit_volumes(int d, long mc_pairs, std::uint64_t seed,
                                 long inner_points, long& total_pairs) {
  check_dim(d);
  if (mc_pairs < 100)
    throw std::invalid_argument("F_mc: mc_pairs must be >= 100");
  if (d > 1 && inner_points < 1000)
    throw std::invalid_argument("F_mc: inner_points must be >= 1000");

  rng::Stream gen(seed);
  const double e2 = unit_ball_volume(d);
  std::vector<double> vols;
  vols.reserve(static_cast<std::size_t>(mc_pairs / 2));
  std::vector<double> x(static_cast<std::size_t>(d)), w(static_cast<std::size_t>(d));
  for (long i = 0; i < mc_pairs; ++i) {
    double r_sq = 0.0;
    double gap = 1.0;
    for (int j = 0; j < d; ++j) {
      x[static_cast<std::size_t>(j)] = gen.uniform();
      gap = std::min({gap, x[static_cast<std::size_t>(j)],
                      1.0 - x[static_cast<std::size_t>(j)]});
    }
    for (int j = 0; j < d; ++j) {
      const double diff = gen.uniform() - x[static_cast<std::size_t>(j)];
      r_sq += diff * diff;
    }
    if (r_sq <= gap * gap) continue;  // ball stays inside: G == H
    const double r = std::sqrt(r_sq);
    if (d == 1) {
      const double u0 = x[0];
      vols.push_back(std::min(1.0, u0 + r) - std::max(0.0, u0 - r));
      continue;
    }
    long hits = 0;
    for (long m = 0; m < inner_points; ++m) {
      ball_point(gen, x, r, w);
      if (in_cube(w)) ++hits;
    }
    // the clipped ball lies inside the unit cube, so its volume is at most 1;
    // clamping removes the one-sided bias the inner-MC noise would otherwise
    // introduce at the top of the distribution
    vols.push_back(std::min(1.0, e2 * std::pow(r, d) * static_cast<double>(hits) /
                                     static_cast<double>(inner_points)));
  }
  total_pairs = mc_pairs;
  return vols;
}

}  // namespace

stats::Estimate F_mc(double u, int d, long mc_pairs, std::uint64_t seed,
                     long inner_points) {
  if (!(u >= 0.0 && u <= 1.0 + 1e-12))
    throw std::domain_error("F_mc: u must lie in [0, 1]");
  long total = 0;
  const std::vector<double> vols = exit_volumes(d, mc_pairs, seed, inner_points, total);
  long count = 0;
  for (double v : vols)
    if (v <= u) ++count;
  const double p = static_cast<double>(count) / static_cast<double>(total);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(total)), total};
}

std::vector<FTableRow> f_table(int d, std::span<const double> us, long mc_pairs,
                               std::uint64_t seed, long inner_points) {
  long total = 0;
  const std::vector<double> vols = exit_volumes(d, mc_pairs, seed, inner_points, total);
  std::vector<FTableRow> rows;
  rows.reserve(us.size());
  for (double u : us) {
    long count = 0;
    for (double v : vols)
      if (v <= u) ++count;
    FTableRow row;
    row.u = u;
    row.closed = F_closed(u, d);
    row.mc = static_cast<double>(count) / static_cast<double>(total);
    row.se = std::sqrt(row.mc * (1.0 - row.mc) / static_cast<double>(total));
    row.pass = std::fabs(row.closed - row.mc) <= 3.0 * row.se;
    rows.push_back(row);
  }
  return rows;
}

DensityCheck density_bound_check(int d, int grid) {
  check_dim(d);
  if (grid < 10) throw std::invalid_argument("density_bound_check: grid must be >= 10");
  const GeometrySpec g = constants(d);
  const double ustar = g.e2 * std::exp2(-d);
  DensityCheck out;
  out.pass = true;
  for (int j = 1; j <= grid; ++j) {
    const double u = static_cast<double>(j) / (grid + 1.0);
    if (std::fabs(u - ustar) < 1e-9) continue;  // skip the branch point
    const double f = f_density(u, d);
    if (f < 0.0) out.pass = false;
    out.max_ratio = std::max(out.max_ratio, f / std::pow(u, 1.0 / d));
  }
  if (out.max_ratio > g.c3 * (1.0 + 1e-12)) out.pass = false;
  return out;
}

}  // namespace knnlab::geometry
