#include "knnlab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "knnlab/asymptotics.hpp"
#include "knnlab/geometry.hpp"
#include "knnlab/knn_core.hpp"
#include "knnlab/rate_bench.hpp"
#include "knnlab/report.hpp"
#include "knnlab/rng.hpp"
#include "knnlab/sampler.hpp"
#include "knnlab/smooth_model.hpp"

namespace knnlab::acceptance {

namespace {

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

bench::ExperimentConfig rate_config(int d, const Options& options) {
  bench::ExperimentConfig cfg;
  cfg.d = d;
  cfg.p = 1.5;
  cfg.sigma = 0.5;
  cfg.function_name = d == 1 ? "kink_p1.5_d1" : "kink_p1.5_d2";
  cfg.noise = sampling::NoiseKind::gaussian;
  cfg.n_grid = {256, 512, 1024, 2048, 4096, 8192, 16384};
  cfg.reps = 50;
  cfg.eval_points = 500;
  cfg.master_seed = rng::derive(options.seed, 0xbe4c4, static_cast<std::uint64_t>(d));
  cfg.k_rule = bench::KRule::theorem_schedule;
  cfg.threads = 1;
  return cfg;
}

CriterionResult rate_criterion(int id, int d, double band_lo, double band_hi,
                               bool check_se, const Options& options) {
  const bench::ExperimentConfig cfg = rate_config(d, options);
  const bench::SweepResult res = bench::sweep(cfg);
  if (!options.out_dir.empty()) {
    report::write_file(options.out_dir + "/sweep_d" + std::to_string(d) + ".csv",
                       report::sweep_csv(res));
    report::write_file(options.out_dir + "/sweep_d" + std::to_string(d) + "_plot.csv",
                       report::sweep_plot_csv(res));
  }

  bool pass = res.fit.slope >= band_lo && res.fit.slope <= band_hi;
  if (check_se) pass = pass && res.fit.slope_se <= 0.05;

  CriterionResult out;
  out.id = id;
  out.name = fmt("rate experiment d=%d (kink, p=1.5, k=floor(n^{%g}))", d,
                 2.0 * 1.5 / (2.0 * 1.5 + d));
  out.pass = pass;
  out.detail = fmt("slope=%.4f (band [%.2f, %.2f], target %.2f), slope_se=%.4f%s",
                   res.fit.slope, band_lo, band_hi, res.fit.target,
                   res.fit.slope_se, check_se ? ", se limit 0.05" : "");
  return out;
}

CriterionResult geometry_table_criterion(const Options& options) {
  CriterionResult out;
  out.id = 3;
  out.name = "clip-volume law: closed form vs simulation, branches, d=1 parabola";

  bool pass = true;
  std::string worst;
  double worst_z = 0.0;

  std::vector<double> us(20);
  for (int j = 1; j <= 20; ++j) us[static_cast<std::size_t>(j - 1)] = j / 20.0;

  for (int d = 1; d <= 3; ++d) {
    const auto rows = geometry::f_table(
        d, us, 100000, rng::derive(options.seed, 0x3e0, static_cast<std::uint64_t>(d)));
    if (!options.out_dir.empty())
      report::write_file(options.out_dir + "/geometry_d" + std::to_string(d) + ".csv",
                         report::geometry_csv(d, rows));
    for (const auto& row : rows) {
      if (!row.pass) pass = false;
      const double z = row.se > 0.0 ? std::fabs(row.closed - row.mc) / row.se
                                    : (row.closed == row.mc ? 0.0 : 1e9);
      if (z > worst_z) {
        worst_z = z;
        worst = fmt("d=%d u=%.2f |closed-mc|=%.2e (%.2f se)", d, row.u,
                    std::fabs(row.closed - row.mc), z);
      }
    }
  }

  // the two algebraic branches meet at u* = e2 / 2^d; the upper branch is
  // affine with unit slope, so its value at u* is F(1) - 1 + u*
  double max_gap = 0.0;
  for (int d = 1; d <= 3; ++d) {
    const double ustar = geometry::unit_ball_volume(d) * std::exp2(-d);
    const double first = geometry::F_closed(ustar, d);
    const double second = geometry::F_closed(1.0, d) - 1.0 + ustar;
    max_gap = std::max(max_gap, std::fabs(first - second));
  }
  if (max_gap > 1e-12) pass = false;

  // d=1 collapses to the parabola u^2/2
  double max_d1 = 0.0;
  for (int j = 0; j <= 100; ++j) {
    const double u = j / 100.0;
    max_d1 = std::max(max_d1,
                      std::fabs(geometry::F_closed(u, 1) - 0.5 * u * u));
  }
  if (max_d1 > 1e-12) pass = false;

  out.pass = pass;
  out.detail = fmt("worst MC deviation: %s; branch gap=%.1e (limit 1e-12); "
                   "d=1 parabola gap=%.1e",
                   worst.c_str(), max_gap, max_d1);
  return out;
}

CriterionResult lemma_sweep_criterion(const Options& options) {
  CriterionResult out;
  out.id = 4;
  out.name = "clipped-ball volume floor: vol[G]/vol[H] >= e3 on random pairs";

  bool pass = true;
  double worst_margin = 1e30;
  std::string worst;
  const int dims[] = {1, 2, 3, 5};
  for (int d : dims) {
    const geometry::GeometrySpec spec = geometry::constants(d);
    rng::Stream gen(rng::derive(options.seed, 0x1e44a, static_cast<std::uint64_t>(d)));
    for (int i = 0; i < 10000; ++i) {
      geometry::BallCubePair pair;
      pair.center.resize(static_cast<std::size_t>(d));
      pair.witness.resize(static_cast<std::size_t>(d));
      for (double& v : pair.center) v = gen.uniform();
      for (double& v : pair.witness) v = gen.uniform();
      if (pair.radius() == 0.0) continue;
      const stats::Estimate ratio = geometry::lemma_ratio(
          pair, 2048, rng::derive(options.seed, 0x1e44b, static_cast<std::uint64_t>(d),
                                  static_cast<std::uint64_t>(i)));
      const double margin = ratio.value - (spec.e3 - 3.0 * ratio.se);
      if (margin < worst_margin) {
        worst_margin = margin;
        worst = fmt("d=%d ratio=%.4f e3=%.4g se=%.4f", d, ratio.value, spec.e3,
                    ratio.se);
      }
      if (margin < 0.0) pass = false;
    }
  }
  out.pass = pass;
  out.detail = fmt("40000 pairs; tightest margin %.4f at %s", worst_margin,
                   worst.c_str());
  return out;
}

CriterionResult moment_bound_criterion(const Options& options) {
  CriterionResult out;
  out.id = 5;
  out.name = "clipped first-moment bound: |∫_G (w_s - u_s)| <= c2 vol[G]^{(d+1)/d}";

  bool pass = true;
  double worst_margin = 1e30;
  std::string worst;
  const int dims[] = {1, 2, 3, 5};
  for (int d : dims) {
    const geometry::GeometrySpec spec = geometry::constants(d);
    rng::Stream gen(rng::derive(options.seed, 0xc1a12, static_cast<std::uint64_t>(d)));
    for (int i = 0; i < 10000; ++i) {
      geometry::BallCubePair pair;
      pair.center.resize(static_cast<std::size_t>(d));
      pair.witness.resize(static_cast<std::size_t>(d));
      for (double& v : pair.center) v = gen.uniform();
      for (double& v : pair.witness) v = gen.uniform();
      if (pair.radius() == 0.0) continue;
      const std::uint64_t s1 = rng::derive(options.seed, 0xc1a13,
                                           static_cast<std::uint64_t>(d),
                                           static_cast<std::uint64_t>(i));
      const std::uint64_t s2 = rng::derive(options.seed, 0xc1a14,
                                           static_cast<std::uint64_t>(d),
                                           static_cast<std::uint64_t>(i));
      const stats::Estimate bm = geometry::boundary_moment(pair, 0, 2048, s1);
      const stats::Estimate g = geometry::vol_G(pair, 2048, s2);
      const double expo = (d + 1.0) / d;
      const double bound = spec.c2 * std::pow(g.value, expo);
      // the bound itself carries MC noise through vol[G]
      const double bound_se =
          g.value > 0.0 ? spec.c2 * expo * std::pow(g.value, expo - 1.0) * g.se : 0.0;
      const double slack = 3.0 * std::sqrt(bm.se * bm.se + bound_se * bound_se);
      const double margin = bound + slack - std::fabs(bm.value);
      if (margin < worst_margin) {
        worst_margin = margin;
        worst = fmt("d=%d |moment|=%.4g bound=%.4g", d, std::fabs(bm.value), bound);
      }
      if (margin < 0.0) pass = false;
    }
  }
  out.pass = pass;
  out.detail = fmt("40000 pairs; tightest margin %.4g at %s", worst_margin,
                   worst.c_str());
  return out;
}

CriterionResult identity_criterion(const Options&) {
  CriterionResult out;
  out.id = 6;
  out.name = "combinatorial identities: beta product, telescoping ratio, limit";

  const bool beta_exact = asymptotics::beta_fn(2.0, 3) == 1.0 / 12.0;

  bool telescope_exact = true;
  for (long n : {1L, 10L, 100L, 10000L, 1000000L})
    if (asymptotics::stirling_ratio(n, 3) != 1.0 / static_cast<double>(n + 1))
      telescope_exact = false;

  bool limit_ok = true;
  std::string limit_detail;
  for (int d : {1, 2, 3}) {
    const double c = 3.0 / d;
    const double limit = std::tgamma(1.0 + c);
    const double value =
        std::pow(1e4, c) * asymptotics::stirling_ratio(10000, d);
    const double rel = std::fabs(value - limit) / limit;
    if (rel > 0.01) limit_ok = false;
    limit_detail += fmt("%sd=%d rel=%.2e", limit_detail.empty() ? "" : ", ", d, rel);
  }

  out.pass = beta_exact && telescope_exact && limit_ok;
  out.detail = fmt("B(2,3)==1/12: %s; ratio(n,3)==1/(n+1): %s; n^{3/d} ratio vs "
                   "Gamma(1+3/d) at n=1e4: %s",
                   beta_exact ? "yes" : "NO", telescope_exact ? "yes" : "NO",
                   limit_detail.c_str());
  return out;
}

CriterionResult nn_moment_criterion(const Options& options) {
  CriterionResult out;
  out.id = 7;
  out.name = "neighbour distance moments track (k/n)^{2 gamma/d}";

  struct Config {
    int d;
    double gamma;
    asymptotics::ScalePoint scales[3];
  };
  const Config configs[] = {
      {1, 1.0, {{500, 62}, {2000, 158}, {8000, 400}}},
      {2, 1.0, {{500, 10}, {2000, 40}, {8000, 160}}},
      {2, 1.5, {{500, 10}, {2000, 40}, {8000, 160}}},
  };

  bool pass = true;
  std::string detail;
  for (const auto& cfg : configs) {
    double lo = 1e30, hi = 0.0;
    for (int s = 0; s < 3; ++s) {
      const auto est = asymptotics::nn_moment(
          cfg.gamma, cfg.scales[s].n, cfg.scales[s].k, cfg.d, 1000,
          rng::derive(options.seed, 0x4040,
                      static_cast<std::uint64_t>(cfg.d * 100 + s),
                      static_cast<std::uint64_t>(cfg.gamma * 4)));
      const double shape = std::pow(
          static_cast<double>(est.k) / static_cast<double>(est.n),
          2.0 * cfg.gamma / cfg.d);
      const double ratio = est.value / shape;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    if (hi / lo >= 2.0) pass = false;
    detail += fmt("%s(d=%d,g=%.1f) spread=%.2f", detail.empty() ? "" : "; ",
                  cfg.d, cfg.gamma, hi / lo);
  }
  out.pass = pass;
  out.detail = detail + " (limit: factor 2 across scales)";
  return out;
}

CriterionResult cross_term_criterion(const Options& options) {
  CriterionResult out;
  out.id = 8;
  out.name = "ordered-region counting identity: direct vs reweighted estimates";

  struct Triple {
    int n, k, d;
  };
  const Triple triples[] = {{3, 2, 1}, {10, 3, 2}, {20, 5, 2}};
  bool pass = true;
  std::string detail;
  for (const auto& t : triples) {
    const auto res = asymptotics::cross_term(
        t.n, t.k, t.d, 0, 400000,
        rng::derive(options.seed, 0xc055,
                    static_cast<std::uint64_t>(t.n * 1000 + t.k * 10 + t.d)));
    const double gap = std::fabs(res.direct.value - res.conditioned.value);
    const double se = std::sqrt(res.direct.se * res.direct.se +
                                res.conditioned.se * res.conditioned.se);
    if (gap > 3.0 * se) pass = false;
    detail += fmt("%s(n=%d,k=%d,d=%d) gap=%.2e (%.2f se)",
                  detail.empty() ? "" : "; ", t.n, t.k, t.d, gap,
                  se > 0 ? gap / se : 0.0);
  }
  out.pass = pass;
  out.detail = detail;
  return out;
}

CriterionResult bias_variance_criterion(const Options& options) {
  CriterionResult out;
  out.id = 9;
  out.name = "risk decomposition: total = noise part + squared bias, noise = sigma^2/k";

  const double sigma = 0.7;
  bool pass = true;
  double worst_gap_z = 0.0, worst_var_z = 0.0;
  rng::Stream gen(rng::derive(options.seed, 0xb1a5));
  for (int design = 0; design < 20; ++design) {
    const int d = 1 + static_cast<int>(gen.next_u64() % 2);
    const long n = 50 + static_cast<long>(gen.next_u64() % 151);
    const long k = 1 + static_cast<long>(gen.next_u64() % 30);
    const smooth::SmoothFunction m =
        (design % 2 == 0) ? smooth::make_kink(d, 1.5) : smooth::make_trig(d, 1.5);
    std::vector<double> xs(static_cast<std::size_t>(n) * d);
    for (double& v : xs) v = gen.uniform();
    std::vector<double> x(static_cast<std::size_t>(d));
    for (double& v : x) v = gen.uniform();

    const auto res = bench::bias_variance_probe(
        xs, d, m, sigma, x, std::min(k, n), 4000,
        rng::derive(options.seed, 0xb1a6, static_cast<std::uint64_t>(design)));
    const double gap_z = res.gap_se > 0 ? std::fabs(res.gap) / res.gap_se : 0.0;
    const double var_z =
        std::fabs(res.variance_term - sigma * sigma / static_cast<double>(std::min(k, n))) /
        res.variance_se;
    worst_gap_z = std::max(worst_gap_z, gap_z);
    worst_var_z = std::max(worst_var_z, var_z);
    if (gap_z > 3.0 || var_z > 3.0) pass = false;
  }
  out.pass = pass;
  out.detail = fmt("20 fixed designs; worst identity deviation %.2f se, worst "
                   "noise-term deviation %.2f se (limit 3)",
                   worst_gap_z, worst_var_z);
  return out;
}

CriterionResult engineering_criterion(const Options& options) {
  CriterionResult out;
  out.id = 10;
  out.name = "index equivalence, byte-stable reruns, slope fitter exactness";

  // (a) tree vs brute force, bitwise, with deliberate duplicate-heavy cases
  bool equiv = true;
  long cases = 0;
  {
    rng::Stream gen(rng::derive(options.seed, 0xe13));
    const int dims[] = {1, 2, 3, 5};
    for (int d : dims) {
      for (int ds = 0; ds < 50 && equiv; ++ds) {
        const long n = 600 + static_cast<long>(gen.next_u64() % 1400);
        const bool quantize = ds % 5 == 0;  // force exact distance ties
        sampling::Dataset data;
        data.dim = d;
        data.n = n;
        data.xs.resize(static_cast<std::size_t>(n) * d);
        data.ys.resize(static_cast<std::size_t>(n));
        for (double& v : data.xs) {
          v = gen.uniform();
          if (quantize) v = std::round(v * 10.0) / 10.0;
        }
        for (double& v : data.ys) v = gen.uniform();
        const knn::KnnModel tree(data, knn::IndexMode::tree);
        const knn::KnnModel brute(std::move(data), knn::IndexMode::brute);
        std::vector<double> x(static_cast<std::size_t>(d));
        for (int q = 0; q < 50 && equiv; ++q) {
          for (double& v : x) {
            v = gen.uniform();
            if (quantize) v = std::round(v * 10.0) / 10.0;
          }
          const long k = 1 + static_cast<long>(gen.next_u64() %
                                               static_cast<std::uint64_t>(
                                                   std::min(n, 64L)));
          const auto a = tree.neighbors(x, k);
          const auto b = brute.neighbors_brute(x, k);
          if (a.size() != b.size()) equiv = false;
          for (std::size_t i = 0; i < a.size() && equiv; ++i)
            if (a[i].index != b[i].index || a[i].dist_sq != b[i].dist_sq)
              equiv = false;
          if (tree.predict(x, k) != brute.predict_brute(x, k)) equiv = false;
          ++cases;
        }
      }
    }
  }

  // (b) rerunning a seeded sweep must reproduce the CSV byte for byte
  bool stable = true;
  {
    bench::ExperimentConfig cfg;
    cfg.d = 1;
    cfg.function_name = "kink_p1.5_d1";
    cfg.n_grid = {256, 512, 1024};
    cfg.reps = 10;
    cfg.eval_points = 100;
    cfg.master_seed = rng::derive(options.seed, 0x5eed);
    const std::string once = report::sweep_csv(bench::sweep(cfg));
    const std::string twice = report::sweep_csv(bench::sweep(cfg));
    stable = once == twice && !once.empty();
  }

  // (c) the slope fitter must be exact on synthetic power-law data
  bool fitter = true;
  double worst_fit = 0.0;
  {
    const double betas[] = {0.3, 0.75, 1.6};
    const double amps[] = {2.0, 0.5, 7.3};
    for (int i = 0; i < 3; ++i) {
      std::vector<double> ns, risks;
      for (long n = 100; n <= 12800; n *= 2) {
        ns.push_back(static_cast<double>(n));
        risks.push_back(amps[i] * std::pow(static_cast<double>(n), -betas[i]));
      }
      const auto fit = bench::fit_loglog(ns, risks, -betas[i]);
      const double err = std::fabs(fit.slope + betas[i]);
      worst_fit = std::max(worst_fit, err);
      if (err > 1e-10) fitter = false;
    }
  }

  out.pass = equiv && stable && fitter;
  out.detail = fmt("%ld index cases bitwise-equal: %s; seeded rerun "
                   "byte-identical: %s; fitter max error %.1e (limit 1e-10)",
                   cases, equiv ? "yes" : "NO", stable ? "yes" : "NO", worst_fit);
  return out;
}

}  // namespace

std::vector<CriterionResult> run_all(const Options& options) {
  std::vector<CriterionResult> results;
  const auto timed = [&results](CriterionResult r,
                                std::chrono::steady_clock::time_point t0) {
    const auto t1 = std::chrono::steady_clock::now();
    r.seconds = std::chrono::duration<double>(t1 - t0).count();
    results.push_back(std::move(r));
  };

  auto t0 = std::chrono::steady_clock::now();
  timed(rate_criterion(1, 1, -0.90, -0.60, true, options), t0);
  t0 = std::chrono::steady_clock::now();
  timed(rate_criterion(2, 2, -0.75, -0.45, false, options), t0);
  t0 = std::chrono::steady_clock::now();
  timed(geometry_table_criterion(options), t0);
  t0 = std::chrono::steady_clock::now();
  timed(lemma_sweep_criterion(options), t0);
  t0 = std::chrono::steady_clock::now();
  timed(moment_bound_criterion(options), t0);
  t0 = std::chrono::steady_clock::now();
  timed(identity_criterion(options), t0);
  t0 = std::chrono::steady_clock::now();
  timed(nn_moment_criterion(options), t0);
  t0 = std::chrono::steady_clock::now();
  timed(cross_term_criterion(options), t0);
  t0 = std::chrono::steady_clock::now();
  timed(bias_variance_criterion(options), t0);
  t0 = std::chrono::steady_clock::now();
  timed(engineering_criterion(options), t0);
  return results;
}

int print_and_count_failures(const std::vector<CriterionResult>& results) {
  int failures = 0;
  for (const auto& r : results) {
    if (!r.pass) ++failures;
    std::printf("[%s] criterion %d: %s — %s (%.1fs)\n", r.pass ? "PASS" : "FAIL",
                r.id, r.name.c_str(), r.detail.c_str(), r.seconds);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failures,
              results.size());
  return failures;
}

}  // namespace knnlab::acceptance
