#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "knnlab/sampler.hpp"
#include "knnlab/smooth_model.hpp"

using namespace knnlab::sampling;
using knnlab::smooth::catalog;
using knnlab::smooth::make_constant;

namespace {
DistributionSpec zero_mean_spec(int d, double sd, NoiseKind kind) {
  DistributionSpec spec{make_constant(d, 0.0), sd, kind, "zero"};
  return spec;
}
}  // namespace

TEST_CASE("noise kind names round-trip") {
  for (auto kind : {NoiseKind::gaussian, NoiseKind::uniform_centered,
                    NoiseKind::heteroscedastic_capped})
    CHECK(noise_kind_from(to_string(kind)) == kind);
  CHECK_THROWS_AS(noise_kind_from("poisson"), std::invalid_argument);
}

TEST_CASE("sigma = 0 reproduces m exactly") {
  DistributionSpec spec{catalog("kink_p1.5_d2"), 0.0, NoiseKind::gaussian,
                        "noiseless"};
  const Dataset data = sample(spec, 500, 42);
  REQUIRE(data.n == 500);
  REQUIRE(data.dim == 2);
  for (long i = 0; i < data.n; ++i)
    CHECK(data.ys[static_cast<std::size_t>(i)] ==
          spec.m.eval_unchecked(data.point(i)));
}

TEST_CASE("identical (spec, n, seed) produce identical bytes") {
  DistributionSpec spec{catalog("trig_d2"), 0.3, NoiseKind::gaussian, "t"};
  const Dataset a = sample(spec, 2000, 777);
  const Dataset b = sample(spec, 2000, 777);
  CHECK(a.xs == b.xs);
  CHECK(a.ys == b.ys);
  const Dataset c = sample(spec, 2000, 778);
  CHECK(a.xs != c.xs);
}

TEST_CASE("gaussian noise: mean and variance at sigma = 1") {
  const Dataset data = sample(zero_mean_spec(1, 1.0, NoiseKind::gaussian),
                              100000, 99);
  double sum = 0.0, sum_sq = 0.0;
  for (double y : data.ys) {
    sum += y;
    sum_sq += y * y;
  }
  const double n = static_cast<double>(data.n);
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::fabs(mean) <= 4.0 / std::sqrt(n));
  CHECK(std::fabs(var - 1.0) <= 0.05);
}

TEST_CASE("uniform_centered noise: support and variance equal the contract") {
  const double sd = 0.4;
  const Dataset data = sample(zero_mean_spec(1, sd, NoiseKind::uniform_centered),
                              100000, 5);
  const double half = sd * std::sqrt(3.0);
  double sum_sq = 0.0, max_abs = 0.0;
  for (double y : data.ys) {
    REQUIRE(std::fabs(y) <= half);
    sum_sq += y * y;
    max_abs = std::max(max_abs, std::fabs(y));
  }
  const double var = sum_sq / static_cast<double>(data.n);
  CHECK(std::fabs(var - sd * sd) <= 0.01 * sd * sd);
  CHECK(max_abs > 0.98 * half);  // the support is actually filled
}

TEST_CASE("heteroscedastic noise: conditional variance stays below sigma^2") {
  const double sd = 0.8;
  const Dataset data = sample(
      zero_mean_spec(2, sd, NoiseKind::heteroscedastic_capped), 200000, 17);
  // overall variance should be sigma^2 * E[x1^2] = sigma^2 / 3
  double sum_sq = 0.0;
  // and conditionally: bucket by x1, each bucket variance <= sigma^2
  double bucket_sq[10] = {0};
  long bucket_n[10] = {0};
  for (long i = 0; i < data.n; ++i) {
    const double y = data.ys[static_cast<std::size_t>(i)];
    const double x1 = data.point(i)[0];
    sum_sq += y * y;
    const int b = std::min(9, static_cast<int>(x1 * 10.0));
    bucket_sq[b] += y * y;
    ++bucket_n[b];
  }
  const double var = sum_sq / static_cast<double>(data.n);
  CHECK(std::fabs(var - sd * sd / 3.0) <= 0.03 * sd * sd);
  for (int b = 0; b < 10; ++b) {
    const double bucket_var = bucket_sq[b] / static_cast<double>(bucket_n[b]);
    CHECK(bucket_var <= sd * sd * 1.05);
  }
}

TEST_CASE("coordinates are uniform: cell count and KS statistic") {
  const Dataset data = sample(zero_mean_spec(2, 0.0, NoiseKind::gaussian),
                              1000000, 314159);
  long in_cell = 0;
  for (long i = 0; i < data.n; ++i) {
    const auto p = data.point(i);
    if (p[0] <= 0.5 && p[1] <= 0.5) ++in_cell;
  }
  const double n = static_cast<double>(data.n);
  const double frac = static_cast<double>(in_cell) / n;
  CHECK(std::fabs(frac - 0.25) <= 3.0 * std::sqrt(0.25 * 0.75 / n));

  // KS per axis at n = 1e5 against the 1% critical value 1.63 / sqrt(n)
  const Dataset small = sample(zero_mean_spec(3, 0.0, NoiseKind::gaussian),
                               100000, 2718);
  for (int axis = 0; axis < 3; ++axis) {
    std::vector<double> coords(static_cast<std::size_t>(small.n));
    for (long i = 0; i < small.n; ++i)
      coords[static_cast<std::size_t>(i)] = small.point(i)[static_cast<std::size_t>(axis)];
    std::sort(coords.begin(), coords.end());
    double ks = 0.0;
    const double m = static_cast<double>(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
      const double u = coords[i];
      ks = std::max(ks, std::fabs((static_cast<double>(i) + 1.0) / m - u));
      ks = std::max(ks, std::fabs(u - static_cast<double>(i) / m));
    }
    CHECK(ks <= 1.6276 / std::sqrt(m));
  }
}

TEST_CASE("every coordinate lies in the unit cube") {
  DistributionSpec spec{catalog("kink_p1.5_d3"), 0.5,
                        NoiseKind::heteroscedastic_capped, "k3"};
  const Dataset data = sample(spec, 20000, 8);
  for (double v : data.xs) {
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
  }
  CHECK(data.spec_id == "k3");
  CHECK(data.seed == 8);
}

TEST_CASE("CSV export: header, row count, full precision round-trip") {
  DistributionSpec spec{catalog("trig_d2"), 0.25, NoiseKind::gaussian, "csv"};
  const Dataset data = sample(spec, 25, 1234);
  std::ostringstream out;
  write_csv(data, out);
  std::istringstream in(out.str());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "x_1,x_2,y");
  long rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    REQUIRE(c1 != std::string::npos);
    REQUIRE(c2 != std::string::npos);
    const double x1 = std::stod(line.substr(0, c1));
    const double x2 = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    const double y = std::stod(line.substr(c2 + 1));
    // %.17g is lossless for doubles
    CHECK(x1 == data.point(rows)[0]);
    CHECK(x2 == data.point(rows)[1]);
    CHECK(y == data.ys[static_cast<std::size_t>(rows)]);
    ++rows;
  }
  CHECK(rows == data.n);
}
