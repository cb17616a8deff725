#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "knnlab/smooth_model.hpp"

// Synthetic regression data: X uniform on the unit cube, Y = m(X) + noise
// with Var(Y | X = x) <= noise_sd^2 everywhere. Sampling is bit-reproducible:
// equal (spec, n, seed) produce identical vectors.

namespace knnlab::sampling {

enum class NoiseKind {
  gaussian,               // sd * N(0,1); conditional variance == sd^2
  uniform_centered,       // uniform on [-sd*sqrt(3), sd*sqrt(3)]; variance == sd^2
  heteroscedastic_capped  // sd * x_1 * N(0,1); variance sd^2 * x_1^2 <= sd^2
};

NoiseKind noise_kind_from(const std::string& name);  // invalid_argument on miss
std::string to_string(NoiseKind kind);

struct DistributionSpec {
  smooth::SmoothFunction m;
  double noise_sd = 0.0;
  NoiseKind noise = NoiseKind::gaussian;
  std::string id;  // free-form label copied into datasets

  int dim() const { return m.dim(); }
};

struct Dataset {
  int dim = 0;
  long n = 0;
  std::vector<double> xs;  // n x dim, row-major
  std::vector<double> ys;  // n
  std::uint64_t seed = 0;
  std::string spec_id;

  std::span<const double> point(long i) const {
    return {xs.data() + i * dim, static_cast<std::size_t>(dim)};
  }
};

// Draws n i.i.d. rows. Per row, the dim coordinates are drawn first, then the
// noise variate, so the layout of the stream is fixed. noise_sd == 0 yields
// ys[i] == m(xs[i]) exactly.
Dataset sample(const DistributionSpec& spec, long n, std::uint64_t seed);

// Columns x_1,...,x_d,y with full double precision (%.17g).
void write_csv(const Dataset& data, std::ostream& out);

}  // namespace knnlab::sampling
