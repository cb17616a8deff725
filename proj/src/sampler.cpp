#include "knnlab/sampler.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "knnlab/rng.hpp"

namespace knnlab::sampling {

NoiseKind noise_kind_from(const std::string& name) {
  if (name == "gaussian") return NoiseKind::gaussian;
  if (name == "uniform_centered") return NoiseKind::uniform_centered;
  if (name == "heteroscedastic_capped") return NoiseKind::heteroscedastic_capped;
  throw std::invalid_argument("unknown noise kind: " + name);
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::gaussian: return "gaussian";
    case NoiseKind::uniform_centered: return "uniform_centered";
    case NoiseKind::heteroscedastic_capped: return "heteroscedastic_capped";
  }
  return "?";
}

Dataset sample(const DistributionSpec& spec, long n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  if (!(spec.noise_sd >= 0.0))
    throw std::invalid_argument("sample: noise_sd must be >= 0");
  const int d = spec.dim();
  const double half_width = spec.noise_sd * 1.7320508075688772935;  // sd*sqrt(3)

  Dataset out;
  out.dim = d;
  out.n = n;
  out.seed = seed;
  out.spec_id = spec.id;
  out.xs.resize(static_cast<std::size_t>(n) * d);
  out.ys.resize(static_cast<std::size_t>(n));

  rng::Stream gen(seed);
  for (long i = 0; i < n; ++i) {
    double* row = out.xs.data() + i * d;
    for (int j = 0; j < d; ++j) row[j] = gen.uniform();
    const double m = spec.m.eval_unchecked(out.point(i));
    if (spec.noise_sd == 0.0) {
      out.ys[static_cast<std::size_t>(i)] = m;
      continue;
    }
    double eps = 0.0;
    switch (spec.noise) {
      case NoiseKind::gaussian:
        eps = spec.noise_sd * gen.gaussian();
        break;
      case NoiseKind::uniform_centered:
        eps = gen.uniform(-half_width, half_width);
        break;
      case NoiseKind::heteroscedastic_capped:
        // conditional sd scales with the first coordinate, which lives in
        // [0,1], so the sd stays capped at noise_sd
        eps = spec.noise_sd * row[0] * gen.gaussian();
        break;
    }
    out.ys[static_cast<std::size_t>(i)] = m + eps;
  }
  return out;
}

void write_csv(const Dataset& data, std::ostream& out) {
  char buf[64];
  for (int j = 0; j < data.dim; ++j) {
    std::snprintf(buf, sizeof buf, "x_%d", j + 1);
    out << (j ? "," : "") << buf;
  }
  out << ",y\n";
  for (long i = 0; i < data.n; ++i) {
    const auto row = data.point(i);
    for (int j = 0; j < data.dim; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", row[j]);
      out << (j ? "," : "") << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", data.ys[static_cast<std::size_t>(i)]);
    out << ',' << buf << '\n';
  }
}

}  // namespace knnlab::sampling
