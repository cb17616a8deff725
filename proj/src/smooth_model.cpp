#include "knnlab/smooth_model.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <utility>

#include "knnlab/rng.hpp"

namespace knnlab::smooth {

namespace {

constexpr double kDomainTol = 1e-12;

void check_point(int dim, std::span<const double> x) {
  if (static_cast<int>(x.size()) != dim)
    throw std::invalid_argument("smooth: point dimension mismatch");
  for (double v : x)
    if (!(v >= -kDomainTol && v <= 1.0 + kDomainTol))
      throw std::domain_error("smooth: point outside the unit cube");
}

double norm(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

SmoothnessClass SmoothnessClass::make(double p, double c) {
  if (!(p > 0.0)) throw std::invalid_argument("smoothness order must be positive");
  if (!(c > 0.0)) throw std::invalid_argument("Hölder constant must be positive");
  // unique split p = q + r with integer q >= 0 and r in (0, 1]
  int q = static_cast<int>(std::ceil(p)) - 1;
  double r = p - q;
  return {p, c, q, r};
}

SmoothFunction::SmoothFunction(std::string name, int dim,
                               SmoothnessClass smoothness, double grad_bound,
                               Field eval, std::vector<Field> partials)
    : name_(std::move(name)),
      dim_(dim),
      smoothness_(smoothness),
      grad_bound_(grad_bound),
      eval_(std::move(eval)),
      partials_(std::move(partials)) {
  if (dim_ < 1) throw std::invalid_argument("smooth: dim must be >= 1");
  if (smoothness_.q >= 1 &&
      partials_.size() != static_cast<std::size_t>(dim_))
    throw std::invalid_argument("smooth: need one partial per axis when q >= 1");
  if (smoothness_.q == 0 && !partials_.empty())
    throw std::invalid_argument("smooth: partials provided but q == 0");
}

double evaluate(const SmoothFunction& f, std::span<const double> x) {
  check_point(f.dim(), x);
  return f.eval_unchecked(x);
}

double partial(const SmoothFunction& f, int axis, std::span<const double> x) {
  if (f.smoothness().q < 1)
    throw std::logic_error("smooth: function declares no derivatives (q == 0)");
  if (axis < 0 || axis >= f.dim())
    throw std::domain_error("smooth: partial axis out of range");
  check_point(f.dim(), x);
  return f.partial_unchecked(axis, x);
}

HolderCertificate certify_holder(const SmoothFunction& f, long samples,
                                 std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("certify_holder: samples < 2");
  const int d = f.dim();
  const SmoothnessClass& s = f.smoothness();
  rng::Stream gen(seed);
  std::vector<double> x(d), z(d);
  double max_ratio = 0.0;
  for (long it = 0; it < samples; ++it) {
    for (int j = 0; j < d; ++j) x[j] = gen.uniform();
    for (int j = 0; j < d; ++j) z[j] = gen.uniform();
    const double dist = norm(x, z);
    if (dist == 0.0) continue;  // measure-zero coincidence
    const double denom = std::pow(dist, s.r);
    if (s.q == 0) {
      const double num = std::fabs(f.eval_unchecked(x) - f.eval_unchecked(z));
      max_ratio = std::max(max_ratio, num / denom);
    } else {
      for (int axis = 0; axis < d; ++axis) {
        const double num = std::fabs(f.partial_unchecked(axis, x) -
                                     f.partial_unchecked(axis, z));
        max_ratio = std::max(max_ratio, num / denom);
      }
    }
  }
  return {max_ratio, max_ratio <= s.c * (1.0 + 1e-9)};
}

SmoothFunction make_constant(int dim, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "constant_d%d", dim);
  // q = 1 with identically-zero partials: any positive C certifies.
  std::vector<SmoothFunction::Field> parts(
      static_cast<std::size_t>(dim),
      [](std::span<const double>) { return 0.0; });
  return SmoothFunction(buf, dim, SmoothnessClass::make(1.5, 1.0), 0.0,
                        [value](std::span<const double>) { return value; },
                        std::move(parts));
}

SmoothFunction make_kink(int dim, double p, double amplitude, double center) {
  if (!(p > 1.0 && p <= 2.0))
    throw std::invalid_argument("kink: need 1 < p <= 2 for certified first partials");
  char buf[64];
  std::snprintf(buf, sizeof buf, "kink_p%g_d%d", p, dim);

  auto eval = [dim, p, amplitude, center](std::span<const double> x) {
    double s = 0.0;
    for (int j = 0; j < dim; ++j) s += amplitude * std::pow(std::fabs(x[j] - center), p);
    return s;
  };
  std::vector<SmoothFunction::Field> parts;
  parts.reserve(static_cast<std::size_t>(dim));
  for (int j = 0; j < dim; ++j) {
    parts.push_back([j, p, amplitude, center](std::span<const double> x) {
      const double t = x[j] - center;
      if (t == 0.0) return 0.0;  // derivative exists and vanishes at the kink
      const double mag = amplitude * p * std::pow(std::fabs(t), p - 1.0);
      return t > 0.0 ? mag : -mag;
    });
  }
  // Sharp Hölder constant of t -> p*sign(t)*|t|^{p-1}: same-side pairs give
  // p (since |a^b - c^b| <= |a-c|^b for 0 < b <= 1); straddling pairs give
  // p * 2^{2-p}, attained in the symmetric limit. The multivariate partials
  // depend on one coordinate each, so the same constant certifies them.
  const double c = amplitude * p * std::pow(2.0, 2.0 - p);
  const double grad_bound =
      amplitude * p * std::pow(std::max(center, 1.0 - center), p - 1.0);
  return SmoothFunction(buf, dim, SmoothnessClass::make(p, c), grad_bound,
                        std::move(eval), std::move(parts));
}

SmoothFunction make_trig(int dim, double p) {
  if (!(p > 1.0 && p <= 2.0))
    throw std::invalid_argument("trig: need 1 < p <= 2");
  char buf[64];
  if (p == 1.5)
    std::snprintf(buf, sizeof buf, "trig_d%d", dim);
  else
    std::snprintf(buf, sizeof buf, "trig_p%g_d%d", p, dim);

  const double amp = 0.8;
  std::vector<double> omega(static_cast<std::size_t>(dim));
  for (int j = 0; j < dim; ++j) omega[static_cast<std::size_t>(j)] = 1.0 + 0.5 * j;

  auto phase = [omega](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t j = 0; j < omega.size(); ++j) s += omega[j] * x[j];
    return s;
  };
  auto eval = [amp, phase](std::span<const double> x) {
    return amp * std::sin(phase(x));
  };
  std::vector<SmoothFunction::Field> parts;
  parts.reserve(static_cast<std::size_t>(dim));
  for (int j = 0; j < dim; ++j) {
    const double w = omega[static_cast<std::size_t>(j)];
    parts.push_back([amp, w, phase](std::span<const double> x) {
      return amp * w * std::cos(phase(x));
    });
  }
  // Each partial amp*w_j*cos(omega.x) is Lipschitz with constant
  // amp*w_j*|omega|; on a domain of diameter sqrt(d) that upgrades to a
  // Hölder-(p-1) bound with constant amp*max_j(w_j)*|omega|*d^{(2-p)/2}.
  double norm2 = 0.0, wmax = 0.0;
  for (double w : omega) {
    norm2 += w * w;
    wmax = std::max(wmax, w);
  }
  const double c =
      amp * wmax * std::sqrt(norm2) * std::pow(static_cast<double>(dim), (2.0 - p) / 2.0);
  return SmoothFunction(buf, dim, SmoothnessClass::make(p, c), amp * wmax,
                        std::move(eval), std::move(parts));
}

namespace {

// Parses "<kind>[_p<float>]_d<int>". Returns false on malformed input.
bool parse_name(const std::string& name, std::string& kind, double& p,
                bool& has_p, int& dim) {
  kind.clear();
  has_p = false;
  dim = -1;
  std::size_t pos = 0;
  while (pos < name.size() && name[pos] != '_') kind.push_back(name[pos++]);
  while (pos < name.size()) {
    if (name[pos] != '_') return false;
    ++pos;
    if (pos >= name.size()) return false;
    const char tag = name[pos];
    const std::string tok = name.substr(pos + 1, name.find('_', pos) - pos - 1);
    char* end = nullptr;
    if (tag == 'p') {
      p = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') return false;
      has_p = true;
    } else if (tag == 'd') {
      dim = static_cast<int>(std::strtol(tok.c_str(), &end, 10));
      if (end == tok.c_str() || *end != '\0') return false;
    } else {
      return false;
    }
    pos += 1 + tok.size();
  }
  return dim >= 1;
}

}  // namespace

SmoothFunction catalog(const std::string& name) {
  std::string kind;
  double p = 0.0;
  bool has_p = false;
  int dim = 0;
  if (!parse_name(name, kind, p, has_p, dim))
    throw std::invalid_argument("unknown catalog function: " + name);
  if (kind == "constant" && !has_p) return make_constant(dim, 1.0);
  if (kind == "kink" && has_p) return make_kink(dim, p);
  if (kind == "trig") return make_trig(dim, has_p ? p : 1.5);
  throw std::invalid_argument("unknown catalog function: " + name);
}

std::vector<std::string> catalog_names() {
  return {"constant_d1",  "constant_d2",  "kink_p1.25_d1", "kink_p1.5_d1",
          "kink_p1.5_d2", "kink_p1.5_d3", "trig_d1",       "trig_d2"};
}

}  // namespace knnlab::smooth
