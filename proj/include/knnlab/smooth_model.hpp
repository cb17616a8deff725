#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

// Regression functions on the unit cube with machine-checkable smoothness
// certificates. A function declares (p, C): writing p = q + r with integer
// q >= 0 and 0 < r <= 1, every order-q partial derivative must be Hölder
// continuous with exponent r and constant C. certify_holder() probes that
// claim on random point pairs.

namespace knnlab::smooth {

struct SmoothnessClass {
  double p = 1.0;  // declared order, p = q + r
  double c = 1.0;  // Hölder constant for the order-q partials
  int q = 0;       // number of guaranteed derivative orders
  double r = 1.0;  // Hölder exponent, in (0, 1]

  // Derives the unique (q, r) decomposition from p.
  static SmoothnessClass make(double p, double c);
};

class SmoothFunction {
 public:
  using Field = std::function<double(std::span<const double>)>;

  // `partials` holds the d first-order partial derivatives when q >= 1 and
  // must be empty when q == 0. `grad_bound` is a uniform bound on all
  // first-order partials over the cube (0 is fine for q == 0 catalogs).
  SmoothFunction(std::string name, int dim, SmoothnessClass smoothness,
                 double grad_bound, Field eval, std::vector<Field> partials);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  const SmoothnessClass& smoothness() const { return smoothness_; }
  double grad_bound() const { return grad_bound_; }

  double eval_unchecked(std::span<const double> x) const { return eval_(x); }
  double partial_unchecked(int axis, std::span<const double> x) const {
    return partials_[static_cast<std::size_t>(axis)](x);
  }

 private:
  std::string name_;
  int dim_;
  SmoothnessClass smoothness_;
  double grad_bound_;
  Field eval_;
  std::vector<Field> partials_;
};

// Evaluates f at x. Throws std::domain_error if x lies outside [0,1]^d by
// more than 1e-12 per coordinate, std::invalid_argument on a size mismatch.
double evaluate(const SmoothFunction& f, std::span<const double> x);

// First-order partial along `axis` (0-based). Throws std::logic_error when
// the function declares q == 0 (no certified derivatives to expose).
double partial(const SmoothFunction& f, int axis, std::span<const double> x);

struct HolderCertificate {
  double max_ratio = 0.0;  // max over sampled pairs of |D^q f(x)-D^q f(z)| / |x-z|^r
  bool pass = false;       // max_ratio <= C (with 1e-9 relative slack)
};

// Samples `samples` uniform point pairs and checks the declared certificate.
HolderCertificate certify_holder(const SmoothFunction& f, long samples,
                                 std::uint64_t seed);

// ---- catalog ----------------------------------------------------------
//
// Entries are addressable by name, e.g. "kink_p1.5_d2":
//   constant_d<d>          constant 1 (all partials vanish)
//   kink_p<p>_d<d>         sum over axes of |x_s - 1/2|^p, 1 < p <= 2
//   trig_d<d>              A*sin(omega . x); also accepts trig_p<p>_d<d>
// Unknown names throw std::invalid_argument.

SmoothFunction make_constant(int dim, double value);
SmoothFunction make_kink(int dim, double p, double amplitude = 1.0,
                         double center = 0.5);
SmoothFunction make_trig(int dim, double p);
SmoothFunction catalog(const std::string& name);

// Canonical entries; every one must pass certify_holder at its declared C.
std::vector<std::string> catalog_names();

}  // namespace knnlab::smooth
