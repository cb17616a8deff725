#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "knnlab/stats.hpp"

// Ball/cube intersection geometry on [0,1]^d. For a center u in the cube and
// a witness point v, H is the closed ball at u with radius |u - v| and
// G = H ∩ [0,1]^d. The module provides the constants and checks behind the
// boundary analysis of nearest-neighbour averages:
//
//   e1  first-moment of one coordinate over a half unit ball
//   e2  unit-ball volume (= pi^{d/2} / Gamma(d/2 + 1), always <= 2^d)
//   e3  uniform lower bound on vol[G] / vol[H]
//   c2  |∫_G (w_s - u_s) dw| <= c2 * vol[G]^{(d+1)/d}
//   c3  clip-volume density bound f(u) <= c3 * u^{1/d}
//
// F(u) below is the exact distribution-like function of the clipped volume:
// the measure of pairs (center, witness) whose ball leaves the cube and
// whose clipped volume is at most u. It has two algebraic branches meeting
// at u = e2 / 2^d; F_mc estimates the same quantity by simulation.

namespace knnlab::geometry {

double unit_ball_volume(int d);  // d >= 0 (the 0-ball has volume 1)

struct GeometrySpec {
  int d = 1;
  double e1 = 0.0, e2 = 0.0, e3 = 0.0, c2 = 0.0, c3 = 0.0;
};

GeometrySpec constants(int d);

struct BallCubePair {
  std::vector<double> center;   // u, inside the cube
  std::vector<double> witness;  // v; the ball radius is |u - v|

  int dim() const { return static_cast<int>(center.size()); }
  double radius() const;
  double radius_sq() const;
  // distance from the center to the cube boundary; the ball exits the cube
  // (G != H) exactly when radius() exceeds this
  double boundary_gap() const;
  bool exits_cube() const { return radius() > boundary_gap(); }
};

// vol[G] = vol(ball ∩ cube). Exact interval arithmetic for d == 1 (se == 0);
// uniform-in-ball Monte Carlo otherwise. mc_points >= 1000 required for the
// MC path; radius 0 returns exactly {0, 0}.
stats::Estimate vol_G(const BallCubePair& pair, long mc_points,
                      std::uint64_t seed);

// vol[G] / vol[H], with the MC standard error propagated. Must stay above
// e3 for every admissible pair.
stats::Estimate lemma_ratio(const BallCubePair& pair, long mc_points,
                            std::uint64_t seed);

// MC estimate of ∫_G (w_axis - u_axis) dw; zero by symmetry when the ball
// stays inside the cube.
stats::Estimate boundary_moment(const BallCubePair& pair, int axis,
                                long mc_points, std::uint64_t seed);

// Exact two-branch closed form of F on [0, 1] and its density. The density
// is taken to be 0 at the breakpoints {0, e2/2^d, 1} by convention.
double F_closed(double u, int d);
double f_density(double u, int d);

// Simulation estimate of F(u): mc_pairs (center, witness) draws; balls that
// exit the cube contribute an indicator of {vol[G] <= u}, with vol[G] exact
// for d == 1 and an inner_points-sample MC volume otherwise.
stats::Estimate F_mc(double u, int d, long mc_pairs, std::uint64_t seed,
                     long inner_points = 4096);

// One pair sweep shared across a whole u grid (same estimator as F_mc).
struct FTableRow {
  double u = 0.0;
  double closed = 0.0;
  double mc = 0.0;
  double se = 0.0;
  bool pass = false;  // |closed - mc| <= 3 se
};
std::vector<FTableRow> f_table(int d, std::span<const double> us, long mc_pairs,
                               std::uint64_t seed, long inner_points = 4096);

// Evaluates the density bound f(u) <= c3 * u^{1/d} on a grid that avoids the
// breakpoints. max_ratio is the largest observed f(u) / u^{1/d}.
struct DensityCheck {
  double max_ratio = 0.0;
  bool pass = false;
};
DensityCheck density_bound_check(int d, int grid);

}  // namespace knnlab::geometry
