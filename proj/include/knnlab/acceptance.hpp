#pragma once

#include <cstdint>
#include <string>
#include <vector>

// The acceptance suite: ten end-to-end checks covering the rate experiments,
// the geometry oracle, the combinatorial identities and the engineering
// guarantees. Every check is seeded and deterministic; `knnlab verify` and
// the acceptance test binary both run exactly this code.

namespace knnlab::acceptance {

struct Options {
  std::uint64_t seed = 20240913;
  std::string out_dir;  // when non-empty, criteria drop their CSV artifacts here
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

std::vector<CriterionResult> run_all(const Options& options);

// One line per criterion on stdout ("[PASS] criterion 3: ..."), returns the
// number of failures.
int print_and_count_failures(const std::vector<CriterionResult>& results);

}  // namespace knnlab::acceptance
