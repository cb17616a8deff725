#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "knnlab/rate_bench.hpp"

// Line-oriented `key = value` configuration. '#' starts a comment, blank
// lines are skipped, nesting is spelled with dotted keys, lists are
// comma-separated. Example:
//
//   seed = 20240913
//   sweep.d = 1
//   sweep.function = kink_p1.5_d1
//   sweep.n_grid = 256,512,1024,2048,4096,8192,16384
//   sweep.k_rule = theorem

namespace knnlab::config {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class KeyValues {
 public:
  static KeyValues parse_string(const std::string& text);
  static KeyValues parse_file(const std::string& path);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  double get_real(const std::string& key) const;
  double get_real(const std::string& key, double fallback) const;
  std::vector<long> get_int_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

// Builds an experiment from the `sweep.*` keys (plus top-level `seed` and
// `threads`). Missing keys fall back to the defaults in ExperimentConfig;
// malformed values, unknown function names and unknown `sweep.*` keys throw
// ConfigError.
bench::ExperimentConfig experiment_from(const KeyValues& kv);

}  // namespace knnlab::config
