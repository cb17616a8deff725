#include "knnlab/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace knnlab::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

long parse_int(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0')
    throw ConfigError("config: key '" + key + "' is not an integer: " + value);
  return v;
}

double parse_real(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0')
    throw ConfigError("config: key '" + key + "' is not a number: " + value);
  return v;
}

}  // namespace

KeyValues KeyValues::parse_string(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) +
                        " has no '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config: line " + std::to_string(lineno) + " has an empty key");
    if (kv.entries_.count(key))
      throw ConfigError("config: duplicate key '" + key + "'");
    kv.entries_[key] = value;
  }
  return kv;
}

KeyValues KeyValues::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

bool KeyValues::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string KeyValues::get_string(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("config: missing key '" + key + "'");
  return it->second;
}

std::string KeyValues::get_string(const std::string& key,
                                  const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

long KeyValues::get_int(const std::string& key) const {
  return parse_int(key, get_string(key));
}

long KeyValues::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

double KeyValues::get_real(const std::string& key) const {
  return parse_real(key, get_string(key));
}

double KeyValues::get_real(const std::string& key, double fallback) const {
  return has(key) ? get_real(key) : fallback;
}

std::vector<long> KeyValues::get_int_list(const std::string& key) const {
  const std::string raw = get_string(key);
  std::vector<long> out;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    const auto comma = raw.find(',', pos);
    const std::string tok =
        trim(raw.substr(pos, comma == std::string::npos ? std::string::npos
                                                        : comma - pos));
    if (tok.empty())
      throw ConfigError("config: empty element in list '" + key + "'");
    out.push_back(parse_int(key, tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError("config: empty list '" + key + "'");
  return out;
}

bench::ExperimentConfig experiment_from(const KeyValues& kv) {
  static const std::set<std::string> known = {
      "seed",          "threads",         "sweep.d",        "sweep.p",
      "sweep.C",       "sweep.sigma",     "sweep.function", "sweep.noise",
      "sweep.n_grid",  "sweep.reps",      "sweep.eval_points",
      "sweep.k_rule",  "sweep.slope_band"};
  for (const auto& [key, value] : kv.entries()) {
    (void)value;
    if (!known.count(key))
      throw ConfigError("config: unknown key '" + key + "'");
  }

  bench::ExperimentConfig cfg;
  cfg.d = static_cast<int>(kv.get_int("sweep.d", cfg.d));
  cfg.p = kv.get_real("sweep.p", cfg.p);
  cfg.sigma = kv.get_real("sweep.sigma", cfg.sigma);
  cfg.function_name = kv.get_string("sweep.function", cfg.function_name);
  cfg.reps = static_cast<int>(kv.get_int("sweep.reps", cfg.reps));
  cfg.eval_points = static_cast<int>(kv.get_int("sweep.eval_points", cfg.eval_points));
  cfg.master_seed = static_cast<std::uint64_t>(kv.get_int("seed", 20240913));
  cfg.threads = static_cast<int>(kv.get_int("threads", 1));
  cfg.slope_band = kv.get_real("sweep.slope_band", cfg.slope_band);
  if (kv.has("sweep.n_grid")) cfg.n_grid = kv.get_int_list("sweep.n_grid");

  try {
    cfg.noise = sampling::noise_kind_from(kv.get_string("sweep.noise", "gaussian"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const std::string rule = kv.get_string("sweep.k_rule", "theorem");
  if (rule == "theorem") {
    cfg.k_rule = bench::KRule::theorem_schedule;
  } else if (rule.rfind("fixed:", 0) == 0) {
    cfg.k_rule = bench::KRule::fixed;
    cfg.k_fixed = parse_int("sweep.k_rule", rule.substr(6));
  } else if (rule.rfind("exponent:", 0) == 0) {
    cfg.k_rule = bench::KRule::custom_exponent;
    cfg.k_exponent = parse_real("sweep.k_rule", rule.substr(9));
  } else {
    throw ConfigError("config: unknown k_rule '" + rule + "'");
  }

  // resolve the catalog entry now so bad names surface as config errors
  try {
    const smooth::SmoothFunction f = smooth::catalog(cfg.function_name);
    cfg.holder_c = kv.get_real("sweep.C", f.smoothness().c);
    if (f.dim() != cfg.d)
      throw ConfigError("config: function '" + cfg.function_name +
                        "' has dimension " + std::to_string(f.dim()) +
                        " but sweep.d = " + std::to_string(cfg.d));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

}  // namespace knnlab::config
