#include "knnlab/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace knnlab::report {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sweep_csv(const bench::SweepResult& result) {
  std::string out = "n,k,risk,stderr,target_rate,slope,slope_stderr\n";
  for (const auto& r : result.risks) {
    out += std::to_string(r.n) + ',' + std::to_string(r.k) + ',' + num(r.risk) +
           ',' + num(r.se) + ',' + num(result.fit.target) + ',' +
           num(result.fit.slope) + ',' + num(result.fit.slope_se) + '\n';
  }
  return out;
}

std::string sweep_plot_csv(const bench::SweepResult& result) {
  std::string out = "x,y,yerr\n";
  for (const auto& r : result.risks)
    out += std::to_string(r.n) + ',' + num(r.risk) + ',' + num(r.se) + '\n';
  return out;
}

std::string sweep_json(const bench::SweepResult& result) {
  nlohmann::json j;
  j["target_rate"] = result.fit.target;
  j["slope"] = result.fit.slope;
  j["slope_stderr"] = result.fit.slope_se;
  j["intercept"] = result.fit.intercept;
  j["points"] = nlohmann::json::array();
  for (const auto& r : result.risks)
    j["points"].push_back({{"n", r.n}, {"k", r.k}, {"risk", r.risk}, {"stderr", r.se}});
  return j.dump(2) + "\n";
}

std::string geometry_csv(int d, const std::vector<geometry::FTableRow>& rows) {
  std::string out = "d,u,F_closed,F_mc,stderr,pass\n";
  for (const auto& r : rows)
    out += std::to_string(d) + ',' + num(r.u) + ',' + num(r.closed) + ',' +
           num(r.mc) + ',' + num(r.se) + ',' + (r.pass ? "1" : "0") + '\n';
  return out;
}

std::string geometry_json(int d, const std::vector<geometry::FTableRow>& rows) {
  nlohmann::json j;
  j["d"] = d;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows)
    j["rows"].push_back({{"u", r.u},
                         {"F_closed", r.closed},
                         {"F_mc", r.mc},
                         {"stderr", r.se},
                         {"pass", r.pass}});
  return j.dump(2) + "\n";
}

std::string checks_csv(const std::vector<CheckRow>& rows) {
  std::string out = "name,params,value,bound,pass\n";
  for (const auto& r : rows) {
    // params may carry commas; quote it so the row stays five fields
    const std::string params = r.params.find(',') == std::string::npos
                                   ? r.params
                                   : '"' + r.params + '"';
    out += r.name + ',' + params + ',' + num(r.value) + ',' + num(r.bound) +
           ',' + (r.pass ? "1" : "0") + '\n';
  }
  return out;
}

std::string checks_json(const std::vector<CheckRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows)
    j.push_back({{"name", r.name},
                 {"params", r.params},
                 {"value", r.value},
                 {"bound", r.bound},
                 {"pass", r.pass}});
  return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace knnlab::report
