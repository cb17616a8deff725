#pragma once

#include <string>
#include <vector>

#include "knnlab/geometry.hpp"
#include "knnlab/rate_bench.hpp"

// Output serialization. All numbers are printed with %.17g so that repeated
// runs of the same seeded experiment produce byte-identical files.

namespace knnlab::report {

std::string num(double v);

// columns: n,k,risk,stderr,target_rate,slope,slope_stderr
std::string sweep_csv(const bench::SweepResult& result);
// columns: x,y,yerr (n, risk, risk stderr) for any plotting tool
std::string sweep_plot_csv(const bench::SweepResult& result);
std::string sweep_json(const bench::SweepResult& result);

// columns: d,u,F_closed,F_mc,stderr,pass
std::string geometry_csv(int d, const std::vector<geometry::FTableRow>& rows);
std::string geometry_json(int d, const std::vector<geometry::FTableRow>& rows);

struct CheckRow {
  std::string name;
  std::string params;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

// columns: name,params,value,bound,pass
std::string checks_csv(const std::vector<CheckRow>& rows);
std::string checks_json(const std::vector<CheckRow>& rows);

void write_file(const std::string& path, const std::string& content);

}  // namespace knnlab::report
