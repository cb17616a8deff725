#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "knnlab/acceptance.hpp"
#include "knnlab/asymptotics.hpp"
#include "knnlab/config.hpp"
#include "knnlab/geometry.hpp"
#include "knnlab/report.hpp"
#include "knnlab/rng.hpp"

namespace {

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::fputs(content.c_str(), stdout);
  } else {
    std::filesystem::create_directories(
        std::filesystem::path(out_path).parent_path());
    knnlab::report::write_file(out_path, content);
    std::printf("wrote %s\n", out_path.c_str());
  }
}

std::string join_dir(const std::string& dir, const std::string& name) {
  if (dir.empty()) return "";
  return dir + "/" + name;
}

int run_sweep(const std::string& config_path, std::uint64_t seed, bool seed_set,
              const std::string& out_dir, const std::string& format, int threads) {
  knnlab::config::KeyValues kv = config_path.empty()
                                     ? knnlab::config::KeyValues::parse_string("")
                                     : knnlab::config::KeyValues::parse_file(config_path);
  knnlab::bench::ExperimentConfig cfg = knnlab::config::experiment_from(kv);
  if (seed_set) cfg.master_seed = seed;
  if (threads > 0) cfg.threads = threads;
  for (const std::string& w : knnlab::bench::validate(cfg))
    std::fprintf(stderr, "warning: %s\n", w.c_str());

  const knnlab::bench::SweepResult res = knnlab::bench::sweep(cfg);
  if (format == "json") {
    emit(join_dir(out_dir, "sweep.json"), knnlab::report::sweep_json(res));
  } else {
    emit(join_dir(out_dir, "sweep.csv"), knnlab::report::sweep_csv(res));
    if (!out_dir.empty())
      knnlab::report::write_file(out_dir + "/sweep_plot.csv",
                                 knnlab::report::sweep_plot_csv(res));
  }
  std::fprintf(stderr, "slope=%.4f target=%.4f slope_stderr=%.4f\n",
               res.fit.slope, res.fit.target, res.fit.slope_se);
  return 0;
}

int run_geometry(int d, long mc_pairs, std::uint64_t seed,
                 const std::string& out_dir, const std::string& format) {
  std::vector<double> us(20);
  for (int j = 1; j <= 20; ++j) us[static_cast<std::size_t>(j - 1)] = j / 20.0;
  const auto rows = knnlab::geometry::f_table(d, us, mc_pairs, seed);
  const std::string name = "geometry_d" + std::to_string(d);
  if (format == "json")
    emit(join_dir(out_dir, name + ".json"), knnlab::report::geometry_json(d, rows));
  else
    emit(join_dir(out_dir, name + ".csv"), knnlab::report::geometry_csv(d, rows));
  return 0;
}

int run_asymptotics(int d, std::uint64_t seed, const std::string& out_dir,
                    const std::string& format) {
  namespace asy = knnlab::asymptotics;
  std::vector<knnlab::report::CheckRow> rows;

  {
    knnlab::report::CheckRow r;
    r.name = "beta_product";
    r.params = "alpha=2,b=3";
    r.value = asy::beta_fn(2.0, 3);
    r.bound = 1.0 / 12.0;
    r.pass = r.value == r.bound;
    rows.push_back(r);
  }
  {
    knnlab::report::CheckRow r;
    r.name = "stirling_limit";
    const double c = 3.0 / d;
    r.params = "n=10000,d=" + std::to_string(d);
    r.value = std::pow(1e4, c) * asy::stirling_ratio(10000, d);
    r.bound = std::tgamma(1.0 + c);
    r.pass = std::fabs(r.value - r.bound) / r.bound <= 0.01;
    rows.push_back(r);
  }
  {
    const long n = 2000;
    const long k = d == 1 ? 158 : 40;
    const auto est = asy::nn_moment(1.0, n, k, d, 400,
                                    knnlab::rng::derive(seed, 0xa57, d));
    knnlab::report::CheckRow r;
    r.name = "nn_moment_shape";
    r.params = "gamma=1,n=2000,k=" + std::to_string(k) + ",d=" + std::to_string(d);
    r.value = est.value;
    const double shape = std::pow(static_cast<double>(k) / n, 2.0 / d);
    r.bound = 4.0 * shape;  // generous envelope; the ratio test lives in ctest
    r.pass = est.value <= r.bound;
    rows.push_back(r);
  }

  const std::string name = "asymptotics_d" + std::to_string(d);
  if (format == "json")
    emit(join_dir(out_dir, name + ".json"), knnlab::report::checks_json(rows));
  else
    emit(join_dir(out_dir, name + ".csv"), knnlab::report::checks_csv(rows));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-NN regression rate experiments and geometry checks"};
  app.require_subcommand(1);
  // let --seed/--out/--format/--threads be given after the subcommand too
  app.fallthrough();

  std::uint64_t seed = 20240913;
  std::string out_dir;
  std::string format = "csv";
  int threads = 0;
  app.add_option("--seed", seed, "master seed for all derived streams");
  app.add_option("--out", out_dir, "directory for output files (default: stdout)");
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", threads, "worker threads for replications");

  auto* sweep_cmd = app.add_subcommand("sweep", "risk-vs-n rate experiment");
  std::string config_path;
  sweep_cmd->add_option("--config", config_path, "key = value config file");

  auto* geom_cmd = app.add_subcommand("geometry", "clip-volume law table");
  int geom_d = 2;
  long mc_pairs = 100000;
  geom_cmd->add_option("--d", geom_d, "cube dimension")->check(CLI::Range(1, 10));
  geom_cmd->add_option("--mc", mc_pairs, "Monte Carlo pair count");

  auto* asy_cmd = app.add_subcommand("asymptotics", "identity and moment checks");
  int asy_d = 1;
  asy_cmd->add_option("--d", asy_d, "dimension")->check(CLI::Range(1, 10));

  auto* verify_cmd =
      app.add_subcommand("verify", "run the full acceptance suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(sweep_cmd))
      return run_sweep(config_path, seed, app.count("--seed") > 0, out_dir,
                       format, threads);
    if (app.got_subcommand(geom_cmd))
      return run_geometry(geom_d, mc_pairs, seed, out_dir, format);
    if (app.got_subcommand(asy_cmd))
      return run_asymptotics(asy_d, seed, out_dir, format);
    if (app.got_subcommand(verify_cmd)) {
      knnlab::acceptance::Options opts;
      opts.seed = seed;
      opts.out_dir = out_dir;
      const auto results = knnlab::acceptance::run_all(opts);
      return knnlab::acceptance::print_and_count_failures(results) == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
