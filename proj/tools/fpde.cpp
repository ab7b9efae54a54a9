#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "fpde/app.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fpde: pseudo-spectral solvers for critical advection/fractional-diffusion problems"};
  app.require_subcommand(1);

  std::string config_path;
  auto* solve = app.add_subcommand("solve", "run a scenario from a config file");
  solve->add_option("config", config_path, "scenario config file")->required();

  std::string suite;
  auto* verify = app.add_subcommand("verify", "run the named invariant checks");
  verify->add_option("suite", suite, "suite or check-name prefix (default: all)");

  std::vector<int> sizes{32, 64, 128, 256};
  std::string kernel = "all";
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "time the core kernels");
  bench->add_option("--sizes", sizes, "grid sizes per axis");
  bench->add_option("--kernel", kernel, "multiplier | step-linear | picard-step | all");
  bench->add_option("--out", bench_out, "write the CSV here instead of stdout");

  std::string snapshot_path;
  auto* inspect = app.add_subcommand("inspect", "print a snapshot header and its norms");
  inspect->add_option("snapshot", snapshot_path, "snapshot file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : fpde::app::exit_config;
  }

  if (*solve) return fpde::app::run_scenario(config_path);
  if (*verify) {
    auto results = fpde::verify::run_checks(suite);
    if (results.empty()) {
      std::fprintf(stderr, "no checks match '%s'\n", suite.c_str());
      return fpde::app::exit_config;
    }
    const int failures = fpde::verify::report(results);
    return failures == 0 ? fpde::app::exit_ok : fpde::app::exit_invariant;
  }
  if (*bench) {
    const std::string csv = fpde::bench::to_csv(fpde::bench::run_bench(kernel, sizes));
    if (bench_out.empty()) {
      std::fputs(csv.c_str(), stdout);
    } else {
      std::ofstream out(bench_out, std::ios::binary);
      out << csv;
    }
    return fpde::app::exit_ok;
  }
  return fpde::app::inspect(snapshot_path);
}
