// Command-line driver: run and validate experiment configs, or run the
// oracle/property self-test suite.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "shs/harness.hpp"
#include "shs/selftest.hpp"

namespace {

enum ExitCode : int {
  kOk = 0,
  kInvalidConfig = 1,
  kSelftestFailed = 2,
  kRuntimeError = 3,
};

std::vector<shs::ReportFormat> parse_formats(const std::vector<std::string>& names) {
  std::vector<shs::ReportFormat> out;
  for (const auto& n : names) {
    if (n == "csv") {
      out.push_back(shs::ReportFormat::kCsv);
    } else if (n == "json") {
      out.push_back(shs::ReportFormat::kJson);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stratified hazard sampling experiments"};
  app.require_subcommand(1);

  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  app.add_option("--out", out_dir, "Output directory (overrides the config)");
  app.add_option("--seed", seed, "Experiment seed (overrides the config)");
  app.add_option("--threads", threads, "Worker threads; results do not depend on it")
      ->check(CLI::Range(1u, 1024u));
  app.add_flag_callback("--version", [] {
    std::cout << "shs " << shs::library_version() << "\n";
    std::exit(kOk);
  }, "Print the library version");

  std::string config_path;
  std::vector<std::string> formats{"csv", "json"};
  auto* run = app.add_subcommand("run", "Run an experiment config and write its report");
  run->add_option("config", config_path, "Path to the JSON config")->required();
  run->add_option("--format", formats, "Report formats to write")
      ->check(CLI::IsMember({"csv", "json"}))
      ->delimiter(',');

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", config_path, "Path to the JSON config")->required();

  double scale = 0.1;
  bool full = false;
  auto* selftest = app.add_subcommand("selftest", "Run the oracle/property suite");
  selftest->add_option("--scale", scale, "Sample-count multiplier")->check(CLI::PositiveNumber);
  selftest->add_flag("--full", full, "Run at full size (same as --scale 1)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*selftest) {
      shs::SelftestOptions opts;
      opts.scale = full ? 1.0 : scale;
      opts.threads = threads;
      if (seed) opts.seed = *seed;
      bool all = true;
      for (const auto& r : shs::run_selftest(opts)) {
        all = all && r.passed;
        std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << " " << r.name << " ("
                  << r.seconds << " s):" << r.detail << "\n";
      }
      return all ? kOk : kSelftestFailed;
    }

    auto config = shs::load_config(config_path);
    if (seed) {
      config.seed = *seed;
      config.blacklist_seed = *seed;
    }
    if (out_dir) config.output_dir = *out_dir;
    shs::validate_config(config);

    if (*validate) {
      std::cout << shs::config_to_json(config) << "\n";
      return kOk;
    }

    const auto report = shs::run_experiment(config, threads);
    const auto fmts = parse_formats(formats);
    for (const auto& path : shs::emit_report(report, config.output_dir, fmts)) {
      std::cout << "wrote " << path.string() << "\n";
    }
    return kOk;
  } catch (const shs::ValidationError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}
