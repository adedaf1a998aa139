#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "shs/harness.hpp"

using namespace shs;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const CellReport& cell(const ExperimentReport& r, std::string_view scheduler, std::size_t nfe) {
  for (const auto& c : r.cells) {
    if (c.scheduler == scheduler && c.nfe == nfe) return c;
  }
  throw std::runtime_error("missing cell");
}

}  // namespace

TEST_CASE("config parsing applies defaults") {
  const auto c = parse_config(R"({"experiment": "rounding", "seed": 3})");
  CHECK(c.kind == ExperimentKind::kRounding);
  CHECK(c.seed == 3);
  CHECK(c.blacklist_seed == 3);
  CHECK(c.trajectories == 1000);
  CHECK(c.nfe == std::vector<std::size_t>{64});
  CHECK(c.schedulers.size() == 2);
}

TEST_CASE("config errors") {
  const char* bad[] = {
      R"(not json)",
      R"({"experiment": "nope"})",
      R"({"experiment": "rounding", "bogus": 1})",
      R"({"experiment": "rounding", "trajectories": 0})",
      R"({"experiment": "rounding", "nfe": []})",
      R"({"experiment": "rounding", "nfe": [0]})",
      R"({"experiment": "rounding", "schedulers": []})",
      R"({"experiment": "rounding", "schedulers": ["euler"]})",
      R"({"experiment": "rounding", "rho": [0.3]})",
      R"({"experiment": "rounding", "process": {"vocab": 1}})",
      R"({"experiment": "rounding", "process": {"colour": 1}})",
      R"({"experiment": "hazard_histogram", "nfe": [16, 32]})",
      R"({"experiment": "denoiser_sweep", "nfe": [2]})",
      R"({"experiment": "blacklist_sweep", "rho": [1.0]})",
      R"({"experiment": "mask_start", "nfe": [4], "process": {"unmask_schedule": [0.5]}})",
      R"({"experiment": "rounding", "seed": -1})",
  };
  for (std::string text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_config(text), ValidationError);
  }
  CHECK_NOTHROW(parse_config(
      R"({"experiment": "denoiser_sweep", "nfe": [2], "flags": {"clamp_tau_leap": true}})"));
}

TEST_CASE("config_to_json round-trips") {
  const auto c = parse_config(
      R"({"experiment": "blacklist_sweep", "rho": [0.0, 0.5], "nfe": [8], "seed": 11,
          "process": {"length": 4, "vocab": 10}})");
  const auto again = parse_config(config_to_json(c));
  CHECK(config_to_json(again) == config_to_json(c));
  CHECK(again.rho == std::vector<double>{0.0, 0.5});
}

TEST_CASE("rounding experiment") {
  auto c = parse_config(
      R"({"experiment": "rounding", "nfe": [10], "trajectories": 4000, "seed": 1,
          "process": {"mass": 2.5, "length": 2}})");
  const auto r = run_experiment(c);
  REQUIRE(r.cells.size() == 2);
  const auto& shs = cell(r, "shs", 10);
  CHECK(shs.samples == 8000);
  CHECK(shs.mean_jumps == doctest::Approx(2.5).epsilon(0.02));
  CHECK(shs.var_jumps == doctest::Approx(0.25).epsilon(0.05));
  CHECK(shs.p_zero_edit == 0.0);
  CHECK(shs.p_over_edit == 0.0);
  CHECK(std::isnan(shs.ks_d));
  const auto& std_cell = cell(r, "standard", 10);
  CHECK(std_cell.mean_jumps == doctest::Approx(2.5).epsilon(0.03));
  CHECK(std_cell.var_jumps == doctest::Approx(10 * 0.25 * 0.75).epsilon(0.08));
}

TEST_CASE("mask_start experiment resolves every mask once") {
  const auto c = parse_config(
      R"({"experiment": "mask_start", "nfe": [16], "trajectories": 500, "seed": 2,
          "process": {"length": 16, "vocab": 8}})");
  const auto r = run_experiment(c, 2);
  for (const auto& cellr : r.cells) {
    CHECK(cellr.max_jumps == 1);
    CHECK(cellr.mean_jumps == 1.0);
    CHECK(cellr.residual_masks == 0);
  }
}

TEST_CASE("denoiser sweep: SHS jump counts are constant") {
  const auto c = parse_config(
      R"({"experiment": "denoiser_sweep", "nfe": [64], "trajectories": 300, "seed": 4,
          "process": {"length": 32, "vocab": 16, "denoiser_rate": 4.0, "pull": 0.9}})");
  const auto r = run_experiment(c, 3);
  CHECK(cell(r, "shs", 64).var_jumps == 0.0);
  CHECK(cell(r, "shs", 64).mean_jumps == 4.0);
  CHECK(cell(r, "standard", 64).var_jumps == doctest::Approx(3.75).epsilon(0.05));
  CHECK(cell(r, "standard", 64).hamming_acc > 0.0);
}

TEST_CASE("clamped steps are counted") {
  const auto c = parse_config(
      R"({"experiment": "denoiser_sweep", "nfe": [2], "trajectories": 10, "seed": 4,
          "flags": {"clamp_tau_leap": true},
          "process": {"length": 3, "vocab": 4, "denoiser_rate": 4.0}})");
  const auto r = run_experiment(c);
  for (const auto& cellr : r.cells) {
    CHECK(cellr.clamped_steps == 10 * 3 * 2);
    CHECK(cellr.mean_jumps == 2.0);
  }
}

TEST_CASE("hazard histogram includes the exact arm and KS verdicts") {
  const auto c = parse_config(
      R"({"experiment": "hazard_histogram", "nfe": [128], "trajectories": 2000, "seed": 9,
          "process": {"rate": {"family": "constant", "a": 4.0}}})");
  const auto r = run_experiment(c, 2);
  REQUIRE(r.cells.size() == 3);
  const auto& exact = cell(r, "exact_nhpp", 0);
  REQUIRE(exact.ks_pass.has_value());
  CHECK(*exact.ks_pass);
  CHECK(exact.ks_by_jump.size() == 3);
  CHECK_FALSE(exact.hazard_samples.empty());
}

TEST_CASE("blacklist sweep never emits forbidden tokens") {
  const auto c = parse_config(
      R"({"experiment": "blacklist_sweep", "rho": [0.0, 0.7], "nfe": [16], "trajectories": 200,
          "seed": 5, "process": {"length": 8, "vocab": 20}})");
  const auto r = run_experiment(c, 2);
  REQUIRE(r.blacklists.size() == 2);
  CHECK(r.blacklists[0].empty());
  CHECK(r.blacklists[1].size() == 14);
  for (const auto& cellr : r.cells) CHECK(cellr.forbidden_hits == 0);
}

TEST_CASE("reports: header, files and manifest replay") {
  const auto c = parse_config(
      R"({"experiment": "denoiser_sweep", "nfe": [8, 16], "trajectories": 100, "seed": 7,
          "process": {"length": 8, "vocab": 8}})");
  const auto r = run_experiment(c, 2);
  const auto csv = summary_csv(r);
  CHECK(csv.rfind(std::string(kSummaryHeader) + "\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);

  const auto dir = std::filesystem::temp_directory_path() / "shs_harness_test";
  std::filesystem::remove_all(dir);
  const ReportFormat formats[] = {ReportFormat::kCsv, ReportFormat::kJson};
  const auto written = emit_report(r, dir, formats);
  CHECK(written.size() == 3);
  CHECK(slurp(dir / "summary.csv") == csv);

  // Rerunning from the manifest alone reproduces the summary byte for byte,
  // at a different thread count.
  const auto replay = run_experiment(load_config(dir / "manifest.json"), 1);
  CHECK(summary_csv(replay) == csv);
  std::filesystem::remove_all(dir);
}

TEST_CASE("experiment names") {
  for (auto k : {ExperimentKind::kRounding, ExperimentKind::kHazardHistogram,
                 ExperimentKind::kDenoiserSweep, ExperimentKind::kMaskStart,
                 ExperimentKind::kBlacklistSweep}) {
    CHECK(parse_experiment_kind(to_string(k)) == k);
  }
  CHECK_FALSE(library_version().empty());
}
