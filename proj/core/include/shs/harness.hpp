#ifndef SHS_HARNESS_HPP_
#define SHS_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shs/schedulers.hpp"

namespace shs {

enum class ExperimentKind {
  kRounding,
  kHazardHistogram,
  kDenoiserSweep,
  kMaskStart,
  kBlacklistSweep,
};

std::string_view to_string(ExperimentKind kind) noexcept;
std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) noexcept;

struct RateConfig {
  std::string family = "constant";  // constant | linear | sinusoidal
  double a = 4.0;
  double b = 0.0;
  double omega = 1.0;
};

// One JSON document. Every field has a default so a minimal config names
// only the experiment; the manifest echoes the fully expanded form.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kRounding;
  std::vector<SchedulerKind> schedulers{SchedulerKind::kStandard, SchedulerKind::kShs};
  std::vector<std::size_t> nfe{64};
  std::vector<double> rho{0.0};
  std::size_t trajectories = 1000;
  std::uint64_t seed = 0;
  std::uint64_t blacklist_seed = 0;
  std::string output_dir = "out";
  bool clamp_tau_leap = false;

  // Sequence shape (all kinds).
  std::size_t length = 1;
  std::size_t vocab = 2;

  // rounding: total mass spread evenly over the grid.
  double mass = 2.5;

  // hazard_histogram
  RateConfig rate;
  unsigned ks_max_jump = 3;
  bool exact_oracle = true;

  // denoiser_sweep / blacklist_sweep
  double denoiser_rate = 4.0;
  double pull = 0.9;

  // mask_start
  std::vector<double> unmask_schedule;
  bool terminal_resolution = true;
};

// Throws ValidationError on malformed JSON, unknown fields or values, or
// parameters the chosen process family cannot run.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
void validate_config(const ExperimentConfig& config);
// Fully expanded JSON, including defaults.
std::string config_to_json(const ExperimentConfig& config);

struct HazardSample {
  std::uint32_t position = 0;
  std::uint32_t jump_index = 0;  // 1-based
  double location = 0.0;
};

// One (scheduler, NFE, rho) cell. `scheduler` is "standard", "shs", or
// "exact_nhpp" for the continuous-time oracle arm (nfe = 0).
struct CellReport {
  std::string scheduler;
  std::size_t nfe = 0;
  double rho = 0.0;
  std::size_t trajectories = 0;
  std::size_t samples = 0;  // trajectories * positions

  double mean_jumps = 0.0;
  double var_jumps = 0.0;
  std::uint64_t max_jumps = 0;
  double mean_total_mass = 0.0;

  // P(J = 0 | S_tot >= 1) and its denominator.
  double p_zero_edit = 0.0;
  std::size_t zero_edit_eligible = 0;
  // P(J > ceil(S_tot)).
  double p_over_edit = 0.0;
  // P(J = 0) against max(0, 1 - S_tot), pooled over samples.
  double p_zero_any = 0.0;
  double zero_edit_bound = 0.0;

  // Max KS distance over jump indices 1..K against Gamma(k, 1) conditioned on
  // the realized total hazard; NaN outside hazard_histogram.
  double ks_d = 0.0;
  std::optional<bool> ks_pass;
  std::vector<double> ks_by_jump;
  std::vector<std::size_t> ks_samples;

  std::size_t degenerate_count = 0;
  std::size_t clamped_steps = 0;
  std::size_t forbidden_hits = 0;
  std::size_t residual_masks = 0;

  // Mean per-trajectory Hamming accuracy (denoiser kinds), else NaN.
  double hamming_acc = 0.0;
  double hamming_se = 0.0;

  std::vector<HazardSample> hazard_samples;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<CellReport> cells;
  // Forbidden tokens per rho, aligned with config.rho.
  std::vector<std::vector<std::int32_t>> blacklists;
  double wall_seconds = 0.0;
  unsigned threads = 1;
};

// Runs every cell of `config`. Results depend only on the config (including
// its seed), never on `threads`.
ExperimentReport run_experiment(const ExperimentConfig& config, unsigned threads = 1);

inline constexpr std::string_view kSummaryHeader =
    "scheduler,nfe,rho,mean_J,var_J,p_zero_edit,p_over_edit,ks_D,ks_pass,degenerate_count,"
    "hamming_acc,n_traj";

std::string summary_csv(const ExperimentReport& report);
std::string hazard_csv(const ExperimentReport& report);
std::string manifest_json(const ExperimentReport& report);

enum class ReportFormat { kCsv, kJson };

// Writes summary.csv and hazard_locations.csv (csv) and manifest.json (json)
// into `dir`, creating it if needed. Returns the written paths.
std::vector<std::filesystem::path> emit_report(const ExperimentReport& report,
                                               const std::filesystem::path& dir,
                                               std::span<const ReportFormat> formats);

std::string_view library_version() noexcept;

}  // namespace shs

#endif  // SHS_HARNESS_HPP_
