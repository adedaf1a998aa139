#ifndef SHS_SELFTEST_HPP_
#define SHS_SELFTEST_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace shs {

struct SelftestOptions {
  // Multiplies every sample count; 1.0 runs the full-size checks.
  double scale = 1.0;
  unsigned threads = 1;
  std::uint64_t seed = 20251016;
};

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  // Wall-clock budget; 0 means none. Exceeding it fails the check.
  double time_limit = 0.0;
};

// Randomized rounding mean equals S within 4 standard errors.
CheckResult check_unbiasedness(const SelftestOptions& opts);
// Randomized rounding variance equals f(1 - f) within 2%; two-point support.
CheckResult check_minimal_variance(const SelftestOptions& opts);
// Streaming SHS jump totals equal randomized_round of the summed masses.
CheckResult check_streaming_coupling(const SelftestOptions& opts);
// Standard jump counts follow the Poisson-binomial law; SHS counts are constant.
CheckResult check_poisson_binomial(const SelftestOptions& opts);
// P(J = 0): standard matches the product form, SHS hits max(0, 1 - S).
CheckResult check_zero_edit(const SelftestOptions& opts);
// SHS hazard locations stay within one step of their boundary; exact NHPP
// locations are Erlang.
CheckResult check_hazard_stratification(const SelftestOptions& opts);
// Mask-start trajectories edit each position exactly once.
CheckResult check_mask_start(const SelftestOptions& opts);
// Blacklist filtering preserves change mass, never emits a forbidden token,
// and matches rejection sampling.
CheckResult check_blacklist(const SelftestOptions& opts);
// Toy denoiser: SHS Hamming accuracy at least standard's at every NFE.
CheckResult check_directional_quality(const SelftestOptions& opts);
// Summary CSVs are byte-identical across thread counts.
CheckResult check_reproducibility(const SelftestOptions& opts);

// All checks in id order.
CheckResult run_check(int id, const SelftestOptions& opts);
inline constexpr int kCheckCount = 10;

// The oracle/property suite: every check except the directional quality
// comparison, which is an experiment outcome rather than a property.
std::vector<CheckResult> run_selftest(const SelftestOptions& opts);

}  // namespace shs

#endif  // SHS_SELFTEST_HPP_
