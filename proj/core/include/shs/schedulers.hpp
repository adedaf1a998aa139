#ifndef SHS_SCHEDULERS_HPP_
#define SHS_SCHEDULERS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "shs/core.hpp"
#include "shs/rng.hpp"

namespace shs {

enum class SchedulerKind { kStandard, kShs };

std::string_view to_string(SchedulerKind kind) noexcept;
std::optional<SchedulerKind> parse_scheduler(std::string_view name) noexcept;

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// floor(S) + 1[theta < S - floor(S)].
std::uint64_t randomized_round(double mass, double phase);

// Per-position accumulator for stratified hazard sampling.
class PhaseState {
 public:
  PhaseState() = default;
  explicit PhaseState(std::vector<double> phases);

  std::size_t size() const noexcept { return phase_.size(); }
  double cumulative_mass(std::size_t i) const noexcept { return mass_[i].value(); }
  std::uint64_t boundary_index(std::size_t i) const noexcept { return boundary_[i]; }
  double phase(std::size_t i) const noexcept { return phase_[i]; }

  // Adds `p` to position i's cumulative mass and reports whether the next
  // boundary phase + m was reached. Crosses at most one boundary since p <= 1.
  bool decide(std::size_t i, double p);

  friend bool operator==(const PhaseState& a, const PhaseState& b) noexcept;

 private:
  std::vector<CompensatedSum> mass_;
  std::vector<std::uint64_t> boundary_;
  std::vector<double> phase_;
};

// Phases drawn i.i.d. Uniform[0,1), one substream per position.
PhaseState shs_init(std::size_t positions, std::uint64_t seed, std::uint64_t trajectory = 0);

bool shs_decide(PhaseState& state, std::size_t i, double p);

bool standard_decide(double p, RngStream& rng);

// Inverse-CDF draw over `q` using one uniform. Returns the last token with
// positive mass if rounding pushes the uniform past the accumulated total.
Token sample_destination(std::span<const double> q, double u);

}  // namespace shs

#endif  // SHS_SCHEDULERS_HPP_
