#include "shs/schedulers.hpp"

#include <cmath>
#include <sstream>

namespace shs {
namespace {

void check_mass(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream msg;
    msg << "change mass " << p << " outside [0, 1]";
    throw DomainError(msg.str());
  }
}

}  // namespace

std::string_view to_string(SchedulerKind kind) noexcept {
  switch (kind) {
    case SchedulerKind::kStandard:
      return "standard";
    case SchedulerKind::kShs:
      return "shs";
  }
  return "unknown";
}

std::optional<SchedulerKind> parse_scheduler(std::string_view name) noexcept {
  if (name == "standard") return SchedulerKind::kStandard;
  if (name == "shs") return SchedulerKind::kShs;
  return std::nullopt;
}

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

std::uint64_t randomized_round(double mass, double phase) {
  if (!(mass >= 0.0) || !std::isfinite(mass)) {
    throw DomainError("randomized_round: mass must be finite and non-negative");
  }
  if (!(phase >= 0.0 && phase < 1.0)) {
    throw DomainError("randomized_round: phase must lie in [0, 1)");
  }
  const double whole = std::floor(mass);
  const double frac = mass - whole;
  return static_cast<std::uint64_t>(whole) + (phase < frac ? 1 : 0);
}

PhaseState::PhaseState(std::vector<double> phases)
    : mass_(phases.size()), boundary_(phases.size(), 0), phase_(std::move(phases)) {
  for (double th : phase_) {
    if (!(th >= 0.0 && th < 1.0)) throw DomainError("phase must lie in [0, 1)");
  }
}

bool PhaseState::decide(std::size_t i, double p) {
  check_mass(p);
  mass_[i].add(p);
  if (mass_[i].value() >= phase_[i] + static_cast<double>(boundary_[i])) {
    ++boundary_[i];
    return true;
  }
  return false;
}

bool operator==(const PhaseState& a, const PhaseState& b) noexcept {
  if (a.phase_ != b.phase_ || a.boundary_ != b.boundary_) return false;
  for (std::size_t i = 0; i < a.mass_.size(); ++i) {
    if (a.mass_[i].value() != b.mass_[i].value()) return false;
  }
  return true;
}

PhaseState shs_init(std::size_t positions, std::uint64_t seed, std::uint64_t trajectory) {
  std::vector<double> phases(positions);
  for (std::size_t i = 0; i < positions; ++i) {
    RngStream rng({seed, trajectory, static_cast<std::uint32_t>(i), StreamTag::kPhase});
    phases[i] = rng.uniform();
  }
  return PhaseState(std::move(phases));
}

bool shs_decide(PhaseState& state, std::size_t i, double p) { return state.decide(i, p); }

bool standard_decide(double p, RngStream& rng) {
  check_mass(p);
  return rng.uniform() < p;
}

Token sample_destination(std::span<const double> q, double u) {
  double acc = 0.0;
  std::size_t last_positive = q.size();
  for (std::size_t v = 0; v < q.size(); ++v) {
    if (q[v] <= 0.0) continue;
    acc += q[v];
    last_positive = v;
    if (u < acc) return static_cast<Token>(v);
  }
  if (last_positive == q.size()) {
    throw DomainError("sample_destination: destination has no positive mass");
  }
  return static_cast<Token>(last_positive);
}

}  // namespace shs
