#include "shs/processes.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace shs {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

[[noreturn]] void reject_step(double t, double rate, double mass) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "rejected step at t=" << t << ": rate " << rate << " gives change mass " << mass
      << " > 1";
  throw RejectedStepError(msg.str(), t, rate);
}

void check_step_index(std::size_t k, const TimeGrid& grid) {
  if (k >= grid.steps()) throw ValidationError("step index past the end of the grid");
}

}  // namespace

StepDecomposition ProcessModel::step(const SequenceState& x, std::size_t k, const TimeGrid& grid,
                                     std::size_t i) const {
  StepDecomposition d;
  d.change_mass = change_mass(x, k, grid, i).value;
  destination(x, k, grid, i, d.destination);
  d.destination_used = d.change_mass > 0.0;
  return d;
}

ExogenousRate::ExogenousRate(Family f, double a, double b, double omega)
    : family_(f), a_(a), b_(b), omega_(omega) {}

ExogenousRate ExogenousRate::constant(double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw ValidationError("constant rate must be >= 0");
  return ExogenousRate(Family::kConstant, c, 0.0, 0.0);
}

ExogenousRate ExogenousRate::linear(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || a + b < 0.0) {
    throw ValidationError("linear rate a + b t must be non-negative on [0, 1]");
  }
  return ExogenousRate(Family::kLinear, a, b, 0.0);
}

ExogenousRate ExogenousRate::sinusoidal(double a, double b, double omega) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(b >= 0.0) || !(a >= b)) {
    throw ValidationError("sinusoidal rate requires a >= b >= 0");
  }
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw ValidationError("sinusoidal rate requires omega > 0");
  }
  return ExogenousRate(Family::kSinusoidal, a, b, omega);
}

double ExogenousRate::rate(double t) const noexcept {
  switch (family_) {
    case Family::kConstant:
      return a_;
    case Family::kLinear:
      return a_ + b_ * t;
    case Family::kSinusoidal:
      return a_ + b_ * std::sin(kTwoPi * omega_ * t);
  }
  return 0.0;
}

double ExogenousRate::cumulative(double t) const noexcept {
  switch (family_) {
    case Family::kConstant:
      return a_ * t;
    case Family::kLinear:
      return a_ * t + 0.5 * b_ * t * t;
    case Family::kSinusoidal:
      return a_ * t + b_ * (1.0 - std::cos(kTwoPi * omega_ * t)) / (kTwoPi * omega_);
  }
  return 0.0;
}

double ExogenousRate::inverse_cumulative(double s) const {
  if (!(s >= 0.0)) throw DomainError("inverse_cumulative: hazard must be >= 0");
  if (s == 0.0) return 0.0;
  if (s > cumulative(1.0)) return std::numeric_limits<double>::infinity();
  switch (family_) {
    case Family::kConstant:
      return s / a_;
    case Family::kLinear:
      // Root of (b/2) t^2 + a t - s = 0 in the cancellation-free form.
      return 2.0 * s / (a_ + std::sqrt(a_ * a_ + 2.0 * b_ * s));
    case Family::kSinusoidal:
      break;
  }
  // Safeguarded Newton on a monotone function: keep a bracket and fall back
  // to bisection whenever the Newton step leaves it.
  double lo = 0.0;
  double hi = 1.0;
  double t = std::min(1.0, s / a_);
  for (int iter = 0; iter < 200; ++iter) {
    const double g = cumulative(t) - s;
    if (g == 0.0) return t;
    if (g > 0.0) {
      hi = t;
    } else {
      lo = t;
    }
    const double slope = rate(t);
    double next = slope > 0.0 ? t - g / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * std::max(1.0, t)) return next;
    t = next;
  }
  return t;
}

double ExogenousRate::max_rate() const noexcept {
  switch (family_) {
    case Family::kConstant:
      return a_;
    case Family::kLinear:
      return std::max(a_, a_ + b_);
    case Family::kSinusoidal:
      return omega_ >= 0.25 ? a_ + b_ : a_ + b_ * std::sin(kTwoPi * omega_);
  }
  return 0.0;
}

double ExogenousRate::total_variation_bound() const noexcept {
  switch (family_) {
    case Family::kConstant:
      return 0.0;
    case Family::kLinear:
      return std::abs(b_);
    case Family::kSinusoidal:
      // integral of |b 2 pi omega cos(2 pi omega t)| <= 2 pi omega b
      return kTwoPi * omega_ * b_;
  }
  return 0.0;
}

std::string ExogenousRate::describe() const {
  std::ostringstream out;
  out.precision(17);
  switch (family_) {
    case Family::kConstant:
      out << "constant(" << a_ << ")";
      break;
    case Family::kLinear:
      out << "linear(" << a_ << ", " << b_ << ")";
      break;
    case Family::kSinusoidal:
      out << "sinusoidal(" << a_ << ", " << b_ << ", " << omega_ << ")";
      break;
  }
  return out.str();
}

double tau_leap_mass(const ExogenousRate& rate, double t, double h) {
  if (!(t >= 0.0 && t < 1.0)) throw DomainError("tau_leap_mass: t must lie in [0, 1)");
  if (!(h > 0.0)) throw DomainError("tau_leap_mass: step must be positive");
  const double lambda = rate.rate(t);
  const double mass = h * lambda;
  if (mass > 1.0) reject_step(t, lambda, mass);
  return mass;
}

ChangeMass tau_leap_mass_clamped(const ExogenousRate& rate, double t, double h) {
  if (!(t >= 0.0 && t < 1.0)) throw DomainError("tau_leap_mass: t must lie in [0, 1)");
  if (!(h > 0.0)) throw DomainError("tau_leap_mass: step must be positive");
  const double mass = h * rate.rate(t);
  if (mass > 1.0) return {1.0, true};
  return {mass, false};
}

ExogenousProcess::ExogenousProcess(ExogenousRate rate, std::size_t length,
                                   std::size_t vocab_size, bool clamp)
    : rate_(rate), length_(length), vocab_(vocab_size), clamp_(clamp) {
  if (length == 0) throw ValidationError("process length must be >= 1");
}

ChangeMass ExogenousProcess::change_mass(const SequenceState&, std::size_t k,
                                         const TimeGrid& grid, std::size_t) const {
  check_step_index(k, grid);
  if (clamp_) return tau_leap_mass_clamped(rate_, grid.time(k), grid.step_size());
  return {tau_leap_mass(rate_, grid.time(k), grid.step_size()), false};
}

void ExogenousProcess::destination(const SequenceState& x, std::size_t, const TimeGrid&,
                                   std::size_t i, std::vector<double>& out) const {
  out = uniform_excluding(vocab_.size(), x[i]);
}

ScheduledMassProcess::ScheduledMassProcess(std::vector<double> masses, std::size_t length,
                                           std::size_t vocab_size)
    : masses_(std::move(masses)), length_(length), vocab_(vocab_size) {
  if (length == 0) throw ValidationError("process length must be >= 1");
  for (double p : masses_) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("scheduled mass outside [0, 1]");
  }
}

ChangeMass ScheduledMassProcess::change_mass(const SequenceState&, std::size_t k,
                                             const TimeGrid& grid, std::size_t) const {
  if (grid.steps() != masses_.size()) {
    throw ValidationError("mass schedule length does not match the time grid");
  }
  return {masses_[k], false};
}

void ScheduledMassProcess::destination(const SequenceState& x, std::size_t, const TimeGrid&,
                                       std::size_t i, std::vector<double>& out) const {
  out = uniform_excluding(vocab_.size(), x[i]);
}

ToyDenoiser::ToyDenoiser(ToyDenoiserSpec spec, bool clamp) : spec_(std::move(spec)), clamp_(clamp) {
  const Vocabulary vocab(spec_.vocab_size);
  if (spec_.target.empty()) throw ValidationError("denoiser target must be non-empty");
  SequenceState(spec_.target).validate(vocab, false);
  if (!(spec_.rate > 0.0) || !std::isfinite(spec_.rate)) {
    throw ValidationError("denoiser rate must be positive");
  }
  if (!(spec_.pull > 0.0 && spec_.pull <= 1.0)) {
    throw ValidationError("denoiser pull probability must lie in (0, 1]");
  }
}

ChangeMass ToyDenoiser::change_mass(const SequenceState&, std::size_t k, const TimeGrid& grid,
                                    std::size_t) const {
  check_step_index(k, grid);
  const double mass = spec_.rate * grid.step_size();
  if (mass > 1.0) {
    if (clamp_) return {1.0, true};
    reject_step(grid.time(k), spec_.rate, mass);
  }
  return {mass, false};
}

void ToyDenoiser::destination(const SequenceState& x, std::size_t, const TimeGrid&,
                              std::size_t i, std::vector<double>& out) const {
  const Token cur = x[i];
  const Token goal = spec_.target[i];
  const std::size_t V = spec_.vocab_size;
  if (cur == goal) {
    out = uniform_excluding(V, cur);
    return;
  }
  out.assign(V, 0.0);
  if (V == 2) {
    out[static_cast<std::size_t>(goal)] = 1.0;
    return;
  }
  const double rest = (1.0 - spec_.pull) / static_cast<double>(V - 2);
  for (std::size_t v = 0; v < V; ++v) out[v] = rest;
  out[static_cast<std::size_t>(cur)] = 0.0;
  out[static_cast<std::size_t>(goal)] = spec_.pull;
}

double ToyDenoiser::hamming_accuracy(const SequenceState& x) const {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < spec_.target.size(); ++i) hits += x[i] == spec_.target[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(spec_.target.size());
}

MaskStartProcess::MaskStartProcess(MaskStartSpec spec) : spec_(std::move(spec)) {
  Vocabulary{spec_.vocab_size};
  if (spec_.length == 0) throw ValidationError("process length must be >= 1");
  for (double p : spec_.schedule) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("unmask schedule entry outside [0, 1]");
  }
}

double MaskStartProcess::unmask_mass(std::size_t k, const TimeGrid& grid) const {
  check_step_index(k, grid);
  const std::size_t n = grid.steps();
  if (spec_.terminal_resolution && k + 1 == n) return 1.0;
  if (!spec_.schedule.empty()) {
    if (spec_.schedule.size() != n) {
      throw ValidationError("unmask schedule length does not match the time grid");
    }
    return spec_.schedule[k];
  }
  // h / (1 - t_k) = 1 / (n - k).
  return 1.0 / static_cast<double>(n - k);
}

ChangeMass MaskStartProcess::change_mass(const SequenceState& x, std::size_t k,
                                         const TimeGrid& grid, std::size_t i) const {
  if (!x.is_masked(i)) return {0.0, false};
  return {unmask_mass(k, grid), false};
}

void MaskStartProcess::destination(const SequenceState&, std::size_t, const TimeGrid&,
                                   std::size_t, std::vector<double>& out) const {
  out.assign(spec_.vocab_size, 1.0 / static_cast<double>(spec_.vocab_size));
}

}  // namespace shs
