#ifndef SHS_PROCESSES_HPP_
#define SHS_PROCESSES_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "shs/core.hpp"

namespace shs {

struct ChangeMass {
  double value = 0.0;
  bool clamped = false;
};

// Source of per-step (change mass, destination) pairs.
//
// The two halves are split so the sampler only builds a destination vector
// when a jump actually fires; `step` assembles both for callers that want the
// full decomposition. Implementations must be pure and thread-safe.
class ProcessModel {
 public:
  virtual ~ProcessModel() = default;

  virtual std::size_t vocab_size() const = 0;
  virtual std::size_t length() const = 0;
  virtual bool allows_mask() const { return false; }

  virtual ChangeMass change_mass(const SequenceState& x, std::size_t k, const TimeGrid& grid,
                                 std::size_t i) const = 0;

  // Writes q(. | x) for position i into `out` (resized to vocab_size()).
  virtual void destination(const SequenceState& x, std::size_t k, const TimeGrid& grid,
                           std::size_t i, std::vector<double>& out) const = 0;

  StepDecomposition step(const SequenceState& x, std::size_t k, const TimeGrid& grid,
                         std::size_t i) const;
};

// Closed-form rate families on [0, 1].
class ExogenousRate {
 public:
  enum class Family { kConstant, kLinear, kSinusoidal };

  static ExogenousRate constant(double c);
  // a + b t; requires a >= 0 and a + b >= 0.
  static ExogenousRate linear(double a, double b);
  // a + b sin(2 pi omega t); requires a >= b >= 0 and omega > 0.
  static ExogenousRate sinusoidal(double a, double b, double omega);

  Family family() const noexcept { return family_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double omega() const noexcept { return omega_; }

  double rate(double t) const noexcept;
  // Cumulative hazard: integral of rate over [0, t].
  double cumulative(double t) const noexcept;
  // Smallest t in [0, 1] with cumulative(t) >= s; +inf when s > cumulative(1).
  double inverse_cumulative(double s) const;
  double max_rate() const noexcept;
  // Upper bound on the total variation of rate() over [0, 1].
  double total_variation_bound() const noexcept;

  std::string describe() const;

 private:
  ExogenousRate(Family f, double a, double b, double omega);

  Family family_;
  double a_;
  double b_;
  double omega_;
};

// h * rate(t_k). Throws RejectedStepError when the result exceeds 1.
double tau_leap_mass(const ExogenousRate& rate, double t, double h);

// Same, but clamps to 1 and reports the clamp instead of throwing.
ChangeMass tau_leap_mass_clamped(const ExogenousRate& rate, double t, double h);

// Every position follows the same state-independent tau-leaped rate;
// destinations are uniform over the other tokens.
class ExogenousProcess final : public ProcessModel {
 public:
  ExogenousProcess(ExogenousRate rate, std::size_t length, std::size_t vocab_size,
                   bool clamp = false);

  const ExogenousRate& rate() const noexcept { return rate_; }
  std::size_t vocab_size() const override { return vocab_.size(); }
  std::size_t length() const override { return length_; }
  ChangeMass change_mass(const SequenceState& x, std::size_t k, const TimeGrid& grid,
                         std::size_t i) const override;
  void destination(const SequenceState& x, std::size_t k, const TimeGrid& grid, std::size_t i,
                   std::vector<double>& out) const override;

 private:
  ExogenousRate rate_;
  std::size_t length_;
  Vocabulary vocab_;
  bool clamp_;
};

// Explicit state-independent mass per step (masses.size() must equal the
// grid's step count); uniform destinations.
class ScheduledMassProcess final : public ProcessModel {
 public:
  ScheduledMassProcess(std::vector<double> masses, std::size_t length, std::size_t vocab_size);

  std::span<const double> masses() const noexcept { return masses_; }
  std::size_t vocab_size() const override { return vocab_.size(); }
  std::size_t length() const override { return length_; }
  ChangeMass change_mass(const SequenceState& x, std::size_t k, const TimeGrid& grid,
                         std::size_t i) const override;
  void destination(const SequenceState& x, std::size_t k, const TimeGrid& grid, std::size_t i,
                   std::vector<double>& out) const override;

 private:
  std::vector<double> masses_;
  std::size_t length_;
  Vocabulary vocab_;
};

struct ToyDenoiserSpec {
  std::vector<Token> target;
  std::size_t vocab_size = 2;
  double rate = 1.0;  // constant hazard c; per-step mass c * h
  double pull = 1.0;  // beta in (0, 1]
};

// Multi-edit toy: constant per-step mass, destination pulled toward a target
// sequence with probability beta and otherwise uniform.
class ToyDenoiser final : public ProcessModel {
 public:
  explicit ToyDenoiser(ToyDenoiserSpec spec, bool clamp = false);

  const ToyDenoiserSpec& spec() const noexcept { return spec_; }
  std::size_t vocab_size() const override { return spec_.vocab_size; }
  std::size_t length() const override { return spec_.target.size(); }
  ChangeMass change_mass(const SequenceState& x, std::size_t k, const TimeGrid& grid,
                         std::size_t i) const override;
  void destination(const SequenceState& x, std::size_t k, const TimeGrid& grid, std::size_t i,
                   std::vector<double>& out) const override;

  // Fraction of positions of `x` equal to the target.
  double hamming_accuracy(const SequenceState& x) const;

 private:
  ToyDenoiserSpec spec_;
  bool clamp_;
};

struct MaskStartSpec {
  std::size_t length = 1;
  std::size_t vocab_size = 2;
  // Optional explicit per-step unmask masses; empty means 1 / (n - k),
  // i.e. h / (1 - t_k).
  std::vector<double> schedule;
  // Force the final step's mass to 1 so every mask resolves.
  bool terminal_resolution = true;
};

// Absorbing-state process: only masked positions may change, and they
// change into a uniformly drawn vocabulary token.
class MaskStartProcess final : public ProcessModel {
 public:
  explicit MaskStartProcess(MaskStartSpec spec);

  const MaskStartSpec& spec() const noexcept { return spec_; }
  std::size_t vocab_size() const override { return spec_.vocab_size; }
  std::size_t length() const override { return spec_.length; }
  bool allows_mask() const override { return true; }
  ChangeMass change_mass(const SequenceState& x, std::size_t k, const TimeGrid& grid,
                         std::size_t i) const override;
  void destination(const SequenceState& x, std::size_t k, const TimeGrid& grid, std::size_t i,
                   std::vector<double>& out) const override;

  double unmask_mass(std::size_t k, const TimeGrid& grid) const;

 private:
  MaskStartSpec spec_;
};

}  // namespace shs

#endif  // SHS_PROCESSES_HPP_
