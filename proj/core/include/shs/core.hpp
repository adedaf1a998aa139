#ifndef SHS_CORE_HPP_
#define SHS_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace shs {

using Token = std::int32_t;

// Sentinel for masked positions in mask-start processes. Lives outside [0, V).
inline constexpr Token kMaskToken = -1;

// Tolerances for probability vectors: loose for caller-supplied input,
// tight for vectors this library builds itself.
inline constexpr double kInputTolerance = 1e-9;
inline constexpr double kInternalTolerance = 1e-12;

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A per-step change mass exceeded 1 (the tau-leap / DTMC precondition).
class RejectedStepError : public std::runtime_error {
 public:
  RejectedStepError(const std::string& what, double time, double rate)
      : std::runtime_error(what), time_(time), rate_(rate) {}
  double time() const noexcept { return time_; }
  double rate() const noexcept { return rate_; }

 private:
  double time_;
  double rate_;
};

class Vocabulary {
 public:
  explicit Vocabulary(std::size_t size);
  std::size_t size() const noexcept { return size_; }
  bool contains(Token t) const noexcept {
    return t >= 0 && static_cast<std::size_t>(t) < size_;
  }

 private:
  std::size_t size_;
};

class SequenceState {
 public:
  SequenceState() = default;
  explicit SequenceState(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  static SequenceState all_masked(std::size_t length) {
    return SequenceState(std::vector<Token>(length, kMaskToken));
  }

  std::size_t size() const noexcept { return tokens_.size(); }
  Token operator[](std::size_t i) const { return tokens_[i]; }
  bool is_masked(std::size_t i) const { return tokens_[i] == kMaskToken; }
  std::span<const Token> tokens() const noexcept { return tokens_; }

  void set(std::size_t i, Token t) { tokens_[i] = t; }

  // Throws ValidationError unless every entry is in [0, V) or (when allowed)
  // the mask sentinel.
  void validate(const Vocabulary& vocab, bool allow_mask) const;

  std::size_t count_masked() const noexcept;

  friend bool operator==(const SequenceState&, const SequenceState&) = default;

 private:
  std::vector<Token> tokens_;
};

// Uniform grid t_k = k / n on [0, 1].
class TimeGrid {
 public:
  explicit TimeGrid(std::size_t steps);
  std::size_t steps() const noexcept { return steps_; }
  double step_size() const noexcept { return 1.0 / static_cast<double>(steps_); }
  double time(std::size_t k) const noexcept {
    return static_cast<double>(k) / static_cast<double>(steps_);
  }

 private:
  std::size_t steps_;
};

// Stay-vs-replace view of one position's transition at one step.
struct StepDecomposition {
  double change_mass = 0.0;
  std::vector<double> destination;
  // False when change_mass == 0 and `destination` is only a placeholder.
  bool destination_used = true;
};

struct PositionTrace {
  std::size_t jump_count = 0;
  std::vector<std::size_t> jump_steps;
  // Cumulative change mass at each jump; strictly increasing.
  std::vector<double> hazard_locations;
  double total_mass = 0.0;
  // SHS phase; NaN for the standard scheduler.
  double phase = 0.0;
};

struct TrajectoryRecord {
  SequenceState final_state;
  std::vector<PositionTrace> positions;
  std::size_t degenerate_destinations = 0;
  std::size_t clamped_steps = 0;

  // True iff every position's jump bookkeeping is self-consistent.
  bool consistent() const;
};

// Throws ValidationError on a negative entry or a sum off by more than `tol`.
void validate_probability_vector(std::span<const double> v, double tol);

StepDecomposition decompose_kernel(std::span<const double> kernel_row, Token current);

std::vector<double> recompose_kernel(const StepDecomposition& d, Token current);

// Uniform over every token except `excluded` (which may be the mask sentinel).
std::vector<double> uniform_excluding(std::size_t vocab_size, Token excluded);

}  // namespace shs

#endif  // SHS_CORE_HPP_
