#include "shs/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace shs {

Vocabulary::Vocabulary(std::size_t size) : size_(size) {
  if (size < 2) {
    throw ValidationError("vocabulary needs at least 2 tokens");
  }
}

void SequenceState::validate(const Vocabulary& vocab, bool allow_mask) const {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    const Token t = tokens_[i];
    if (vocab.contains(t)) continue;
    if (allow_mask && t == kMaskToken) continue;
    std::ostringstream msg;
    msg << "token " << t << " at position " << i << " outside vocabulary of size "
        << vocab.size();
    throw ValidationError(msg.str());
  }
}

std::size_t SequenceState::count_masked() const noexcept {
  return static_cast<std::size_t>(std::count(tokens_.begin(), tokens_.end(), kMaskToken));
}

TimeGrid::TimeGrid(std::size_t steps) : steps_(steps) {
  if (steps == 0) {
    throw ValidationError("time grid needs at least one step");
  }
}

bool TrajectoryRecord::consistent() const {
  for (const auto& p : positions) {
    if (p.jump_steps.size() != p.jump_count) return false;
    if (p.hazard_locations.size() != p.jump_count) return false;
    for (std::size_t j = 1; j < p.hazard_locations.size(); ++j) {
      if (!(p.hazard_locations[j] > p.hazard_locations[j - 1])) return false;
    }
  }
  return true;
}

void validate_probability_vector(std::span<const double> v, double tol) {
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0) || !std::isfinite(v[i])) {
      std::ostringstream msg;
      msg << "probability entry " << i << " is " << v[i];
      throw ValidationError(msg.str());
    }
    sum += v[i];
  }
  if (std::abs(sum - 1.0) > tol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "probability vector sums to " << sum;
    throw ValidationError(msg.str());
  }
}

std::vector<double> uniform_excluding(std::size_t vocab_size, Token excluded) {
  const bool inside = excluded >= 0 && static_cast<std::size_t>(excluded) < vocab_size;
  const double w = 1.0 / static_cast<double>(inside ? vocab_size - 1 : vocab_size);
  std::vector<double> q(vocab_size, w);
  if (inside) q[static_cast<std::size_t>(excluded)] = 0.0;
  return q;
}

StepDecomposition decompose_kernel(std::span<const double> kernel_row, Token current) {
  if (current < 0 || static_cast<std::size_t>(current) >= kernel_row.size()) {
    throw ValidationError("current token outside kernel row");
  }
  if (kernel_row.size() < 2) {
    throw ValidationError("kernel row needs at least 2 entries");
  }
  validate_probability_vector(kernel_row, kInputTolerance);

  const auto cur = static_cast<std::size_t>(current);
  StepDecomposition d;
  // Mass off the diagonal, summed directly rather than 1 - P(stay) so that a
  // row like [1 - 1e-17, 1e-17] does not lose its change mass.
  double off = 0.0;
  for (std::size_t v = 0; v < kernel_row.size(); ++v) {
    if (v != cur) off += kernel_row[v];
  }
  d.change_mass = std::clamp(off, 0.0, 1.0);
  if (off == 0.0) {
    d.destination = uniform_excluding(kernel_row.size(), current);
    d.destination_used = false;
    return d;
  }
  d.destination.assign(kernel_row.size(), 0.0);
  for (std::size_t v = 0; v < kernel_row.size(); ++v) {
    if (v != cur) d.destination[v] = kernel_row[v] / off;
  }
  return d;
}

std::vector<double> recompose_kernel(const StepDecomposition& d, Token current) {
  if (current < 0 || static_cast<std::size_t>(current) >= d.destination.size()) {
    throw ValidationError("current token outside destination vector");
  }
  const auto cur = static_cast<std::size_t>(current);
  std::vector<double> row(d.destination.size(), 0.0);
  for (std::size_t v = 0; v < row.size(); ++v) {
    row[v] = v == cur ? 1.0 - d.change_mass : d.change_mass * d.destination[v];
  }
  return row;
}

}  // namespace shs
