#ifndef SHS_CONSTRAINTS_HPP_
#define SHS_CONSTRAINTS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "shs/core.hpp"

namespace shs {

// A uniformly sampled forbidden token set of size floor(ratio * V).
class Blacklist {
 public:
  // Empty blacklist over `vocab`.
  explicit Blacklist(const Vocabulary& vocab);
  Blacklist(const Vocabulary& vocab, double ratio, std::vector<Token> forbidden);

  double ratio() const noexcept { return ratio_; }
  std::size_t vocab_size() const noexcept { return allowed_mask_.size(); }
  // Sorted ascending.
  std::span<const Token> forbidden() const noexcept { return forbidden_; }
  // Sorted ascending.
  std::span<const Token> allowed() const noexcept { return allowed_; }
  bool is_allowed(Token t) const noexcept {
    return t >= 0 && static_cast<std::size_t>(t) < allowed_mask_.size() &&
           allowed_mask_[static_cast<std::size_t>(t)] != 0;
  }

 private:
  double ratio_ = 0.0;
  std::vector<Token> forbidden_;
  std::vector<Token> allowed_;
  std::vector<std::uint8_t> allowed_mask_;
};

// floor(ratio * V), tolerant of ratio * V landing a few ulps under an integer.
std::size_t blacklist_size(std::size_t vocab_size, double ratio);

Blacklist sample_blacklist(const Vocabulary& vocab, double ratio, std::uint64_t seed);

// Each position i.i.d. uniform over the allowed tokens.
SequenceState safe_init(const Blacklist& blacklist, std::size_t length, std::uint64_t seed,
                        std::uint64_t trajectory = 0);

// q restricted to the allowed set and renormalized; nullopt when q puts no
// mass on any allowed token.
std::optional<std::vector<double>> filter_destination(std::span<const double> q,
                                                      const Blacklist& blacklist);

// In-place variant for the sampling loop. Returns false (leaving `q`
// unspecified) when the filtered destination is degenerate.
bool filter_destination_in_place(std::vector<double>& q, const Blacklist& blacklist);

// Checks that the filtered kernel keeps the stay probability at 1 - p and
// distributes exactly p over the allowed replacements (to 1e-12).
bool filtered_kernel_check(const StepDecomposition& d, const Blacklist& blacklist, Token current);

}  // namespace shs

#endif  // SHS_CONSTRAINTS_HPP_
