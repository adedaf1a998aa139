#include "shs/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shs/rng.hpp"

namespace shs {

Blacklist::Blacklist(const Vocabulary& vocab) : Blacklist(vocab, 0.0, {}) {}

Blacklist::Blacklist(const Vocabulary& vocab, double ratio, std::vector<Token> forbidden)
    : ratio_(ratio), forbidden_(std::move(forbidden)), allowed_mask_(vocab.size(), 1) {
  std::sort(forbidden_.begin(), forbidden_.end());
  if (std::adjacent_find(forbidden_.begin(), forbidden_.end()) != forbidden_.end()) {
    throw ValidationError("blacklist contains duplicate tokens");
  }
  for (Token t : forbidden_) {
    if (!vocab.contains(t)) throw ValidationError("blacklisted token outside vocabulary");
    allowed_mask_[static_cast<std::size_t>(t)] = 0;
  }
  for (std::size_t v = 0; v < vocab.size(); ++v) {
    if (allowed_mask_[v]) allowed_.push_back(static_cast<Token>(v));
  }
  if (allowed_.empty()) throw ValidationError("blacklist leaves no allowed token");
}

std::size_t blacklist_size(std::size_t vocab_size, double ratio) {
  if (!(ratio >= 0.0 && ratio < 1.0)) throw DomainError("blacklist ratio must lie in [0, 1)");
  return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(vocab_size) + 1e-9));
}

Blacklist sample_blacklist(const Vocabulary& vocab, double ratio, std::uint64_t seed) {
  const std::size_t V = vocab.size();
  const std::size_t count = blacklist_size(V, ratio);
  if (count + 2 > V) {
    throw DomainError("blacklist ratio leaves fewer than 2 allowed tokens");
  }
  // Partial Fisher-Yates: the first `count` slots are a uniform subset.
  std::vector<Token> perm(V);
  std::iota(perm.begin(), perm.end(), Token{0});
  RngStream rng({seed, 0, 0, StreamTag::kBlacklist});
  for (std::size_t j = 0; j < count; ++j) {
    const auto pick = j + static_cast<std::size_t>(rng.below(V - j));
    std::swap(perm[j], perm[pick]);
  }
  perm.resize(count);
  return Blacklist(vocab, ratio, std::move(perm));
}

SequenceState safe_init(const Blacklist& blacklist, std::size_t length, std::uint64_t seed,
                        std::uint64_t trajectory) {
  const auto allowed = blacklist.allowed();
  std::vector<Token> tokens(length);
  for (std::size_t i = 0; i < length; ++i) {
    RngStream rng({seed, trajectory, static_cast<std::uint32_t>(i), StreamTag::kInit});
    tokens[i] = allowed[static_cast<std::size_t>(rng.below(allowed.size()))];
  }
  return SequenceState(std::move(tokens));
}

bool filter_destination_in_place(std::vector<double>& q, const Blacklist& blacklist) {
  double kept = 0.0;
  for (std::size_t v = 0; v < q.size(); ++v) {
    if (blacklist.is_allowed(static_cast<Token>(v))) {
      kept += q[v];
    } else {
      q[v] = 0.0;
    }
  }
  if (!(kept > 0.0)) return false;
  for (double& w : q) w /= kept;
  return true;
}

std::optional<std::vector<double>> filter_destination(std::span<const double> q,
                                                      const Blacklist& blacklist) {
  if (q.size() != blacklist.vocab_size()) {
    throw ValidationError("destination and blacklist disagree on vocabulary size");
  }
  validate_probability_vector(q, kInputTolerance);
  std::vector<double> out(q.begin(), q.end());
  if (!filter_destination_in_place(out, blacklist)) return std::nullopt;
  return out;
}

bool filtered_kernel_check(const StepDecomposition& d, const Blacklist& blacklist,
                           Token current) {
  const double p = d.change_mass;
  if (p == 0.0) return true;
  const auto filtered = filter_destination(d.destination, blacklist);
  if (!filtered) return false;
  for (Token t : blacklist.forbidden()) {
    if ((*filtered)[static_cast<std::size_t>(t)] != 0.0) return false;
  }
  StepDecomposition fd{p, *filtered, true};
  const auto row = recompose_kernel(fd, current);
  double moved = 0.0;
  for (std::size_t v = 0; v < row.size(); ++v) {
    if (static_cast<Token>(v) != current) moved += row[v];
  }
  const double stay = row[static_cast<std::size_t>(current)];
  return std::abs(stay - (1.0 - p)) <= kInternalTolerance &&
         std::abs(moved - p) <= kInternalTolerance;
}

}  // namespace shs
