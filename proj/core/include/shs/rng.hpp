#ifndef SHS_RNG_HPP_
#define SHS_RNG_HPP_

#include <array>
#include <cstdint>

namespace shs {

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
// Stateless: output is a pure function of (key, counter).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

// Independent draw purposes. Separating them keeps, e.g., the destination
// draws of the two schedulers aligned even though only the standard
// scheduler consumes Bernoulli draws.
enum class StreamTag : std::uint8_t {
  kPhase = 1,
  kBernoulli = 2,
  kDestination = 3,
  kInit = 4,
  kBlacklist = 5,
  kOracle = 6,
  kRounding = 7,
  kTest = 8,
  kTarget = 9,
};

struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t trajectory = 0;
  std::uint32_t position = 0;  // < 2^24
  StreamTag tag = StreamTag::kTest;
};

// A sequence of uniforms addressed by (seed, trajectory, position, tag, index).
// The same key always yields the same sequence, independent of how work is
// scheduled across threads.
class RngStream {
 public:
  explicit RngStream(const StreamKey& key) noexcept;

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Exp(1).
  double exponential() noexcept;
  bool bernoulli(double p) noexcept { return uniform() < p; }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept;

  std::uint64_t draws() const noexcept { return index_; }

 private:
  std::uint64_t next_bits() noexcept;

  PhiloxKey key_;
  std::uint32_t word1_;
  std::uint32_t word2_;
  std::uint32_t word3_;
  std::uint64_t index_ = 0;
};

}  // namespace shs

#endif  // SHS_RNG_HPP_
