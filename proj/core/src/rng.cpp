#include "shs/rng.hpp"

#include <cmath>

namespace shs {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) noexcept {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(prod >> 32);
  lo = static_cast<std::uint32_t>(prod);
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

RngStream::RngStream(const StreamKey& key) noexcept
    : key_{static_cast<std::uint32_t>(key.seed), static_cast<std::uint32_t>(key.seed >> 32)},
      word1_((key.position & 0x00FFFFFFu) | (static_cast<std::uint32_t>(key.tag) << 24)),
      word2_(static_cast<std::uint32_t>(key.trajectory)),
      word3_(static_cast<std::uint32_t>(key.trajectory >> 32)) {}

std::uint64_t RngStream::next_bits() noexcept {
  // Index wraps after 2^32 draws per stream.
  const PhiloxCounter out =
      philox4x32_10({static_cast<std::uint32_t>(index_), word1_, word2_, word3_}, key_);
  ++index_;
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

double RngStream::uniform() noexcept {
  return static_cast<double>(next_bits() >> 11) * 0x1.0p-53;
}

double RngStream::exponential() noexcept {
  // 1 - U lies in (0, 1], so the log is finite.
  return -std::log1p(-uniform());
}

std::uint64_t RngStream::below(std::uint64_t n) noexcept {
  // Lemire's nearly-divisionless bounded draw (rejection keeps it exact).
  std::uint64_t x = next_bits();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = next_bits();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace shs
