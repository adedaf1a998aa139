#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "shs/rng.hpp"

using namespace shs;

TEST_CASE("philox4x32-10 known-answer vectors") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
        PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                      {0xffffffffu, 0xffffffffu}) ==
        PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                      {0xa4093822u, 0x299f31d0u}) ==
        PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and keyed") {
  RngStream a({42, 7, 3, StreamTag::kPhase});
  RngStream b({42, 7, 3, StreamTag::kPhase});
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  CHECK(a.draws() == 100);

  std::set<double> firsts;
  for (auto key : {StreamKey{42, 7, 3, StreamTag::kPhase}, StreamKey{43, 7, 3, StreamTag::kPhase},
                   StreamKey{42, 8, 3, StreamTag::kPhase}, StreamKey{42, 7, 4, StreamTag::kPhase},
                   StreamKey{42, 7, 3, StreamTag::kBernoulli}}) {
    firsts.insert(RngStream(key).uniform());
  }
  CHECK(firsts.size() == 5);
}

TEST_CASE("uniform, exponential and bounded draws stay in range") {
  RngStream rng({1, 0, 0, StreamTag::kTest});
  double sum = 0.0;
  double exp_sum = 0.0;
  std::vector<int> counts(7, 0);
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    const double e = rng.exponential();
    REQUIRE(e >= 0.0);
    exp_sum += e;
    const auto k = rng.below(7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  // Means within ~5 standard errors.
  CHECK(std::abs(sum / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(exp_sum / n - 1.0) < 5.0 / std::sqrt(n));
  for (int c : counts) CHECK(std::abs(c - n / 7.0) < 5.0 * std::sqrt(n / 7.0));
}
