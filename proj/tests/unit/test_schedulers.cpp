#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "shs/processes.hpp"
#include "shs/rng.hpp"
#include "shs/schedulers.hpp"
#include "shs/trajectory.hpp"

using namespace shs;

TEST_CASE("randomized_round examples") {
  CHECK(randomized_round(2.3, 0.1) == 3);
  CHECK(randomized_round(2.3, 0.5) == 2);
  CHECK(randomized_round(2.0, 0.0) == 2);
  CHECK(randomized_round(0.0, 0.999) == 0);
  CHECK(randomized_round(0.7, 0.69) == 1);
  CHECK(randomized_round(0.7, 0.7) == 0);
  CHECK_THROWS_AS(randomized_round(-0.1, 0.5), DomainError);
  CHECK_THROWS_AS(randomized_round(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(randomized_round(1.0, -0.1), DomainError);
  CHECK_THROWS_AS(randomized_round(std::nan(""), 0.5), DomainError);
}

TEST_CASE("scheduler names round-trip") {
  CHECK(to_string(SchedulerKind::kShs) == "shs");
  CHECK(to_string(SchedulerKind::kStandard) == "standard");
  CHECK(parse_scheduler("shs") == SchedulerKind::kShs);
  CHECK(parse_scheduler("standard") == SchedulerKind::kStandard);
  CHECK_FALSE(parse_scheduler("bernoulli").has_value());
}

TEST_CASE("CompensatedSum keeps small increments") {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000000; ++i) s.add(1e-16);
  s.add(-1.0);
  CHECK(s.value() == doctest::Approx(1e-10).epsilon(1e-6));
}

TEST_CASE("shs_decide trace") {
  PhaseState st(std::vector<double>{0.5});
  CHECK_FALSE(shs_decide(st, 0, 0.4));
  CHECK(shs_decide(st, 0, 0.4));
  CHECK_FALSE(shs_decide(st, 0, 0.4));
  CHECK(st.cumulative_mass(0) == doctest::Approx(1.2));
  CHECK(st.boundary_index(0) == 1);
}

TEST_CASE("shs_decide edge masses") {
  SUBCASE("p = 1 always fires") {
    PhaseState st(std::vector<double>{0.25});
    for (int k = 0; k < 10; ++k) CHECK(shs_decide(st, 0, 1.0));
  }
  SUBCASE("p = 0 never fires") {
    PhaseState st(std::vector<double>{0.3});
    for (int k = 0; k < 10; ++k) CHECK_FALSE(shs_decide(st, 0, 0.0));
  }
  SUBCASE("ties cross") {
    PhaseState st(std::vector<double>{0.0});
    CHECK(shs_decide(st, 0, 0.0));
    PhaseState half(std::vector<double>{0.5});
    CHECK_FALSE(shs_decide(half, 0, 0.25));
    CHECK(shs_decide(half, 0, 0.25));
  }
  SUBCASE("invalid mass") {
    PhaseState st(std::vector<double>{0.5});
    CHECK_THROWS(shs_decide(st, 0, 1.5));
    CHECK_THROWS(shs_decide(st, 0, -0.1));
  }
}

TEST_CASE("shs jump totals equal randomized_round of the total mass") {
  for (std::uint64_t c = 0; c < 500; ++c) {
    RngStream rng({5, c, 0, StreamTag::kTest});
    const double theta = rng.uniform();
    PhaseState st(std::vector<double>{theta});
    CompensatedSum total;
    std::uint64_t jumps = 0;
    for (int k = 0; k < 50; ++k) {
      const double p = rng.uniform() < 0.1 ? (rng.uniform() < 0.5 ? 0.0 : 1.0) : rng.uniform();
      jumps += shs_decide(st, 0, p) ? 1 : 0;
      total.add(p);
    }
    REQUIRE(jumps == randomized_round(total.value(), theta));
  }
}

TEST_CASE("shs_init is deterministic and per position") {
  const auto a = shs_init(3, 99, 0);
  const auto b = shs_init(3, 99, 0);
  CHECK(a == b);
  CHECK(a.phase(0) != a.phase(1));
  CHECK_FALSE(a == shs_init(3, 99, 1));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.phase(i) >= 0.0);
    CHECK(a.phase(i) < 1.0);
    CHECK(a.phase(i) == RngStream({99, 0, static_cast<std::uint32_t>(i), StreamTag::kPhase}).uniform());
  }
}

TEST_CASE("standard_decide is Bernoulli(p)") {
  RngStream rng({3, 0, 0, StreamTag::kTest});
  constexpr int n = 200000;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += standard_decide(0.3, rng) ? 1 : 0;
  CHECK(std::abs(hits / double(n) - 0.3) < 5.0 * std::sqrt(0.21 / n));
  CHECK_FALSE(standard_decide(0.0, rng));
  CHECK(standard_decide(1.0, rng));
  CHECK_THROWS(standard_decide(1.1, rng));
}

TEST_CASE("sample_destination inverse CDF") {
  const std::vector<double> q{0.0, 0.25, 0.0, 0.75};
  CHECK(sample_destination(q, 0.0) == 1);
  CHECK(sample_destination(q, 0.2499) == 1);
  CHECK(sample_destination(q, 0.25) == 3);
  CHECK(sample_destination(q, 0.999999) == 3);
  // Sum a hair below 1: the fallback picks the last positive entry.
  const std::vector<double> short_q{0.5, 0.5 - 1e-15, 0.0};
  CHECK(sample_destination(short_q, 1.0 - 1e-17) == 1);
}

TEST_CASE("destinations are scheduler-invariant once a jump fires") {
  // Mass 1 on every step forces a jump under both schedulers, so the final
  // states must coincide draw for draw.
  const ScheduledMassProcess model(std::vector<double>(8, 1.0), 5, 6);
  const TimeGrid grid(8);
  for (std::uint64_t t = 0; t < 50; ++t) {
    const SequenceState init({0, 1, 2, 3, 4});
    const auto a = run_trajectory(model, SchedulerKind::kStandard, grid, init, 17, t);
    const auto b = run_trajectory(model, SchedulerKind::kShs, grid, init, 17, t);
    REQUIRE(a.final_state == b.final_state);
    for (std::size_t i = 0; i < 5; ++i) {
      REQUIRE(a.positions[i].jump_count == 8);
      REQUIRE(b.positions[i].jump_count == 8);
    }
  }
}
