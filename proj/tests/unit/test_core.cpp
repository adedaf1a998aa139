#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "shs/core.hpp"
#include "shs/rng.hpp"

using namespace shs;

TEST_CASE("decompose_kernel splits stay and replace mass") {
  SUBCASE("generic row") {
    const std::vector<double> row{0.7, 0.2, 0.1};
    const auto d = decompose_kernel(row, 0);
    CHECK(d.change_mass == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(d.destination[0] == 0.0);
    CHECK(d.destination[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(d.destination[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(d.destination_used);
  }
  SUBCASE("identity row leaves the destination unused") {
    const std::vector<double> row{1.0, 0.0, 0.0};
    const auto d = decompose_kernel(row, 0);
    CHECK(d.change_mass == 0.0);
    CHECK_FALSE(d.destination_used);
    CHECK(d.destination[0] == 0.0);
    CHECK(d.destination[1] == doctest::Approx(0.5));
  }
  SUBCASE("forced change") {
    const std::vector<double> row{0.0, 0.5, 0.5};
    const auto d = decompose_kernel(row, 0);
    CHECK(d.change_mass == 1.0);
    CHECK(d.destination == std::vector<double>{0.0, 0.5, 0.5});
  }
}

TEST_CASE("decompose_kernel rejects malformed rows") {
  CHECK_THROWS_AS(decompose_kernel(std::vector<double>{0.5, 0.6}, 0), ValidationError);
  CHECK_THROWS_AS(decompose_kernel(std::vector<double>{1.2, -0.2}, 0), ValidationError);
  CHECK_THROWS_AS(decompose_kernel(std::vector<double>{0.5, 0.5}, 2), ValidationError);
  CHECK_THROWS_AS(decompose_kernel(std::vector<double>{1.0}, 0), ValidationError);
  // Within the 1e-9 input tolerance is accepted.
  CHECK_NOTHROW(decompose_kernel(std::vector<double>{0.5, 0.5 + 5e-10}, 0));
}

TEST_CASE("recompose_kernel inverts the decomposition") {
  StepDecomposition d{0.3, {0.0, 2.0 / 3.0, 1.0 / 3.0}, true};
  const auto row = recompose_kernel(d, 0);
  CHECK(row[0] == doctest::Approx(0.7));
  CHECK(row[1] == doctest::Approx(0.2));
  CHECK(row[2] == doctest::Approx(0.1));

  StepDecomposition stay{0.0, {0.5, 0.0, 0.5}, false};
  CHECK(recompose_kernel(stay, 1) == std::vector<double>{0.0, 1.0, 0.0});
}

TEST_CASE("decompose(recompose(d)) == d on random decompositions") {
  for (std::uint64_t c = 0; c < 2000; ++c) {
    RngStream rng({11, c, 0, StreamTag::kTest});
    const std::size_t V = 2 + rng.below(40);
    const auto cur = static_cast<Token>(rng.below(V));
    std::vector<double> q(V);
    double sum = 0.0;
    for (std::size_t v = 0; v < V; ++v) {
      q[v] = static_cast<Token>(v) == cur ? 0.0 : rng.exponential();
      sum += q[v];
    }
    for (auto& x : q) x /= sum;
    const double p = std::max(1e-6, rng.uniform());
    const StepDecomposition d{p, q, true};
    const auto back = decompose_kernel(recompose_kernel(d, cur), cur);
    REQUIRE(std::abs(back.change_mass - p) <= 1e-12);
    double qsum = 0.0;
    for (std::size_t v = 0; v < V; ++v) {
      REQUIRE(std::abs(back.destination[v] - q[v]) <= 1e-12);
      qsum += back.destination[v];
    }
    REQUIRE(back.destination[static_cast<std::size_t>(cur)] == 0.0);
    REQUIRE(std::abs(qsum - 1.0) <= 1e-12);
  }
}

TEST_CASE("domain types enforce their invariants") {
  CHECK_THROWS_AS(Vocabulary(1), ValidationError);
  CHECK(Vocabulary(2).size() == 2);
  CHECK_THROWS_AS(TimeGrid(0), ValidationError);

  const TimeGrid grid(4);
  CHECK(grid.step_size() == 0.25);
  CHECK(grid.time(0) == 0.0);
  CHECK(grid.time(4) == 1.0);

  const Vocabulary vocab(5);
  CHECK_NOTHROW(SequenceState({0, 4, 2}).validate(vocab, false));
  CHECK_THROWS_AS(SequenceState({0, 5}).validate(vocab, false), ValidationError);
  CHECK_THROWS_AS(SequenceState({kMaskToken}).validate(vocab, false), ValidationError);
  CHECK_NOTHROW(SequenceState({kMaskToken, 1}).validate(vocab, true));
  CHECK(SequenceState::all_masked(3).count_masked() == 3);
}

TEST_CASE("TrajectoryRecord consistency") {
  TrajectoryRecord r;
  r.positions.resize(1);
  r.positions[0].jump_count = 2;
  r.positions[0].jump_steps = {1, 3};
  r.positions[0].hazard_locations = {0.4, 1.2};
  CHECK(r.consistent());
  r.positions[0].hazard_locations = {0.4, 0.4};
  CHECK_FALSE(r.consistent());
  r.positions[0].hazard_locations = {0.4};
  CHECK_FALSE(r.consistent());
}

TEST_CASE("uniform_excluding") {
  const auto q = uniform_excluding(4, 2);
  CHECK(q == std::vector<double>{1.0 / 3, 1.0 / 3, 0.0, 1.0 / 3});
  const auto m = uniform_excluding(4, kMaskToken);
  CHECK(m == std::vector<double>{0.25, 0.25, 0.25, 0.25});
}
