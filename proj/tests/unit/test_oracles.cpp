#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "shs/oracles.hpp"
#include "shs/processes.hpp"
#include "shs/rng.hpp"
#include "shs/stats.hpp"

using namespace shs;

TEST_CASE("poisson-binomial examples") {
  const auto a = poisson_binomial_pmf(std::vector<double>{0.5, 0.5});
  CHECK(a[0] == doctest::Approx(0.25));
  CHECK(a[1] == doctest::Approx(0.5));
  CHECK(a[2] == doctest::Approx(0.25));
  CHECK(a[3] == 0.0);

  const auto b = poisson_binomial_pmf(std::vector<double>{0.2, 0.7, 1.0});
  CHECK(b[0] == 0.0);
  CHECK(b[1] == doctest::Approx(0.8 * 0.3));
  CHECK(b[3] == doctest::Approx(0.2 * 0.7));

  const auto empty = poisson_binomial_pmf(std::vector<double>{});
  CHECK(empty.support_size() == 1);
  CHECK(empty[0] == 1.0);

  const auto c = poisson_binomial_pmf(std::vector<double>(64, 1.0 / 16.0));
  CHECK(c[0] == doctest::Approx(0.0160754).epsilon(1e-5));
  CHECK(c.mean() == doctest::Approx(4.0));
  CHECK(c.variance() == doctest::Approx(3.75));

  CHECK_THROWS(poisson_binomial_pmf(std::vector<double>{0.5, 1.5}));
}

TEST_CASE("poisson-binomial moments match the Bernoulli sums") {
  for (std::size_t n : {1u, 7u, 64u, 300u, 1024u}) {
    RngStream rng({13, n, 0, StreamTag::kTest});
    std::vector<double> p(n);
    double mu = 0.0;
    double var = 0.0;
    double mu3 = 0.0;
    for (auto& x : p) {
      x = rng.uniform();
      mu += x;
      var += x * (1 - x);
      mu3 += x * (1 - x) * (1 - 2 * x);
    }
    const auto pmf = poisson_binomial_pmf(p);
    double total = 0.0;
    for (double q : pmf.probabilities()) {
      REQUIRE(q >= 0.0);
      total += q;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(pmf.mean() - mu) <= 1e-9 * std::max(1.0, mu));
    CHECK(std::abs(pmf.variance() - var) <= 1e-9 * std::max(1.0, var));
    CHECK(std::abs(pmf.central_moment(3) - mu3) <= 1e-8 * std::max(1.0, std::abs(mu3)));
  }
}

TEST_CASE("gamma_cdf") {
  CHECK(gamma_cdf(1, 1.0) == doctest::Approx(0.632121).epsilon(1e-6));
  CHECK(gamma_cdf(2, 3.0) == doctest::Approx(0.800852).epsilon(1e-6));
  CHECK(gamma_cdf(3, 3.0) == doctest::Approx(0.576810).epsilon(1e-6));
  CHECK(gamma_cdf(5, 5.0) == doctest::Approx(0.559507).epsilon(1e-6));
  CHECK(gamma_cdf(4, 0.0) == 0.0);
  double prev = 0.0;
  for (int j = 1; j <= 400; ++j) {
    const double v = gamma_cdf(3, j * 0.1);
    REQUIRE(v >= prev);
    prev = v;
  }
  CHECK(gamma_cdf(3, 60.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS(gamma_cdf(0, 1.0));
}

TEST_CASE("ks statistic and critical value") {
  const auto uniform_cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
  std::vector<double> grid(100);
  for (int i = 0; i < 100; ++i) grid[i] = (i + 0.5) / 100.0;
  CHECK(ks_statistic(grid, uniform_cdf) == doctest::Approx(0.005));

  const std::vector<double> constant(20, 0.5);
  CHECK(ks_statistic(constant, uniform_cdf) >= 0.5);

  const std::vector<double> below(20, -1.0);
  CHECK(ks_statistic(below, uniform_cdf) == doctest::Approx(1.0));

  CHECK(ks_critical_value(10000, 0.01) == doctest::Approx(0.016276).epsilon(1e-4));
  CHECK_THROWS(ks_statistic(std::vector<double>(5, 0.1), uniform_cdf));
}

TEST_CASE("chi-square helpers") {
  CHECK(chi_square_sf(0.0, 3) == 1.0);
  CHECK(chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));

  const std::vector<std::uint64_t> obs{250, 500, 250};
  const std::vector<double> probs{0.25, 0.5, 0.25};
  const auto fit = chi_square_gof(obs, probs);
  CHECK(fit.statistic == doctest::Approx(0.0));
  CHECK(fit.dof == 2);
  CHECK(fit.p_value == doctest::Approx(1.0));

  // Light tail cells are pooled into their neighbour.
  const std::vector<std::uint64_t> tail_obs{500, 498, 1, 1};
  const std::vector<double> tail_probs{0.5, 0.498, 0.001, 0.001};
  CHECK(chi_square_gof(tail_obs, tail_probs).dof == 1);

  const std::vector<std::uint64_t> bad{900, 50, 50};
  CHECK(chi_square_gof(bad, probs).p_value < 1e-10);

  const std::vector<std::uint64_t> a{100, 200, 300};
  const std::vector<std::uint64_t> b{200, 400, 600};
  const auto h = chi_square_homogeneity(a, b);
  CHECK(h.statistic == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(h.dof == 2);
}

TEST_CASE("exact NHPP sampler") {
  SUBCASE("zero rate produces no events") {
    const auto ev = nhpp_exact_events(ExogenousRate::constant(0.0), 1, 0);
    CHECK(ev.times.empty());
  }
  SUBCASE("event count has mean Lambda(1)") {
    const auto rate = ExogenousRate::linear(1.0, 4.0);
    CountMoments m;
    constexpr int n = 20000;
    for (int t = 0; t < n; ++t) {
      const auto ev = nhpp_exact_events(rate, 2, t);
      REQUIRE(ev.times.size() == ev.hazard_locations.size());
      REQUIRE(std::is_sorted(ev.times.begin(), ev.times.end()));
      for (std::size_t j = 0; j < ev.times.size(); ++j) {
        REQUIRE(ev.times[j] <= 1.0);
        REQUIRE(std::abs(rate.cumulative(ev.times[j]) - ev.hazard_locations[j]) < 1e-9);
      }
      m.add(ev.times.size());
    }
    CHECK(std::abs(m.mean() - 3.0) < 5.0 * std::sqrt(3.0 / n));
    CHECK(std::abs(m.variance() - 3.0) < 0.15);
  }
}

TEST_CASE("zero-edit lower bound") {
  CHECK(zero_edit_lower_bound(0.0) == 1.0);
  CHECK(zero_edit_lower_bound(0.6) == doctest::Approx(0.4));
  CHECK(zero_edit_lower_bound(1.0) == 0.0);
  CHECK(zero_edit_lower_bound(4.0) == 0.0);
}

TEST_CASE("stats helpers") {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  const auto e = estimate_mean(xs);
  CHECK(e.mean == 2.5);
  CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CountMoments m;
  for (std::uint64_t x : {1u, 2u, 3u, 4u}) m.add(x);
  CHECK(m.variance() == doctest::Approx(5.0 / 3.0));
  CHECK(std::isnan(CountMoments{}.mean()));
}
