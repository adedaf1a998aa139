#ifndef SHS_ORACLES_HPP_
#define SHS_ORACLES_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "shs/processes.hpp"

namespace shs {

// Probabilities over {0, ..., n}.
class DiscretePmf {
 public:
  explicit DiscretePmf(std::vector<double> probabilities);

  std::size_t support_size() const noexcept { return probs_.size(); }
  double operator[](std::size_t j) const { return j < probs_.size() ? probs_[j] : 0.0; }
  std::span<const double> probabilities() const noexcept { return probs_; }

  double mean() const noexcept;
  double variance() const noexcept;
  double central_moment(int order) const noexcept;

 private:
  std::vector<double> probs_;
};

// Law of a sum of independent Bernoulli(p_k), by the convolution recurrence.
DiscretePmf poisson_binomial_pmf(std::span<const double> masses);

struct NhppEvents {
  std::vector<double> times;
  // Cumulative hazard at each event: partial sums of Exp(1) increments.
  std::vector<double> hazard_locations;
};

// Exact inhomogeneous Poisson process on [0, 1] by hazard inversion.
NhppEvents nhpp_exact_events(const ExogenousRate& rate, std::uint64_t seed,
                             std::uint64_t trajectory = 0);

// Erlang CDF: P(Gamma(k, 1) <= x) for integer shape k >= 1.
double gamma_cdf(unsigned shape, double x);

// Kolmogorov-Smirnov sup distance between the empirical CDF of `sorted`
// (ascending) and `cdf`.
double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf);

// Asymptotic one-sample critical value sqrt(-ln(alpha / 2) / 2) / sqrt(n).
double ks_critical_value(std::size_t n, double alpha);

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

// Goodness of fit of `observed` counts to `expected_probs`. Adjacent cells
// are pooled left to right until each expects at least `min_expected`.
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               std::span<const double> expected_probs,
                               double min_expected = 5.0);

// Two-sample homogeneity test on paired histograms. Cells pooled as above
// using the combined counts.
ChiSquareResult chi_square_homogeneity(std::span<const std::uint64_t> a,
                                       std::span<const std::uint64_t> b,
                                       double min_expected = 5.0);

// Survival function of the chi-square distribution.
double chi_square_sf(double statistic, std::size_t dof);

// max(0, 1 - S): the least achievable P(J = 0) for any integer J with E[J] = S.
double zero_edit_lower_bound(double mass);

}  // namespace shs

#endif  // SHS_ORACLES_HPP_
