#include "shs/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "shs/rng.hpp"

namespace shs {

DiscretePmf::DiscretePmf(std::vector<double> probabilities) : probs_(std::move(probabilities)) {
  if (probs_.empty()) throw ValidationError("pmf needs at least one support point");
  validate_probability_vector(probs_, kInternalTolerance * static_cast<double>(probs_.size()));
}

double DiscretePmf::mean() const noexcept {
  double m = 0.0;
  for (std::size_t j = 0; j < probs_.size(); ++j) m += static_cast<double>(j) * probs_[j];
  return m;
}

double DiscretePmf::variance() const noexcept { return central_moment(2); }

double DiscretePmf::central_moment(int order) const noexcept {
  const double mu = mean();
  double acc = 0.0;
  for (std::size_t j = 0; j < probs_.size(); ++j) {
    acc += std::pow(static_cast<double>(j) - mu, order) * probs_[j];
  }
  return acc;
}

DiscretePmf poisson_binomial_pmf(std::span<const double> masses) {
  if (masses.size() > 100000) throw DomainError("poisson_binomial_pmf: at most 1e5 masses");
  double mean = 0.0;
  double var = 0.0;
  for (double p : masses) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("poisson_binomial_pmf: mass outside [0, 1]");
    mean += p;
    var += p * (1.0 - p);
  }
  std::vector<double> pmf(masses.size() + 1, 0.0);
  pmf[0] = 1.0;
  for (std::size_t k = 0; k < masses.size(); ++k) {
    const double p = masses[k];
    // After k steps the support is {0..k}; update in place from the top.
    for (std::size_t j = k + 1; j > 0; --j) {
      pmf[j] = pmf[j] * (1.0 - p) + pmf[j - 1] * p;
    }
    pmf[0] *= 1.0 - p;
  }
  DiscretePmf out(std::move(pmf));
  const double scale = std::max(1.0, mean);
  if (std::abs(out.mean() - mean) > 1e-9 * scale ||
      std::abs(out.variance() - var) > 1e-9 * std::max(1.0, var)) {
    throw std::logic_error("poisson_binomial_pmf: moment identities violated");
  }
  return out;
}

NhppEvents nhpp_exact_events(const ExogenousRate& rate, std::uint64_t seed,
                             std::uint64_t trajectory) {
  NhppEvents ev;
  const double total = rate.cumulative(1.0);
  RngStream rng({seed, trajectory, 0, StreamTag::kOracle});
  double s = 0.0;
  while (true) {
    s += rng.exponential();
    if (s > total) break;
    ev.hazard_locations.push_back(s);
    ev.times.push_back(rate.inverse_cumulative(s));
  }
  return ev;
}

double gamma_cdf(unsigned shape, double x) {
  if (shape < 1) throw DomainError("gamma_cdf: shape must be >= 1");
  if (!(x >= 0.0)) throw DomainError("gamma_cdf: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  // For x < k the closed form 1 - e^{-x} sum_{j<k} x^j / j! cancels badly, so
  // sum the lower tail e^{-x} sum_{j>=k} x^j / j! directly.
  if (x < static_cast<double>(shape)) {
    double term = std::exp(-x);
    for (unsigned j = 1; j <= shape; ++j) term *= x / static_cast<double>(j);
    double sum = 0.0;
    for (unsigned j = shape; j < shape + 2000; ++j) {
      sum += term;
      term *= x / static_cast<double>(j + 1);
      if (term < 1e-17 * sum) break;
    }
    return std::min(1.0, sum);
  }
  double term = std::exp(-x);
  double upper = 0.0;
  for (unsigned j = 0; j < shape; ++j) {
    upper += term;
    term *= x / static_cast<double>(j + 1);
  }
  return std::clamp(1.0 - upper, 0.0, 1.0);
}

double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf) {
  if (sorted.size() < 10) throw DomainError("ks_statistic: need at least 10 samples");
  if (!std::is_sorted(sorted.begin(), sorted.end())) {
    throw ValidationError("ks_statistic: samples must be sorted");
  }
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double below = static_cast<double>(i) / n;
    const double above = static_cast<double>(i + 1) / n;
    d = std::max({d, above - f, f - below});
  }
  return std::min(d, 1.0);
}

double ks_critical_value(std::size_t n, double alpha) {
  if (n == 0) throw DomainError("ks_critical_value: n must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("ks_critical_value: alpha in (0, 1)");
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

double chi_square_sf(double statistic, std::size_t dof) {
  if (dof == 0) return 1.0;
  if (!(statistic > 0.0)) return 1.0;
  return boost::math::gamma_q(0.5 * static_cast<double>(dof), 0.5 * statistic);
}

namespace {

// Groups consecutive cells so every group's weight reaches `min_weight`; a
// light trailing group is merged into its predecessor.
std::vector<std::size_t> pooled_groups(std::span<const double> weights, double min_weight) {
  std::vector<std::size_t> group(weights.size(), 0);
  std::size_t g = 0;
  double acc = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    group[j] = g;
    acc += weights[j];
    if (acc >= min_weight) {
      ++g;
      acc = 0.0;
    }
  }
  if (g > 0) {
    for (auto& x : group) x = std::min(x, g - 1);
  }
  return group;
}

}  // namespace

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               std::span<const double> expected_probs, double min_expected) {
  if (observed.size() > expected_probs.size()) {
    throw ValidationError("chi_square_gof: observed counts outside the expected support");
  }
  double n = 0.0;
  for (auto c : observed) n += static_cast<double>(c);
  if (n == 0.0) throw DomainError("chi_square_gof: no observations");

  std::vector<double> expected(expected_probs.size());
  for (std::size_t j = 0; j < expected.size(); ++j) expected[j] = n * expected_probs[j];
  const auto group = pooled_groups(expected, min_expected);
  const std::size_t groups = group.empty() ? 0 : group.back() + 1;

  std::vector<double> obs_g(groups, 0.0);
  std::vector<double> exp_g(groups, 0.0);
  for (std::size_t j = 0; j < expected.size(); ++j) {
    exp_g[group[j]] += expected[j];
    if (j < observed.size()) obs_g[group[j]] += static_cast<double>(observed[j]);
  }
  ChiSquareResult r;
  for (std::size_t g = 0; g < groups; ++g) {
    if (exp_g[g] > 0.0) {
      const double diff = obs_g[g] - exp_g[g];
      r.statistic += diff * diff / exp_g[g];
    } else if (obs_g[g] > 0.0) {
      r.statistic = std::numeric_limits<double>::infinity();
    }
  }
  r.dof = groups > 0 ? groups - 1 : 0;
  r.p_value = std::isinf(r.statistic) ? 0.0 : chi_square_sf(r.statistic, r.dof);
  return r;
}

ChiSquareResult chi_square_homogeneity(std::span<const std::uint64_t> a,
                                       std::span<const std::uint64_t> b, double min_expected) {
  if (a.size() != b.size()) throw ValidationError("chi_square_homogeneity: size mismatch");
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    na += static_cast<double>(a[j]);
    nb += static_cast<double>(b[j]);
  }
  if (na == 0.0 || nb == 0.0) throw DomainError("chi_square_homogeneity: empty sample");
  const double n = na + nb;

  // Pool on the smaller sample's expected counts so every cell of both rows
  // meets the threshold.
  std::vector<double> weight(a.size());
  const double smaller = std::min(na, nb) / n;
  for (std::size_t j = 0; j < a.size(); ++j) {
    weight[j] = static_cast<double>(a[j] + b[j]) * smaller;
  }
  const auto group = pooled_groups(weight, min_expected);
  const std::size_t groups = group.empty() ? 0 : group.back() + 1;
  std::vector<double> ga(groups, 0.0);
  std::vector<double> gb(groups, 0.0);
  for (std::size_t j = 0; j < a.size(); ++j) {
    ga[group[j]] += static_cast<double>(a[j]);
    gb[group[j]] += static_cast<double>(b[j]);
  }
  ChiSquareResult r;
  std::size_t used = 0;
  for (std::size_t g = 0; g < groups; ++g) {
    const double col = ga[g] + gb[g];
    if (col == 0.0) continue;
    ++used;
    const double ea = col * na / n;
    const double eb = col * nb / n;
    r.statistic += (ga[g] - ea) * (ga[g] - ea) / ea + (gb[g] - eb) * (gb[g] - eb) / eb;
  }
  r.dof = used > 0 ? used - 1 : 0;
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

double zero_edit_lower_bound(double mass) {
  if (!(mass >= 0.0)) throw DomainError("zero_edit_lower_bound: mass must be >= 0");
  return std::max(0.0, 1.0 - mass);
}

}  // namespace shs
