#ifndef SHS_STATS_HPP_
#define SHS_STATS_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>

namespace shs {

// Two-sided standard normal quantiles.
inline constexpr double kZ99 = 2.5758293035489004;

// Exact integer moment accumulator; order of accumulation cannot change the
// result, which keeps parallel reductions byte-reproducible.
struct CountMoments {
  std::uint64_t n = 0;
  std::uint64_t sum = 0;
  std::uint64_t sum_sq = 0;

  void add(std::uint64_t x) noexcept {
    ++n;
    sum += x;
    sum_sq += x * x;
  }
  void merge(const CountMoments& o) noexcept {
    n += o.n;
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
  double mean() const noexcept {
    return n ? static_cast<double>(sum) / static_cast<double>(n)
             : std::numeric_limits<double>::quiet_NaN();
  }
  // Unbiased sample variance.
  double variance() const noexcept {
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const long double dn = static_cast<long double>(n);
    const long double s = static_cast<long double>(sum);
    const long double ss = static_cast<long double>(sum_sq);
    return static_cast<double>((ss - s * s / dn) / (dn - 1.0L));
  }
};

struct MeanEstimate {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double std_error = std::numeric_limits<double>::quiet_NaN();
  std::size_t n = 0;

  double lower(double z) const noexcept { return mean - z * std_error; }
  double upper(double z) const noexcept { return mean + z * std_error; }
};

// Sample mean and its standard error; summed in index order.
MeanEstimate estimate_mean(std::span<const double> xs);

// Standard error of the sample variance for a law with variance `var` and
// fourth central moment `mu4`, at n samples.
inline double variance_std_error(double var, double mu4, std::size_t n) {
  const double dn = static_cast<double>(n);
  return std::sqrt((mu4 - var * var * (dn - 3.0) / (dn - 1.0)) / dn);
}

}  // namespace shs

#endif  // SHS_STATS_HPP_
