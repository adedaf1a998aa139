#include "shs/stats.hpp"

namespace shs {

MeanEstimate estimate_mean(std::span<const double> xs) {
  MeanEstimate e;
  e.n = xs.size();
  if (xs.empty()) return e;
  double sum = 0.0;
  for (double x : xs) sum += x;
  e.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return e;
  double ss = 0.0;
  for (double x : xs) ss += (x - e.mean) * (x - e.mean);
  const double var = ss / static_cast<double>(xs.size() - 1);
  e.std_error = std::sqrt(var / static_cast<double>(xs.size()));
  return e;
}

}  // namespace shs
