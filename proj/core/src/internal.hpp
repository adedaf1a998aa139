#ifndef SHS_SRC_INTERNAL_HPP_
#define SHS_SRC_INTERNAL_HPP_

#include <string>

#include "shs/harness.hpp"
#include "shs/processes.hpp"

namespace shs::detail {

ExogenousRate build_rate(const RateConfig& r);

// Shortest round-trip decimal form; "NaN" for NaN.
std::string format_double(double x);

}  // namespace shs::detail

#endif  // SHS_SRC_INTERNAL_HPP_
