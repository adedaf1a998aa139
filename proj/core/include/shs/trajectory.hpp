#ifndef SHS_TRAJECTORY_HPP_
#define SHS_TRAJECTORY_HPP_

#include <cstdint>
#include <functional>

#include "shs/constraints.hpp"
#include "shs/core.hpp"
#include "shs/processes.hpp"
#include "shs/schedulers.hpp"

namespace shs {

struct TrajectoryOptions {
  // When set, destinations are filtered to the allowed set before sampling.
  const Blacklist* blacklist = nullptr;
  // Called with (0, init) and then (k + 1, state) after every step.
  std::function<void(std::size_t, const SequenceState&)> observer;
};

// Simulates one trajectory on `grid` from `init`.
//
// All positions read the state at t_k and write the state at t_{k+1}. Both
// schedulers share the destination sampling path: one uniform from the
// position's destination substream per realized jump. A jump whose filtered
// destination is degenerate is skipped and counted; under SHS the boundary is
// still consumed.
TrajectoryRecord run_trajectory(const ProcessModel& model, SchedulerKind kind,
                                const TimeGrid& grid, SequenceState init, std::uint64_t seed,
                                std::uint64_t trajectory = 0,
                                const TrajectoryOptions& options = {});

}  // namespace shs

#endif  // SHS_TRAJECTORY_HPP_
