#include "shs/trajectory.hpp"

#include <limits>
#include <sstream>

namespace shs {

TrajectoryRecord run_trajectory(const ProcessModel& model, SchedulerKind kind,
                                const TimeGrid& grid, SequenceState init, std::uint64_t seed,
                                std::uint64_t trajectory, const TrajectoryOptions& options) {
  const std::size_t N = model.length();
  const Vocabulary vocab(model.vocab_size());
  if (init.size() != N) {
    throw ValidationError("initial state length does not match the process model");
  }
  init.validate(vocab, model.allows_mask());
  if (options.blacklist && options.blacklist->vocab_size() != vocab.size()) {
    throw ValidationError("blacklist and process model disagree on vocabulary size");
  }

  TrajectoryRecord record;
  record.positions.resize(N);

  std::vector<RngStream> bernoulli;
  std::vector<RngStream> dest_rng;
  bernoulli.reserve(N);
  dest_rng.reserve(N);
  for (std::size_t i = 0; i < N; ++i) {
    const auto pos = static_cast<std::uint32_t>(i);
    bernoulli.emplace_back(StreamKey{seed, trajectory, pos, StreamTag::kBernoulli});
    dest_rng.emplace_back(StreamKey{seed, trajectory, pos, StreamTag::kDestination});
  }

  PhaseState phases;
  std::vector<CompensatedSum> mass(N);
  if (kind == SchedulerKind::kShs) {
    phases = shs_init(N, seed, trajectory);
    for (std::size_t i = 0; i < N; ++i) record.positions[i].phase = phases.phase(i);
  } else {
    for (auto& p : record.positions) p.phase = std::numeric_limits<double>::quiet_NaN();
  }

  SequenceState current = std::move(init);
  SequenceState next = current;
  std::vector<double> q;
  if (options.observer) options.observer(0, current);

  for (std::size_t k = 0; k < grid.steps(); ++k) {
    for (std::size_t i = 0; i < N; ++i) {
      const ChangeMass cm = model.change_mass(current, k, grid, i);
      const double p = cm.value;
      if (cm.clamped) ++record.clamped_steps;
      if (p > 1.0) {
        std::ostringstream msg;
        msg << "process returned change mass " << p << " > 1 at step " << k;
        throw RejectedStepError(msg.str(), grid.time(k), p / grid.step_size());
      }

      bool jump = false;
      double hazard = 0.0;
      if (kind == SchedulerKind::kShs) {
        jump = phases.decide(i, p);
        hazard = phases.cumulative_mass(i);
      } else {
        jump = standard_decide(p, bernoulli[i]);
        mass[i].add(p);
        hazard = mass[i].value();
      }
      if (!jump) continue;

      model.destination(current, k, grid, i, q);
      if (options.blacklist && !filter_destination_in_place(q, *options.blacklist)) {
        ++record.degenerate_destinations;
        continue;
      }
      const Token v = sample_destination(q, dest_rng[i].uniform());
      next.set(i, v);
      auto& trace = record.positions[i];
      ++trace.jump_count;
      trace.jump_steps.push_back(k);
      trace.hazard_locations.push_back(hazard);
    }
    current = next;
    if (options.observer) options.observer(k + 1, current);
  }

  for (std::size_t i = 0; i < N; ++i) {
    record.positions[i].total_mass =
        kind == SchedulerKind::kShs ? phases.cumulative_mass(i) : mass[i].value();
  }
  record.final_state = std::move(current);
  return record;
}

}  // namespace shs
