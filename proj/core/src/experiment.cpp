#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <thread>

#include "internal.hpp"
#include "shs/constraints.hpp"
#include "shs/harness.hpp"
#include "shs/oracles.hpp"
#include "shs/stats.hpp"
#include "shs/trajectory.hpp"

namespace shs {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kKsAlpha = 0.01;

// Per-trajectory reduction. Floating-point fields are folded in trajectory
// order afterwards, so thread count never changes the result.
struct TrajectorySummary {
  CountMoments jumps;
  std::uint64_t max_jumps = 0;
  double total_mass = 0.0;  // summed over positions
  std::uint64_t zero_eligible = 0;
  std::uint64_t zero_eligible_hits = 0;
  std::uint64_t zero_any = 0;
  double zero_bound = 0.0;  // summed over positions
  std::uint64_t over_edit = 0;
  std::uint64_t degenerate = 0;
  std::uint64_t clamped = 0;
  std::uint64_t forbidden_hits = 0;
  std::uint64_t residual_masks = 0;
  double hamming = kNaN;
  double hazard_total = 0.0;  // truncation point for the KS reference
  std::vector<HazardSample> hazard;
};

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t t = 0; t < count; ++t) fn(t);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t begin = count * w / threads;
      const std::size_t end = count * (w + 1) / threads;
      try {
        for (std::size_t t = begin; t < end; ++t) fn(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::vector<Token> sample_target(const ExperimentConfig& c) {
  std::vector<Token> y(c.length);
  for (std::size_t i = 0; i < c.length; ++i) {
    RngStream rng({c.seed, 0, static_cast<std::uint32_t>(i), StreamTag::kTarget});
    y[i] = static_cast<Token>(rng.below(c.vocab));
  }
  return y;
}

std::unique_ptr<ProcessModel> build_model(const ExperimentConfig& c, std::size_t nfe) {
  switch (c.kind) {
    case ExperimentKind::kRounding:
      return std::make_unique<ScheduledMassProcess>(
          std::vector<double>(nfe, c.mass / static_cast<double>(nfe)), c.length, c.vocab);
    case ExperimentKind::kHazardHistogram:
      return std::make_unique<ExogenousProcess>(detail::build_rate(c.rate), c.length, c.vocab,
                                                c.clamp_tau_leap);
    case ExperimentKind::kDenoiserSweep:
    case ExperimentKind::kBlacklistSweep:
      return std::make_unique<ToyDenoiser>(
          ToyDenoiserSpec{sample_target(c), c.vocab, c.denoiser_rate, c.pull}, c.clamp_tau_leap);
    case ExperimentKind::kMaskStart:
      return std::make_unique<MaskStartProcess>(
          MaskStartSpec{c.length, c.vocab, c.unmask_schedule, c.terminal_resolution});
  }
  throw std::logic_error("unhandled experiment kind");
}

bool wants_hazard(const ExperimentConfig& c) {
  return c.kind == ExperimentKind::kHazardHistogram;
}

void summarize_positions(const TrajectoryRecord& rec, bool keep_hazard, TrajectorySummary& s) {
  for (std::size_t i = 0; i < rec.positions.size(); ++i) {
    const auto& p = rec.positions[i];
    const std::uint64_t j = p.jump_count;
    s.jumps.add(j);
    s.max_jumps = std::max(s.max_jumps, j);
    s.total_mass += p.total_mass;
    if (j == 0) ++s.zero_any;
    s.zero_bound += zero_edit_lower_bound(p.total_mass);
    if (p.total_mass >= 1.0) {
      ++s.zero_eligible;
      if (j == 0) ++s.zero_eligible_hits;
    }
    // Tolerate accumulated rounding so an integer total like 4 stays 4.
    const double ceil_mass = std::ceil(p.total_mass - 1e-9);
    if (static_cast<double>(j) > ceil_mass) ++s.over_edit;
    if (keep_hazard) {
      for (std::size_t m = 0; m < p.hazard_locations.size(); ++m) {
        s.hazard.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(m + 1),
                            p.hazard_locations[m]});
      }
    }
  }
  s.hazard_total = rec.positions.empty() ? 0.0 : rec.positions.front().total_mass;
  s.degenerate = rec.degenerate_destinations;
  s.clamped = rec.clamped_steps;
  s.residual_masks = rec.final_state.count_masked();
}

// Gamma(k, 1) conditioned on falling below `total`: the law of the k-th
// hazard location given that at least k events occur.
double truncated_gamma_cdf(unsigned k, double x, double total) {
  const double norm = gamma_cdf(k, total);
  if (norm <= 0.0) return 1.0;
  return std::min(1.0, gamma_cdf(k, std::min(x, total)) / norm);
}

void fill_ks(const ExperimentConfig& c, const std::vector<TrajectorySummary>& per_traj,
             CellReport& cell) {
  if (!wants_hazard(c)) {
    cell.ks_d = kNaN;
    return;
  }
  double total = 0.0;
  for (const auto& s : per_traj) total = std::max(total, s.hazard_total);
  std::vector<std::vector<double>> by_jump(c.ks_max_jump);
  for (const auto& s : per_traj) {
    for (const auto& h : s.hazard) {
      if (h.jump_index <= c.ks_max_jump) by_jump[h.jump_index - 1].push_back(h.location);
    }
  }
  cell.ks_d = 0.0;
  bool pass = true;
  bool any = false;
  for (unsigned k = 1; k <= c.ks_max_jump; ++k) {
    auto& xs = by_jump[k - 1];
    cell.ks_samples.push_back(xs.size());
    if (xs.size() < 10) {
      cell.ks_by_jump.push_back(kNaN);
      continue;
    }
    std::sort(xs.begin(), xs.end());
    const double d =
        ks_statistic(xs, [&](double x) { return truncated_gamma_cdf(k, x, total); });
    cell.ks_by_jump.push_back(d);
    cell.ks_d = std::max(cell.ks_d, d);
    pass = pass && d < ks_critical_value(xs.size(), kKsAlpha);
    any = true;
  }
  if (any) {
    cell.ks_pass = pass;
  } else {
    cell.ks_d = kNaN;
  }
}

CellReport reduce_cell(const ExperimentConfig& c, std::string scheduler, std::size_t nfe,
                       double rho, std::vector<TrajectorySummary>& per_traj) {
  CellReport cell;
  cell.scheduler = std::move(scheduler);
  cell.nfe = nfe;
  cell.rho = rho;
  cell.trajectories = per_traj.size();

  CountMoments jumps;
  double total_mass = 0.0;
  double zero_bound = 0.0;
  std::uint64_t zero_eligible = 0, zero_hits = 0, zero_any = 0, over = 0;
  std::vector<double> hamming;
  for (auto& s : per_traj) {
    jumps.merge(s.jumps);
    cell.max_jumps = std::max(cell.max_jumps, s.max_jumps);
    total_mass += s.total_mass;
    zero_bound += s.zero_bound;
    zero_eligible += s.zero_eligible;
    zero_hits += s.zero_eligible_hits;
    zero_any += s.zero_any;
    over += s.over_edit;
    cell.degenerate_count += s.degenerate;
    cell.clamped_steps += s.clamped;
    cell.forbidden_hits += s.forbidden_hits;
    cell.residual_masks += s.residual_masks;
    if (!std::isnan(s.hamming)) hamming.push_back(s.hamming);
  }
  const double samples = static_cast<double>(jumps.n);
  cell.samples = jumps.n;
  cell.mean_jumps = jumps.mean();
  cell.var_jumps = jumps.variance();
  cell.mean_total_mass = total_mass / samples;
  cell.p_zero_edit =
      zero_eligible ? static_cast<double>(zero_hits) / static_cast<double>(zero_eligible) : kNaN;
  cell.zero_edit_eligible = zero_eligible;
  cell.p_over_edit = static_cast<double>(over) / samples;
  cell.p_zero_any = static_cast<double>(zero_any) / samples;
  cell.zero_edit_bound = zero_bound / samples;
  if (hamming.empty()) {
    cell.hamming_acc = kNaN;
    cell.hamming_se = kNaN;
  } else {
    const auto est = estimate_mean(hamming);
    cell.hamming_acc = est.mean;
    cell.hamming_se = est.std_error;
  }
  fill_ks(c, per_traj, cell);
  if (wants_hazard(c)) {
    for (auto& s : per_traj) {
      cell.hazard_samples.insert(cell.hazard_samples.end(), s.hazard.begin(), s.hazard.end());
    }
  }
  return cell;
}

CellReport run_cell(const ExperimentConfig& c, SchedulerKind kind, std::size_t nfe, double rho,
                    const Blacklist& blacklist, unsigned threads) {
  const auto model = build_model(c, nfe);
  const TimeGrid grid(nfe);
  const bool filtered = c.kind == ExperimentKind::kBlacklistSweep;
  const auto* denoiser = dynamic_cast<const ToyDenoiser*>(model.get());

  std::vector<TrajectorySummary> per_traj(c.trajectories);
  parallel_for(c.trajectories, threads, [&](std::size_t t) {
    SequenceState init = c.kind == ExperimentKind::kMaskStart
                             ? SequenceState::all_masked(c.length)
                             : safe_init(blacklist, c.length, c.seed, t);
    TrajectoryOptions opts;
    std::uint64_t forbidden = 0;
    if (filtered) {
      opts.blacklist = &blacklist;
      opts.observer = [&](std::size_t, const SequenceState& x) {
        for (Token tok : x.tokens()) forbidden += blacklist.is_allowed(tok) ? 0 : 1;
      };
    }
    const auto rec = run_trajectory(*model, kind, grid, std::move(init), c.seed, t, opts);
    auto& s = per_traj[t];
    summarize_positions(rec, wants_hazard(c), s);
    s.forbidden_hits = forbidden;
    if (denoiser) s.hamming = denoiser->hamming_accuracy(rec.final_state);
  });
  return reduce_cell(c, std::string(to_string(kind)), nfe, rho, per_traj);
}

CellReport run_exact_cell(const ExperimentConfig& c, unsigned threads) {
  const auto rate = detail::build_rate(c.rate);
  const double total = rate.cumulative(1.0);
  std::vector<TrajectorySummary> per_traj(c.trajectories);
  parallel_for(c.trajectories, threads, [&](std::size_t t) {
    auto& s = per_traj[t];
    for (std::size_t i = 0; i < c.length; ++i) {
      const auto ev = nhpp_exact_events(rate, c.seed, t * c.length + i);
      const std::uint64_t j = ev.hazard_locations.size();
      s.jumps.add(j);
      s.max_jumps = std::max(s.max_jumps, j);
      s.total_mass += total;
      if (j == 0) ++s.zero_any;
      s.zero_bound += zero_edit_lower_bound(total);
      if (total >= 1.0) {
        ++s.zero_eligible;
        if (j == 0) ++s.zero_eligible_hits;
      }
      if (static_cast<double>(j) > std::ceil(total - 1e-9)) ++s.over_edit;
      for (std::size_t m = 0; m < ev.hazard_locations.size(); ++m) {
        s.hazard.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(m + 1),
                            ev.hazard_locations[m]});
      }
    }
    s.hazard_total = total;
  });
  return reduce_cell(c, "exact_nhpp", 0, 0.0, per_traj);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config, unsigned threads) {
  validate_config(config);
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.config = config;
  report.threads = std::max(1u, threads);

  const Vocabulary vocab(config.vocab);
  for (double rho : config.rho) {
    const Blacklist blacklist = config.kind == ExperimentKind::kBlacklistSweep
                                    ? sample_blacklist(vocab, rho, config.blacklist_seed)
                                    : Blacklist(vocab);
    report.blacklists.emplace_back(blacklist.forbidden().begin(), blacklist.forbidden().end());
    for (std::size_t nfe : config.nfe) {
      for (SchedulerKind kind : config.schedulers) {
        report.cells.push_back(run_cell(config, kind, nfe, rho, blacklist, report.threads));
      }
    }
  }
  if (config.kind == ExperimentKind::kHazardHistogram && config.exact_oracle) {
    report.cells.push_back(run_exact_cell(config, report.threads));
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace shs
