#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "shs/constraints.hpp"
#include "shs/harness.hpp"
#include "shs/processes.hpp"
#include "internal.hpp"

namespace shs {
namespace {

using nlohmann::json;

const std::set<std::string> kTopLevelKeys = {
    "experiment", "schedulers", "nfe",        "rho",   "trajectories",
    "seed",       "blacklist_seed", "output_dir", "flags", "process"};
const std::set<std::string> kProcessKeys = {
    "length",     "vocab",       "mass", "rate",           "ks_max_jump",        "exact_oracle",
    "denoiser_rate", "pull", "unmask_schedule", "terminal_resolution"};
const std::set<std::string> kRateKeys = {"family", "a", "b", "omega"};
const std::set<std::string> kFlagKeys = {"clamp_tau_leap"};

void reject_unknown(const json& obj, const std::set<std::string>& known, std::string_view where) {
  if (!obj.is_object()) {
    throw ValidationError(std::string(where) + " must be a JSON object");
  }
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) {
      throw ValidationError("unknown field '" + key + "' in " + std::string(where));
    }
  }
}

// nlohmann converts -1 to a huge unsigned value; catch that first.
bool negative_integer(const json& v) {
  if (v.is_number_integer() && !v.is_number_unsigned()) return v.get<std::int64_t>() < 0;
  if (v.is_array()) return std::any_of(v.begin(), v.end(), negative_integer);
  return false;
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  if (negative_integer(obj.at(key))) {
    throw ValidationError(std::string("field '") + key + "' must be non-negative");
  }
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("field '") + key + "': " + e.what());
  }
}

void check_masses_on_grid(double max_mass, std::size_t nfe, const char* what) {
  if (max_mass > 1.0) {
    std::ostringstream msg;
    msg << what << " gives change mass " << max_mass << " > 1 at nfe=" << nfe
        << " (set flags.clamp_tau_leap to clamp)";
    throw ValidationError(msg.str());
  }
}

}  // namespace

namespace detail {

ExogenousRate build_rate(const RateConfig& r) {
  if (r.family == "constant") return ExogenousRate::constant(r.a);
  if (r.family == "linear") return ExogenousRate::linear(r.a, r.b);
  if (r.family == "sinusoidal") return ExogenousRate::sinusoidal(r.a, r.b, r.omega);
  throw ValidationError("unknown rate family '" + r.family + "'");
}

}  // namespace detail

std::string_view to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::kRounding:
      return "rounding";
    case ExperimentKind::kHazardHistogram:
      return "hazard_histogram";
    case ExperimentKind::kDenoiserSweep:
      return "denoiser_sweep";
    case ExperimentKind::kMaskStart:
      return "mask_start";
    case ExperimentKind::kBlacklistSweep:
      return "blacklist_sweep";
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) noexcept {
  for (auto k : {ExperimentKind::kRounding, ExperimentKind::kHazardHistogram,
                 ExperimentKind::kDenoiserSweep, ExperimentKind::kMaskStart,
                 ExperimentKind::kBlacklistSweep}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  // A report manifest carries the config it was produced from.
  if (doc.is_object() && doc.contains("manifest_version") && doc.contains("config")) {
    doc = doc.at("config");
  }
  reject_unknown(doc, kTopLevelKeys, "config");

  ExperimentConfig c;
  if (!doc.contains("experiment")) throw ValidationError("config needs an 'experiment' field");
  std::string kind_name;
  read(doc, "experiment", kind_name);
  const auto kind = parse_experiment_kind(kind_name);
  if (!kind) throw ValidationError("unknown experiment '" + kind_name + "'");
  c.kind = *kind;

  if (doc.contains("schedulers")) {
    std::vector<std::string> names;
    read(doc, "schedulers", names);
    c.schedulers.clear();
    for (const auto& n : names) {
      const auto s = parse_scheduler(n);
      if (!s) throw ValidationError("unknown scheduler '" + n + "'");
      c.schedulers.push_back(*s);
    }
  }
  read(doc, "nfe", c.nfe);
  read(doc, "rho", c.rho);
  read(doc, "trajectories", c.trajectories);
  read(doc, "seed", c.seed);
  c.blacklist_seed = c.seed;
  read(doc, "blacklist_seed", c.blacklist_seed);
  read(doc, "output_dir", c.output_dir);
  if (doc.contains("flags")) {
    const auto& flags = doc.at("flags");
    reject_unknown(flags, kFlagKeys, "flags");
    read(flags, "clamp_tau_leap", c.clamp_tau_leap);
  }
  if (doc.contains("process")) {
    const auto& p = doc.at("process");
    reject_unknown(p, kProcessKeys, "process");
    read(p, "length", c.length);
    read(p, "vocab", c.vocab);
    read(p, "mass", c.mass);
    read(p, "ks_max_jump", c.ks_max_jump);
    read(p, "exact_oracle", c.exact_oracle);
    read(p, "denoiser_rate", c.denoiser_rate);
    read(p, "pull", c.pull);
    read(p, "unmask_schedule", c.unmask_schedule);
    read(p, "terminal_resolution", c.terminal_resolution);
    if (p.contains("rate")) {
      const auto& r = p.at("rate");
      reject_unknown(r, kRateKeys, "process.rate");
      read(r, "family", c.rate.family);
      read(r, "a", c.rate.a);
      read(r, "b", c.rate.b);
      read(r, "omega", c.rate.omega);
    }
  }
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void validate_config(const ExperimentConfig& c) {
  if (c.trajectories < 1) throw ValidationError("trajectories must be >= 1");
  if (c.nfe.empty()) throw ValidationError("nfe list must be non-empty");
  if (c.schedulers.empty()) throw ValidationError("scheduler list must be non-empty");
  if (c.rho.empty()) throw ValidationError("rho list must be non-empty");
  for (auto n : c.nfe) {
    if (n < 1) throw ValidationError("every nfe must be >= 1");
  }
  {
    auto s = c.schedulers;
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) {
      throw ValidationError("scheduler list has duplicates");
    }
  }
  if (c.length < 1 || c.length >= (1u << 24)) throw ValidationError("length must be in [1, 2^24)");
  const Vocabulary vocab(c.vocab);

  if (c.kind != ExperimentKind::kBlacklistSweep) {
    if (c.rho.size() != 1 || c.rho[0] != 0.0) {
      throw ValidationError("rho applies only to blacklist_sweep experiments");
    }
  }

  switch (c.kind) {
    case ExperimentKind::kRounding:
      if (!(c.mass >= 0.0) || !std::isfinite(c.mass)) {
        throw ValidationError("rounding mass must be finite and >= 0");
      }
      for (auto n : c.nfe) {
        check_masses_on_grid(c.mass / static_cast<double>(n), n, "rounding mass");
      }
      break;
    case ExperimentKind::kHazardHistogram: {
      const auto rate = detail::build_rate(c.rate);
      if (c.nfe.size() != 1) {
        throw ValidationError("hazard_histogram takes exactly one nfe value");
      }
      if (c.ks_max_jump < 1) throw ValidationError("ks_max_jump must be >= 1");
      if (!c.clamp_tau_leap) {
        const TimeGrid grid(c.nfe[0]);
        double worst = 0.0;
        for (std::size_t k = 0; k < grid.steps(); ++k) {
          worst = std::max(worst, rate.rate(grid.time(k)) * grid.step_size());
        }
        check_masses_on_grid(worst, c.nfe[0], "rate");
      }
      break;
    }
    case ExperimentKind::kDenoiserSweep:
    case ExperimentKind::kBlacklistSweep:
      if (!(c.denoiser_rate > 0.0) || !std::isfinite(c.denoiser_rate)) {
        throw ValidationError("denoiser_rate must be positive");
      }
      if (!(c.pull > 0.0 && c.pull <= 1.0)) throw ValidationError("pull must lie in (0, 1]");
      if (!c.clamp_tau_leap) {
        for (auto n : c.nfe) {
          check_masses_on_grid(c.denoiser_rate / static_cast<double>(n), n, "denoiser_rate");
        }
      }
      for (double r : c.rho) {
        if (!(r >= 0.0 && r < 1.0)) throw ValidationError("rho must lie in [0, 1)");
        if (blacklist_size(c.vocab, r) + 2 > c.vocab) {
          throw ValidationError("rho leaves fewer than 2 allowed tokens");
        }
      }
      break;
    case ExperimentKind::kMaskStart:
      for (double p : c.unmask_schedule) {
        if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("unmask_schedule entry outside [0, 1]");
      }
      if (!c.unmask_schedule.empty()) {
        for (auto n : c.nfe) {
          if (n != c.unmask_schedule.size()) {
            throw ValidationError("unmask_schedule length must equal every nfe");
          }
        }
      }
      break;
  }
}

std::string config_to_json(const ExperimentConfig& c) {
  json doc;
  doc["experiment"] = std::string(to_string(c.kind));
  json scheds = json::array();
  for (auto s : c.schedulers) scheds.push_back(std::string(to_string(s)));
  doc["schedulers"] = scheds;
  doc["nfe"] = c.nfe;
  doc["rho"] = c.rho;
  doc["trajectories"] = c.trajectories;
  doc["seed"] = c.seed;
  doc["blacklist_seed"] = c.blacklist_seed;
  doc["output_dir"] = c.output_dir;
  doc["flags"] = {{"clamp_tau_leap", c.clamp_tau_leap}};
  doc["process"] = {
      {"length", c.length},
      {"vocab", c.vocab},
      {"mass", c.mass},
      {"rate", {{"family", c.rate.family}, {"a", c.rate.a}, {"b", c.rate.b}, {"omega", c.rate.omega}}},
      {"ks_max_jump", c.ks_max_jump},
      {"exact_oracle", c.exact_oracle},
      {"denoiser_rate", c.denoiser_rate},
      {"pull", c.pull},
      {"unmask_schedule", c.unmask_schedule},
      {"terminal_resolution", c.terminal_resolution},
  };
  return doc.dump(2);
}

}  // namespace shs
