#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "internal.hpp"
#include "shs/harness.hpp"

#ifndef SHS_VERSION
#define SHS_VERSION "0.0.0"
#endif

namespace shs {

namespace detail {

std::string format_double(double x) {
  if (std::isnan(x)) return "NaN";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace detail

namespace {

using detail::format_double;
using nlohmann::json;

json number_or_null(double x) { return std::isnan(x) ? json(nullptr) : json(x); }

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::system_error(errno, std::generic_category(), "cannot open " + path.string());
  }
  out << contents;
  out.flush();
  if (!out) {
    throw std::system_error(errno, std::generic_category(), "write failed for " + path.string());
  }
}

}  // namespace

std::string_view library_version() noexcept { return SHS_VERSION; }

std::string summary_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << kSummaryHeader << '\n';
  for (const auto& c : report.cells) {
    out << c.scheduler << ',' << c.nfe << ',' << format_double(c.rho) << ','
        << format_double(c.mean_jumps) << ',' << format_double(c.var_jumps) << ','
        << format_double(c.p_zero_edit) << ',' << format_double(c.p_over_edit) << ','
        << format_double(c.ks_d) << ',' << (c.ks_pass ? (*c.ks_pass ? "true" : "false") : "NaN")
        << ',' << c.degenerate_count << ',' << format_double(c.hamming_acc) << ','
        << c.trajectories << '\n';
  }
  return out.str();
}

std::string hazard_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "scheduler,position,jump_index,hazard_location\n";
  for (const auto& c : report.cells) {
    for (const auto& h : c.hazard_samples) {
      out << c.scheduler << ',' << h.position << ',' << h.jump_index << ','
          << format_double(h.location) << '\n';
    }
  }
  return out.str();
}

std::string manifest_json(const ExperimentReport& report) {
  json doc;
  doc["manifest_version"] = 1;
  doc["library_version"] = std::string(library_version());
  doc["config"] = json::parse(config_to_json(report.config));
  doc["seed"] = report.config.seed;
  json bls = json::array();
  for (std::size_t r = 0; r < report.blacklists.size(); ++r) {
    bls.push_back({{"rho", report.config.rho[r]},
                   {"seed", report.config.blacklist_seed},
                   {"forbidden", report.blacklists[r]}});
  }
  doc["blacklists"] = bls;
  json cells = json::array();
  for (const auto& c : report.cells) {
    json ks = json::array();
    for (std::size_t k = 0; k < c.ks_by_jump.size(); ++k) {
      ks.push_back({{"jump_index", k + 1},
                    {"D", number_or_null(c.ks_by_jump[k])},
                    {"n", c.ks_samples[k]}});
    }
    cells.push_back({
        {"scheduler", c.scheduler},
        {"nfe", c.nfe},
        {"rho", c.rho},
        {"n_traj", c.trajectories},
        {"n_samples", c.samples},
        {"mean_J", number_or_null(c.mean_jumps)},
        {"var_J", number_or_null(c.var_jumps)},
        {"max_J", c.max_jumps},
        {"mean_total_mass", number_or_null(c.mean_total_mass)},
        {"p_zero_edit", number_or_null(c.p_zero_edit)},
        {"zero_edit_eligible", c.zero_edit_eligible},
        {"p_zero_any", number_or_null(c.p_zero_any)},
        {"zero_edit_bound", number_or_null(c.zero_edit_bound)},
        {"p_over_edit", number_or_null(c.p_over_edit)},
        {"ks", ks},
        {"degenerate_count", c.degenerate_count},
        {"clamped_steps", c.clamped_steps},
        {"forbidden_hits", c.forbidden_hits},
        {"residual_masks", c.residual_masks},
        {"hamming_acc", number_or_null(c.hamming_acc)},
        {"hamming_se", number_or_null(c.hamming_se)},
    });
  }
  doc["cells"] = cells;
  doc["rng"] = {
      {"generator", "philox4x32-10"},
      {"stream_key", "(seed, trajectory, position, tag)"},
      {"tags",
       {{"phase", 1}, {"bernoulli", 2}, {"destination", 3}, {"init", 4}, {"blacklist", 5},
        {"oracle", 6}, {"target", 9}}},
  };
  doc["wall_seconds"] = report.wall_seconds;
  doc["threads"] = report.threads;
  return doc.dump(2) + "\n";
}

std::vector<std::filesystem::path> emit_report(const ExperimentReport& report,
                                               const std::filesystem::path& dir,
                                               std::span<const ReportFormat> formats) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::system_error(ec, "cannot create output directory " + dir.string());
  std::vector<std::filesystem::path> written;
  for (auto f : formats) {
    if (f == ReportFormat::kCsv) {
      write_file(dir / "summary.csv", summary_csv(report));
      written.push_back(dir / "summary.csv");
      write_file(dir / "hazard_locations.csv", hazard_csv(report));
      written.push_back(dir / "hazard_locations.csv");
    } else {
      write_file(dir / "manifest.json", manifest_json(report));
      written.push_back(dir / "manifest.json");
    }
  }
  return written;
}

}  // namespace shs
