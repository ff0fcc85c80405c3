#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fleetsample/simulation.hpp"

namespace fleetsample {

/// Parses a JSON scenario document. Shorthands: target "uniform:<total>",
/// initial_cloud "zeros", confusion "identity" or "noisy-symmetric:<accuracy>".
/// Every error names the offending field (and robot index where relevant).
Scenario parse_scenario_config(std::string_view document);
Scenario load_scenario_file(const std::filesystem::path& path);

/// Canonical JSON for a scenario; shorthands are written out in expanded form.
std::string serialize_scenario(const Scenario& scenario);

/// One CSV line of metrics, as read back from disk.
struct MetricsRow {
  int round = 0;
  std::string policy;
  std::uint64_t seed = 0;
  double l2_distance = 0.0;
  double lower_bound = 0.0;
  std::int64_t cumulative_messages = 0;
  int sweeps = 0;
  std::vector<double> class_counts;
};

std::string metrics_header(std::size_t n_class);

/// "%.6f" with negative zero normalized.
std::string format_fixed(double value);

/// Writes the header (when requested) and one line per round, LF-terminated.
void emit_round_metrics(std::ostream& out, std::span<const RoundMetrics> rows, PolicyKind policy,
                        std::uint64_t seed, bool with_header = true);
void emit_round_metrics(const std::filesystem::path& path, std::span<const RoundMetrics> rows,
                        PolicyKind policy, std::uint64_t seed);

std::vector<MetricsRow> parse_metrics_csv(std::string_view text);

struct Summary {
  std::map<std::string, double> final_l2;
  std::map<std::string, std::int64_t> total_messages;
  std::map<std::string, double> mean_sweeps;
  /// 100 * (L_greedy - L_interactive) / L_greedy on mean final distances.
  std::optional<double> improvement_pct;
  std::map<std::string, bool> verify_verdicts;
  int seeds = 0;
};

std::string render_summary(const Summary& summary);
void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace fleetsample
