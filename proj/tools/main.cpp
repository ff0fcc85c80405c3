// fleetsample: run, compare, and verify cooperative data-sampling scenarios.
//
// Exit codes: 0 success, 1 I/O or unexpected failure, 2 config error,
// 3 convergence failure, 4 property violation (verify).

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fleetsample/checks.hpp"
#include "fleetsample/io.hpp"

namespace fs = std::filesystem;
using namespace fleetsample;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitViolation = 4;

bool is_config_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingField:
    case ErrorCode::BadDimension:
    case ErrorCode::UnknownPolicy:
    case ErrorCode::RowNotStochastic:
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidDistribution:
    case ErrorCode::InvalidConfusion:
    case ErrorCode::NegativeBudget:
    case ErrorCode::InvalidArgument:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::ZeroClasses:
    case ErrorCode::EmptyFleet:
      return true;
    default:
      return false;
  }
}

int exit_code_for(const Error& e) {
  if (e.code() == ErrorCode::NotConverged) return kExitConvergence;
  if (is_config_error(e.code())) return kExitConfig;
  return kExitFailure;
}

struct Overrides {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> policy;
  std::optional<std::string> comm_mode;
  std::string out_dir = "out";
  int seeds = 10;
};

Scenario load_with_overrides(const Overrides& o) {
  Scenario s = load_scenario_file(o.scenario);
  if (o.seed) s.seed = *o.seed;
  if (o.policy) s.policy = parse_policy(*o.policy);
  if (o.comm_mode) s.comm_mode = parse_comm_mode(*o.comm_mode);
  return s;
}

std::map<std::string, bool> verdict_map(const VerifyReport& r) {
  return {{"ordering_chain", r.chain_ok},       {"gap_bound", r.gap_ok},
          {"interactive_equals_oracle", r.equivalence_ok}, {"one_iteration", r.one_iteration_ok},
          {"sum_uniqueness", r.sum_unique_ok},  {"message_counts", r.messages_ok}};
}

double mean_sweeps(const std::vector<RoundMetrics>& rows) {
  if (rows.size() <= 1) return 0.0;
  double total = 0.0;
  for (std::size_t k = 1; k < rows.size(); ++k) total += rows[k].sweeps;
  return total / static_cast<double>(rows.size() - 1);
}

int cmd_run(const Overrides& o) {
  const Scenario s = load_with_overrides(o);
  const ScenarioResult result = run_scenario(s);
  const std::string policy(to_string(s.policy));
  emit_round_metrics(fs::path(o.out_dir) / policy / "metrics.csv", result.metrics, s.policy, s.seed);

  Summary summary;
  summary.seeds = 1;
  summary.final_l2[policy] = result.metrics.back().l2_distance;
  summary.total_messages[policy] = result.metrics.back().cumulative_messages;
  summary.mean_sweeps[policy] = mean_sweeps(result.metrics);
  write_text_file(fs::path(o.out_dir) / "summary.json", render_summary(summary));

  std::printf("%s seed %llu: final l2 %s after %d rounds (%lld messages)\n", policy.c_str(),
              static_cast<unsigned long long>(s.seed), format_fixed(result.metrics.back().l2_distance).c_str(),
              s.rounds, static_cast<long long>(result.metrics.back().cumulative_messages));
  return kExitOk;
}

int cmd_compare(const Overrides& o) {
  const Scenario base = load_with_overrides(o);
  if (o.seeds < 1) throw Error(ErrorCode::ConfigError, "--seeds must be at least 1");

  Summary summary;
  summary.seeds = o.seeds;
  for (PolicyKind policy : kAllPolicies) {
    const std::string name(to_string(policy));
    std::ostringstream csv;
    double l2_sum = 0.0;
    double sweep_sum = 0.0;
    std::int64_t messages = 0;
    for (int k = 0; k < o.seeds; ++k) {
      Scenario s = base;
      s.policy = policy;
      s.seed = base.seed + static_cast<std::uint64_t>(k);
      const ScenarioResult result = run_scenario(s);
      emit_round_metrics(csv, result.metrics, policy, s.seed, k == 0);
      l2_sum += result.metrics.back().l2_distance;
      sweep_sum += mean_sweeps(result.metrics);
      messages += result.metrics.back().cumulative_messages;
    }
    write_text_file(fs::path(o.out_dir) / name / "metrics.csv", csv.str());
    summary.final_l2[name] = l2_sum / o.seeds;
    summary.mean_sweeps[name] = sweep_sum / o.seeds;
    summary.total_messages[name] = messages;
  }
  const double greedy = summary.final_l2["greedy"];
  const double interactive = summary.final_l2["interactive"];
  summary.improvement_pct = greedy > 0.0 ? 100.0 * (greedy - interactive) / greedy : 0.0;
  summary.verify_verdicts = verdict_map(verify_scenario(base));
  write_text_file(fs::path(o.out_dir) / "summary.json", render_summary(summary));

  std::printf("%-12s %14s\n", "policy", "mean final l2");
  for (const auto& [name, l2] : summary.final_l2) std::printf("%-12s %14s\n", name.c_str(), format_fixed(l2).c_str());
  std::printf("interactive improves on greedy by %.2f%%\n", *summary.improvement_pct);
  return kExitOk;
}

int cmd_verify(const Overrides& o) {
  const Scenario s = load_with_overrides(o);
  const VerifyReport report = verify_scenario(s);
  std::printf("%5s %12s %12s %12s %12s %6s %6s %10s  %s\n", "round", "lower", "oracle", "interactive", "greedy",
              "sweeps", "passes", "messages", "verdict");
  for (std::size_t r = 0; r < report.rounds.size(); ++r) {
    const RoundCheck& c = report.rounds[r];
    std::printf("%5zu %12s %12s %12s %12s %6d %6d %10lld  %s\n", r + 1, format_fixed(c.l_lower).c_str(),
                format_fixed(c.l_oracle).c_str(), format_fixed(c.l_interactive).c_str(),
                format_fixed(c.l_greedy).c_str(), c.sweeps, c.passes, static_cast<long long>(c.messages),
                c.all_ok() ? "ok" : "VIOLATION");
  }
  for (const auto& [name, ok] : verdict_map(report)) std::printf("%-26s %s\n", name.c_str(), ok ? "pass" : "FAIL");
  return report.all_ok() ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative data sampling for robot fleets"};
  app.require_subcommand(1);
  Overrides o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", o.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Override the scenario seed");
    sub->add_option("--policy", o.policy, "uniform | greedy | oracle | interactive | lower-bound");
    sub->add_option("--comm-mode", o.comm_mode, "broadcast | ring");
  };

  CLI::App* run = app.add_subcommand("run", "Run one scenario and write <out-dir>/<policy>/metrics.csv");
  add_common(run);
  run->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();

  CLI::App* compare = app.add_subcommand("compare", "Run every policy over several seeds");
  add_common(compare);
  compare->add_option("--seeds", o.seeds, "Number of consecutive seeds")->capture_default_str();
  compare->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();

  CLI::App* verify = app.add_subcommand("verify", "Check the convergence and ordering properties round by round");
  add_common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(o);
    if (compare->parsed()) return cmd_compare(o);
    if (verify->parsed()) return cmd_verify(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
