#include "fleetsample/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fleetsample {

using nlohmann::json;

namespace {

// Re-throws any error from `fn` with the field path prepended, keeping its code.
template <typename Fn>
auto in_field(const std::string& field, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), field + ": " + e.detail());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, field + ": " + e.what());
  }
}

const json& require(const json& obj, const char* key, const std::string& path = "") {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(ErrorCode::MissingField, path + key);
  return *it;
}

Vector to_vector(const json& j, const std::string& field) {
  if (!j.is_array()) throw Error(ErrorCode::ConfigError, field + " must be an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) throw Error(ErrorCode::ConfigError, field + "[" + std::to_string(k) + "] is not a number");
    v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  }
  return v;
}

Vector sized_vector(const json& j, const std::string& field, std::size_t n) {
  Vector v = to_vector(j, field);
  if (static_cast<std::size_t>(v.size()) != n)
    throw Error(ErrorCode::BadDimension, field + ": expected " + std::to_string(n) + " entries, got " +
                                             std::to_string(v.size()));
  return v;
}

double parse_shorthand_number(const std::string& text, std::string_view prefix, const std::string& field) {
  try {
    std::size_t used = 0;
    const std::string rest = text.substr(prefix.size());
    const double value = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(rest);
    return value;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, field + ": cannot parse '" + text + "'");
  }
}

Vector parse_target(const json& j, std::size_t n) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    constexpr std::string_view prefix = "uniform:";
    if (s.rfind(prefix, 0) != 0) throw Error(ErrorCode::ConfigError, "target: unknown shorthand '" + s + "'");
    const double total = parse_shorthand_number(s, prefix, "target");
    return Vector::Constant(static_cast<Eigen::Index>(n), total / static_cast<double>(n));
  }
  return sized_vector(j, "target", n);
}

Vector parse_initial_cloud(const json& j, std::size_t n) {
  if (j.is_string()) {
    if (j.get<std::string>() != "zeros")
      throw Error(ErrorCode::ConfigError, "initial_cloud: unknown shorthand '" + j.get<std::string>() + "'");
    return Vector::Zero(static_cast<Eigen::Index>(n));
  }
  return sized_vector(j, "initial_cloud", n);
}

ConfusionMatrix parse_confusion(const json& j, std::size_t n, const std::string& field) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "identity") return ConfusionMatrix::identity(n);
    constexpr std::string_view prefix = "noisy-symmetric:";
    if (s.rfind(prefix, 0) == 0)
      return ConfusionMatrix::noisy_symmetric(n, parse_shorthand_number(s, prefix, field));
    throw Error(ErrorCode::ConfigError, field + ": unknown shorthand '" + s + "'");
  }
  if (!j.is_array() || j.size() != n)
    throw Error(ErrorCode::BadDimension, field + ": expected " + std::to_string(n) + " rows");
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const Vector row = sized_vector(j[r], field + "[" + std::to_string(r) + "]", n);
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return ConfusionMatrix(std::move(m));
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

json matrix_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_json(m.row(r).transpose()));
  return out;
}

}  // namespace

Scenario parse_scenario_config(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ConfigError, "document must be an object");

  Scenario s;
  s.n_class = in_field("n_class", [&] { return require(doc, "n_class").get<std::size_t>(); });
  s.n_robot = in_field("n_robot", [&] { return require(doc, "n_robot").get<int>(); });
  s.rounds = in_field("rounds", [&] { return require(doc, "rounds").get<int>(); });
  if (s.n_class == 0) throw Error(ErrorCode::BadDimension, "n_class must be positive");
  if (s.n_robot < 1) throw Error(ErrorCode::BadDimension, "n_robot must be positive");
  if (s.rounds < 1) throw Error(ErrorCode::BadDimension, "rounds must be at least 1");

  s.target = in_field("target", [&] { return parse_target(require(doc, "target"), s.n_class); });
  s.initial_cloud = doc.contains("initial_cloud")
                        ? in_field("initial_cloud", [&] { return parse_initial_cloud(doc["initial_cloud"], s.n_class); })
                        : Vector::Zero(static_cast<Eigen::Index>(s.n_class));

  if (doc.contains("policy"))
    s.policy = in_field("policy", [&] { return parse_policy(doc["policy"].get<std::string>()); });
  if (doc.contains("comm_mode"))
    s.comm_mode = in_field("comm_mode", [&] { return parse_comm_mode(doc["comm_mode"].get<std::string>()); });
  if (doc.contains("seed")) s.seed = in_field("seed", [&] { return doc["seed"].get<std::uint64_t>(); });
  if (doc.contains("estimation_mode"))
    s.estimation = in_field("estimation_mode",
                            [&] { return parse_estimation_mode(doc["estimation_mode"].get<std::string>()); });
  if (doc.contains("realization"))
    s.realization = in_field("realization", [&] { return parse_realization(doc["realization"].get<std::string>()); });
  if (doc.contains("integer_uploads"))
    s.integer_uploads = in_field("integer_uploads", [&] { return doc["integer_uploads"].get<bool>(); });

  if (doc.contains("solver")) {
    const json& sj = doc["solver"];
    if (!sj.is_object()) throw Error(ErrorCode::ConfigError, "solver must be an object");
    auto num = [&](const char* key, auto& dst) {
      if (sj.contains(key))
        dst = in_field(std::string("solver.") + key, [&] { return sj[key].get<std::decay_t<decltype(dst)>>(); });
    };
    num("step_tolerance", s.solver.step_tolerance);
    num("objective_tolerance", s.solver.objective_tolerance);
    num("max_iterations", s.solver.max_iterations);
    num("sweep_threshold", s.sweep_threshold);
    num("max_sweeps", s.max_sweeps);
  }

  const json& robots = in_field("robots", [&]() -> const json& { return require(doc, "robots"); });
  if (!robots.is_array()) throw Error(ErrorCode::ConfigError, "robots must be an array");
  if (robots.size() != static_cast<std::size_t>(s.n_robot))
    throw Error(ErrorCode::BadDimension, "robots: expected " + std::to_string(s.n_robot) + " entries, got " +
                                             std::to_string(robots.size()));
  for (std::size_t i = 0; i < robots.size(); ++i) {
    const std::string path = "robots[" + std::to_string(i) + "]";
    const json& rj = robots[i];
    if (!rj.is_object()) throw Error(ErrorCode::ConfigError, path + " must be an object");
    auto dist = in_field(path + ".true_dist", [&] {
      return ClassDistribution(sized_vector(require(rj, "true_dist", path + "."), path + ".true_dist", s.n_class));
    });
    auto conf = in_field(path + ".confusion", [&] {
      return parse_confusion(require(rj, "confusion", path + "."), s.n_class, path + ".confusion");
    });
    const long obs = in_field(path + ".obs_per_round",
                              [&] { return require(rj, "obs_per_round", path + ".").get<long>(); });
    const double budget = in_field(path + ".cache_budget",
                                   [&] { return require(rj, "cache_budget", path + ".").get<double>(); });
    RobotProfile profile{static_cast<int>(i), std::move(dist), std::move(conf), obs, budget};
    in_field(path, [&] {
      profile.validate();
      return 0;
    });
    s.robots.push_back(std::move(profile));
  }

  if (doc.contains("confusion_schedule")) {
    const json& sched = doc["confusion_schedule"];
    if (!sched.is_array()) throw Error(ErrorCode::ConfigError, "confusion_schedule must be an array");
    for (std::size_t r = 0; r < sched.size(); ++r) {
      const std::string path = "confusion_schedule[" + std::to_string(r) + "]";
      if (!sched[r].is_array() || sched[r].size() != static_cast<std::size_t>(s.n_robot))
        throw Error(ErrorCode::BadDimension, path + ": expected one confusion per robot");
      std::vector<ConfusionMatrix> per_robot;
      for (std::size_t i = 0; i < sched[r].size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        per_robot.push_back(in_field(p, [&] { return parse_confusion(sched[r][i], s.n_class, p); }));
      }
      s.confusion_schedule.push_back(std::move(per_robot));
    }
  }

  s.validate();
  return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  return parse_scenario_config(read_text_file(path));
}

std::string serialize_scenario(const Scenario& s) {
  json doc;
  doc["n_class"] = s.n_class;
  doc["n_robot"] = s.n_robot;
  doc["rounds"] = s.rounds;
  doc["target"] = vector_json(s.target);
  doc["initial_cloud"] = vector_json(s.initial_cloud);
  doc["policy"] = std::string(to_string(s.policy));
  doc["comm_mode"] = std::string(to_string(s.comm_mode));
  doc["seed"] = s.seed;
  doc["estimation_mode"] = std::string(to_string(s.estimation));
  doc["realization"] = std::string(to_string(s.realization));
  doc["integer_uploads"] = s.integer_uploads;
  doc["solver"] = {{"step_tolerance", s.solver.step_tolerance},
                   {"objective_tolerance", s.solver.objective_tolerance},
                   {"max_iterations", s.solver.max_iterations},
                   {"sweep_threshold", s.sweep_threshold},
                   {"max_sweeps", s.max_sweeps}};
  json robots = json::array();
  for (const auto& r : s.robots) {
    robots.push_back({{"true_dist", vector_json(r.true_dist.probs())},
                      {"confusion", matrix_json(r.confusion.matrix())},
                      {"obs_per_round", r.obs_per_round},
                      {"cache_budget", r.cache_budget}});
  }
  doc["robots"] = std::move(robots);
  if (!s.confusion_schedule.empty()) {
    json sched = json::array();
    for (const auto& round : s.confusion_schedule) {
      json per_robot = json::array();
      for (const auto& c : round) per_robot.push_back(matrix_json(c.matrix()));
      sched.push_back(std::move(per_robot));
    }
    doc["confusion_schedule"] = std::move(sched);
  }
  return doc.dump(2) + "\n";
}

std::string metrics_header(std::size_t n_class) {
  std::string h = "round,policy,seed,l2_distance,lower_bound,cumulative_messages,sweeps";
  for (std::size_t k = 0; k < n_class; ++k) h += ",class_" + std::to_string(k);
  return h;
}

std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

void emit_round_metrics(std::ostream& out, std::span<const RoundMetrics> rows, PolicyKind policy,
                        std::uint64_t seed, bool with_header) {
  if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "no metrics rows to emit");
  const auto n_class = static_cast<std::size_t>(rows.front().per_class_cloud_counts.size());
  if (with_header) out << metrics_header(n_class) << '\n';
  for (const auto& row : rows) {
    out << row.round << ',' << to_string(policy) << ',' << seed << ',' << format_fixed(row.l2_distance) << ','
        << format_fixed(row.lower_bound) << ',' << row.cumulative_messages << ',' << row.sweeps;
    for (Eigen::Index k = 0; k < row.per_class_cloud_counts.size(); ++k)
      out << ',' << format_fixed(row.per_class_cloud_counts(k));
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoFailure, "failed writing metrics");
}

void emit_round_metrics(const std::filesystem::path& path, std::span<const RoundMetrics> rows,
                        PolicyKind policy, std::uint64_t seed) {
  std::ostringstream buf;
  emit_round_metrics(buf, rows, policy, seed);
  write_text_file(path, buf.str());
}

std::vector<MetricsRow> parse_metrics_csv(std::string_view text) {
  std::vector<MetricsRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::IoFailure, "metrics: missing header");
  std::size_t columns = 1;
  for (char c : line) columns += c == ',' ? 1 : 0;
  if (columns < 7 || line != metrics_header(columns - 7))
    throw Error(ErrorCode::IoFailure, "metrics: unexpected header '" + line + "'");
  const std::size_t n_class = columns - 7;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != columns)
      throw Error(ErrorCode::IoFailure, "metrics line " + std::to_string(line_no) + ": wrong column count");
    try {
      MetricsRow row;
      row.round = std::stoi(cells[0]);
      row.policy = cells[1];
      row.seed = std::stoull(cells[2]);
      row.l2_distance = std::stod(cells[3]);
      row.lower_bound = std::stod(cells[4]);
      row.cumulative_messages = std::stoll(cells[5]);
      row.sweeps = std::stoi(cells[6]);
      for (std::size_t k = 0; k < n_class; ++k) row.class_counts.push_back(std::stod(cells[7 + k]));
      rows.push_back(std::move(row));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::IoFailure, "metrics line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

std::string render_summary(const Summary& summary) {
  json doc;
  doc["seeds"] = summary.seeds;
  json final_l2 = json::object();
  for (const auto& [k, v] : summary.final_l2) final_l2[k] = v;
  doc["final_l2"] = final_l2;
  if (summary.improvement_pct) doc["improvement_pct"] = *summary.improvement_pct;
  json messages = json::object();
  for (const auto& [k, v] : summary.total_messages) messages[k] = v;
  doc["total_messages"] = messages;
  json sweeps = json::object();
  for (const auto& [k, v] : summary.mean_sweeps) sweeps[k] = v;
  doc["mean_sweeps"] = sweeps;
  json verdicts = json::object();
  for (const auto& [k, v] : summary.verify_verdicts) verdicts[k] = v;
  doc["verify_verdicts"] = verdicts;
  return doc.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace fleetsample
