#include "serum/data.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "serum/error.hpp"

namespace serum {

namespace {

using json = nlohmann::json;

/// Splits one CSV line. Supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (errno != 0 || end != s.c_str() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<int> parse_bit(const std::string& s) {
  if (s == "0") return 0;
  if (s == "1") return 1;
  return std::nullopt;
}

}  // namespace

std::vector<ReportRecord> parse_reports(std::istream& in, const std::string& source) {
  std::string line;
  if (!read_line(in, line)) throw ValidationError(source + ": empty file, expected header");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (line != kReportHeader) {
    throw ValidationError(source + ": header must be exactly '" + kReportHeader + "'");
  }

  std::vector<ReportRecord> records;
  std::vector<std::string> problems;
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t line_no = 1;
  auto complain = [&](const std::string& msg) {
    problems.push_back("line " + std::to_string(line_no) + ": " + msg);
  };

  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 5) {
      complain("expected 5 fields, found " + std::to_string(f.size()));
      continue;
    }
    ReportRecord r;
    r.task_id = f[0];
    r.agent_id = f[1];
    bool ok = true;
    if (r.task_id.empty() || r.agent_id.empty()) {
      complain("task_id and agent_id must be non-empty");
      ok = false;
    }
    if (!f[2].empty()) {
      r.signal = parse_bit(f[2]);
      if (!r.signal) {
        complain("signal must be 0 or 1, got '" + f[2] + "'");
        ok = false;
      }
    }
    if (!f[3].empty()) {
      r.prediction = parse_double(f[3]);
      if (!r.prediction || *r.prediction < 0.0 || *r.prediction > 1.0) {
        complain("prediction must be a number in [0, 1], got '" + f[3] + "'");
        r.prediction.reset();
        ok = false;
      }
    }
    if (!f[4].empty()) {
      r.ground_truth = parse_bit(f[4]);
      if (!r.ground_truth) {
        complain("ground_truth must be 0 or 1, got '" + f[4] + "'");
        ok = false;
      }
    }
    if (ok && !r.signal && !r.prediction) {
      complain("row needs a signal or a prediction");
      ok = false;
    }
    if (ok && !seen.emplace(r.task_id, r.agent_id).second) {
      complain("duplicate report for task '" + r.task_id + "' and agent '" + r.agent_id + "'");
      ok = false;
    }
    if (ok) records.push_back(std::move(r));
  }

  if (!problems.empty()) {
    std::string msg = source + ": " + std::to_string(problems.size()) + " invalid row(s)";
    constexpr std::size_t kShown = 20;
    for (std::size_t i = 0; i < problems.size() && i < kShown; ++i) msg += "\n  " + problems[i];
    if (problems.size() > kShown) msg += "\n  ...";
    throw ValidationError(msg);
  }
  return records;
}

std::vector<ReportRecord> load_reports(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open report file '" + path.string() + "'");
  return parse_reports(in, path.string());
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

void write_reports(std::ostream& out, const std::vector<ReportRecord>& records) {
  out << kReportHeader << '\n';
  for (const auto& r : records) {
    out << csv_field(r.task_id) << ',' << csv_field(r.agent_id) << ',';
    if (r.signal) out << *r.signal;
    out << ',';
    if (r.prediction) out << format_number(*r.prediction);
    out << ',';
    if (r.ground_truth) out << *r.ground_truth;
    out << '\n';
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_reports(const std::filesystem::path& path, const std::vector<ReportRecord>& records) {
  std::ostringstream out;
  write_reports(out, records);
  write_text(path, out.str());
}

ReportTable index_reports(const std::vector<ReportRecord>& records) {
  ReportTable table;
  std::map<std::string, std::size_t> agent_index;
  std::map<std::string, std::size_t> task_index;
  for (const auto& r : records) {
    auto [ait, new_agent] = agent_index.emplace(r.agent_id, table.agent_ids.size());
    if (new_agent) table.agent_ids.push_back(r.agent_id);
    auto [tit, new_task] = task_index.emplace(r.task_id, table.tasks.size());
    if (new_task) table.tasks.push_back(Task{r.task_id, {}, std::nullopt});
    Task& task = table.tasks[tit->second];
    if (r.ground_truth) {
      if (task.truth && *task.truth != *r.ground_truth) {
        throw ValidationError("task '" + r.task_id + "' has conflicting ground truths");
      }
      task.truth = r.ground_truth;
    }
    task.responses.push_back(Response{ait->second, r.signal, r.prediction});
  }
  return table;
}

std::vector<ReportRecord> flatten_reports(const ReportTable& table) {
  std::vector<ReportRecord> out;
  for (const auto& task : table.tasks) {
    for (const auto& r : task.responses) {
      out.push_back(ReportRecord{task.id, table.agent_ids.at(r.agent), r.signal, r.prediction,
                                 task.truth});
    }
  }
  return out;
}

ScoreFormat parse_score_format(const std::string& s) {
  if (s == "csv") return ScoreFormat::csv;
  if (s == "json") return ScoreFormat::json;
  throw ValidationError("unknown format '" + s + "' (expected csv|json)");
}

std::string scores_csv(const ScoreTable& table) {
  std::string out = std::string(kScoreHeader) + "\n";
  for (const auto& a : table.agents) {
    out += csv_field(a.id) + ',' + std::to_string(a.n_tasks) + ',' + format_number(a.mean_score) +
           ',' + (a.informative ? "true" : "false") + ',';
    if (a.estimation) {
      out += format_number(a.estimation->rates.e0) + ',' + format_number(a.estimation->rates.e1);
    } else {
      out += ',';
    }
    out += '\n';
  }
  return out;
}

namespace {

// Rounds through the same 10-significant-digit text the CSV uses, so CSV
// and JSON outputs agree and stay byte-stable.
double rounded(double v) { return std::strtod(format_number(v).c_str(), nullptr); }

}  // namespace

nlohmann::ordered_json estimation_json(const EstimationResult& est) {
  nlohmann::ordered_json j;
  j["e0_hat"] = rounded(est.rates.e0);
  j["e1_hat"] = rounded(est.rates.e1);
  if (est.prior_recovered) {
    j["p0_hat"] = rounded(est.prior_recovered->p0);
  } else {
    j["p0_hat"] = nullptr;
  }
  j["informative"] = est.informative;
  const auto& d = est.diagnostics;
  j["diagnostics"] = {{"status", to_string(d.status)},
                      {"spread", rounded(d.spread)},
                      {"ratio_a", rounded(d.ratio_a)},
                      {"ratio_b", rounded(d.ratio_b)},
                      {"discriminant", rounded(d.discriminant)},
                      {"clamped", d.clamped},
                      {"sample_count", d.sample_count}};
  return j;
}

nlohmann::ordered_json scores_json(const ScoreTable& table) {
  nlohmann::ordered_json doc;
  doc["agents"] = nlohmann::ordered_json::array();
  for (const auto& a : table.agents) {
    nlohmann::ordered_json j;
    j["agent_id"] = a.id;
    j["n_tasks"] = a.n_tasks;
    j["mean_score"] = rounded(a.mean_score);
    j["scored"] = a.scored;
    j["informative"] = a.informative;
    if (a.estimation) {
      const auto est = estimation_json(*a.estimation);
      for (auto& [k, v] : est.items()) {
        if (k != "informative") j[k] = v;
      }
    } else {
      j["e0_hat"] = nullptr;
      j["e1_hat"] = nullptr;
    }
    doc["agents"].push_back(std::move(j));
  }
  doc["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : table.entries) {
    doc["entries"].push_back({{"task_id", table.task_ids.at(e.task)},
                              {"agent_id", table.agents.at(e.agent).id},
                              {"score", rounded(e.value)},
                              {"informative", e.informative}});
  }
  return doc;
}

void write_scores(const ScoreTable& table, const std::filesystem::path& path, ScoreFormat format) {
  if (format == ScoreFormat::csv) {
    write_text(path, scores_csv(table));
  } else {
    write_text(path, scores_json(table).dump(2) + "\n");
  }
}

std::vector<ScoreRow> parse_scores_csv(std::istream& in) {
  std::string line;
  if (!read_line(in, line) || line != kScoreHeader) {
    throw ValidationError(std::string("score CSV header must be '") + kScoreHeader + "'");
  }
  std::vector<ScoreRow> rows;
  std::size_t line_no = 1;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    auto fail = [&](const char* what) {
      throw ValidationError("score CSV line " + std::to_string(line_no) + ": " + what);
    };
    if (f.size() != 6) fail("expected 6 fields");
    ScoreRow r;
    r.agent_id = f[0];
    const auto n = parse_double(f[1]);
    const auto mean = parse_double(f[2]);
    if (!n || !mean) fail("n_tasks and mean_score must be numbers");
    r.n_tasks = static_cast<std::size_t>(*n);
    r.mean_score = *mean;
    if (f[3] != "true" && f[3] != "false") fail("informative must be true or false");
    r.informative = f[3] == "true";
    r.e0_hat = parse_double(f[4]);
    r.e1_hat = parse_double(f[5]);
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ValidationError(where() + " must be an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj_.items()) {
      if (!allowed.count(k)) throw ValidationError("unknown key '" + key_path(k) + "'");
    }
  }

  bool has(const char* key) const { return obj_.contains(key); }
  const json& at(const char* key) const { return obj_.at(key); }
  std::string key_path(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_number()) throw ValidationError("'" + key_path(key) + "' must be a number");
    return v.get<double>();
  }

  // Integers built in code are signed even when nonnegative.
  static bool whole(const nlohmann::json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  }

  std::uint64_t unsigned_int(const char* key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!whole(v)) {
      throw ValidationError("'" + key_path(key) + "' must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_boolean()) throw ValidationError("'" + key_path(key) + "' must be true or false");
    return v.get<bool>();
  }

  std::string string(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_string()) throw ValidationError("'" + key_path(key) + "' must be a string");
    return v.get<std::string>();
  }

  std::vector<std::size_t> sizes(const char* key, std::vector<std::size_t> fallback) const {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_array() || v.empty()) {
      throw ValidationError("'" + key_path(key) + "' must be a non-empty array of integers");
    }
    std::vector<std::size_t> out;
    for (const auto& x : v) {
      if (!whole(x)) {
        throw ValidationError("'" + key_path(key) + "' must hold positive integers");
      }
      out.push_back(x.get<std::size_t>());
    }
    return out;
  }

  Reader child(const char* key) const { return Reader(obj_.at(key), key_path(key)); }

 private:
  std::string where() const { return path_.empty() ? "config" : "'" + path_ + "'"; }

  const json& obj_;
  std::string path_;
};

double require_unit(double v, const std::string& key) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("'" + key + "' must lie in [0, 1]");
  return v;
}

double require_open_unit(double v, const std::string& key) {
  if (!(v > 0.0 && v < 1.0)) throw ValidationError("'" + key + "' must lie in (0, 1)");
  return v;
}

RateModel parse_rates(const Reader& r, RateModel model) {
  r.allow({"distribution", "low", "high", "e1", "e0", "spread", "allow_negative_informative"});
  const std::string dist = r.string("distribution", model.kind == RateModel::Kind::uniform
                                                         ? "uniform"
                                                         : "jitter");
  if (dist == "uniform") {
    model.kind = RateModel::Kind::uniform;
  } else if (dist == "jitter") {
    model.kind = RateModel::Kind::jitter;
  } else {
    throw ValidationError("'" + r.key_path("distribution") + "' must be uniform or jitter");
  }
  model.low = require_unit(r.number("low", model.low), r.key_path("low"));
  model.high = require_unit(r.number("high", model.high), r.key_path("high"));
  if (model.low > model.high) throw ValidationError("'" + r.key_path("low") + "' exceeds high");
  model.mean.e1 = require_unit(r.number("e1", model.mean.e1), r.key_path("e1"));
  model.mean.e0 = require_unit(r.number("e0", model.mean.e0), r.key_path("e0"));
  model.spread = require_unit(r.number("spread", model.spread), r.key_path("spread"));
  model.allow_negative_informative =
      r.boolean("allow_negative_informative", model.allow_negative_informative);
  return model;
}

}  // namespace

const char* config_schema_hint() {
  return R"(config is a JSON object:
  elicitation        "signal" | "prediction"                 (required)
  rule               "brier" | "logarithmic" | "spherical" |
                     "one-over-prior" | "posterior-signal"   (required)
  prior_mode         "known" (default) | "one_bit"
  prior              {"p1": 0.6}              used by prior_mode "known"
  p0_majority        true|false               required by prior_mode "one_bit"
  kappa              >= 0 (0.05)              min_tasks        integer (30)
  seed               integer (1)              log_clamp        (0, 0.5) (1e-9)
  reference_mode     "average_peers" | "random_peer"
  moment_estimator   "symmetric" | "positional"
  reporter_rates     {"e1": .., "e0": ..}     posterior-signal rule only
  simulation         {agents, tasks, prior_p1, task_jitter, strategy,
                      strategy_fraction, answers_with_predictions,
                      rates: {distribution, low, high, e1, e0, spread,
                              allow_negative_informative}}
  bench              {seeds, sweep_tasks, sweep_agents, sweep_rates, bootstrap,
                      fidelity_seeds, fidelity_agents, fidelity_tasks,
                      fidelity_tolerance}
  paths              {reports, out})";
}

RunConfig parse_config(const nlohmann::json& doc) {
  Reader root(doc, "");
  root.allow({"elicitation", "rule", "prior_mode", "prior", "p0_majority", "kappa", "min_tasks",
              "seed", "log_clamp", "reference_mode", "moment_estimator", "reporter_rates",
              "simulation", "bench", "paths"});
  if (!root.has("elicitation")) throw ValidationError("missing required key 'elicitation'");
  if (!root.has("rule")) throw ValidationError("missing required key 'rule'");

  RunConfig c;
  c.elicitation = parse_elicitation(root.string("elicitation", ""));
  c.rule = parse_rule_kind(root.string("rule", ""));
  const bool signal_rule = c.rule == RuleKind::one_over_prior || c.rule == RuleKind::posterior_signal;
  if (signal_rule != (c.elicitation == Elicitation::signal)) {
    throw ValidationError(std::string("rule '") + to_string(c.rule) + "' cannot score " +
                          to_string(c.elicitation) + " reports");
  }

  c.kappa = root.number("kappa", c.kappa);
  if (!(c.kappa >= 0.0)) throw ValidationError("'kappa' must be >= 0");
  c.min_tasks = root.unsigned_int("min_tasks", c.min_tasks);
  if (c.min_tasks < 1) throw ValidationError("'min_tasks' must be at least 1");
  c.seed = root.unsigned_int("seed", c.seed);
  c.log_clamp = root.number("log_clamp", c.log_clamp);
  if (!(c.log_clamp > 0.0 && c.log_clamp < 0.5)) {
    throw ValidationError("'log_clamp' must lie in (0, 0.5)");
  }
  c.reference = parse_reference_mode(root.string("reference_mode", to_string(c.reference)));
  c.estimator = parse_moment_estimator(root.string("moment_estimator", to_string(c.estimator)));

  double prior_p1 = 0.6;
  if (root.has("prior")) {
    Reader p = root.child("prior");
    p.allow({"p1"});
    if (!p.has("p1")) throw ValidationError("'prior' needs 'p1'");
    prior_p1 = require_open_unit(p.number("p1", prior_p1), "prior.p1");
  }
  const std::string mode = root.string("prior_mode", "known");
  if (mode == "known") {
    if (root.has("p0_majority")) {
      throw ValidationError("'p0_majority' only applies to prior_mode one_bit");
    }
    const Prior prior = Prior::from_p1(prior_p1);
    if (prior.near_uniform(1e-9)) throw ValidationError("known prior must not be uniform");
    c.prior_mode = PriorMode::known_prior(prior);
  } else if (mode == "one_bit") {
    if (!root.has("p0_majority")) {
      throw ValidationError("prior_mode one_bit needs 'p0_majority' (is Pr[y=0] > 0.5?)");
    }
    c.prior_mode = PriorMode::one_bit(root.boolean("p0_majority", false));
  } else {
    throw ValidationError("'prior_mode' must be known or one_bit");
  }

  if (root.has("reporter_rates")) {
    Reader r = root.child("reporter_rates");
    r.allow({"e1", "e0"});
    if (!r.has("e1") || !r.has("e0")) throw ValidationError("'reporter_rates' needs e1 and e0");
    c.reporter_rates = ErrorRates{require_unit(r.number("e1", 0), "reporter_rates.e1"),
                                  require_unit(r.number("e0", 0), "reporter_rates.e0")};
  }
  if (c.rule == RuleKind::posterior_signal && !c.reporter_rates) {
    throw ValidationError("rule posterior-signal needs 'reporter_rates'");
  }

  SimConfig& sim = c.simulation;
  sim.elicitation = c.elicitation;
  sim.prior = Prior::from_p1(prior_p1);
  if (root.has("simulation")) {
    Reader s = root.child("simulation");
    s.allow({"agents", "tasks", "prior_p1", "task_jitter", "strategy", "strategy_fraction",
             "answers_with_predictions", "rates"});
    sim.agents = s.unsigned_int("agents", sim.agents);
    sim.tasks = s.unsigned_int("tasks", sim.tasks);
    if (sim.agents < 3) throw ValidationError("'simulation.agents' must be at least 3");
    if (sim.tasks < 1) throw ValidationError("'simulation.tasks' must be at least 1");
    if (s.has("prior_p1")) {
      sim.prior = Prior::from_p1(require_open_unit(s.number("prior_p1", 0.6), "simulation.prior_p1"));
    }
    sim.task_jitter = require_unit(s.number("task_jitter", 0.0), "simulation.task_jitter");
    sim.behaviour = parse_behaviour(s.string("strategy", "truthful"));
    sim.behaviour_fraction =
        require_unit(s.number("strategy_fraction", 1.0), "simulation.strategy_fraction");
    sim.answers_with_predictions = s.boolean("answers_with_predictions", true);
    if (s.has("rates")) sim.rates = parse_rates(s.child("rates"), sim.rates);
  }

  if (root.has("bench")) {
    Reader b = root.child("bench");
    b.allow({"seeds", "sweep_tasks", "sweep_agents", "sweep_rates", "bootstrap", "fidelity_seeds",
             "fidelity_agents", "fidelity_tasks", "fidelity_tolerance"});
    BenchSettings& bs = c.bench;
    bs.seeds = b.unsigned_int("seeds", bs.seeds);
    bs.sweep_tasks = b.sizes("sweep_tasks", bs.sweep_tasks);
    bs.sweep_agents = b.sizes("sweep_agents", bs.sweep_agents);
    if (b.has("sweep_rates")) bs.sweep_rates = parse_rates(b.child("sweep_rates"), bs.sweep_rates);
    bs.bootstrap = b.unsigned_int("bootstrap", bs.bootstrap);
    bs.fidelity_seeds = b.unsigned_int("fidelity_seeds", bs.fidelity_seeds);
    bs.fidelity_agents = b.unsigned_int("fidelity_agents", bs.fidelity_agents);
    bs.fidelity_tasks = b.unsigned_int("fidelity_tasks", bs.fidelity_tasks);
    bs.fidelity_tolerance = b.number("fidelity_tolerance", bs.fidelity_tolerance);
    if (bs.seeds < 1 || bs.fidelity_seeds < 1 || bs.bootstrap < 1) {
      throw ValidationError("bench seed and bootstrap counts must be positive");
    }
    for (auto n : bs.sweep_agents) {
      if (n < 4) throw ValidationError("'bench.sweep_agents' entries must be at least 4");
    }
    if (bs.fidelity_agents < 4) throw ValidationError("'bench.fidelity_agents' must be at least 4");
  }

  if (root.has("paths")) {
    Reader p = root.child("paths");
    p.allow({"reports", "out"});
    c.reports_path = p.string("reports", c.reports_path);
    c.out_dir = p.string("out", c.out_dir);
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

void apply_environment(RunConfig& config) {
  if (const char* seed = std::getenv("SERUM_SEED"); seed != nullptr && *seed != '\0') {
    char* end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(seed, &end, 10);
    if (errno != 0 || *end != '\0' || seed[0] == '-') {
      throw ValidationError("SERUM_SEED must be an unsigned integer");
    }
    config.seed = v;
  }
  if (const char* out = std::getenv("SERUM_OUT"); out != nullptr && *out != '\0') {
    config.out_dir = out;
  }
}

ScoringRule RunConfig::scoring_rule() const {
  const Prior prior = prior_mode.known ? prior_mode.prior : Prior{0.5, 0.5};
  switch (rule) {
    case RuleKind::brier: return ScoringRule::brier();
    case RuleKind::logarithmic: return ScoringRule::logarithmic(log_clamp);
    case RuleKind::spherical: return ScoringRule::spherical();
    case RuleKind::one_over_prior: return ScoringRule::one_over_prior(prior);
    case RuleKind::posterior_signal:
      if (!reporter_rates) throw ValidationError("rule posterior-signal needs reporter_rates");
      return ScoringRule::posterior_signal(prior, *reporter_rates);
  }
  throw ValidationError("unsupported rule");
}

DtsConfig RunConfig::dts_config(unsigned jobs) const {
  DtsConfig d;
  d.rule = scoring_rule();
  d.elicitation = elicitation;
  d.prior_mode = prior_mode;
  d.solver.kappa = kappa;
  d.min_tasks = min_tasks;
  d.seed = seed;
  d.reference = reference;
  d.estimator = estimator;
  d.jobs = jobs;
  return d;
}

}  // namespace serum
