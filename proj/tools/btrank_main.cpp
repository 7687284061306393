// btrank: schedule pairwise difficulty matches, obtain judgments (remote LLM
// or simulated oracle), fit Bradley-Terry strengths, and run the evaluation
// protocols (correlations, convergence, noise robustness, tier separation,
// recovery). Configuration comes from an optional JSON file plus flags;
// flags win. All outputs are deterministic given --seed.

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "btrank/bt_fit.hpp"
#include "btrank/errors.hpp"
#include "btrank/experiments.hpp"
#include "btrank/judge.hpp"
#include "btrank/match_log.hpp"
#include "btrank/problem_store.hpp"
#include "btrank/prompts.hpp"
#include "btrank/schedule.hpp"
#include "btrank/stats.hpp"
#include "btrank/version.hpp"

namespace fs = std::filesystem;
using btrank::ConfigError;
using btrank::DataError;
using btrank::TransportError;
using ordered_json = nlohmann::ordered_json;

namespace {

struct Cli {
  std::string config_path;
  std::string problems_path;
  std::string problems_format = "jsonl";
  std::string out_dir = "out";
  std::uint64_t seed = 0;

  std::string mode = "sampled";
  int matches_per_problem = 36;

  std::string judge_kind = "simulated";
  std::string endpoint_url;
  std::string model_name;
  std::string api_key_env = "BTRANK_API_KEY";
  int max_retries = 3;
  int timeout_ms = 120000;
  int concurrency = 1;
  std::string strengths_path;
  double flip_rate = 0.0;
  bool log_wire = false;
  bool progress = false;

  double alpha = 0.01;
  double tol = 1e-8;
  int max_iter = 200;

  std::string schedule_path;
  std::string log_path;
  std::string scores_path;
  std::vector<std::string> measures;  // name=path entries
  std::string levels = "6,12,24,30,36,48,66,96,128,160,192";
  std::string noise_levels = "0.01,0.02,0.05,0.1";
  int replicates = 1000;
  std::string target = "compare";
  std::string values_path;
  std::string groups_path;
  int recover_n = 100;
  std::string dist = "normal";
  double dist_mean = 0.0;
  double dist_stddev = 1.0;
  double dist_lo = -2.0;
  double dist_hi = 2.0;
  std::string series_name = "llm_labels";
};

template <typename T>
void maybe(const ordered_json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void apply_config(Cli& cli, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  ordered_json j;
  try {
    j = ordered_json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }

  maybe(j, "problems", cli.problems_path);
  maybe(j, "problems_format", cli.problems_format);
  maybe(j, "out_dir", cli.out_dir);
  maybe(j, "seed", cli.seed);
  if (j.contains("schedule")) {
    const auto& s = j.at("schedule");
    maybe(s, "mode", cli.mode);
    maybe(s, "matches_per_problem", cli.matches_per_problem);
  }
  if (j.contains("judge")) {
    const auto& g = j.at("judge");
    maybe(g, "kind", cli.judge_kind);
    maybe(g, "endpoint_url", cli.endpoint_url);
    maybe(g, "model_name", cli.model_name);
    maybe(g, "api_key_env", cli.api_key_env);
    maybe(g, "max_retries", cli.max_retries);
    maybe(g, "timeout_ms", cli.timeout_ms);
    maybe(g, "concurrency", cli.concurrency);
    maybe(g, "true_strengths", cli.strengths_path);
    maybe(g, "flip_rate", cli.flip_rate);
    maybe(g, "log_wire", cli.log_wire);
  }
  if (j.contains("fit")) {
    const auto& f = j.at("fit");
    maybe(f, "alpha", cli.alpha);
    maybe(f, "tol", cli.tol);
    maybe(f, "max_iter", cli.max_iter);
  }
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex16(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

// Hash of the effective (post-merge) settings, stamped into outputs so a
// result file names the configuration that produced it.
std::string config_hash(const Cli& cli) {
  ordered_json j;
  j["problems"] = cli.problems_path;
  j["seed"] = cli.seed;
  j["mode"] = cli.mode;
  j["matches_per_problem"] = cli.matches_per_problem;
  j["judge"] = {{"kind", cli.judge_kind},
                {"endpoint_url", cli.endpoint_url},
                {"model_name", cli.model_name},
                {"max_retries", cli.max_retries},
                {"concurrency", cli.concurrency},
                {"true_strengths", cli.strengths_path},
                {"flip_rate", cli.flip_rate}};
  j["fit"] = {{"alpha", cli.alpha}, {"tol", cli.tol}, {"max_iter", cli.max_iter}};
  return hex16(fnv1a64(j.dump()));
}

std::string provenance(const Cli& cli) {
  return std::string("btrank ") + btrank::kVersion +
         " seed=" + std::to_string(cli.seed) + " config=" + config_hash(cli);
}

btrank::ProblemSet load_problem_set(const Cli& cli) {
  if (cli.problems_path.empty())
    throw ConfigError("no problems file given (--problems or config)");
  btrank::ProblemFormat format;
  if (cli.problems_format == "jsonl")
    format = btrank::ProblemFormat::jsonl;
  else if (cli.problems_format == "csv")
    format = btrank::ProblemFormat::csv;
  else
    throw ConfigError("problems format must be jsonl or csv, got '" +
                      cli.problems_format + "'");
  return btrank::load_problems(cli.problems_path, format);
}

btrank::FitParams fit_params(const Cli& cli) {
  btrank::FitParams params;
  params.alpha = cli.alpha;
  params.tol = cli.tol;
  params.max_iter = cli.max_iter;
  return params;
}

fs::path out_file(const Cli& cli, const std::string& name) {
  fs::create_directories(cli.out_dir);
  return fs::path(cli.out_dir) / name;
}

void write_json(const ordered_json& j, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = std::min(csv.find(',', pos), csv.size());
    const std::string tok = csv.substr(pos, comma - pos);
    if (!tok.empty()) out.push_back(static_cast<int>(std::stol(tok)));
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError("empty integer list '" + csv + "'");
  return out;
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = std::min(csv.find(',', pos), csv.size());
    const std::string tok = csv.substr(pos, comma - pos);
    if (!tok.empty()) out.push_back(std::stod(tok));
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError("empty number list '" + csv + "'");
  return out;
}

std::string format_double(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw DataError("double formatting failed");
  return std::string(buf, p);
}

btrank::SimulatedJudge simulated_judge(const Cli& cli) {
  if (cli.strengths_path.empty())
    throw ConfigError("simulated judge needs --strengths (id,beta CSV)");
  btrank::SimulatedJudge judge;
  judge.true_strengths = btrank::load_scores(cli.strengths_path);
  judge.seed = cli.seed;
  judge.flip_rate = cli.flip_rate;
  judge.validate();
  return judge;
}

btrank::JudgeConfig remote_config(const Cli& cli) {
  btrank::JudgeConfig config;
  config.kind = btrank::JudgeKind::remote;
  config.endpoint_url = cli.endpoint_url;
  config.model_name = cli.model_name;
  config.api_key_env = cli.api_key_env;
  config.max_retries = cli.max_retries;
  config.timeout = std::chrono::milliseconds(cli.timeout_ms);
  config.concurrency_limit = cli.concurrency;
  config.log_wire = cli.log_wire;
  config.validate();
  return config;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_schedule(const Cli& cli) {
  const btrank::ProblemSet problems = load_problem_set(cli);
  btrank::Schedule schedule;
  if (cli.mode == "round_robin")
    schedule = btrank::round_robin(problems, cli.seed);
  else if (cli.mode == "sampled")
    schedule = btrank::sampled(problems, cli.matches_per_problem, cli.seed);
  else
    throw ConfigError("schedule mode must be round_robin or sampled, got '" +
                      cli.mode + "'");

  const fs::path path = out_file(cli, "schedule.jsonl");
  btrank::write_schedule(schedule, path);

  ordered_json summary;
  summary["n"] = problems.size();
  summary["mode"] = cli.mode;
  summary["matches_per_problem"] = schedule.matches_per_problem;
  summary["total_pairs"] = schedule.pairs.size();
  summary["connected"] = btrank::schedule_connected(schedule, problems);
  summary["schedule"] = path.string();
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int cmd_run(const Cli& cli) {
  const btrank::ProblemSet problems = load_problem_set(cli);
  const fs::path schedule_path = cli.schedule_path.empty()
                                     ? out_file(cli, "schedule.jsonl")
                                     : fs::path(cli.schedule_path);
  const btrank::Schedule schedule = btrank::load_schedule(schedule_path);
  const fs::path log_path = cli.log_path.empty() ? out_file(cli, "matches.jsonl")
                                                 : fs::path(cli.log_path);

  btrank::RunOptions options;
  options.concurrency = cli.concurrency;
  options.progress = cli.progress;

  btrank::RunSummary summary;
  if (cli.judge_kind == "simulated") {
    summary = btrank::run_schedule(schedule, problems,
                                   btrank::make_comparator(simulated_judge(cli)),
                                   log_path, options);
  } else if (cli.judge_kind == "remote") {
    btrank::RemoteJudge judge(remote_config(cli));
    summary = btrank::run_schedule(schedule, problems,
                                   btrank::make_comparator(judge), log_path,
                                   options);
  } else {
    throw ConfigError("judge kind must be simulated or remote, got '" +
                      cli.judge_kind + "'");
  }

  ordered_json j;
  j["schedule"] = schedule_path.string();
  j["log"] = log_path.string();
  j["played"] = summary.played;
  j["discarded"] = summary.discarded;
  j["skipped"] = summary.skipped;
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_fit(const Cli& cli) {
  const btrank::ProblemSet problems = load_problem_set(cli);
  const fs::path log_path = cli.log_path.empty() ? out_file(cli, "matches.jsonl")
                                                 : fs::path(cli.log_path);
  const btrank::MatchLog log = btrank::load_match_log(log_path);
  const std::vector<btrank::MatchRecord> records = log.decided();
  if (records.empty())
    throw DataError("match log '" + log_path.string() + "' has no decided matches");

  const btrank::WinMatrix wins = btrank::build_win_matrix(records, problems);
  const btrank::ConnectivityReport connectivity = btrank::check_connectivity(wins);
  if (!connectivity.connected) {
    std::cerr << "warning: comparison graph is disconnected ("
              << connectivity.components.size()
              << " components); strengths are only jointly identifiable "
                 "within components and lean on alpha regularization\n";
    for (const auto& component : connectivity.components)
      std::cerr << "  component of " << component.front() << ": "
                << component.size() << " problems\n";
  }

  const btrank::BTScores scores = btrank::ilsr_fit(wins, fit_params(cli));
  const fs::path scores_path = out_file(cli, "scores.csv");
  btrank::write_scores(scores, scores_path, provenance(cli));

  ordered_json diag;
  diag["version"] = btrank::kVersion;
  diag["seed"] = cli.seed;
  diag["config"] = config_hash(cli);
  diag["n"] = wins.n;
  diag["matches"] = records.size();
  diag["discarded"] = log.discarded_count();
  diag["alpha"] = cli.alpha;
  diag["iterations"] = scores.iterations;
  diag["converged"] = scores.converged;
  diag["residual"] = scores.residual;
  diag["connected"] = connectivity.connected;
  if (!connectivity.connected) {
    ordered_json sizes = ordered_json::array();
    for (const auto& component : connectivity.components)
      sizes.push_back(component.size());
    diag["component_sizes"] = sizes;
  }
  diag["scores"] = scores_path.filename().string();
  write_json(diag, out_file(cli, "fit.json"));
  std::cout << diag.dump(2) << '\n';
  return 0;
}

int cmd_correlate(const Cli& cli) {
  const fs::path scores_path = cli.scores_path.empty()
                                   ? out_file(cli, "scores.csv")
                                   : fs::path(cli.scores_path);
  const std::map<std::string, double> scores = btrank::load_scores(scores_path);
  if (cli.measures.empty())
    throw ConfigError("correlate needs at least one --measure name=path");

  std::vector<std::string> order;
  for (const auto& [id, beta] : scores) order.push_back(id);

  ordered_json table = ordered_json::array();
  std::string csv = "measure,n,pearson,spearman,kendall\n";
  std::cout << "measure            n     pearson  spearman  kendall\n";
  for (const std::string& spec : cli.measures) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
      throw ConfigError("--measure expects name=path, got '" + spec + "'");
    const std::string name = spec.substr(0, eq);
    const std::string path = spec.substr(eq + 1);
    const btrank::MeasureSeries series =
        btrank::load_measure(path, btrank::MeasureKind::human_label, name);

    const btrank::PairedSeries s =
        btrank::align_by_id(order, scores, series.values);
    const double r = btrank::pearson(s);
    const double rho = btrank::spearman(s);
    const double tau = btrank::kendall_tau_b(s);

    ordered_json row;
    row["measure"] = name;
    row["n"] = s.size();
    row["pearson"] = r;
    row["spearman"] = rho;
    row["kendall"] = tau;
    table.push_back(row);
    csv += name + "," + std::to_string(s.size()) + "," + format_double(r) +
           "," + format_double(rho) + "," + format_double(tau) + "\n";

    std::cout << std::left << std::setw(17) << name << std::right
              << std::setw(6) << s.size() << "  " << std::fixed
              << std::setprecision(4) << std::setw(8) << r << "  "
              << std::setw(8) << rho << "  " << std::setw(7) << tau << "\n"
              << std::defaultfloat;
  }

  {
    std::ofstream out(out_file(cli, "correlations.csv"),
                      std::ios::binary | std::ios::trunc);
    out << "# " << provenance(cli) << '\n' << csv;
  }
  ordered_json j;
  j["version"] = btrank::kVersion;
  j["seed"] = cli.seed;
  j["config"] = config_hash(cli);
  j["correlations"] = table;
  write_json(j, out_file(cli, "correlations.json"));
  return 0;
}

int cmd_converge(const Cli& cli) {
  const btrank::ProblemSet problems = load_problem_set(cli);
  const fs::path log_path = cli.log_path.empty() ? out_file(cli, "matches.jsonl")
                                                 : fs::path(cli.log_path);
  const std::vector<btrank::MatchRecord> records =
      btrank::load_match_log(log_path).decided();

  const btrank::ConvergenceReport report = btrank::convergence_experiment(
      records, problems, parse_int_list(cli.levels), fit_params(cli), cli.seed);

  std::string csv = "level,matches,pearson,spearman,kendall,exact_degree\n";
  for (const auto& row : report.rows)
    csv += std::to_string(row.level) + "," + std::to_string(row.matches) +
           "," + format_double(row.pearson) + "," +
           format_double(row.spearman) + "," + format_double(row.kendall) +
           "," + (row.exact_degree ? "1" : "0") + "\n";
  {
    std::ofstream out(out_file(cli, "convergence.csv"),
                      std::ios::binary | std::ios::trunc);
    out << "# " << provenance(cli) << '\n' << csv;
  }

  ordered_json j;
  j["version"] = btrank::kVersion;
  j["seed"] = cli.seed;
  j["config"] = config_hash(cli);
  j["reference_level"] = report.reference_level;
  if (report.first_passing_level)
    j["first_passing_level"] = *report.first_passing_level;
  else
    j["first_passing_level"] = nullptr;
  ordered_json rows = ordered_json::array();
  for (const auto& row : report.rows)
    rows.push_back(ordered_json{{"level", row.level},
                                {"matches", row.matches},
                                {"pearson", row.pearson},
                                {"spearman", row.spearman},
                                {"kendall", row.kendall},
                                {"exact_degree", row.exact_degree}});
  j["rows"] = rows;
  write_json(j, out_file(cli, "convergence.json"));
  std::cout << j.dump(2) << '\n';
  return 0;
}

const char* target_name(btrank::NoiseTarget target) {
  switch (target) {
    case btrank::NoiseTarget::performance: return "performance";
    case btrank::NoiseTarget::labels: return "labels";
    case btrank::NoiseTarget::compare: return "compare";
  }
  return "?";
}

int cmd_robustness(const Cli& cli) {
  btrank::NoiseSpec spec;
  spec.levels = parse_double_list(cli.noise_levels);
  spec.replicates = cli.replicates;
  spec.seed = cli.seed;

  btrank::RobustnessInputs inputs;
  btrank::ProblemSet problems;
  if (cli.target == "compare") {
    spec.target = btrank::NoiseTarget::compare;
    problems = load_problem_set(cli);
    const fs::path log_path = cli.log_path.empty()
                                  ? out_file(cli, "matches.jsonl")
                                  : fs::path(cli.log_path);
    inputs.records = btrank::load_match_log(log_path).decided();
    inputs.problems = &problems;
  } else if (cli.target == "performance" || cli.target == "labels") {
    if (cli.values_path.empty())
      throw ConfigError("robustness target '" + cli.target +
                        "' needs --values (id,score CSV)");
    const btrank::MeasureSeries series = btrank::load_measure(
        cli.values_path,
        cli.target == "labels" ? btrank::MeasureKind::llm_label
                               : btrank::MeasureKind::llm_performance);
    if (cli.target == "labels") {
      spec.target = btrank::NoiseTarget::labels;
      for (const auto& [id, v] : series.values)
        inputs.labels.push_back(static_cast<int>(v));
    } else {
      spec.target = btrank::NoiseTarget::performance;
      for (const auto& [id, v] : series.values) inputs.performance.push_back(v);
    }
  } else {
    throw ConfigError("robustness target must be compare, labels, or "
                      "performance, got '" + cli.target + "'");
  }

  const btrank::RobustnessReport report =
      btrank::robustness_experiment(inputs, spec, fit_params(cli));

  std::string csv =
      "target,level,replicates,mean_pearson,mean_spearman,mean_kendall,"
      "fit_failures\n";
  for (const auto& row : report.rows)
    csv += std::string(target_name(row.target)) + "," +
           format_double(row.level) + "," + std::to_string(row.replicates) +
           "," + format_double(row.mean_pearson) + "," +
           format_double(row.mean_spearman) + "," +
           format_double(row.mean_kendall) + "," +
           std::to_string(row.fit_failures) + "\n";
  {
    std::ofstream out(out_file(cli, "robustness.csv"),
                      std::ios::binary | std::ios::trunc);
    out << "# " << provenance(cli) << '\n' << csv;
  }
  std::cout << csv;
  return 0;
}

int cmd_tiers(const Cli& cli) {
  const fs::path scores_path = cli.scores_path.empty()
                                   ? out_file(cli, "scores.csv")
                                   : fs::path(cli.scores_path);
  if (cli.groups_path.empty())
    throw ConfigError("tiers needs --groups (id,tier CSV)");

  const std::map<std::string, double> score_map =
      btrank::load_scores(scores_path);
  btrank::BTScores scores;
  for (const auto& [id, beta] : score_map) {
    scores.ids.push_back(id);
    scores.beta.push_back(beta);
  }

  const btrank::SeparationReport report =
      btrank::tier_separation(scores, btrank::load_tiers(cli.groups_path));

  ordered_json j;
  j["version"] = btrank::kVersion;
  j["seed"] = cli.seed;
  j["config"] = config_hash(cli);
  j["tier_a"] = report.tier_a;
  j["tier_b"] = report.tier_b;
  j["mean_a"] = report.mean_a;
  j["mean_b"] = report.mean_b;
  j["mean_gap"] = report.mean_gap;
  j["cohens_d"] = report.cohens_d;
  j["wasserstein_norm"] = report.wasserstein_norm;
  write_json(j, out_file(cli, "tiers.json"));

  std::string csv = "tier,score\n";
  for (double v : report.scores_a)
    csv += report.tier_a + "," + format_double(v) + "\n";
  for (double v : report.scores_b)
    csv += report.tier_b + "," + format_double(v) + "\n";
  {
    std::ofstream out(out_file(cli, "tier_scores.csv"),
                      std::ios::binary | std::ios::trunc);
    out << "# " << provenance(cli) << '\n' << csv;
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_recover(const Cli& cli) {
  btrank::StrengthSampler sampler;
  if (cli.dist == "normal") {
    sampler.kind = btrank::StrengthSampler::Kind::normal;
    sampler.mean = cli.dist_mean;
    sampler.stddev = cli.dist_stddev;
  } else if (cli.dist == "uniform") {
    sampler.kind = btrank::StrengthSampler::Kind::uniform;
    sampler.lo = cli.dist_lo;
    sampler.hi = cli.dist_hi;
  } else {
    throw ConfigError("dist must be normal or uniform, got '" + cli.dist + "'");
  }

  const btrank::RecoveryReport report = btrank::recovery_experiment(
      cli.recover_n, cli.matches_per_problem, sampler, fit_params(cli),
      cli.seed);

  ordered_json j;
  j["version"] = btrank::kVersion;
  j["seed"] = cli.seed;
  j["config"] = config_hash(cli);
  j["n"] = report.n;
  j["matches_per_problem"] = report.matches_per_problem;
  j["pearson"] = report.pearson;
  j["spearman"] = report.spearman;
  j["kendall"] = report.kendall;
  write_json(j, out_file(cli, "recovery.json"));

  std::string csv = "id,true_beta,fitted_beta\n";
  for (std::size_t i = 0; i < report.fitted.ids.size(); ++i)
    csv += report.fitted.ids[i] + "," + format_double(report.true_beta[i]) +
           "," + format_double(report.fitted.beta[i]) + "\n";
  {
    std::ofstream out(out_file(cli, "recovery_scores.csv"),
                      std::ios::binary | std::ios::trunc);
    out << "# " << provenance(cli) << '\n' << csv;
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_label(const Cli& cli) {
  const btrank::ProblemSet problems = load_problem_set(cli);
  if (cli.judge_kind != "remote")
    throw ConfigError("label requires a remote judge (--judge remote)");
  btrank::RemoteJudge judge(remote_config(cli));
  const btrank::MeasureSeries series =
      btrank::label_problems(problems, judge, cli.series_name);
  const fs::path path = out_file(cli, "labels.csv");
  btrank::write_measure(series, path, provenance(cli));

  ordered_json j;
  j["labels"] = path.string();
  j["n"] = series.values.size();
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Cli cli;

  // The config file loads before flag parsing so flags override it.
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc)
      cli.config_path = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0)
      cli.config_path = arg.substr(9);
  }
  try {
    if (!cli.config_path.empty()) apply_config(cli, cli.config_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  CLI::App app{"pairwise difficulty ranking via Bradley-Terry strengths"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string("btrank ") + btrank::kVersion);

  app.add_option("--config", cli.config_path, "JSON config file");
  app.add_option("--problems", cli.problems_path, "problems file (JSONL or CSV)");
  app.add_option("--problems-format", cli.problems_format, "jsonl or csv");
  app.add_option("--out-dir", cli.out_dir, "output directory");
  app.add_option("--seed", cli.seed, "master seed");
  app.add_option("--mode", cli.mode, "schedule mode: round_robin or sampled");
  app.add_option("-M,--matches-per-problem", cli.matches_per_problem,
                 "matches per problem (sampled mode)");
  app.add_option("--judge", cli.judge_kind, "judge kind: simulated or remote");
  app.add_option("--endpoint", cli.endpoint_url, "chat-completions endpoint URL");
  app.add_option("--model", cli.model_name, "model name sent to the endpoint");
  app.add_option("--api-key-env", cli.api_key_env,
                 "environment variable holding the API key");
  app.add_option("--retries", cli.max_retries, "retries after a failed attempt");
  app.add_option("--timeout-ms", cli.timeout_ms, "per-request timeout");
  app.add_option("--concurrency", cli.concurrency, "in-flight comparison limit");
  app.add_option("--strengths", cli.strengths_path,
                 "true strengths CSV for the simulated judge");
  app.add_option("--flip-rate", cli.flip_rate,
                 "simulated judge answer flip probability");
  app.add_flag("--log-wire", cli.log_wire, "dump HTTP bodies to stderr");
  app.add_flag("--progress", cli.progress, "print progress while running");
  app.add_option("--alpha", cli.alpha, "fit regularization");
  app.add_option("--tol", cli.tol, "fit convergence tolerance");
  app.add_option("--max-iter", cli.max_iter, "fit iteration cap");
  app.add_option("--schedule-file", cli.schedule_path, "schedule JSONL path");
  app.add_option("--log", cli.log_path, "match log JSONL path");
  app.add_option("--scores", cli.scores_path, "fitted scores CSV path");

  app.add_subcommand("schedule", "write the match schedule");
  app.add_subcommand("run", "play the schedule and append the match log");
  app.add_subcommand("fit", "fit strengths from the match log");
  auto* correlate =
      app.add_subcommand("correlate", "correlate scores with measures");
  correlate->add_option("--measure", cli.measures,
                        "name=path of an id,score CSV (repeatable)");
  auto* converge =
      app.add_subcommand("converge", "correlations vs matches per problem");
  converge->add_option("--levels", cli.levels, "comma-separated match levels");
  auto* robustness =
      app.add_subcommand("robustness", "noise-injection robustness");
  robustness->add_option("--target", cli.target,
                         "compare, labels, or performance");
  robustness->add_option("--noise-levels", cli.noise_levels,
                         "comma-separated corruption fractions");
  robustness->add_option("--replicates", cli.replicates, "replicates per level");
  robustness->add_option("--values", cli.values_path,
                         "clean values CSV (labels/performance targets)");
  auto* tiers = app.add_subcommand("tiers", "two-tier separation statistics");
  tiers->add_option("--groups", cli.groups_path, "id,tier CSV");
  auto* recover =
      app.add_subcommand("recover", "simulated strength recovery study");
  recover->add_option("--n", cli.recover_n, "number of synthetic problems");
  recover->add_option("--dist", cli.dist, "strength distribution: normal or uniform");
  recover->add_option("--dist-mean", cli.dist_mean, "normal mean");
  recover->add_option("--dist-stddev", cli.dist_stddev, "normal stddev");
  recover->add_option("--dist-lo", cli.dist_lo, "uniform lower bound");
  recover->add_option("--dist-hi", cli.dist_hi, "uniform upper bound");
  auto* label = app.add_subcommand("label", "batch 1-10 difficulty labeling");
  label->add_option("--series-name", cli.series_name, "measure series name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand("schedule")) return cmd_schedule(cli);
    if (app.got_subcommand("run")) return cmd_run(cli);
    if (app.got_subcommand("fit")) return cmd_fit(cli);
    if (app.got_subcommand("correlate")) return cmd_correlate(cli);
    if (app.got_subcommand("converge")) return cmd_converge(cli);
    if (app.got_subcommand("robustness")) return cmd_robustness(cli);
    if (app.got_subcommand("tiers")) return cmd_tiers(cli);
    if (app.got_subcommand("recover")) return cmd_recover(cli);
    if (app.got_subcommand("label")) return cmd_label(cli);
    throw ConfigError("no subcommand given");
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const TransportError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
