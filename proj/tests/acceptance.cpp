// Acceptance gate: one self-contained check per advertised guarantee, one
// PASS/FAIL line each on stdout, exit 0 only when every check passes.
//
// Checks 3, 4, and 9 additionally pin the exact values produced by the fixed
// seeds as regression guards; a legitimate algorithm change must update the
// pins alongside the code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "btrank/bt_fit.hpp"
#include "btrank/experiments.hpp"
#include "btrank/judge.hpp"
#include "btrank/match_log.hpp"
#include "btrank/problem.hpp"
#include "btrank/problem_store.hpp"
#include "btrank/prompts.hpp"
#include "btrank/rng.hpp"
#include "btrank/schedule.hpp"
#include "btrank/stats.hpp"
#include "oracle.hpp"

namespace fs = std::filesystem;
using namespace btrank;
using btrank::testing::kendall_brute;
using btrank::testing::mle_oracle;
using Clock = std::chrono::steady_clock;

namespace {

// ---------------------------------------------------------------------------
// Pinned regression values. Measured once from the fixed seeds below, then
// locked: any drift beyond round-off means the algorithms changed behavior.
// ---------------------------------------------------------------------------
constexpr std::optional<double> kPinRecoverySpearman = 0.93558955895589568;
constexpr std::optional<int> kPinFirstPassingLevel = 96;
constexpr std::optional<double> kPinTierCohensD = 4.9749754902023922;
constexpr std::optional<double> kPinTierWasserstein = 0.49115919863176316;
constexpr double kPinTolerance = 1e-9;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream ss;
  ss.precision(precision);
  ss << v;
  return ss.str();
}

ProblemSet synthetic_problems(int n) {
  ProblemSet set;
  for (int i = 0; i < n; ++i) {
    std::string num = std::to_string(i + 1);
    num.insert(0, num.size() < 3 ? 3 - num.size() : 0, '0');
    set.add({"p" + num, "synthetic problem " + num, {}});
  }
  return set;
}

PairedSeries ps(std::vector<double> x, std::vector<double> y) {
  PairedSeries s;
  s.x = std::move(x);
  s.y = std::move(y);
  return s;
}

bool check_pin(std::optional<double> pin, double measured, std::string label,
               std::string& detail) {
  if (!pin.has_value()) {
    detail += "; " + label + " pin UNSET, measured " + fmt(measured, 17);
    return false;
  }
  const bool ok = std::abs(measured - *pin) <= kPinTolerance;
  if (!ok)
    detail += "; " + label + " drifted: measured " + fmt(measured, 17) +
              " vs pin " + fmt(*pin, 17);
  return ok;
}

// ---------------------------------------------------------------------------
// 1. Spectral fit equals an independent penalized-likelihood maximizer.
// ---------------------------------------------------------------------------
Outcome check_oracle_equivalence() {
  const auto t0 = Clock::now();
  Rng rng(811);
  double max_err = 0.0;
  double max_ll_deficit = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const int n = 3 + static_cast<int>(rng.below(3));
    const ProblemSet problems = synthetic_problems(n);
    const int total = 10 + static_cast<int>(rng.below(31));
    std::vector<MatchRecord> records;
    records.reserve(static_cast<std::size_t>(total));
    for (int t = 0; t < total; ++t) {
      const auto i = rng.below(static_cast<std::uint64_t>(n));
      auto j = rng.below(static_cast<std::uint64_t>(n - 1));
      if (j >= i) ++j;
      const Winner w = (rng.next_u64() & 1) ? Winner::first : Winner::second;
      records.push_back(MatchRecord{static_cast<std::uint64_t>(t + 1),
                                    problems[i].id, problems[j].id, w, "sim",
                                    ""});
    }
    const WinMatrix wins = build_win_matrix(records, problems);
    const FitParams params;
    const BTScores fit = ilsr_fit(wins, params);
    const std::vector<double> oracle = mle_oracle(wins, params.alpha);
    for (std::size_t k = 0; k < oracle.size(); ++k)
      max_err = std::max(max_err, std::abs(fit.beta[k] - oracle[k]));
    const double deficit =
        penalized_log_likelihood(oracle, wins, params.alpha) -
        penalized_log_likelihood(fit.beta, wins, params.alpha);
    max_ll_deficit = std::max(max_ll_deficit, deficit);
  }
  const double elapsed = seconds_since(t0);
  Outcome out;
  out.pass = max_err <= 1e-3 && max_ll_deficit <= 1e-6 && elapsed < 10.0;
  out.detail = "50 instances; max coordinate gap " + fmt(max_err, 3) +
               ", worst likelihood deficit " + fmt(max_ll_deficit, 3) + ", " +
               fmt(elapsed, 2) + " s";
  return out;
}

// ---------------------------------------------------------------------------
// 2. Win-probability contract.
// ---------------------------------------------------------------------------
Outcome check_win_probability() {
  Outcome out;
  bool ok = std::abs(win_probability(1.0, 0.0) - 0.7310585786300049) <= 1e-6;
  ok = ok && win_probability(0.0, 0.0) == 0.5;
  Rng rng(812);
  bool complement_exact = true;
  for (int t = 0; t < 4000; ++t) {
    const double a = 16.0 * (rng.unit() - 0.5);
    const double b = 16.0 * (rng.unit() - 0.5);
    if (win_probability(a, b) + win_probability(b, a) != 1.0)
      complement_exact = false;
  }
  bool equal_gaps_exact = true;
  // Quantize to multiples of 2^-10 so that off + gap is computed exactly and
  // both calls see bitwise-identical strength differences.
  const auto quantize = [](double v) { return std::round(v * 1024.0) / 1024.0; };
  for (int t = 0; t < 1000; ++t) {
    const double gap = quantize(6.0 * (rng.unit() - 0.5));
    const double off1 = quantize(4.0 * (rng.unit() - 0.5));
    const double off2 = quantize(4.0 * (rng.unit() - 0.5));
    if (win_probability(off1 + gap, off1) != win_probability(off2 + gap, off2))
      equal_gaps_exact = false;
  }
  out.pass = ok && complement_exact && equal_gaps_exact;
  out.detail = std::string("p(1,0) err ") +
               fmt(std::abs(win_probability(1.0, 0.0) - 0.7310585786300049), 3) +
               "; complement " + (complement_exact ? "exact" : "INEXACT") +
               "; equal gaps " + (equal_gaps_exact ? "exact" : "INEXACT");
  return out;
}

// ---------------------------------------------------------------------------
// 3. Strength recovery at a realistic match budget.
// ---------------------------------------------------------------------------
Outcome check_recovery() {
  const auto t0 = Clock::now();
  const RecoveryReport report =
      recovery_experiment(100, 36, StrengthSampler{}, FitParams{}, 42);
  const double elapsed = seconds_since(t0);
  Outcome out;
  out.pass = report.spearman >= 0.90 && elapsed < 30.0;
  out.detail = "n=100, M=36: spearman " + fmt(report.spearman) + ", pearson " +
               fmt(report.pearson) + ", " + fmt(elapsed, 2) + " s";
  out.pass =
      check_pin(kPinRecoverySpearman, report.spearman, "spearman", out.detail) &&
      out.pass;
  return out;
}

// ---------------------------------------------------------------------------
// 4. Convergence protocol on a dense reference log.
// ---------------------------------------------------------------------------
Outcome check_convergence() {
  const auto t0 = Clock::now();
  const ProblemSet problems = synthetic_problems(100);
  SimulatedJudge judge;
  Rng strength_rng(derive_seed(4242, 1));
  for (std::size_t i = 0; i < problems.size(); ++i)
    judge.true_strengths[problems[i].id] = strength_rng.normal();
  judge.seed = derive_seed(4242, 2);
  const Schedule schedule = sampled(problems, 200, derive_seed(4242, 3));
  const std::vector<MatchRecord> records =
      play_offline(schedule, problems, judge);

  const std::vector<int> levels = {6,  12, 24,  36,  48, 66,
                                   96, 128, 160, 192, 200};
  const ConvergenceReport report =
      convergence_experiment(records, problems, levels, FitParams{}, 4242);

  const ConvergenceRow& top = report.rows.back();
  const bool self_exact = top.level == 200 &&
                          std::abs(top.pearson - 1.0) <= 1e-12 &&
                          std::abs(top.spearman - 1.0) <= 1e-12 &&
                          std::abs(top.kendall - 1.0) <= 1e-12;

  // Nondecreasing within noise: one adaptive subsample may wobble a little.
  constexpr double kNoiseSlack = 0.05;
  bool monotone = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    monotone = monotone &&
               report.rows[i].pearson >= report.rows[i - 1].pearson - kNoiseSlack &&
               report.rows[i].spearman >= report.rows[i - 1].spearman - kNoiseSlack &&
               report.rows[i].kendall >= report.rows[i - 1].kendall - kNoiseSlack;
  }
  const bool fired = report.first_passing_level.has_value() &&
                     *report.first_passing_level <= 200;

  Outcome out;
  out.pass = self_exact && monotone && fired;
  out.detail = "reference row (" + fmt(top.pearson, 15) + ", " +
               fmt(top.spearman, 15) + ", " + fmt(top.kendall, 15) + ")";
  if (report.first_passing_level.has_value()) {
    out.detail += "; stopping rule fires at M=" +
                  std::to_string(*report.first_passing_level);
    if (!kPinFirstPassingLevel.has_value()) {
      out.detail += "; level pin UNSET";
      out.pass = false;
    } else if (*report.first_passing_level != *kPinFirstPassingLevel) {
      out.detail += "; drifted from pinned M=" +
                    std::to_string(*kPinFirstPassingLevel);
      out.pass = false;
    }
  } else {
    out.detail += "; stopping rule NEVER fired";
  }
  if (!monotone) out.detail += "; correlations regressed beyond noise slack";
  out.detail += "; " + fmt(seconds_since(t0), 2) + " s";
  return out;
}

// ---------------------------------------------------------------------------
// 5. Robustness at 10% compare noise, n=500 scale.
// ---------------------------------------------------------------------------
Outcome check_robustness() {
  const auto t0 = Clock::now();
  const ProblemSet problems = synthetic_problems(500);
  SimulatedJudge judge;
  Rng strength_rng(derive_seed(9000, 1));
  std::vector<double> strengths(problems.size());
  for (std::size_t i = 0; i < problems.size(); ++i) {
    strengths[i] = strength_rng.normal();
    judge.true_strengths[problems[i].id] = strengths[i];
  }
  judge.seed = derive_seed(9000, 2);
  const Schedule schedule = sampled(problems, 36, derive_seed(9000, 3));
  RobustnessInputs inputs;
  inputs.records = play_offline(schedule, problems, judge);
  inputs.problems = &problems;

  // Binary performance baseline: harder-than-median problems get outcome 1
  // (incorrect), the rest 0 — a clean correctness signal at the same scale.
  std::vector<double> sorted(strengths);
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                   sorted.end());
  const double median = sorted[sorted.size() / 2];
  inputs.performance.resize(strengths.size());
  for (std::size_t i = 0; i < strengths.size(); ++i)
    inputs.performance[i] = strengths[i] > median ? 1.0 : 0.0;

  NoiseSpec compare_spec;
  compare_spec.target = NoiseTarget::compare;
  compare_spec.levels = {0.10};
  compare_spec.replicates = 200;
  compare_spec.seed = derive_seed(9000, 4);
  const RobustnessReport compare_report =
      robustness_experiment(inputs, compare_spec);

  NoiseSpec perf_spec = compare_spec;
  perf_spec.target = NoiseTarget::performance;
  const RobustnessReport perf_report = robustness_experiment(inputs, perf_spec);

  const RobustnessRow& cmp = compare_report.rows.front();
  const RobustnessRow& perf = perf_report.rows.front();
  const double elapsed = seconds_since(t0);

  Outcome out;
  out.pass = cmp.replicates >= 200 && cmp.fit_failures == 0 &&
             cmp.mean_pearson >= 0.94 && cmp.mean_pearson > perf.mean_pearson &&
             elapsed < 300.0;
  out.detail = "compare mean pearson " + fmt(cmp.mean_pearson) + " (" +
               std::to_string(cmp.replicates) + " replicates, " +
               std::to_string(cmp.fit_failures) + " fit failures) vs binary " +
               fmt(perf.mean_pearson) + "; " + fmt(elapsed, 1) + " s";
  return out;
}

// ---------------------------------------------------------------------------
// 6. Pearson = Spearman = Kendall on binary series.
// ---------------------------------------------------------------------------
Outcome check_binary_coincidence() {
  Rng rng(816);
  int tested = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 10 + rng.below(150);
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = static_cast<double>(rng.next_u64() & 1);
    for (auto& v : y) v = static_cast<double>(rng.next_u64() & 1);
    const auto constant = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(),
                         [&](double t) { return t == v[0]; });
    };
    if (constant(x) || constant(y)) continue;
    const double p = pearson(ps(x, y));
    const double s = spearman(ps(x, y));
    const double k = kendall_tau_b(ps(x, y));
    worst = std::max({worst, std::abs(p - s), std::abs(p - k)});
    ++tested;
  }
  Outcome out;
  out.pass = tested >= 90 && worst <= 1e-12;
  out.detail = std::to_string(tested) +
               " binary pairs; worst coefficient spread " + fmt(worst, 3);
  return out;
}

// ---------------------------------------------------------------------------
// 7. Statistics against independent oracles and fixtures.
// ---------------------------------------------------------------------------
Outcome check_stats_oracles() {
  Rng rng(817);
  bool kendall_exact = true;
  int tested = 0;
  while (tested < 100) {
    const std::size_t n = 2 + rng.below(199);
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = static_cast<double>(rng.below(5));
    for (auto& v : y) v = static_cast<double>(rng.below(5));
    const auto constant = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(),
                         [&](double t) { return t == v[0]; });
    };
    if (constant(x) || constant(y)) continue;
    ++tested;
    if (kendall_tau_b(ps(x, y)) != kendall_brute(x, y)) kendall_exact = false;
  }

  const bool d_ok =
      std::abs(cohens_d({2, 4}, {0, 2}) - std::sqrt(2.0)) <= 1e-12 &&
      std::abs(cohens_d({0, 2}, {2, 4}) + std::sqrt(2.0)) <= 1e-12;

  bool w_ok = wasserstein_norm({0}, {1}) == 1.0;
  std::vector<double> a(60), b(60);
  for (auto& v : a) v = rng.normal();
  for (auto& v : b) v = rng.normal() + 0.5;
  const double base = wasserstein_norm(a, b);
  for (double c : {0.003, 7.0, 1234.5}) {
    std::vector<double> ac(a), bc(b);
    for (auto& v : ac) v *= c;
    for (auto& v : bc) v *= c;
    if (std::abs(wasserstein_norm(ac, bc) - base) > 1e-12) w_ok = false;
  }

  Outcome out;
  out.pass = kendall_exact && d_ok && w_ok;
  out.detail = std::string("kendall vs enumeration ") +
               (kendall_exact ? "exact on 100 vectors" : "MISMATCH") +
               "; cohen fixtures " + (d_ok ? "ok" : "FAIL") +
               "; wasserstein " + (w_ok ? "ok" : "FAIL");
  return out;
}

// ---------------------------------------------------------------------------
// 8. Schedule counts, regularity, connectivity.
// ---------------------------------------------------------------------------
Outcome check_schedule_counts() {
  const auto t0 = Clock::now();
  std::map<std::string, int> degree;
  const auto degrees_of = [&degree](const Schedule& s) {
    degree.clear();
    for (const auto& [a, b] : s.pairs) {
      ++degree[a];
      ++degree[b];
    }
  };
  const auto regular = [&degree](int m) {
    for (const auto& [id, d] : degree)
      if (d != m) return false;
    return true;
  };

  const ProblemSet p34 = synthetic_problems(34);
  const Schedule rr = round_robin(p34, 1);
  const bool rr_ok = rr.pairs.size() == 561 && schedule_connected(rr, p34);

  const ProblemSet p787 = synthetic_problems(787);
  const Schedule s787 = sampled(p787, 66, 2);
  degrees_of(s787);
  const bool s787_ok = s787.pairs.size() == 25971 && regular(66) &&
                       degree.size() == 787 && schedule_connected(s787, p787);

  const ProblemSet p1876 = synthetic_problems(1876);
  const Schedule s1876 = sampled(p1876, 36, 3);
  degrees_of(s1876);
  const bool s1876_ok = s1876.pairs.size() == 33768 && regular(36) &&
                        degree.size() == 1876 && schedule_connected(s1876, p1876);

  Outcome out;
  out.pass = rr_ok && s787_ok && s1876_ok;
  out.detail = "round-robin(34) " + std::to_string(rr.pairs.size()) +
               "; sampled(787,66) " + std::to_string(s787.pairs.size()) +
               "; sampled(1876,36) " + std::to_string(s1876.pairs.size()) +
               "; regular+connected " +
               ((rr_ok && s787_ok && s1876_ok) ? "yes" : "NO") + "; " +
               fmt(seconds_since(t0), 2) + " s";
  return out;
}

// ---------------------------------------------------------------------------
// 9. Tier separation on a simulated two-tier cohort.
// ---------------------------------------------------------------------------
Outcome check_tier_separation() {
  const auto t0 = Clock::now();
  const SeparationReport report = tier_simulation(50, 2.0, 36, FitParams{}, 77);
  const double d = std::abs(report.cohens_d);
  Outcome out;
  out.pass = d > 1.5 && report.wasserstein_norm > 0.2;
  out.detail = "two 50-problem tiers, gap 2.0: |d| " + fmt(d) +
               ", normalized wasserstein " + fmt(report.wasserstein_norm) +
               ", " + fmt(seconds_since(t0), 2) + " s";
  out.pass = check_pin(kPinTierCohensD, report.cohens_d, "d", out.detail) &&
             out.pass;
  out.pass = check_pin(kPinTierWasserstein, report.wasserstein_norm, "w",
                       out.detail) &&
             out.pass;
  return out;
}

// ---------------------------------------------------------------------------
// 10. Prompt template fidelity against golden bytes.
// ---------------------------------------------------------------------------
Outcome check_prompt_fidelity() {
  const auto read_file = [](const std::string& name) {
    std::ifstream in(std::string(BTRANK_TEST_DATA_DIR) + "/" + name,
                     std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const bool compare_ok =
      std::string(prompts::kCompareTemplate) == read_file("compare_template.txt");
  const bool solve_ok =
      std::string(prompts::kSolveTemplate) == read_file("solve_template.txt");
  const bool label_ok =
      std::string(prompts::kLabelTemplate) == read_file("label_template.txt");
  const bool rendered_ok =
      prompts::render_compare("What is 2+2?",
                              "Prove that every planar graph is 4-colorable.") ==
      read_file("compare_rendered.txt");
  Outcome out;
  out.pass = compare_ok && solve_ok && label_ok && rendered_ok;
  out.detail = std::string("compare ") + (compare_ok ? "ok" : "DIFF") +
               ", solve " + (solve_ok ? "ok" : "DIFF") + ", label " +
               (label_ok ? "ok" : "DIFF") + ", substitution " +
               (rendered_ok ? "ok" : "DIFF");
  return out;
}

// ---------------------------------------------------------------------------
// 11. End-to-end determinism through the command-line tool.
// ---------------------------------------------------------------------------
Outcome check_cli_determinism() {
  const auto t0 = Clock::now();
  Outcome out;

  std::error_code ec;
  const fs::path root =
      fs::temp_directory_path() / "btrank-acceptance-determinism";
  fs::remove_all(root, ec);
  fs::create_directories(root);

  const ProblemSet problems = synthetic_problems(20);
  const fs::path problems_path = root / "problems.jsonl";
  write_problems_jsonl(problems, problems_path);

  BTScores strengths;
  Rng rng(derive_seed(31337, 1));
  for (std::size_t i = 0; i < problems.size(); ++i) {
    strengths.ids.push_back(problems[i].id);
    strengths.beta.push_back(rng.normal());
  }
  const fs::path strengths_path = root / "strengths.csv";
  write_scores(strengths, strengths_path, "acceptance strengths");

  const std::string cli = BTRANK_CLI_PATH;
  const fs::path shell_log = root / "commands.log";
  const auto run = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " >> " + shell_log.string() +
                            " 2>&1";
    return std::system(cmd.c_str()) == 0;
  };

  bool commands_ok = true;
  for (const std::string out_dir : {"out1", "out2"}) {
    const std::string base = "--problems " + problems_path.string() +
                             " --out-dir " + (root / out_dir).string() +
                             " --seed 7";
    commands_ok = commands_ok &&
                  run("schedule " + base + " --mode sampled -M 6") &&
                  run("run " + base + " --judge simulated --strengths " +
                      strengths_path.string()) &&
                  run("fit " + base) &&
                  run("converge " + base + " --levels 2,4,6");
  }

  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::vector<std::string> mismatched;
  std::uintmax_t bytes = 0;
  for (const std::string name :
       {"schedule.jsonl", "matches.jsonl", "scores.csv", "fit.json",
        "convergence.csv", "convergence.json"}) {
    const std::string a = slurp(root / "out1" / name);
    const std::string b = slurp(root / "out2" / name);
    bytes += a.size();
    if (a.empty() || a != b) mismatched.push_back(name);
  }

  out.pass = commands_ok && mismatched.empty();
  out.detail = commands_ok ? "8 invocations ok" : "a command FAILED";
  if (mismatched.empty()) {
    out.detail += "; 6 artifacts byte-identical (" + std::to_string(bytes) +
                  " bytes)";
  } else {
    out.detail += "; differing or empty:";
    for (const auto& name : mismatched) out.detail += " " + name;
  }
  out.detail += "; " + fmt(seconds_since(t0), 2) + " s";
  if (out.pass) fs::remove_all(root, ec);
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*fn)();
  };
  const std::vector<Criterion> criteria = {
      {"spectral fit matches penalized-likelihood oracle", check_oracle_equivalence},
      {"win-probability contract", check_win_probability},
      {"strength recovery at 36 matches per problem", check_recovery},
      {"convergence protocol and stopping rule", check_convergence},
      {"robustness to 10% compare noise at n=500", check_robustness},
      {"correlation coincidence on binary series", check_binary_coincidence},
      {"statistics oracles and fixtures", check_stats_oracles},
      {"schedule counts, regularity, connectivity", check_schedule_counts},
      {"tier separation on simulation", check_tier_separation},
      {"prompt template fidelity", check_prompt_fidelity},
      {"end-to-end determinism via the CLI", check_cli_determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].fn();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("threw: ") + e.what();
    }
    failures += out.pass ? 0 : 1;
    std::cout << (out.pass ? "PASS" : "FAIL") << "  [" << (i + 1) << "/"
              << criteria.size() << "] " << criteria[i].name << " — "
              << out.detail << "\n";
  }
  std::cout << (failures == 0 ? "ALL CRITERIA PASSED"
                              : std::to_string(failures) + " CRITERIA FAILED")
            << "\n";
  return failures == 0 ? 0 : 1;
}
