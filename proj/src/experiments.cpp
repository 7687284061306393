#include "btrank/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "btrank/errors.hpp"
#include "btrank/judge.hpp"
#include "btrank/schedule.hpp"
#include "btrank/stats.hpp"

namespace btrank {

namespace {

constexpr std::uint64_t kConvergenceStream = 0xC1;
constexpr std::uint64_t kRobustnessLevelStream = 0xC2;
constexpr std::uint64_t kRobustnessReplicateStream = 0xC3;
constexpr std::uint64_t kTierScheduleStream = 0xC4;
constexpr std::uint64_t kTierJudgeStream = 0xC5;
constexpr std::uint64_t kRecoveryStrengthStream = 0xC6;
constexpr std::uint64_t kRecoveryScheduleStream = 0xC7;
constexpr std::uint64_t kRecoveryJudgeStream = 0xC8;

std::size_t noise_count(double level, std::size_t n, const char* what) {
  if (!(level >= 0.0 && level <= 1.0))
    throw ConfigError(std::string(what) + " noise level must lie in [0, 1]");
  return static_cast<std::size_t>(
      std::llround(level * static_cast<double>(n)));
}

// First k slots of a seeded partial Fisher-Yates pass: k distinct positions,
// uniform without replacement.
std::vector<std::size_t> pick_positions(std::size_t n, std::size_t k,
                                        Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(std::min(k, n));
  return idx;
}

PairedSeries pair_positional(const std::vector<double>& x,
                             const std::vector<double>& y) {
  PairedSeries s;
  s.x = x;
  s.y = y;
  return s;
}

// Synthetic problems "p001".. with placeholder statements, for
// simulation-only experiments.
ProblemSet synthetic_problems(int n, const std::string& prefix) {
  const int width = std::max(3, static_cast<int>(std::to_string(n).size()));
  ProblemSet set("synthetic");
  for (int i = 1; i <= n; ++i) {
    std::string num = std::to_string(i);
    num.insert(0, static_cast<std::size_t>(width) - num.size(), '0');
    set.add(Problem{prefix + num, "synthetic problem " + prefix + num, {}});
  }
  return set;
}

}  // namespace

// ---------------------------------------------------------------------------
// Convergence
// ---------------------------------------------------------------------------

ConvergenceReport convergence_experiment(const std::vector<MatchRecord>& log,
                                         const ProblemSet& problems,
                                         const std::vector<int>& levels,
                                         const FitParams& params,
                                         std::uint64_t seed) {
  if (log.empty()) throw DataError("convergence experiment needs a match log");
  if (levels.empty()) throw ConfigError("convergence experiment needs levels");

  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(log.size());
  std::vector<int> degree(problems.size(), 0);
  for (const MatchRecord& r : log) {
    pairs.emplace_back(r.first_id, r.second_id);
    ++degree[problems.index_of(r.first_id)];
    ++degree[problems.index_of(r.second_id)];
  }
  const int reference_level =
      *std::min_element(degree.begin(), degree.end());

  const WinMatrix reference_wins = build_win_matrix(log, problems);
  const BTScores reference = ilsr_fit(reference_wins, params);

  std::vector<int> sorted_levels = levels;
  std::sort(sorted_levels.begin(), sorted_levels.end());
  sorted_levels.erase(
      std::unique(sorted_levels.begin(), sorted_levels.end()),
      sorted_levels.end());

  ConvergenceReport report;
  report.reference_level = reference_level;
  for (int level : sorted_levels) {
    if (level < 1 || level > reference_level)
      throw ConfigError("convergence level " + std::to_string(level) +
                        " is outside 1.." + std::to_string(reference_level));
    const SubsampleResult picked = subsample_pairs(
        pairs, problems, level, derive_seed(seed, kConvergenceStream,
                                            static_cast<std::uint64_t>(level)));
    std::vector<MatchRecord> subset;
    subset.reserve(picked.kept.size());
    for (std::size_t idx : picked.kept) subset.push_back(log[idx]);

    const BTScores fit = ilsr_fit(build_win_matrix(subset, problems), params);
    const PairedSeries s = pair_positional(reference.beta, fit.beta);

    ConvergenceRow row;
    row.level = level;
    row.matches = subset.size();
    row.pearson = pearson(s);
    row.spearman = spearman(s);
    row.kendall = kendall_tau_b(s);
    row.exact_degree = picked.exact;
    if (!report.first_passing_level && row.kendall > kConvergeKendallThreshold &&
        row.pearson > kConvergeOtherThreshold &&
        row.spearman > kConvergeOtherThreshold)
      report.first_passing_level = level;
    report.rows.push_back(std::move(row));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Noise injection
// ---------------------------------------------------------------------------

void NoiseSpec::validate() const {
  if (levels.empty()) throw ConfigError("noise spec needs at least one level");
  for (double level : levels)
    if (!(level >= 0.0 && level <= 1.0))
      throw ConfigError("noise level must lie in [0, 1]");
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
}

std::vector<double> inject_noise_performance(std::vector<double> values,
                                             double level, Rng& rng) {
  for (double v : values)
    if (v != 0.0 && v != 1.0)
      throw DataError("performance values must be 0 or 1");
  const std::size_t k = noise_count(level, values.size(), "performance");
  for (std::size_t pos : pick_positions(values.size(), k, rng))
    values[pos] = 1.0 - values[pos];
  return values;
}

std::vector<int> inject_noise_labels(std::vector<int> values, double level,
                                     Rng& rng) {
  for (int v : values)
    if (v < 1 || v > 10) throw DataError("labels must lie in 1..10");
  const std::size_t k = noise_count(level, values.size(), "label");
  for (std::size_t pos : pick_positions(values.size(), k, rng)) {
    // Uniform over the nine wrong labels.
    int draw = 1 + static_cast<int>(rng.below(9));
    if (draw >= values[pos]) ++draw;
    values[pos] = draw;
  }
  return values;
}

std::vector<MatchRecord> inject_noise_compare(std::vector<MatchRecord> records,
                                              double level, Rng& rng) {
  const std::size_t k = noise_count(level, records.size(), "compare");
  for (std::size_t pos : pick_positions(records.size(), k, rng)) {
    MatchRecord& r = records[pos];
    r.winner = r.winner == Winner::first ? Winner::second : Winner::first;
  }
  return records;
}

// ---------------------------------------------------------------------------
// Robustness
// ---------------------------------------------------------------------------

namespace {

struct ReplicateResult {
  double pearson = 0.0;
  double spearman = 0.0;
  double kendall = 0.0;
  bool failed = false;
};

template <typename PerReplicate>
RobustnessRow run_level(NoiseTarget target, double level, int replicates,
                        std::uint64_t level_seed, bool parallel,
                        PerReplicate&& replicate) {
  std::vector<ReplicateResult> results(static_cast<std::size_t>(replicates));
#pragma omp parallel for if (parallel) schedule(static)
  for (int r = 0; r < replicates; ++r) {
    const std::uint64_t rep_seed = derive_seed(
        level_seed, kRobustnessReplicateStream, static_cast<std::uint64_t>(r));
    try {
      results[static_cast<std::size_t>(r)] = replicate(rep_seed);
    } catch (const std::exception&) {
      results[static_cast<std::size_t>(r)].failed = true;
    }
  }

  RobustnessRow row;
  row.target = target;
  row.level = level;
  row.replicates = replicates;
  int ok = 0;
  for (const ReplicateResult& res : results) {
    if (res.failed) {
      ++row.fit_failures;
      continue;
    }
    ++ok;
    row.mean_pearson += res.pearson;
    row.mean_spearman += res.spearman;
    row.mean_kendall += res.kendall;
  }
  if (ok == 0)
    throw DataError("every replicate failed at noise level " +
                    std::to_string(level));
  row.mean_pearson /= ok;
  row.mean_spearman /= ok;
  row.mean_kendall /= ok;
  return row;
}

ReplicateResult correlate_replicate(const PairedSeries& s) {
  ReplicateResult res;
  res.pearson = pearson(s);
  res.spearman = spearman(s);
  res.kendall = kendall_tau_b(s);
  return res;
}

}  // namespace

RobustnessReport robustness_experiment(const RobustnessInputs& inputs,
                                       const NoiseSpec& spec,
                                       const FitParams& params, Exec exec) {
  spec.validate();
  const bool parallel = exec == Exec::parallel;

  // Clean reference scores, derived once.
  std::vector<double> clean;
  WinMatrix clean_wins;
  switch (spec.target) {
    case NoiseTarget::performance:
      if (inputs.performance.empty())
        throw ConfigError("performance target needs clean values");
      clean = inputs.performance;
      break;
    case NoiseTarget::labels:
      if (inputs.labels.empty())
        throw ConfigError("labels target needs clean values");
      clean.reserve(inputs.labels.size());
      for (int v : inputs.labels) clean.push_back(static_cast<double>(v));
      break;
    case NoiseTarget::compare: {
      if (inputs.records.empty() || inputs.problems == nullptr)
        throw ConfigError("compare target needs a match log and problems");
      clean_wins = build_win_matrix(inputs.records, *inputs.problems);
      clean = ilsr_fit(clean_wins, params, exec).beta;
      break;
    }
  }

  RobustnessReport report;
  for (std::size_t li = 0; li < spec.levels.size(); ++li) {
    const double level = spec.levels[li];
    const std::uint64_t level_seed =
        derive_seed(spec.seed, kRobustnessLevelStream, li);

    auto replicate = [&](std::uint64_t rep_seed) -> ReplicateResult {
      Rng rng(rep_seed);
      switch (spec.target) {
        case NoiseTarget::performance:
          return correlate_replicate(pair_positional(
              clean, inject_noise_performance(inputs.performance, level, rng)));
        case NoiseTarget::labels: {
          const std::vector<int> noisy =
              inject_noise_labels(inputs.labels, level, rng);
          std::vector<double> y(noisy.begin(), noisy.end());
          return correlate_replicate(pair_positional(clean, y));
        }
        case NoiseTarget::compare: {
          const std::vector<MatchRecord> noisy =
              inject_noise_compare(inputs.records, level, rng);
          // Replicate fits stay serial: the replicate loop is the parallel
          // axis, and serial/parallel fits agree bitwise anyway.
          const BTScores fit = ilsr_fit(
              build_win_matrix(noisy, *inputs.problems), params, Exec::serial);
          return correlate_replicate(pair_positional(clean, fit.beta));
        }
      }
      throw ConfigError("invalid noise target");
    };

    report.rows.push_back(run_level(spec.target, level, spec.replicates,
                                    level_seed, parallel, replicate));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Tier separation
// ---------------------------------------------------------------------------

SeparationReport tier_separation(
    const BTScores& scores, const std::map<std::string, std::string>& tier_of) {
  SeparationReport report;
  for (std::size_t i = 0; i < scores.ids.size(); ++i) {
    const auto it = tier_of.find(scores.ids[i]);
    if (it == tier_of.end()) continue;
    const std::string& tier = it->second;
    if (report.tier_a.empty() || tier == report.tier_a) {
      report.tier_a = tier;
      report.scores_a.push_back(scores.beta[i]);
    } else if (report.tier_b.empty() || tier == report.tier_b) {
      report.tier_b = tier;
      report.scores_b.push_back(scores.beta[i]);
    } else {
      throw DataError("tier separation expects exactly two tiers; found '" +
                      report.tier_a + "', '" + report.tier_b + "', and '" +
                      tier + "'");
    }
  }
  if (report.scores_a.empty() || report.scores_b.empty())
    throw DataError("tier separation needs scored problems in both tiers");

  auto mean = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double t : v) m += t;
    return m / static_cast<double>(v.size());
  };
  report.mean_a = mean(report.scores_a);
  report.mean_b = mean(report.scores_b);
  report.mean_gap = std::abs(report.mean_a - report.mean_b);
  report.cohens_d = cohens_d(report.scores_a, report.scores_b);
  report.wasserstein_norm =
      btrank::wasserstein_norm(report.scores_a, report.scores_b);
  return report;
}

SeparationReport tier_simulation(int per_tier, double gap,
                                 int matches_per_problem,
                                 const FitParams& params, std::uint64_t seed) {
  if (per_tier < 2) throw ConfigError("tier simulation needs >= 2 problems per tier");

  ProblemSet problems("two-tier synthetic");
  std::map<std::string, double> strengths;
  std::map<std::string, std::string> tier_of;
  const int width = std::max(3, static_cast<int>(std::to_string(per_tier).size()));
  for (int tier = 1; tier <= 2; ++tier) {
    const double beta = tier == 1 ? gap / 2.0 : -gap / 2.0;
    for (int i = 1; i <= per_tier; ++i) {
      std::string num = std::to_string(i);
      num.insert(0, static_cast<std::size_t>(width) - num.size(), '0');
      const std::string id = "t" + std::to_string(tier) + "_" + num;
      problems.add(Problem{id, "synthetic problem " + id, {}});
      strengths[id] = beta;
      tier_of[id] = "tier" + std::to_string(tier);
    }
  }

  const Schedule schedule = sampled(problems, matches_per_problem,
                                    derive_seed(seed, kTierScheduleStream));
  SimulatedJudge judge;
  judge.true_strengths = std::move(strengths);
  judge.seed = derive_seed(seed, kTierJudgeStream);
  const std::vector<MatchRecord> records =
      play_offline(schedule, problems, judge);
  const BTScores scores = ilsr_fit(build_win_matrix(records, problems), params);
  return tier_separation(scores, tier_of);
}

// ---------------------------------------------------------------------------
// Recovery
// ---------------------------------------------------------------------------

double StrengthSampler::draw(Rng& rng) const {
  switch (kind) {
    case Kind::normal:
      return mean + stddev * rng.normal();
    case Kind::uniform:
      return lo + (hi - lo) * rng.unit();
  }
  throw ConfigError("invalid strength sampler");
}

RecoveryReport recovery_experiment(int n, int matches_per_problem,
                                   const StrengthSampler& sampler,
                                   const FitParams& params,
                                   std::uint64_t seed) {
  if (n < 2) throw ConfigError("recovery experiment needs n >= 2");

  const ProblemSet problems = synthetic_problems(n, "p");
  Rng strength_rng(derive_seed(seed, kRecoveryStrengthStream));
  std::vector<double> true_beta(static_cast<std::size_t>(n));
  double mean = 0.0;
  for (double& b : true_beta) {
    b = sampler.draw(strength_rng);
    mean += b;
  }
  mean /= static_cast<double>(n);
  for (double& b : true_beta) b -= mean;

  std::map<std::string, double> strengths;
  for (int i = 0; i < n; ++i)
    strengths[problems[static_cast<std::size_t>(i)].id] =
        true_beta[static_cast<std::size_t>(i)];

  const Schedule schedule = sampled(problems, matches_per_problem,
                                    derive_seed(seed, kRecoveryScheduleStream));
  SimulatedJudge judge;
  judge.true_strengths = std::move(strengths);
  judge.seed = derive_seed(seed, kRecoveryJudgeStream);
  const std::vector<MatchRecord> records =
      play_offline(schedule, problems, judge);

  RecoveryReport report;
  report.n = n;
  report.matches_per_problem = matches_per_problem;
  report.fitted = ilsr_fit(build_win_matrix(records, problems), params);
  report.true_beta = std::move(true_beta);

  const PairedSeries s = pair_positional(report.true_beta, report.fitted.beta);
  report.pearson = pearson(s);
  report.spearman = spearman(s);
  report.kendall = kendall_tau_b(s);
  return report;
}

}  // namespace btrank
