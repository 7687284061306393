#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "btrank/bt_fit.hpp"
#include "btrank/match_log.hpp"
#include "btrank/problem.hpp"
#include "btrank/rng.hpp"

namespace btrank {

// ---------------------------------------------------------------------------
// Convergence vs. matches played
// ---------------------------------------------------------------------------

struct ConvergenceRow {
  int level = 0;  // matches per problem after subsampling
  std::uint64_t matches = 0;
  double pearson = 0.0;
  double spearman = 0.0;
  double kendall = 0.0;
  bool exact_degree = true;  // subsample achieved the level exactly
};

struct ConvergenceReport {
  int reference_level = 0;
  std::vector<ConvergenceRow> rows;
  // Smallest level with Kendall > 0.90 and Pearson, Spearman > 0.95.
  std::optional<int> first_passing_level;
};

inline constexpr double kConvergeKendallThreshold = 0.90;
inline constexpr double kConvergeOtherThreshold = 0.95;

// Fits the full log once as reference, then for each level subsamples the
// log to that many matches per problem, refits, and correlates the two
// strength vectors. Levels above the log's degree throw DataError.
ConvergenceReport convergence_experiment(const std::vector<MatchRecord>& log,
                                         const ProblemSet& problems,
                                         const std::vector<int>& levels,
                                         const FitParams& params,
                                         std::uint64_t seed);

// ---------------------------------------------------------------------------
// Hallucination noise injection
// ---------------------------------------------------------------------------

enum class NoiseTarget { performance, labels, compare };

struct NoiseSpec {
  NoiseTarget target = NoiseTarget::compare;
  std::vector<double> levels;  // fractions corrupted, each in [0,1]
  int replicates = 1000;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

// Each corruptor touches exactly round(level * count) positions, chosen
// uniformly without replacement, so replicate variance comes only from
// which positions are hit.

// Flips 0/1 correctness outcomes.
std::vector<double> inject_noise_performance(std::vector<double> values,
                                             double level, Rng& rng);

// Reassigns 1-10 labels uniformly among the nine wrong values.
std::vector<int> inject_noise_labels(std::vector<int> values, double level,
                                     Rng& rng);

// Swaps winner and loser of the selected matches.
std::vector<MatchRecord> inject_noise_compare(std::vector<MatchRecord> records,
                                              double level, Rng& rng);

struct RobustnessRow {
  NoiseTarget target = NoiseTarget::compare;
  double level = 0.0;
  int replicates = 0;
  double mean_pearson = 0.0;
  double mean_spearman = 0.0;
  double mean_kendall = 0.0;
  int fit_failures = 0;  // compare target only; failed replicates excluded
};

struct RobustnessReport {
  std::vector<RobustnessRow> rows;
};

// Clean inputs for whichever target the NoiseSpec selects: score vectors for
// performance/labels, a match log for compare.
struct RobustnessInputs {
  std::vector<double> performance;        // values in {0,1}
  std::vector<int> labels;                // values in 1..10
  std::vector<MatchRecord> records;       // compare target
  const ProblemSet* problems = nullptr;   // compare target
};

// For each level, corrupts `spec.replicates` independent copies, re-derives
// the difficulty scores (BT refit for compare, identity otherwise), and
// correlates each against the clean scores; rows hold per-level means.
// Replicates run in parallel; each owns a seed derived from (spec.seed,
// level index, replicate index), so the report is schedule-independent.
RobustnessReport robustness_experiment(const RobustnessInputs& inputs,
                                       const NoiseSpec& spec,
                                       const FitParams& params = {},
                                       Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// Tier separation
// ---------------------------------------------------------------------------

struct SeparationReport {
  std::string tier_a;  // by first appearance in score order
  std::string tier_b;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double mean_gap = 0.0;  // |mean_a - mean_b|
  double cohens_d = 0.0;  // signed: tier_a minus tier_b
  double wasserstein_norm = 0.0;
  std::vector<double> scores_a;  // exported for external plotting
  std::vector<double> scores_b;
};

// `tier_of` assigns each problem id a tier name; exactly two distinct names
// must appear among the scored ids. Unassigned ids are ignored.
SeparationReport tier_separation(const BTScores& scores,
                                 const std::map<std::string, std::string>& tier_of);

// End-to-end simulated check: two tiers of `per_tier` problems whose true
// strengths sit `gap` apart, an M-regular schedule, oracle judgments, a fit,
// and the separation statistics of the fitted scores.
SeparationReport tier_simulation(int per_tier, double gap, int matches_per_problem,
                                 const FitParams& params, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Strength recovery
// ---------------------------------------------------------------------------

struct StrengthSampler {
  enum class Kind { normal, uniform } kind = Kind::normal;
  double mean = 0.0, stddev = 1.0;  // normal
  double lo = -2.0, hi = 2.0;       // uniform

  double draw(Rng& rng) const;
};

struct RecoveryReport {
  int n = 0;
  int matches_per_problem = 0;
  double pearson = 0.0;
  double spearman = 0.0;
  double kendall = 0.0;
  std::vector<double> true_beta;  // mean-centered, fit order
  BTScores fitted;
};

// Samples true strengths, schedules an M-regular tournament, simulates the
// judgments, fits, and correlates fitted against true.
RecoveryReport recovery_experiment(int n, int matches_per_problem,
                                   const StrengthSampler& sampler,
                                   const FitParams& params, std::uint64_t seed);

}  // namespace btrank
