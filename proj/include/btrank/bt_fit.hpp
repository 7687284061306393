#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "btrank/match_log.hpp"
#include "btrank/problem.hpp"

namespace btrank {

// Dense pairwise win tallies over a problem set. counts(i, j) is the number
// of matches problem i won against j, independent of presentation side.
struct WinMatrix {
  std::vector<std::string> ids;  // dense index -> id, problem-set order
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::int64_t> counts;  // n*n row-major
  std::size_t n = 0;
  std::int64_t total = 0;

  std::int64_t at(std::size_t i, std::size_t j) const {
    return counts[i * n + j];
  }
};

WinMatrix build_win_matrix(const std::vector<MatchRecord>& records,
                           const ProblemSet& problems);

struct FitParams {
  double alpha = 0.01;  // symmetric pseudo-win regularization, > 0
  double tol = 1e-8;    // stop when max |delta beta| falls below this
  int max_iter = 200;
};

// Serial path is the reference implementation; the parallel path must be
// bit-identical to it (per-element arithmetic is shared, reductions are
// order-fixed or exact).
enum class Exec { serial, parallel };

// Fitted Bradley-Terry strengths, mean-centered over all problems.
struct BTScores {
  std::vector<std::string> ids;  // problem-set order
  std::vector<double> beta;      // aligned with ids, mean 0
  double alpha = 0.0;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;  // final max |delta beta|

  double beta_of(const std::string& id) const;
  std::map<std::string, double> as_map() const;
};

// P(i beats j) = e^{beta_i} / (e^{beta_i} + e^{beta_j}), computed
// overflow-safely; p(i,j) + p(j,i) == 1 exactly.
double win_probability(double beta_i, double beta_j);

// Iterative Luce spectral ranking with alpha pseudo-count regularization.
// Each iteration builds the comparison-parameterized Markov chain at the
// current strengths, takes its stationary distribution by power iteration,
// and repeats until the centered log-strengths move less than params.tol.
BTScores ilsr_fit(const WinMatrix& wins, const FitParams& params = {},
                  Exec exec = Exec::parallel);

// Sum over ordered pairs of counts[i][j] * log p_ij.
double log_likelihood(const BTScores& scores, const WinMatrix& wins);

// Same sum with alpha added to every ordered pair's count; this is the
// objective ilsr_fit maximizes and what the brute-force oracle checks.
double penalized_log_likelihood(std::span<const double> beta,
                                const WinMatrix& wins, double alpha);

struct ConnectivityReport {
  bool connected = false;
  // Partition of problem ids into comparison-graph components, each sorted
  // by dense index; components ordered by their smallest member.
  std::vector<std::vector<std::string>> components;
};

ConnectivityReport check_connectivity(const WinMatrix& wins);

}  // namespace btrank
