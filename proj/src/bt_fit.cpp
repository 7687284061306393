#include "btrank/bt_fit.hpp"

#include <algorithm>
#include <cmath>

#include "btrank/errors.hpp"

namespace btrank {

double win_probability(double beta_i, double beta_j) {
  if (beta_i == beta_j) return 0.5;
  // Evaluate on the winning side, where q = 1/(1+e^{d}) with d <= 0 lies in
  // [0.5, 1); the losing side is 1 - q, exact by Sterbenz, so the two
  // orientations sum to exactly 1 and equal gaps give bitwise-equal values.
  if (beta_i > beta_j) return 1.0 / (1.0 + std::exp(beta_j - beta_i));
  return 1.0 - 1.0 / (1.0 + std::exp(beta_i - beta_j));
}

WinMatrix build_win_matrix(const std::vector<MatchRecord>& records,
                           const ProblemSet& problems) {
  if (problems.empty()) throw DataError("cannot tally wins over an empty problem set");
  WinMatrix wins;
  wins.n = problems.size();
  wins.ids.reserve(wins.n);
  for (const Problem& p : problems) {
    wins.index.emplace(p.id, wins.ids.size());
    wins.ids.push_back(p.id);
  }
  wins.counts.assign(wins.n * wins.n, 0);
  for (const MatchRecord& r : records) {
    const std::size_t w = problems.index_of(r.winner_id());
    const std::size_t l = problems.index_of(r.loser_id());
    if (w == l)
      throw DataError("match (seq " + std::to_string(r.seq) +
                      ") pairs a problem with itself");
    ++wins.counts[w * wins.n + l];
    ++wins.total;
  }
  return wins;
}

double BTScores::beta_of(const std::string& id) const {
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == id) return beta[i];
  throw DataError("no fitted score for problem '" + id + "'");
}

std::map<std::string, double> BTScores::as_map() const {
  std::map<std::string, double> m;
  for (std::size_t i = 0; i < ids.size(); ++i) m.emplace(ids[i], beta[i]);
  return m;
}

namespace {

// One spectral step: the stationary distribution of the Markov chain whose
// rate i->j is (wins of j over i, plus alpha) / (pi_i + pi_j). `qt` holds the
// transposed generator row-major (qt[j*n+i] = rate i->j, diagonal = negative
// out-rate) so the power iteration reads rows contiguously. `x` warm-starts
// the iteration and returns the stationary vector.
//
// Every parallel region assigns disjoint slots with a serial inner loop, and
// the only reductions are exact (max), so the serial and parallel paths are
// bit-identical.
void stationary_distribution(const WinMatrix& wins, double alpha,
                             const std::vector<double>& pi,
                             std::vector<double>& qt, std::vector<double>& x,
                             std::vector<double>& y, bool parallel) {
  const std::int64_t n = static_cast<std::int64_t>(wins.n);

#pragma omp parallel for if (parallel) schedule(static)
  for (std::int64_t j = 0; j < n; ++j) {
    double out_rate = 0.0;  // total rate j -> elsewhere
    double* row = qt.data() + j * n;
    for (std::int64_t i = 0; i < n; ++i) {
      if (i == j) continue;
      const double denom = pi[i] + pi[j];
      row[i] = (static_cast<double>(wins.counts[j * n + i]) + alpha) / denom;
      out_rate += (static_cast<double>(wins.counts[i * n + j]) + alpha) / denom;
    }
    row[j] = -out_rate;
  }

  double max_rate = 0.0;
#pragma omp parallel for if (parallel) schedule(static) reduction(max : max_rate)
  for (std::int64_t j = 0; j < n; ++j) max_rate = std::max(max_rate, -qt[j * n + j]);
  const double uniformization = 1.02 * max_rate;

  constexpr double kInnerTol = 1e-12;
  constexpr int kInnerMaxIter = 100000;
  for (int step = 0; step < kInnerMaxIter; ++step) {
    double max_diff = 0.0;
#pragma omp parallel for if (parallel) schedule(static) reduction(max : max_diff)
    for (std::int64_t j = 0; j < n; ++j) {
      const double* row = qt.data() + j * n;
      double flow = 0.0;
      for (std::int64_t i = 0; i < n; ++i) flow += row[i] * x[i];
      y[j] = x[j] + flow / uniformization;
      max_diff = std::max(max_diff, std::abs(y[j] - x[j]));
    }
    double sum = 0.0;  // fixed-order; the product preserves mass only approximately
    for (std::int64_t j = 0; j < n; ++j) sum += y[j];
    for (std::int64_t j = 0; j < n; ++j) x[j] = y[j] / sum;
    if (max_diff < kInnerTol) break;
  }
}

}  // namespace

BTScores ilsr_fit(const WinMatrix& wins, const FitParams& params, Exec exec) {
  if (wins.n == 0) throw DataError("cannot fit an empty win matrix");
  if (!(params.alpha > 0)) throw ConfigError("fit alpha must be positive");
  if (!(params.tol > 0)) throw ConfigError("fit tolerance must be positive");
  if (params.max_iter < 1) throw ConfigError("fit max_iter must be positive");

  BTScores scores;
  scores.ids = wins.ids;
  scores.alpha = params.alpha;
  const std::size_t n = wins.n;
  if (n == 1) {
    scores.beta = {0.0};
    scores.converged = true;
    return scores;
  }

  const bool parallel = exec == Exec::parallel;
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  std::vector<double> x = pi;  // stationary iterate, warm across outer loops
  std::vector<double> y(n), qt(n * n);
  std::vector<double> beta(n, 0.0), prev_beta(n, 0.0);

  for (int iter = 1; iter <= params.max_iter; ++iter) {
    stationary_distribution(wins, params.alpha, pi, qt, x, y, parallel);

    double mean_log = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pi[i] = std::max(x[i], 1e-300);
      beta[i] = std::log(pi[i]);
      mean_log += beta[i];
    }
    mean_log /= static_cast<double>(n);

    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      beta[i] -= mean_log;
      residual = std::max(residual, std::abs(beta[i] - prev_beta[i]));
    }
    prev_beta = beta;
    scores.iterations = iter;
    scores.residual = residual;
    if (residual < params.tol) {
      scores.converged = true;
      break;
    }
  }

  scores.beta = std::move(beta);
  return scores;
}

double log_likelihood(const BTScores& scores, const WinMatrix& wins) {
  if (scores.ids != wins.ids)
    throw DataError("scores and win matrix cover different problems");
  const std::size_t n = wins.n;
  double ll = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const std::int64_t c = wins.counts[i * n + j];
      if (c != 0)
        ll += static_cast<double>(c) *
              std::log(win_probability(scores.beta[i], scores.beta[j]));
    }
  return ll;
}

double penalized_log_likelihood(std::span<const double> beta,
                                const WinMatrix& wins, double alpha) {
  const std::size_t n = wins.n;
  if (beta.size() != n)
    throw DataError("beta length does not match the win matrix");
  double ll = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double c = static_cast<double>(wins.counts[i * n + j]) + alpha;
      ll += c * std::log(win_probability(beta[i], beta[j]));
    }
  return ll;
}

ConnectivityReport check_connectivity(const WinMatrix& wins) {
  const std::size_t n = wins.n;
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (wins.at(i, j) + wins.at(j, i) > 0) {
        const std::size_t a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }

  ConnectivityReport report;
  std::map<std::size_t, std::vector<std::string>> groups;  // root -> members
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(wins.ids[i]);
  for (auto& [root, members] : groups)
    report.components.push_back(std::move(members));
  report.connected = report.components.size() == 1;
  return report;
}

}  // namespace btrank
