#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "btrank/bt_fit.hpp"
#include "btrank/errors.hpp"
#include "btrank/match_log.hpp"
#include "btrank/rng.hpp"
#include "oracle.hpp"

using namespace btrank;
using btrank::testing::mle_oracle;

namespace {

MatchRecord rec(std::uint64_t seq, std::string a, std::string b, Winner w) {
  return MatchRecord{seq, std::move(a), std::move(b), w, "sim", "@<a>@"};
}

ProblemSet make_problems(const std::vector<std::string>& ids) {
  ProblemSet set;
  for (const auto& id : ids) set.add({id, "statement " + id, {}});
  return set;
}

// Random win matrix over ids p0..p(n-1) with every pair played at least once.
WinMatrix random_wins(std::size_t n, std::uint64_t seed, int max_per_pair) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("p" + std::to_string(i));
  Rng rng(seed);
  std::vector<MatchRecord> recs;
  std::uint64_t seq = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const int plays = 1 + static_cast<int>(rng.below(
                                static_cast<std::uint64_t>(max_per_pair)));
      for (int k = 0; k < plays; ++k) {
        const Winner w = (rng.next_u64() & 1) ? Winner::first : Winner::second;
        recs.push_back(rec(seq++, ids[i], ids[j], w));
      }
    }
  }
  return build_win_matrix(recs, make_problems(ids));
}

}  // namespace

TEST_CASE("win probability honors the Bradley-Terry form") {
  CHECK(win_probability(0.0, 0.0) == 0.5);
  CHECK(win_probability(1.7, 1.7) == 0.5);
  CHECK(win_probability(1.0, 0.0) == doctest::Approx(0.7310585786300049).epsilon(1e-12));
  CHECK(win_probability(0.0, 1.0) == doctest::Approx(0.2689414213699951).epsilon(1e-12));
  // Monotone in the gap.
  double prev = 0.5;
  for (double gap : {0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
    const double p = win_probability(gap, 0.0);
    CHECK(p > prev);
    prev = p;
  }
  CHECK(win_probability(800.0, 0.0) == 1.0);
  CHECK(win_probability(0.0, 800.0) == 0.0);
}

TEST_CASE("complementary win probabilities sum to exactly one") {
  Rng rng(99);
  for (int i = 0; i < 2000; ++i) {
    const double a = 6.0 * (rng.unit() - 0.5);
    const double b = 6.0 * (rng.unit() - 0.5);
    const double p = win_probability(a, b);
    const double q = win_probability(b, a);
    CHECK(p + q == 1.0);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
  // Equal gaps give bitwise-equal probabilities regardless of offset.
  CHECK(win_probability(1.25, 0.5) == win_probability(0.75, 0.0));
  CHECK(win_probability(-0.5, -1.25) == win_probability(0.75, 0.0));
}

TEST_CASE("win matrix tallies decided matches by dense index") {
  const std::vector<std::string> ids = {"a", "b", "c"};
  std::vector<MatchRecord> recs;
  recs.push_back(rec(1, "a", "b", Winner::first));    // a beats b
  recs.push_back(rec(2, "b", "a", Winner::second));   // a beats b
  recs.push_back(rec(3, "b", "c", Winner::first));    // b beats c
  recs.push_back(rec(4, "c", "a", Winner::first));    // c beats a
  const WinMatrix wins = build_win_matrix(recs, make_problems(ids));
  CHECK(wins.n == 3);
  CHECK(wins.total == 4);
  CHECK(wins.at(0, 1) == 2);
  CHECK(wins.at(1, 0) == 0);
  CHECK(wins.at(1, 2) == 1);
  CHECK(wins.at(2, 0) == 1);
  CHECK(wins.at(0, 2) == 0);
}

TEST_CASE("win matrix rejects unknown ids") {
  const std::vector<std::string> ids = {"a", "b"};
  std::vector<MatchRecord> recs = {rec(1, "a", "zz", Winner::first)};
  CHECK_THROWS_AS(build_win_matrix(recs, make_problems(ids)), DataError);
}

TEST_CASE("two-problem fit matches the closed-form penalized optimum") {
  const std::vector<std::string> ids = {"a", "b"};
  std::vector<MatchRecord> recs;
  recs.push_back(rec(1, "a", "b", Winner::first));
  recs.push_back(rec(2, "a", "b", Winner::first));
  recs.push_back(rec(3, "a", "b", Winner::first));
  recs.push_back(rec(4, "a", "b", Winner::second));
  const WinMatrix wins = build_win_matrix(recs, make_problems(ids));
  FitParams params;
  const BTScores scores = ilsr_fit(wins, params);
  REQUIRE(scores.ids == ids);
  CHECK(scores.converged);
  // With 3-1 wins and pseudo-count alpha the optimal gap is
  // log((3 + alpha) / (1 + alpha)).
  const double gap = std::log((3.0 + params.alpha) / (1.0 + params.alpha));
  CHECK(scores.beta[0] == doctest::Approx(gap / 2).epsilon(1e-6));
  CHECK(scores.beta[1] == doctest::Approx(-gap / 2).epsilon(1e-6));
}

TEST_CASE("transitive sweep recovers the order with equal gaps") {
  const std::vector<std::string> ids = {"a", "b", "c"};
  std::vector<MatchRecord> recs;
  std::uint64_t seq = 1;
  for (int k = 0; k < 2; ++k) recs.push_back(rec(seq++, "a", "b", Winner::first));
  for (int k = 0; k < 2; ++k) recs.push_back(rec(seq++, "b", "c", Winner::first));
  for (int k = 0; k < 2; ++k) recs.push_back(rec(seq++, "a", "c", Winner::first));
  const BTScores scores = ilsr_fit(build_win_matrix(recs, make_problems(ids)));
  CHECK(scores.beta[0] > scores.beta[1]);
  CHECK(scores.beta[1] > scores.beta[2]);
  // The configuration is symmetric under reversal, so the gaps must agree.
  CHECK(std::abs((scores.beta[0] - scores.beta[1]) -
                 (scores.beta[1] - scores.beta[2])) < 1e-6);
  const double mean =
      (scores.beta[0] + scores.beta[1] + scores.beta[2]) / 3.0;
  CHECK(std::abs(mean) < 1e-12);
}

TEST_CASE("balanced results give uniform strengths") {
  const std::vector<std::string> ids = {"a", "b", "c", "d"};
  std::vector<MatchRecord> recs;
  std::uint64_t seq = 1;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      recs.push_back(rec(seq++, ids[i], ids[j], Winner::first));
      recs.push_back(rec(seq++, ids[i], ids[j], Winner::second));
    }
  }
  const BTScores scores = ilsr_fit(build_win_matrix(recs, make_problems(ids)));
  for (double b : scores.beta) CHECK(std::abs(b) < 1e-9);
}

TEST_CASE("spectral fit agrees with a coordinate-ascent oracle") {
  FitParams params;
  params.tol = 1e-10;
  params.max_iter = 500;
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    for (std::size_t n : {3u, 5u, 8u}) {
      const WinMatrix wins = random_wins(n, 1000 * seed + n, 6);
      const BTScores scores = ilsr_fit(wins, params);
      const std::vector<double> oracle = mle_oracle(wins, params.alpha);
      REQUIRE(scores.beta.size() == oracle.size());
      for (std::size_t i = 0; i < oracle.size(); ++i)
        CHECK(std::abs(scores.beta[i] - oracle[i]) < 1e-6);
      const double ll_fit = penalized_log_likelihood(scores.beta, wins, params.alpha);
      const double ll_oracle = penalized_log_likelihood(oracle, wins, params.alpha);
      CHECK(ll_fit >= ll_oracle - 1e-8);
    }
  }
}

TEST_CASE("serial and parallel fits are bit-identical") {
  const WinMatrix wins = random_wins(30, 777, 4);
  const BTScores serial = ilsr_fit(wins, {}, Exec::serial);
  const BTScores parallel = ilsr_fit(wins, {}, Exec::parallel);
  REQUIRE(serial.beta.size() == parallel.beta.size());
  CHECK(serial.iterations == parallel.iterations);
  for (std::size_t i = 0; i < serial.beta.size(); ++i)
    CHECK(serial.beta[i] == parallel.beta[i]);
}

TEST_CASE("fits are deterministic across repeated calls") {
  const WinMatrix wins = random_wins(12, 5150, 5);
  const BTScores a = ilsr_fit(wins);
  const BTScores b = ilsr_fit(wins);
  CHECK(a.beta == b.beta);
}

TEST_CASE("strengths are mean-centered") {
  const WinMatrix wins = random_wins(17, 31337, 5);
  const BTScores scores = ilsr_fit(wins);
  double sum = 0.0;
  for (double b : scores.beta) sum += b;
  CHECK(std::abs(sum) < 1e-10);
}

TEST_CASE("single problem fits to strength zero") {
  const std::vector<std::string> ids = {"only"};
  const WinMatrix wins = build_win_matrix({}, make_problems(ids));
  const BTScores scores = ilsr_fit(wins);
  REQUIRE(scores.beta.size() == 1);
  CHECK(scores.beta[0] == 0.0);
}

TEST_CASE("log likelihood matches a direct computation") {
  const std::vector<std::string> ids = {"a", "b"};
  std::vector<MatchRecord> recs;
  recs.push_back(rec(1, "a", "b", Winner::first));
  recs.push_back(rec(2, "a", "b", Winner::second));
  const WinMatrix wins = build_win_matrix(recs, make_problems(ids));
  BTScores scores;
  scores.ids = ids;
  scores.beta = {0.5, -0.5};
  const double expect =
      std::log(win_probability(0.5, -0.5)) + std::log(win_probability(-0.5, 0.5));
  CHECK(log_likelihood(scores, wins) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("connectivity report groups components") {
  const std::vector<std::string> ids = {"a", "b", "c", "d", "e"};
  std::vector<MatchRecord> recs;
  recs.push_back(rec(1, "a", "b", Winner::first));
  recs.push_back(rec(2, "b", "c", Winner::first));
  recs.push_back(rec(3, "d", "e", Winner::first));
  const ConnectivityReport split =
      check_connectivity(build_win_matrix(recs, make_problems(ids)));
  CHECK_FALSE(split.connected);
  REQUIRE(split.components.size() == 2);
  CHECK(split.components[0] == std::vector<std::string>{"a", "b", "c"});
  CHECK(split.components[1] == std::vector<std::string>{"d", "e"});

  recs.push_back(rec(4, "c", "d", Winner::second));
  const ConnectivityReport joined =
      check_connectivity(build_win_matrix(recs, make_problems(ids)));
  CHECK(joined.connected);
  REQUIRE(joined.components.size() == 1);
  CHECK(joined.components[0].size() == 5);
}

TEST_CASE("disconnected inputs still fit thanks to pseudo-counts") {
  const std::vector<std::string> ids = {"a", "b", "c", "d"};
  std::vector<MatchRecord> recs;
  recs.push_back(rec(1, "a", "b", Winner::first));
  recs.push_back(rec(2, "c", "d", Winner::first));
  const BTScores scores = ilsr_fit(build_win_matrix(recs, make_problems(ids)));
  CHECK(scores.converged);
  for (double b : scores.beta) CHECK(std::isfinite(b));
  CHECK(scores.beta[0] > scores.beta[1]);
  CHECK(scores.beta[2] > scores.beta[3]);
}
