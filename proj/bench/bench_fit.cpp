// Serial vs. OpenMP-parallel spectral fit on simulated tournaments. The two
// paths are bit-identical by contract; this target reports what the second
// buys at various cohort sizes.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <string>
#include <vector>

#include "btrank/bt_fit.hpp"
#include "btrank/judge.hpp"
#include "btrank/problem.hpp"
#include "btrank/rng.hpp"
#include "btrank/schedule.hpp"

namespace {

struct Tournament {
  btrank::ProblemSet problems;
  btrank::WinMatrix wins;
};

Tournament make_tournament(int n, int matches_per_problem) {
  Tournament t;
  btrank::SimulatedJudge judge;
  btrank::Rng rng(btrank::derive_seed(4096, static_cast<std::uint64_t>(n)));
  for (int i = 0; i < n; ++i) {
    const std::string id = "p" + std::to_string(i);
    t.problems.add({id, "statement " + id, {}});
    judge.true_strengths[id] = rng.normal();
  }
  judge.seed = btrank::derive_seed(4096, 0xbe);
  const btrank::Schedule schedule =
      btrank::sampled(t.problems, matches_per_problem, 4096);
  const auto records = btrank::play_offline(schedule, t.problems, judge);
  t.wins = btrank::build_win_matrix(records, t.problems);
  return t;
}

void run_fit(benchmark::State& state, btrank::Exec exec) {
  const Tournament t =
      make_tournament(static_cast<int>(state.range(0)), 36);
  for (auto _ : state) {
    const btrank::BTScores scores = btrank::ilsr_fit(t.wins, {}, exec);
    benchmark::DoNotOptimize(scores.beta.data());
  }
  state.counters["n"] = static_cast<double>(t.wins.n);
  state.counters["matches"] = static_cast<double>(t.wins.total);
}

void BM_FitSerial(benchmark::State& state) {
  run_fit(state, btrank::Exec::serial);
}

void BM_FitParallel(benchmark::State& state) {
  run_fit(state, btrank::Exec::parallel);
}

}  // namespace

BENCHMARK(BM_FitSerial)->Arg(50)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitParallel)->Arg(50)->Arg(200)->Arg(500)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
