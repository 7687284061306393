#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "btrank/problem.hpp"

namespace btrank {

enum class ScheduleMode { round_robin, sampled, external };

// The matches to play, in play order. Each pair is (first, second) as to be
// presented to the judge; presentation side is already randomized.
struct Schedule {
  std::vector<std::pair<std::string, std::string>> pairs;
  ScheduleMode mode = ScheduleMode::external;
  int matches_per_problem = 0;  // meaningful in sampled mode
  std::uint64_t seed = 0;
};

// Every unordered pair exactly once, order and sides shuffled from the seed.
Schedule round_robin(const ProblemSet& problems, std::uint64_t seed);

// A connected M-regular comparison multigraph: every problem appears in
// exactly M pairs, total pairs n*M/2. Requires n >= 2 and n*M even.
Schedule sampled(const ProblemSet& problems, int matches_per_problem,
                 std::uint64_t seed);

// Degree-constrained subset selection used by subsample(): returns indices
// into `source` forming (as close as the source permits) a target_m-regular
// sub-multigraph. kept is sorted ascending, preserving play order.
struct SubsampleResult {
  std::vector<std::size_t> kept;
  std::vector<int> achieved_degree;  // per dense problem index
  bool exact = false;                // every degree equals target_m
};

SubsampleResult subsample_pairs(
    const std::vector<std::pair<std::string, std::string>>& source,
    const ProblemSet& problems, int target_m, std::uint64_t seed);

// Keeps a target_m-regular subset of an existing schedule's pairs.
Schedule subsample(const Schedule& source, const ProblemSet& problems,
                   int target_m, std::uint64_t seed);

bool schedule_connected(const Schedule& schedule, const ProblemSet& problems);

// JSONL lines {"first_id": ..., "second_id": ...} in play order.
void write_schedule(const Schedule& schedule,
                    const std::filesystem::path& path);
Schedule load_schedule(const std::filesystem::path& path);

}  // namespace btrank
