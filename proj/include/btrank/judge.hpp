#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "btrank/match_log.hpp"
#include "btrank/problem.hpp"
#include "btrank/schedule.hpp"

namespace btrank {

enum class JudgeKind { remote, simulated };

struct JudgeConfig {
  JudgeKind kind = JudgeKind::simulated;
  std::string endpoint_url;             // remote only, e.g. http://host:port/v1/chat/completions
  std::string model_name;               // remote only; also recorded in the match log
  std::string api_key_env = "BTRANK_API_KEY";
  int max_retries = 3;                  // additional attempts after the first
  std::chrono::milliseconds timeout{120'000};
  int concurrency_limit = 1;
  bool log_wire = false;                // dump request/response bodies to stderr

  void validate() const;  // throws ConfigError
};

// Oracle judge: draws winners from Bradley-Terry probabilities over known
// strengths. Randomness is derived from (seed, schedule index), so outcomes
// are independent of execution order and concurrency.
struct SimulatedJudge {
  std::map<std::string, double> true_strengths;
  std::uint64_t seed = 0;
  double flip_rate = 0.0;  // post-draw winner flip; 0 keeps the pure BT oracle

  void validate() const;  // throws ConfigError
  MatchLogEntry compare(const Problem& first, const Problem& second,
                        std::uint64_t schedule_index) const;
};

enum class Parsed { a, b, unparseable };

struct JudgeResponse {
  std::string raw_text;
  Parsed parsed = Parsed::unparseable;
};

// Content of the last open...close span in raw, or nullopt if no complete
// span exists. The last occurrence wins so a judge may think out loud and
// then commit.
std::optional<std::string> extract_last_token(std::string_view raw,
                                              std::string_view open,
                                              std::string_view close);

JudgeResponse parse_choice(std::string raw, std::string_view open,
                           std::string_view close);

// Parses the 1-10 difficulty label; nullopt when no integer token is present.
// An integer outside [1,10] throws DataError (a well-formed but invalid
// answer is not retryable).
std::optional<int> parse_label(std::string_view raw);

// Remote chat-completions judge. One user message per call; the reply's
// message content is parsed for the choice/label tokens. Unparseable replies
// and transport failures are retried up to max_retries.
class RemoteJudge {
 public:
  explicit RemoteJudge(JudgeConfig config);
  ~RemoteJudge();
  RemoteJudge(RemoteJudge&&) noexcept;
  RemoteJudge& operator=(RemoteJudge&&) noexcept;

  // Entry is discarded (winner empty) when every attempt was unparseable;
  // throws TransportError when the endpoint stays unreachable.
  MatchLogEntry compare(const Problem& first, const Problem& second,
                        std::uint64_t schedule_index);
  int label(const Problem& problem);

  const JudgeConfig& config() const { return config_; }

 private:
  JudgeConfig config_;
  struct Transport;
  std::unique_ptr<Transport> transport_;
};

// One comparison: (first, second, schedule_index) -> log entry. run_schedule
// is written against this so tests can drop in pathological judges.
using Comparator =
    std::function<MatchLogEntry(const Problem&, const Problem&, std::uint64_t)>;

Comparator make_comparator(const SimulatedJudge& judge);
Comparator make_comparator(RemoteJudge& judge);  // judge must outlive the comparator

struct RunSummary {
  std::uint64_t played = 0;     // decided matches appended this run
  std::uint64_t discarded = 0;  // unparseable-after-retries appended this run
  std::uint64_t skipped = 0;    // pairs already present in the log
};

struct RunOptions {
  int concurrency = 1;
  bool progress = false;  // one stderr line per 100 pairs
};

// Plays the schedule, appending one entry per pair to log_path in schedule
// order (seq = 1-based schedule index). Comparisons run concurrently up to
// options.concurrency; a reorder buffer serializes appends so the log bytes
// never depend on completion order. If log_path already holds a prefix of
// this schedule the run resumes after it; a log that disagrees with the
// schedule throws DataError.
RunSummary run_schedule(const Schedule& schedule, const ProblemSet& problems,
                        const Comparator& compare,
                        const std::filesystem::path& log_path,
                        const RunOptions& options = {});

// Labels every problem with the 1-10 difficulty prompt.
MeasureSeries label_problems(const ProblemSet& problems, RemoteJudge& judge,
                             const std::string& series_name = "llm_labels");

// Plays a whole schedule against the oracle in memory, no log file; used by
// the simulation experiments.
std::vector<MatchRecord> play_offline(const Schedule& schedule,
                                      const ProblemSet& problems,
                                      const SimulatedJudge& judge);

}  // namespace btrank
