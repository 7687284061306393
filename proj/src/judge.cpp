#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "btrank/judge.hpp"

#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "btrank/bt_fit.hpp"
#include "btrank/errors.hpp"
#include "btrank/prompts.hpp"
#include "btrank/rng.hpp"

namespace btrank {

using ordered_json = nlohmann::ordered_json;

namespace {
constexpr std::uint64_t kSimJudgeStream = 0xB1;
}

void JudgeConfig::validate() const {
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (concurrency_limit < 1) throw ConfigError("concurrency_limit must be >= 1");
  if (timeout.count() <= 0) throw ConfigError("timeout must be positive");
  if (kind == JudgeKind::remote) {
    if (endpoint_url.empty())
      throw ConfigError("remote judge requires an endpoint URL");
    if (endpoint_url.rfind("http://", 0) != 0 &&
        endpoint_url.rfind("https://", 0) != 0)
      throw ConfigError("endpoint URL must start with http:// or https://: '" +
                        endpoint_url + "'");
    if (model_name.empty())
      throw ConfigError("remote judge requires a model name");
  }
}

void SimulatedJudge::validate() const {
  if (true_strengths.empty())
    throw ConfigError("simulated judge has no true strengths");
  for (const auto& [id, b] : true_strengths)
    if (!std::isfinite(b))
      throw ConfigError("simulated judge: non-finite strength for '" + id + "'");
  if (!(flip_rate >= 0.0 && flip_rate <= 1.0))
    throw ConfigError("flip_rate must lie in [0, 1]");
}

MatchLogEntry SimulatedJudge::compare(const Problem& first,
                                      const Problem& second,
                                      std::uint64_t schedule_index) const {
  auto strength = [&](const std::string& id) {
    auto it = true_strengths.find(id);
    if (it == true_strengths.end())
      throw DataError("simulated judge has no strength for problem '" + id + "'");
    return it->second;
  };
  const double beta_first = strength(first.id);
  const double beta_second = strength(second.id);

  Rng rng(derive_seed(seed, kSimJudgeStream, schedule_index));
  bool first_wins = rng.unit() < win_probability(beta_first, beta_second);
  if (flip_rate > 0.0 && rng.unit() < flip_rate) first_wins = !first_wins;

  MatchLogEntry entry;
  entry.seq = schedule_index;
  entry.first_id = first.id;
  entry.second_id = second.id;
  entry.winner = first_wins ? Winner::first : Winner::second;
  entry.judge = "simulated";
  entry.raw_response = first_wins ? "@<a>@" : "@<b>@";
  return entry;
}

std::optional<std::string> extract_last_token(std::string_view raw,
                                              std::string_view open,
                                              std::string_view close) {
  std::optional<std::string> found;
  std::size_t pos = 0;
  while ((pos = raw.find(open, pos)) != std::string_view::npos) {
    const std::size_t content = pos + open.size();
    const std::size_t end = raw.find(close, content);
    if (end == std::string_view::npos) break;
    found = std::string(raw.substr(content, end - content));
    ++pos;
  }
  return found;
}

JudgeResponse parse_choice(std::string raw, std::string_view open,
                           std::string_view close) {
  JudgeResponse response;
  response.raw_text = std::move(raw);
  const auto token = extract_last_token(response.raw_text, open, close);
  if (!token) return response;
  if (*token == "a")
    response.parsed = Parsed::a;
  else if (*token == "b")
    response.parsed = Parsed::b;
  return response;
}

std::optional<int> parse_label(std::string_view raw) {
  const auto token =
      extract_last_token(raw, prompts::kLabelOpen, prompts::kLabelClose);
  if (!token) return std::nullopt;
  int value = 0;
  const char* begin = token->data();
  const char* end = begin + token->size();
  auto [p, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || p != end) return std::nullopt;
  if (value < 1 || value > 10)
    throw DataError("difficulty label " + std::to_string(value) +
                    " outside the 1-10 scale");
  return value;
}

// ---------------------------------------------------------------------------
// Remote judge
// ---------------------------------------------------------------------------

struct RemoteJudge::Transport {
  std::string base;  // scheme://host[:port]
  std::string path;
  std::string api_key;
  std::mutex log_mutex;

  std::string post(const JudgeConfig& config, const std::string& prompt);
};

namespace {

void split_endpoint(const std::string& url, std::string& base,
                    std::string& path) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw ConfigError("endpoint URL must start with http:// or https://: '" +
                      url + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    base = url;
    path = "/v1/chat/completions";
  } else {
    base = url.substr(0, path_start);
    path = url.substr(path_start);
  }
}

}  // namespace

std::string RemoteJudge::Transport::post(const JudgeConfig& config,
                                         const std::string& prompt) {
  // One client per call: httplib clients are not safe for concurrent
  // requests, and run_schedule calls from several worker threads.
  httplib::Client client(base);
  client.set_connection_timeout(config.timeout);
  client.set_read_timeout(config.timeout);
  client.set_write_timeout(config.timeout);

  httplib::Headers headers;
  if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

  ordered_json body;
  body["model"] = config.model_name;
  body["messages"] = ordered_json::array(
      {ordered_json{{"role", "user"}, {"content", prompt}}});
  const std::string payload = body.dump();

  if (config.log_wire) {
    std::lock_guard lock(log_mutex);
    std::cerr << ">> POST " << base << path << "\n>> " << payload << "\n";
  }

  auto result = client.Post(path, headers, payload, "application/json");
  if (!result)
    throw TransportError("POST " + base + path + " failed: " +
                         httplib::to_string(result.error()));
  if (config.log_wire) {
    std::lock_guard lock(log_mutex);
    std::cerr << "<< HTTP " << result->status << "\n<< " << result->body << "\n";
  }
  if (result->status < 200 || result->status >= 300)
    throw TransportError("POST " + base + path + " returned HTTP " +
                         std::to_string(result->status));

  try {
    const auto j = ordered_json::parse(result->body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError("malformed completion response from " + base + path +
                         ": " + e.what());
  }
}

RemoteJudge::RemoteJudge(JudgeConfig config) : config_(std::move(config)) {
  if (config_.kind != JudgeKind::remote)
    throw ConfigError("RemoteJudge requires kind=remote");
  config_.validate();
  transport_ = std::make_unique<Transport>();
  split_endpoint(config_.endpoint_url, transport_->base, transport_->path);
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str()))
      transport_->api_key = key;
  }
}

RemoteJudge::~RemoteJudge() = default;
RemoteJudge::RemoteJudge(RemoteJudge&&) noexcept = default;
RemoteJudge& RemoteJudge::operator=(RemoteJudge&&) noexcept = default;

MatchLogEntry RemoteJudge::compare(const Problem& first, const Problem& second,
                                   std::uint64_t schedule_index) {
  const std::string prompt =
      prompts::render_compare(first.statement, second.statement);

  MatchLogEntry entry;
  entry.seq = schedule_index;
  entry.first_id = first.id;
  entry.second_id = second.id;
  entry.judge = config_.model_name;

  const int attempts = 1 + config_.max_retries;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    std::string raw;
    try {
      raw = transport_->post(config_, prompt);
    } catch (const TransportError&) {
      if (attempt + 1 == attempts) throw;
      continue;
    }
    entry.raw_response = raw;
    const JudgeResponse response =
        parse_choice(raw, prompts::kChoiceOpen, prompts::kChoiceClose);
    if (response.parsed == Parsed::a) {
      entry.winner = Winner::first;
      return entry;
    }
    if (response.parsed == Parsed::b) {
      entry.winner = Winner::second;
      return entry;
    }
  }
  return entry;  // winner unset: discarded after retry exhaustion
}

int RemoteJudge::label(const Problem& problem) {
  const std::string prompt = prompts::render_label(problem.statement);
  const int attempts = 1 + config_.max_retries;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    std::string raw;
    try {
      raw = transport_->post(config_, prompt);
    } catch (const TransportError&) {
      if (attempt + 1 == attempts) throw;
      continue;
    }
    if (const auto value = parse_label(raw)) return *value;
  }
  throw DataError("difficulty label for problem '" + problem.id +
                  "' stayed unparseable after " + std::to_string(attempts) +
                  " attempts");
}

Comparator make_comparator(const SimulatedJudge& judge) {
  judge.validate();
  return [judge](const Problem& first, const Problem& second,
                 std::uint64_t schedule_index) {
    return judge.compare(first, second, schedule_index);
  };
}

Comparator make_comparator(RemoteJudge& judge) {
  return [&judge](const Problem& first, const Problem& second,
                  std::uint64_t schedule_index) {
    return judge.compare(first, second, schedule_index);
  };
}

// ---------------------------------------------------------------------------
// Schedule runner
// ---------------------------------------------------------------------------

namespace {

// Validates that the log is a prefix of the schedule and returns how many
// pairs are already played.
std::size_t resume_point(const Schedule& schedule,
                         const std::filesystem::path& log_path) {
  std::error_code ec;
  if (!std::filesystem::exists(log_path, ec)) return 0;
  const MatchLog log = load_match_log(log_path);
  if (log.entries.size() > schedule.pairs.size())
    throw DataError("match log '" + log_path.string() + "' holds " +
                    std::to_string(log.entries.size()) +
                    " entries but the schedule has only " +
                    std::to_string(schedule.pairs.size()) + " pairs");
  for (std::size_t i = 0; i < log.entries.size(); ++i) {
    const auto& e = log.entries[i];
    const auto& [first, second] = schedule.pairs[i];
    if (e.first_id != first || e.second_id != second)
      throw DataError("match log '" + log_path.string() + "' entry " +
                      std::to_string(i + 1) + " plays " + e.first_id + " vs " +
                      e.second_id + " but the schedule says " + first +
                      " vs " + second);
  }
  return log.entries.size();
}

}  // namespace

RunSummary run_schedule(const Schedule& schedule, const ProblemSet& problems,
                        const Comparator& compare,
                        const std::filesystem::path& log_path,
                        const RunOptions& options) {
  if (!compare) throw ConfigError("run_schedule needs a comparator");
  if (options.concurrency < 1)
    throw ConfigError("concurrency must be >= 1");
  for (const auto& [first, second] : schedule.pairs) {
    problems.index_of(first);  // throws on unknown ids up front
    problems.index_of(second);
  }

  const std::size_t total = schedule.pairs.size();
  const std::size_t start = resume_point(schedule, log_path);

  RunSummary summary;
  summary.skipped = start;
  MatchLogWriter writer(log_path, start + 1, &problems);

  auto emit = [&](MatchLogEntry entry, std::uint64_t seq) {
    entry.seq = seq;
    if (entry.discarded()) {
      writer.append_discarded(entry);
      ++summary.discarded;
    } else {
      writer.append(entry.to_record());
      ++summary.played;
    }
    if (options.progress && seq % 100 == 0)
      std::cerr << "played " << seq << "/" << total << "\n";
  };

  const int workers =
      static_cast<int>(std::min<std::size_t>(options.concurrency,
                                             total > start ? total - start : 0));
  if (workers <= 1) {
    for (std::size_t k = start; k < total; ++k) {
      const auto& [first, second] = schedule.pairs[k];
      emit(compare(problems.at(first), problems.at(second), k + 1), k + 1);
    }
    writer.flush();
    return summary;
  }

  // Workers pull the next schedule index; the main thread drains results in
  // schedule order so the log is byte-deterministic and always a contiguous
  // prefix. On the first failure, issuing stops and the error is rethrown
  // after landing every earlier result.
  std::mutex mutex;
  std::condition_variable ready_cv;
  std::map<std::uint64_t, MatchLogEntry> ready;
  std::exception_ptr failure;
  std::atomic<std::size_t> next_index{start};
  std::atomic<bool> stop{false};

  auto work = [&] {
    for (;;) {
      const std::size_t k = next_index.fetch_add(1);
      if (k >= total || stop.load()) return;
      try {
        const auto& [first, second] = schedule.pairs[k];
        MatchLogEntry entry =
            compare(problems.at(first), problems.at(second), k + 1);
        std::lock_guard lock(mutex);
        ready.emplace(k + 1, std::move(entry));
        ready_cv.notify_all();
      } catch (...) {
        stop.store(true);
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        ready_cv.notify_all();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);

  std::exception_ptr drain_failure;
  for (std::size_t k = start; k < total; ++k) {
    MatchLogEntry entry;
    {
      std::unique_lock lock(mutex);
      ready_cv.wait(lock, [&] {
        return ready.count(k + 1) != 0 || failure != nullptr;
      });
      if (!ready.count(k + 1)) {
        drain_failure = failure;
        break;
      }
      entry = std::move(ready.at(k + 1));
      ready.erase(k + 1);
    }
    try {
      emit(std::move(entry), k + 1);
    } catch (...) {
      stop.store(true);
      drain_failure = std::current_exception();
      break;
    }
  }

  stop.store(true);
  for (auto& t : pool) t.join();
  writer.flush();
  if (drain_failure) std::rethrow_exception(drain_failure);
  return summary;
}

std::vector<MatchRecord> play_offline(const Schedule& schedule,
                                      const ProblemSet& problems,
                                      const SimulatedJudge& judge) {
  judge.validate();
  std::vector<MatchRecord> records;
  records.reserve(schedule.pairs.size());
  for (std::size_t k = 0; k < schedule.pairs.size(); ++k) {
    const auto& [first, second] = schedule.pairs[k];
    records.push_back(
        judge.compare(problems.at(first), problems.at(second), k + 1)
            .to_record());
  }
  return records;
}

MeasureSeries label_problems(const ProblemSet& problems, RemoteJudge& judge,
                             const std::string& series_name) {
  MeasureSeries series;
  series.name = series_name;
  series.kind = MeasureKind::llm_label;
  series.scale_note = "difficulty 1 (easiest) to 10 (hardest)";
  for (const Problem& p : problems)
    series.values[p.id] = static_cast<double>(judge.label(p));
  return series;
}

}  // namespace btrank
