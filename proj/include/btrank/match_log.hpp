#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "btrank/problem.hpp"

namespace btrank {

enum class Winner { first, second };

// One played comparison. first_id/second_id are the problems as presented
// (positions "a" and "b"); seq is the 1-based position in the schedule.
struct MatchRecord {
  std::uint64_t seq = 0;
  std::string first_id;
  std::string second_id;
  Winner winner = Winner::first;
  std::string judge;
  std::optional<std::string> raw_response;

  bool operator==(const MatchRecord&) const = default;

  const std::string& winner_id() const {
    return winner == Winner::first ? first_id : second_id;
  }
  const std::string& loser_id() const {
    return winner == Winner::first ? second_id : first_id;
  }
};

// One log line; winner is empty for pairs discarded after retry exhaustion.
// Discarded entries stay in the log for audit but are excluded from fitting.
struct MatchLogEntry {
  std::uint64_t seq = 0;
  std::string first_id;
  std::string second_id;
  std::optional<Winner> winner;
  std::string judge;
  std::optional<std::string> raw_response;

  bool operator==(const MatchLogEntry&) const = default;

  bool discarded() const { return !winner.has_value(); }
  MatchRecord to_record() const;
};

struct MatchLog {
  std::vector<MatchLogEntry> entries;  // file order, seq 1..entries.size()

  std::uint64_t max_seq() const {
    return entries.empty() ? 0 : entries.back().seq;
  }
  std::vector<MatchRecord> decided() const;
  std::size_t discarded_count() const;
};

// Single-writer appender. Concurrent match executors must funnel their
// results through one instance; seq must arrive strictly increasing.
class MatchLogWriter {
 public:
  // Opens for append. `next_seq` is the seq the next record must carry
  // (1 for a fresh log, max_seq+1 when resuming).
  MatchLogWriter(const std::filesystem::path& path, std::uint64_t next_seq = 1,
                 const ProblemSet* problems = nullptr);

  void append(const MatchRecord& record);
  void append_discarded(const MatchLogEntry& entry);
  void flush();
  std::uint64_t next_seq() const { return next_seq_; }

 private:
  void validate_pair(std::uint64_t seq, const std::string& first,
                     const std::string& second) const;
  void write_line(const MatchLogEntry& entry);

  std::ofstream out_;
  std::filesystem::path path_;
  std::uint64_t next_seq_;
  const ProblemSet* problems_;
};

MatchLog load_match_log(const std::filesystem::path& path);

std::string serialize_match_entry(const MatchLogEntry& entry);
MatchLogEntry parse_match_entry(const std::string& line, std::size_t line_no);

}  // namespace btrank
