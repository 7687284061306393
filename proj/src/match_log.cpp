#include "btrank/match_log.hpp"

#include <nlohmann/json.hpp>

#include "btrank/errors.hpp"
#include "detail/io.hpp"

namespace btrank {

using ordered_json = nlohmann::ordered_json;

MatchRecord MatchLogEntry::to_record() const {
  if (!winner)
    throw DataError("discarded match (seq " + std::to_string(seq) +
                    ") has no winner");
  return MatchRecord{seq, first_id, second_id, *winner, judge, raw_response};
}

std::vector<MatchRecord> MatchLog::decided() const {
  std::vector<MatchRecord> records;
  records.reserve(entries.size());
  for (const auto& e : entries)
    if (!e.discarded()) records.push_back(e.to_record());
  return records;
}

std::size_t MatchLog::discarded_count() const {
  std::size_t k = 0;
  for (const auto& e : entries) k += e.discarded() ? 1 : 0;
  return k;
}

std::string serialize_match_entry(const MatchLogEntry& entry) {
  ordered_json j;
  j["seq"] = entry.seq;
  j["first_id"] = entry.first_id;
  j["second_id"] = entry.second_id;
  if (entry.winner)
    j["winner"] = *entry.winner == Winner::first ? "first" : "second";
  else
    j["winner"] = nullptr;
  if (entry.discarded()) j["discarded"] = true;
  j["judge"] = entry.judge;
  if (entry.raw_response)
    j["raw_response"] = *entry.raw_response;
  else
    j["raw_response"] = nullptr;
  return j.dump();
}

MatchLogEntry parse_match_entry(const std::string& line, std::size_t line_no) {
  const std::string where = "match log line " + std::to_string(line_no);
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where + ": " + e.what());
  }
  if (!j.is_object()) throw DataError(where + ": not a JSON object");

  MatchLogEntry entry;
  try {
    entry.seq = j.at("seq").get<std::uint64_t>();
    entry.first_id = j.at("first_id").get<std::string>();
    entry.second_id = j.at("second_id").get<std::string>();
    const auto& w = j.at("winner");
    if (w.is_null()) {
      if (!j.value("discarded", false))
        throw DataError(where + ": null winner without discarded flag");
    } else {
      const auto s = w.get<std::string>();
      if (s == "first")
        entry.winner = Winner::first;
      else if (s == "second")
        entry.winner = Winner::second;
      else
        throw DataError(where + ": winner must be \"first\" or \"second\"");
    }
    if (j.contains("judge")) entry.judge = j["judge"].get<std::string>();
    if (j.contains("raw_response") && !j["raw_response"].is_null())
      entry.raw_response = j["raw_response"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where + ": " + e.what());
  }
  if (entry.first_id.empty() || entry.second_id.empty())
    throw DataError(where + ": empty problem id");
  if (entry.first_id == entry.second_id)
    throw DataError(where + ": match pairs problem '" + entry.first_id +
                    "' with itself");
  return entry;
}

MatchLogWriter::MatchLogWriter(const std::filesystem::path& path,
                               std::uint64_t next_seq,
                               const ProblemSet* problems)
    : path_(path), next_seq_(next_seq), problems_(problems) {
  out_.open(path, std::ios::binary | std::ios::app);
  if (!out_)
    throw DataError("cannot open match log '" + path.string() +
                    "' for append");
}

void MatchLogWriter::validate_pair(std::uint64_t seq, const std::string& first,
                                   const std::string& second) const {
  if (seq != next_seq_)
    throw DataError("match log '" + path_.string() + "': seq " +
                    std::to_string(seq) + " appended out of order (expected " +
                    std::to_string(next_seq_) + ")");
  if (first == second)
    throw DataError("match pairs problem '" + first + "' with itself");
  if (problems_) {
    if (!problems_->contains(first))
      throw DataError("match references unknown problem '" + first + "'");
    if (!problems_->contains(second))
      throw DataError("match references unknown problem '" + second + "'");
  }
}

void MatchLogWriter::write_line(const MatchLogEntry& entry) {
  out_ << serialize_match_entry(entry) << '\n';
  if (!out_) throw DataError("write to match log '" + path_.string() + "' failed");
  ++next_seq_;
}

void MatchLogWriter::append(const MatchRecord& record) {
  validate_pair(record.seq, record.first_id, record.second_id);
  write_line(MatchLogEntry{record.seq, record.first_id, record.second_id,
                           record.winner, record.judge, record.raw_response});
}

void MatchLogWriter::append_discarded(const MatchLogEntry& entry) {
  if (entry.winner)
    throw DataError("append_discarded called with a decided match");
  validate_pair(entry.seq, entry.first_id, entry.second_id);
  write_line(entry);
}

void MatchLogWriter::flush() {
  out_.flush();
  if (!out_) throw DataError("flush of match log '" + path_.string() + "' failed");
}

MatchLog load_match_log(const std::filesystem::path& path) {
  MatchLog log;
  const auto lines = detail::read_lines(path);
  log.entries.reserve(lines.size());
  std::uint64_t expected = 1;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    MatchLogEntry entry = parse_match_entry(lines[i], i + 1);
    if (entry.seq != expected)
      throw DataError("match log '" + path.string() + "' line " +
                      std::to_string(i + 1) + ": seq " +
                      std::to_string(entry.seq) + " breaks the 1..n sequence " +
                      "(expected " + std::to_string(expected) + ")");
    ++expected;
    log.entries.push_back(std::move(entry));
  }
  return log;
}

}  // namespace btrank
