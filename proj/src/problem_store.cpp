#include "btrank/problem_store.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "btrank/errors.hpp"
#include "detail/io.hpp"

namespace btrank {

using ordered_json = nlohmann::ordered_json;

namespace {

// Extra JSONL fields are preserved as strings: strings verbatim, everything
// else in its JSON text form (so meta round-trips numbers like "8.5").
std::string meta_string(const ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

ProblemSet load_problems_jsonl(const std::filesystem::path& path,
                               std::string name) {
  ProblemSet set(std::move(name));
  const auto lines = detail::read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = path.string() + " line " + std::to_string(i + 1);
    ordered_json j;
    try {
      j = ordered_json::parse(lines[i]);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
    if (!j.is_object()) throw DataError(where + ": not a JSON object");

    Problem p;
    for (const auto& [key, value] : j.items()) {
      if (key == "id") {
        p.id = value.is_string() ? value.get<std::string>() : value.dump();
      } else if (key == "statement" || key == "problem") {
        if (!value.is_string())
          throw DataError(where + ": '" + key + "' must be a string");
        if (!p.statement.empty())
          throw DataError(where + ": both 'statement' and 'problem' present");
        p.statement = value.get<std::string>();
      } else {
        p.meta[key] = meta_string(value);
      }
    }
    if (p.id.empty()) throw DataError(where + ": missing or empty 'id'");
    if (p.statement.empty())
      throw DataError(where + ": missing or empty 'statement'");
    try {
      set.add(std::move(p));
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return set;
}

ProblemSet load_problems_csv(const std::filesystem::path& path,
                             std::string name) {
  std::ifstream in = detail::open_input(path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  const auto records = detail::parse_csv(content, path.string());
  if (records.empty()) throw DataError(path.string() + ": empty CSV");

  const auto& header = records[0];
  auto column = [&](const std::string& want) {
    auto it = std::find(header.begin(), header.end(), want);
    return it == header.end()
               ? std::string::npos
               : static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t id_col = column("id");
  std::size_t stmt_col = column("statement");
  if (stmt_col == std::string::npos) stmt_col = column("problem");
  if (id_col == std::string::npos || stmt_col == std::string::npos)
    throw DataError(path.string() + ": header must contain 'id' and 'statement'");

  ProblemSet set(std::move(name));
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& row = records[r];
    const std::string where = path.string() + " row " + std::to_string(r + 1);
    if (row.size() != header.size())
      throw DataError(where + ": expected " + std::to_string(header.size()) +
                      " fields, got " + std::to_string(row.size()));
    Problem p;
    p.id = row[id_col];
    p.statement = row[stmt_col];
    for (std::size_t c = 0; c < header.size(); ++c)
      if (c != id_col && c != stmt_col) p.meta[header[c]] = row[c];
    try {
      set.add(std::move(p));
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return set;
}

}  // namespace

ProblemSet load_problems(const std::filesystem::path& path,
                         ProblemFormat format, std::string name) {
  if (name.empty()) name = path.stem().string();
  ProblemSet set = format == ProblemFormat::jsonl
                       ? load_problems_jsonl(path, std::move(name))
                       : load_problems_csv(path, std::move(name));
  if (set.empty()) throw DataError(path.string() + ": no problems loaded");
  return set;
}

MeasureSeries load_measure(const std::filesystem::path& path, MeasureKind kind,
                           std::string name) {
  std::ifstream in = detail::open_input(path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  // Strip '#' comment lines (provenance headers on artifact outputs).
  std::string stripped;
  std::istringstream ss(content);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line[0] == '#') continue;
    stripped += line;
    stripped += '\n';
  }
  const auto records = detail::parse_csv(stripped, path.string());
  if (records.empty()) throw DataError(path.string() + ": empty CSV");
  const auto& header = records[0];
  if (header.size() != 2 || header[0] != "id")
    throw DataError(path.string() + ": expected two-column header 'id,score'");

  MeasureSeries series;
  series.name = name.empty() ? path.stem().string() : std::move(name);
  series.kind = kind;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& row = records[r];
    const std::string where = path.string() + " row " + std::to_string(r + 1);
    if (row.size() != 2) throw DataError(where + ": expected 2 fields");
    if (row[0].empty()) throw DataError(where + ": empty id");
    if (series.values.count(row[0]))
      throw DataError(where + ": duplicate id '" + row[0] + "'");
    const double v = detail::parse_double(row[1], where);
    if (!std::isfinite(v)) throw DataError(where + ": non-finite score");
    series.values[row[0]] = v;
  }
  if (series.values.empty()) throw DataError(path.string() + ": no scores loaded");
  return series;
}

void write_problems_jsonl(const ProblemSet& problems,
                          const std::filesystem::path& path) {
  std::ofstream out = detail::open_output(path);
  for (const Problem& p : problems) {
    ordered_json j;
    j["id"] = p.id;
    j["statement"] = p.statement;
    for (const auto& [key, value] : p.meta) j[key] = value;
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

void write_measure(const MeasureSeries& series,
                   const std::filesystem::path& path,
                   const std::string& provenance) {
  std::ofstream out = detail::open_output(path);
  if (!provenance.empty()) out << "# " << provenance << '\n';
  out << "id,score\n";
  for (const auto& [id, value] : series.values)
    out << detail::csv_quote(id) << ',' << detail::format_double(value) << '\n';
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

void write_scores(const BTScores& scores, const std::filesystem::path& path,
                  const std::string& provenance) {
  std::ofstream out = detail::open_output(path);
  if (!provenance.empty()) out << "# " << provenance << '\n';
  out << "id,beta\n";
  for (std::size_t i = 0; i < scores.ids.size(); ++i)
    out << detail::csv_quote(scores.ids[i]) << ','
        << detail::format_double(scores.beta[i]) << '\n';
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

std::map<std::string, std::string> load_tiers(const std::filesystem::path& path) {
  std::ifstream in = detail::open_input(path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  const auto records = detail::parse_csv(content, path.string());
  if (records.size() < 2)
    throw DataError(path.string() + ": expected a header and at least one row");
  if (records[0].size() != 2 || records[0][0] != "id")
    throw DataError(path.string() + ": expected two-column header 'id,tier'");
  std::map<std::string, std::string> tiers;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const std::string where = path.string() + " row " + std::to_string(r + 1);
    if (records[r].size() != 2) throw DataError(where + ": expected 2 fields");
    if (records[r][0].empty() || records[r][1].empty())
      throw DataError(where + ": empty field");
    if (!tiers.emplace(records[r][0], records[r][1]).second)
      throw DataError(where + ": duplicate id '" + records[r][0] + "'");
  }
  return tiers;
}

std::map<std::string, double> load_scores(const std::filesystem::path& path) {
  std::map<std::string, double> scores;
  const auto lines = detail::read_lines(path);
  bool header_seen = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // id,beta or id,score
      continue;
    }
    const std::string where = path.string() + " line " + std::to_string(i + 1);
    const auto rows = detail::parse_csv(line + "\n", where);
    if (rows.size() != 1 || rows[0].size() != 2)
      throw DataError(where + ": expected 2 fields");
    if (scores.count(rows[0][0]))
      throw DataError(where + ": duplicate id '" + rows[0][0] + "'");
    scores[rows[0][0]] = detail::parse_double(rows[0][1], where);
  }
  if (scores.empty()) throw DataError(path.string() + ": no scores loaded");
  return scores;
}

}  // namespace btrank
