#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "btrank/bt_fit.hpp"
#include "btrank/match_log.hpp"
#include "btrank/problem.hpp"

namespace btrank {

enum class ProblemFormat { jsonl, csv };

// JSONL: one object per line with "id" and "statement" ("problem" is accepted
// as an alias); remaining fields land in meta as strings.
// CSV: header row with id and statement columns; extra columns land in meta.
ProblemSet load_problems(const std::filesystem::path& path,
                         ProblemFormat format, std::string name = "");

// Two-column CSV, header "id,score". Id resolution against a problem set
// happens separately via validate_measure.
MeasureSeries load_measure(const std::filesystem::path& path, MeasureKind kind,
                           std::string name = "");

void write_problems_jsonl(const ProblemSet& problems,
                          const std::filesystem::path& path);
void write_measure(const MeasureSeries& series,
                   const std::filesystem::path& path,
                   const std::string& provenance = "");

// CSV with columns id,beta in problem-set order, shortest round-trip double
// formatting (reload is bit-identical). `provenance` becomes a '#' comment
// line before the header when non-empty.
void write_scores(const BTScores& scores, const std::filesystem::path& path,
                  const std::string& provenance = "");

// Reads an id,beta (or id,score) CSV back, skipping '#' comments.
std::map<std::string, double> load_scores(const std::filesystem::path& path);

// Reads an id,tier CSV (header required) mapping problems to tier names.
std::map<std::string, std::string> load_tiers(const std::filesystem::path& path);

}  // namespace btrank
