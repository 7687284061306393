#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "btrank/errors.hpp"

namespace btrank {

// One item to be ranked. `meta` keeps any extra fields from the source file
// verbatim as strings; the core never interprets them.
struct Problem {
  std::string id;
  std::string statement;
  std::map<std::string, std::string> meta;

  bool operator==(const Problem&) const = default;
};

// Ordered collection of problems with unique, non-empty ids. Iteration order
// is insertion order.
class ProblemSet {
 public:
  ProblemSet() = default;
  explicit ProblemSet(std::string name) : name_(std::move(name)) {}

  void add(Problem p) {
    if (p.id.empty()) throw DataError("problem with empty id");
    if (p.statement.empty())
      throw DataError("problem '" + p.id + "' has an empty statement");
    if (index_.count(p.id))
      throw DataError("duplicate problem id '" + p.id + "'");
    index_.emplace(p.id, problems_.size());
    problems_.push_back(std::move(p));
  }

  std::size_t size() const { return problems_.size(); }
  bool empty() const { return problems_.empty(); }
  bool contains(const std::string& id) const { return index_.count(id) != 0; }

  std::size_t index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw DataError("unknown problem id '" + id + "'");
    return it->second;
  }

  const Problem& at(const std::string& id) const {
    return problems_[index_of(id)];
  }
  const Problem& operator[](std::size_t i) const { return problems_[i]; }

  auto begin() const { return problems_.begin(); }
  auto end() const { return problems_.end(); }

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  bool operator==(const ProblemSet& o) const {
    return name_ == o.name_ && problems_ == o.problems_;
  }

 private:
  std::string name_;
  std::vector<Problem> problems_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class MeasureKind {
  human_label,
  human_performance,
  llm_label,
  llm_performance,
  llm_compare,
};

std::string to_string(MeasureKind kind);
MeasureKind measure_kind_from_string(const std::string& s);

// A named per-problem difficulty score vector from any external measure.
struct MeasureSeries {
  std::string name;
  MeasureKind kind = MeasureKind::human_label;
  std::map<std::string, double> values;  // problem id -> score, finite
  std::string scale_note;

  bool operator==(const MeasureSeries&) const = default;
};

// Checks that every id in the series exists in the set and every value is
// finite. Called when a series is attached to a problem set.
void validate_measure(const MeasureSeries& series, const ProblemSet& problems);

}  // namespace btrank
