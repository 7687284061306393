#include "btrank/problem.hpp"

#include <cmath>

namespace btrank {

std::string to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::human_label: return "human_label";
    case MeasureKind::human_performance: return "human_performance";
    case MeasureKind::llm_label: return "llm_label";
    case MeasureKind::llm_performance: return "llm_performance";
    case MeasureKind::llm_compare: return "llm_compare";
  }
  throw DataError("invalid measure kind");
}

MeasureKind measure_kind_from_string(const std::string& s) {
  if (s == "human_label") return MeasureKind::human_label;
  if (s == "human_performance") return MeasureKind::human_performance;
  if (s == "llm_label") return MeasureKind::llm_label;
  if (s == "llm_performance") return MeasureKind::llm_performance;
  if (s == "llm_compare") return MeasureKind::llm_compare;
  throw ConfigError("unknown measure kind '" + s +
                    "' (expected human_label, human_performance, llm_label, "
                    "llm_performance, or llm_compare)");
}

void validate_measure(const MeasureSeries& series, const ProblemSet& problems) {
  for (const auto& [id, value] : series.values) {
    if (!problems.contains(id))
      throw DataError("measure '" + series.name + "' scores unknown problem '" +
                      id + "'");
    if (!std::isfinite(value))
      throw DataError("measure '" + series.name + "' has a non-finite score for '" +
                      id + "'");
  }
}

}  // namespace btrank
