#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "btrank/problem.hpp"

namespace btrank {

// Two measurements of the same problems, index-aligned.
struct PairedSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::string> ids;  // optional; empty when pairing is positional

  std::size_t size() const { return x.size(); }
};

// Pairs two id->value maps on their id intersection, ordered by `order`
// (ids absent from either map are dropped). Throws DataError when the
// intersection is empty.
PairedSeries align_by_id(const std::vector<std::string>& order,
                         const std::map<std::string, double>& x,
                         const std::map<std::string, double>& y);

// Mid-rank vector (ties share the average of the ranks they occupy),
// 1-based like the usual hand convention.
std::vector<double> midranks(const std::vector<double>& values);

// All correlations require n >= 2 and throw DataError on degenerate input
// (zero variance for Pearson/Spearman, all pairs tied for Kendall).
double pearson(const PairedSeries& s);
double spearman(const PairedSeries& s);

// tau_b = (C - D) / sqrt((C + D + Tx) (C + D + Ty)); pairs tied in both
// series count in neither T term. O(n log n) via merge-sort inversion
// counting.
double kendall_tau_b(const PairedSeries& s);

// (mean1 - mean2) / pooled sample standard deviation. Throws DataError when
// the pooled variance vanishes or n1 + n2 < 3.
double cohens_d(const std::vector<double>& x1, const std::vector<double>& x2);

// 1-D Wasserstein-1 between the empirical distributions: integral of
// |F1 - F2| over the real line.
double wasserstein(const std::vector<double>& x1,
                   const std::vector<double>& x2);

// wasserstein() divided by the joint range max-min over both samples, so the
// value is scale-free in [0,1]. Joint range zero (identical point masses)
// yields 0 by convention.
double wasserstein_norm(const std::vector<double>& x1,
                        const std::vector<double>& x2);

}  // namespace btrank
