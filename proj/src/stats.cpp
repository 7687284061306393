#include "btrank/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "btrank/errors.hpp"

namespace btrank {

PairedSeries align_by_id(const std::vector<std::string>& order,
                         const std::map<std::string, double>& x,
                         const std::map<std::string, double>& y) {
  PairedSeries s;
  for (const std::string& id : order) {
    auto ix = x.find(id);
    auto iy = y.find(id);
    if (ix == x.end() || iy == y.end()) continue;
    s.ids.push_back(id);
    s.x.push_back(ix->second);
    s.y.push_back(iy->second);
  }
  if (s.x.empty()) throw DataError("no overlapping problem ids between the two series");
  return s;
}

std::vector<double> midranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share the mid-rank of 1-based ranks i+1..j+1.
    const double rank = static_cast<double>(i + j) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

namespace {

void require_paired(const PairedSeries& s) {
  if (s.x.size() != s.y.size())
    throw DataError("paired series length mismatch");
  if (s.x.size() < 2)
    throw DataError("correlation needs at least 2 paired observations");
}

double pearson_on(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw DataError("correlation undefined: a series has zero variance");
  return sxy / std::sqrt(sxx) / std::sqrt(syy);
}

// Strict inversions (i < j with v[i] > v[j]) by merge sort.
std::uint64_t count_inversions(std::vector<double>& v, std::vector<double>& tmp,
                               std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t count = count_inversions(v, tmp, lo, mid) +
                        count_inversions(v, tmp, mid, hi);
  std::size_t a = lo, b = mid, out = lo;
  while (a < mid && b < hi) {
    if (v[b] < v[a]) {
      count += mid - a;  // every element left in [a, mid) beats v[b]
      tmp[out++] = v[b++];
    } else {
      tmp[out++] = v[a++];
    }
  }
  while (a < mid) tmp[out++] = v[a++];
  while (b < hi) tmp[out++] = v[b++];
  std::copy(tmp.begin() + lo, tmp.begin() + hi, v.begin() + lo);
  return count;
}

// Sum over equal-value runs of t*(t-1)/2, i.e. the number of tied pairs.
template <typename Equal>
std::uint64_t tied_pairs(const std::vector<std::size_t>& order, Equal equal) {
  std::uint64_t pairs = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && equal(order[j + 1], order[i])) ++j;
    const std::uint64_t t = j - i + 1;
    pairs += t * (t - 1) / 2;
    i = j + 1;
  }
  return pairs;
}

}  // namespace

double pearson(const PairedSeries& s) {
  require_paired(s);
  return pearson_on(s.x, s.y);
}

double spearman(const PairedSeries& s) {
  require_paired(s);
  return pearson_on(midranks(s.x), midranks(s.y));
}

double kendall_tau_b(const PairedSeries& s) {
  require_paired(s);
  const std::size_t n = s.x.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (s.x[a] != s.x[b]) return s.x[a] < s.x[b];
    return s.y[a] < s.y[b];
  });

  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t xtie =
      tied_pairs(order, [&](std::size_t a, std::size_t b) { return s.x[a] == s.x[b]; });
  const std::uint64_t both_tie = tied_pairs(order, [&](std::size_t a, std::size_t b) {
    return s.x[a] == s.x[b] && s.y[a] == s.y[b];
  });

  std::vector<std::size_t> y_order(n);
  std::iota(y_order.begin(), y_order.end(), std::size_t{0});
  std::sort(y_order.begin(), y_order.end(),
            [&](std::size_t a, std::size_t b) { return s.y[a] < s.y[b]; });
  const std::uint64_t ytie =
      tied_pairs(y_order, [&](std::size_t a, std::size_t b) { return s.y[a] == s.y[b]; });

  if (total == xtie || total == ytie)
    throw DataError("Kendall tau undefined: a series is constant-tied");

  std::vector<double> y_by_x(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) y_by_x[i] = s.y[order[i]];
  const std::uint64_t discordant = count_inversions(y_by_x, tmp, 0, n);

  // C - D = total - xtie - ytie + both - 2*discordant: subtracting the tie
  // terms removes both-tied pairs twice, hence the add-back.
  const double con_minus_dis =
      static_cast<double>(total) - static_cast<double>(xtie) -
      static_cast<double>(ytie) + static_cast<double>(both_tie) -
      2.0 * static_cast<double>(discordant);
  return con_minus_dis /
         std::sqrt(static_cast<double>(total - xtie)) /
         std::sqrt(static_cast<double>(total - ytie));
}

double cohens_d(const std::vector<double>& x1, const std::vector<double>& x2) {
  const std::size_t n1 = x1.size(), n2 = x2.size();
  if (n1 < 1 || n2 < 1 || n1 + n2 < 3)
    throw DataError("Cohen's d needs at least 3 observations across both groups");
  auto mean = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double t : v) m += t;
    return m / static_cast<double>(v.size());
  };
  const double m1 = mean(x1), m2 = mean(x2);
  auto ss = [](const std::vector<double>& v, double m) {
    double s = 0.0;
    for (double t : v) s += (t - m) * (t - m);
    return s;
  };
  const double pooled_var =
      (ss(x1, m1) + ss(x2, m2)) / static_cast<double>(n1 + n2 - 2);
  if (pooled_var <= 0.0)
    throw DataError("Cohen's d undefined: pooled variance is zero");
  return (m1 - m2) / std::sqrt(pooled_var);
}

double wasserstein(const std::vector<double>& x1,
                   const std::vector<double>& x2) {
  if (x1.empty() || x2.empty())
    throw DataError("Wasserstein distance needs nonempty samples");
  std::vector<double> a = x1, b = x2;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  // Integrate |F1 - F2| between consecutive points of the pooled support.
  double distance = 0.0;
  std::size_t ia = 0, ib = 0;
  double prev = std::min(a[0], b[0]);
  while (ia < a.size() || ib < b.size()) {
    const double next =
        ib == b.size() ? a[ia]
        : ia == a.size() ? b[ib]
                         : std::min(a[ia], b[ib]);
    const double f1 = static_cast<double>(ia) / static_cast<double>(a.size());
    const double f2 = static_cast<double>(ib) / static_cast<double>(b.size());
    distance += std::abs(f1 - f2) * (next - prev);
    prev = next;
    while (ia < a.size() && a[ia] == next) ++ia;
    while (ib < b.size() && b[ib] == next) ++ib;
  }
  return distance;
}

double wasserstein_norm(const std::vector<double>& x1,
                        const std::vector<double>& x2) {
  const double raw = wasserstein(x1, x2);
  const auto [lo1, hi1] = std::minmax_element(x1.begin(), x1.end());
  const auto [lo2, hi2] = std::minmax_element(x2.begin(), x2.end());
  const double range = std::max(*hi1, *hi2) - std::min(*lo1, *lo2);
  if (range == 0.0) return 0.0;  // identical point masses
  return raw / range;
}

}  // namespace btrank
