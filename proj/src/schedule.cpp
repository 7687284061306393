#include "btrank/schedule.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>

#include <nlohmann/json.hpp>

#include "btrank/errors.hpp"
#include "btrank/rng.hpp"
#include "detail/io.hpp"

namespace btrank {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kRoundRobinStream = 0xA1;
constexpr std::uint64_t kSampledStream = 0xA2;
constexpr std::uint64_t kSubsampleStream = 0xA3;

using Edge = std::pair<std::size_t, std::size_t>;  // dense problem indices

// Union-find over dense indices.
class Dsu {
 public:
  explicit Dsu(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

bool edges_connected(const std::vector<Edge>& edges, std::size_t n) {
  if (n == 0) return false;
  Dsu dsu(n);
  std::size_t components = n;
  for (const auto& [a, b] : edges) components -= dsu.unite(a, b) ? 1 : 0;
  return components == 1;
}

// Degree-preserving repair: while the multigraph is disconnected, take one
// internal edge from each of two components and exchange endpoints. Every
// vertex has positive degree, so every component owns at least one edge and
// each pass merges two components.
void repair_connectivity(std::vector<Edge>& edges, std::size_t n) {
  for (;;) {
    Dsu dsu(n);
    std::size_t components = n;
    for (const auto& [a, b] : edges) components -= dsu.unite(a, b) ? 1 : 0;
    if (components <= 1) return;

    const std::size_t root_a = dsu.find(0);
    std::size_t root_b = root_a;
    for (std::size_t v = 1; v < n; ++v)
      if (dsu.find(v) != root_a) {
        root_b = dsu.find(v);
        break;
      }

    std::size_t e1 = edges.size(), e2 = edges.size();
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const std::size_t root = dsu.find(edges[i].first);
      if (root == root_a && e1 == edges.size()) e1 = i;
      if (root == root_b && e2 == edges.size()) e2 = i;
      if (e1 != edges.size() && e2 != edges.size()) break;
    }
    // Cross the pairs: (a,b),(u,v) -> (a,u),(b,v). Endpoints live in
    // different components, so no self-pair can appear.
    std::swap(edges[e1].second, edges[e2].first);
  }
}

Schedule finalize(std::vector<Edge> edges, const ProblemSet& problems,
                  ScheduleMode mode, int matches_per_problem,
                  std::uint64_t seed, Rng& rng) {
  rng.shuffle(edges);
  Schedule schedule;
  schedule.mode = mode;
  schedule.matches_per_problem = matches_per_problem;
  schedule.seed = seed;
  schedule.pairs.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    const bool flip = (rng.next_u64() & 1) != 0;
    const std::string& first = problems[flip ? b : a].id;
    const std::string& second = problems[flip ? a : b].id;
    schedule.pairs.emplace_back(first, second);
  }
  return schedule;
}

}  // namespace

Schedule round_robin(const ProblemSet& problems, std::uint64_t seed) {
  const std::size_t n = problems.size();
  if (n < 2) throw ConfigError("round robin needs at least 2 problems");
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  Rng rng(derive_seed(seed, kRoundRobinStream));
  return finalize(std::move(edges), problems, ScheduleMode::round_robin,
                  static_cast<int>(n) - 1, seed, rng);
}

Schedule sampled(const ProblemSet& problems, int matches_per_problem,
                 std::uint64_t seed) {
  const std::size_t n = problems.size();
  const int m = matches_per_problem;
  if (n < 2) throw ConfigError("sampled schedule needs at least 2 problems");
  if (m < 1) throw ConfigError("matches per problem must be positive");
  if ((n * static_cast<std::size_t>(m)) % 2 != 0)
    throw ConfigError("parity violation: n*M = " + std::to_string(n) + "*" +
                      std::to_string(m) + " is odd, so no M-regular schedule exists");
  if (m == 1 && n > 2)
    throw ConfigError("M=1 on " + std::to_string(n) +
                      " problems cannot form a connected schedule");

  Rng rng(derive_seed(seed, kSampledStream));
  std::vector<Edge> edges;
  edges.reserve(n * static_cast<std::size_t>(m) / 2);

  if (n % 2 == 0) {
    // M rounds of random perfect matchings: shuffle, pair consecutive.
    std::vector<std::size_t> order(n);
    for (int round = 0; round < m; ++round) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      rng.shuffle(order);
      for (std::size_t i = 0; i + 1 < n; i += 2)
        edges.emplace_back(order[i], order[i + 1]);
    }
  } else {
    // Odd n (M even by parity): each round leaves one problem out, cycling
    // through a seeded permutation so sit-outs spread evenly; the M sit-out
    // slots are then paired consecutively, restoring every degree to M.
    // Consecutive slots hold distinct problems because the cycle length is
    // n >= 3.
    std::vector<std::size_t> leftover_cycle(n);
    std::iota(leftover_cycle.begin(), leftover_cycle.end(), std::size_t{0});
    rng.shuffle(leftover_cycle);

    std::vector<std::size_t> leftovers;
    leftovers.reserve(static_cast<std::size_t>(m));
    std::vector<std::size_t> order;
    order.reserve(n - 1);
    for (int round = 0; round < m; ++round) {
      const std::size_t out =
          leftover_cycle[static_cast<std::size_t>(round) % n];
      leftovers.push_back(out);
      order.clear();
      for (std::size_t v = 0; v < n; ++v)
        if (v != out) order.push_back(v);
      rng.shuffle(order);
      for (std::size_t i = 0; i + 1 < order.size(); i += 2)
        edges.emplace_back(order[i], order[i + 1]);
    }
    for (std::size_t i = 0; i + 1 < leftovers.size(); i += 2)
      edges.emplace_back(leftovers[i], leftovers[i + 1]);
  }

  repair_connectivity(edges, n);
  return finalize(std::move(edges), problems, ScheduleMode::sampled, m, seed,
                  rng);
}

namespace {

struct GreedyPick {
  std::vector<std::size_t> kept;       // ascending source indices
  std::vector<int> degree;             // per dense index
  int deficit_total = 0;
};

GreedyPick greedy_subsample(const std::vector<Edge>& source, std::size_t n,
                            int target_m, Rng& rng) {
  std::vector<std::size_t> scan(source.size());
  std::iota(scan.begin(), scan.end(), std::size_t{0});
  rng.shuffle(scan);

  GreedyPick pick;
  pick.degree.assign(n, 0);
  std::vector<char> used(source.size(), 0);
  for (std::size_t idx : scan) {
    const auto& [a, b] = source[idx];
    if (pick.degree[a] < target_m && pick.degree[b] < target_m) {
      used[idx] = 1;
      ++pick.degree[a];
      ++pick.degree[b];
    }
  }

  // Augmenting repair for leftover deficits. After the greedy pass every
  // unused edge touches at least one saturated problem, so a deficient u is
  // reached by exchanging a kept edge (a,b) for unused (u,a) and (v,b),
  // which lifts u and v by one and leaves a and b unchanged.
  std::vector<std::size_t> deficient;
  for (std::size_t v = 0; v < n; ++v)
    for (int k = pick.degree[v]; k < target_m; ++k) deficient.push_back(v);

  if (!deficient.empty()) {
    std::vector<std::vector<std::size_t>> unused_at(n);  // vertex -> edge idx
    std::map<Edge, std::vector<std::size_t>> kept_at;    // (min,max) -> idx
    for (std::size_t i = 0; i < source.size(); ++i) {
      const auto [a, b] = source[i];
      const Edge key{std::min(a, b), std::max(a, b)};
      if (used[i]) {
        kept_at[key].push_back(i);
      } else {
        unused_at[a].push_back(i);
        unused_at[b].push_back(i);
      }
    }
    auto other_end = [&](std::size_t edge_idx, std::size_t v) {
      const auto& [a, b] = source[edge_idx];
      return a == v ? b : a;
    };

    for (std::size_t s = 0; s + 1 < deficient.size(); s += 2) {
      const std::size_t u = deficient[s];
      const std::size_t v = deficient[s + 1];
      bool fixed = false;
      for (std::size_t eu : unused_at[u]) {
        if (used[eu]) continue;
        const std::size_t a = other_end(eu, u);
        for (std::size_t ev : unused_at[v]) {
          if (used[ev] || ev == eu) continue;
          const std::size_t b = other_end(ev, v);
          if (a == b) continue;
          auto it = kept_at.find(Edge{std::min(a, b), std::max(a, b)});
          if (it == kept_at.end() || it->second.empty()) continue;
          const std::size_t drop = it->second.back();
          it->second.pop_back();
          used[drop] = 0;
          used[eu] = 1;
          used[ev] = 1;
          ++pick.degree[u];
          ++pick.degree[v];
          fixed = true;
          break;
        }
        if (fixed) break;
      }
    }
  }

  pick.kept.clear();
  for (std::size_t i = 0; i < source.size(); ++i)
    if (used[i]) pick.kept.push_back(i);
  for (std::size_t v = 0; v < n; ++v)
    pick.deficit_total += target_m - pick.degree[v];
  return pick;
}

}  // namespace

SubsampleResult subsample_pairs(
    const std::vector<std::pair<std::string, std::string>>& source,
    const ProblemSet& problems, int target_m, std::uint64_t seed) {
  const std::size_t n = problems.size();
  if (target_m < 1) throw ConfigError("subsample target must be positive");
  if ((n * static_cast<std::size_t>(target_m)) % 2 != 0)
    throw ConfigError("parity violation: n*target is odd");

  std::vector<Edge> edges;
  edges.reserve(source.size());
  std::vector<int> source_degree(n, 0);
  for (const auto& [first, second] : source) {
    const std::size_t a = problems.index_of(first);
    const std::size_t b = problems.index_of(second);
    edges.emplace_back(a, b);
    ++source_degree[a];
    ++source_degree[b];
  }
  const int min_degree =
      n == 0 ? 0 : *std::min_element(source_degree.begin(), source_degree.end());
  if (target_m > min_degree)
    throw ConfigError("subsample target " + std::to_string(target_m) +
                      " exceeds the source's minimum matches per problem (" +
                      std::to_string(min_degree) + ")");

  // A few deterministic greedy attempts; keep the first exact result, else
  // the smallest total deficit.
  GreedyPick best;
  best.deficit_total = -1;
  for (std::uint64_t attempt = 0; attempt < 8; ++attempt) {
    Rng rng(derive_seed(seed, kSubsampleStream, attempt));
    GreedyPick pick = greedy_subsample(edges, n, target_m, rng);
    if (best.deficit_total < 0 || pick.deficit_total < best.deficit_total)
      best = std::move(pick);
    if (best.deficit_total == 0) break;
  }

  SubsampleResult result;
  result.kept = std::move(best.kept);
  result.achieved_degree = std::move(best.degree);
  result.exact = best.deficit_total == 0;
  return result;
}

Schedule subsample(const Schedule& source, const ProblemSet& problems,
                   int target_m, std::uint64_t seed) {
  SubsampleResult picked =
      subsample_pairs(source.pairs, problems, target_m, seed);
  Schedule out;
  out.mode = ScheduleMode::sampled;
  out.matches_per_problem = target_m;
  out.seed = seed;
  out.pairs.reserve(picked.kept.size());
  for (std::size_t idx : picked.kept) out.pairs.push_back(source.pairs[idx]);
  return out;
}

bool schedule_connected(const Schedule& schedule, const ProblemSet& problems) {
  std::vector<Edge> edges;
  edges.reserve(schedule.pairs.size());
  for (const auto& [first, second] : schedule.pairs)
    edges.emplace_back(problems.index_of(first), problems.index_of(second));
  return edges_connected(edges, problems.size());
}

void write_schedule(const Schedule& schedule,
                    const std::filesystem::path& path) {
  std::ofstream out = detail::open_output(path);
  for (const auto& [first, second] : schedule.pairs) {
    ordered_json j;
    j["first_id"] = first;
    j["second_id"] = second;
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

Schedule load_schedule(const std::filesystem::path& path) {
  Schedule schedule;
  schedule.mode = ScheduleMode::external;
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
    if (!j.is_object() || !j.contains("first_id") || !j.contains("second_id"))
      throw DataError(where + ": expected {\"first_id\", \"second_id\"}");
    auto first = j["first_id"].get<std::string>();
    auto second = j["second_id"].get<std::string>();
    if (first.empty() || second.empty()) throw DataError(where + ": empty id");
    if (first == second)
      throw DataError(where + ": pair matches '" + first + "' with itself");
    schedule.pairs.emplace_back(std::move(first), std::move(second));
  }
  if (schedule.pairs.empty())
    throw DataError(path.string() + ": empty schedule");
  return schedule;
}

}  // namespace btrank
