#include "modcd/louvain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include <spdlog/spdlog.h>

#include "modcd/error.hpp"

namespace modcd {
namespace {

// Weighted graph for one Louvain level. Self weights count internal ordered
// pairs, so volume[i] = self[i] + sum of incident weights.
struct LevelGraph {
  std::vector<std::int64_t> offsets;
  std::vector<int> targets;
  std::vector<double> weights;
  std::vector<double> self;
  std::vector<double> volume;

  [[nodiscard]] int size() const { return static_cast<int>(volume.size()); }
};

LevelGraph from_graph(const AttributedGraph& g) {
  LevelGraph lg;
  lg.offsets.assign(g.offsets().begin(), g.offsets().end());
  lg.targets.assign(g.targets().begin(), g.targets().end());
  lg.weights.assign(lg.targets.size(), 1.0);
  lg.self.assign(static_cast<std::size_t>(g.num_nodes()), 0.0);
  lg.volume = g.degrees();
  return lg;
}

// Returns the number of accepted moves; `community` is updated in place.
// Starts from singletons unless `keep` is set, in which case the given
// assignment (ids < n) is the starting point.
std::int64_t local_moving(const LevelGraph& lg, double two_m, std::vector<int>& community, std::mt19937_64& rng,
                          bool keep = false) {
  const int n = lg.size();
  std::vector<double> total(static_cast<std::size_t>(n), 0.0);
  if (!keep) {
    community.resize(n);
    std::iota(community.begin(), community.end(), 0);
  }
  for (int i = 0; i < n; ++i) total[community[i]] += lg.volume[i];

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<double> link(n, 0.0);
  std::vector<int> touched;
  std::int64_t moves = 0;
  constexpr double kMoveEps = 1e-12;
  constexpr double kPassTolerance = 1e-7;

  while (true) {
    double pass_gain = 0.0;
    std::int64_t pass_moves = 0;
    for (int i : order) {
      const int own = community[i];
      const double k_i = lg.volume[i];
      for (auto e = lg.offsets[i]; e < lg.offsets[i + 1]; ++e) {
        const int c = community[lg.targets[e]];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += lg.weights[e];
      }
      total[own] -= k_i;
      const double own_gain = link[own] - total[own] * k_i / two_m;

      int best = own;
      double best_gain = own_gain;
      int cand = -1;
      double cand_gain = 0.0;
      for (int c : touched) {
        if (c == own) continue;
        const double gain = link[c] - total[c] * k_i / two_m;
        if (cand < 0 || gain > cand_gain || (gain == cand_gain && c < cand)) {
          cand = c;
          cand_gain = gain;
        }
      }
      if (cand >= 0 && cand_gain - own_gain > kMoveEps) {
        best = cand;
        best_gain = cand_gain;
      }
      total[best] += k_i;
      if (best != own) {
        community[i] = best;
        pass_gain += 2.0 * (best_gain - own_gain) / two_m;
        ++pass_moves;
      }
      for (int c : touched) link[c] = 0.0;
      touched.clear();
    }
    moves += pass_moves;
    if (pass_moves == 0 || pass_gain <= kPassTolerance) break;
  }
  return moves;
}

// Relabels `community` to 0..t-1 (ascending original id) and returns t.
int renumber(std::vector<int>& community) {
  std::vector<int> ids(community);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (int& c : community) c = static_cast<int>(std::lower_bound(ids.begin(), ids.end(), c) - ids.begin());
  return static_cast<int>(ids.size());
}

LevelGraph aggregate(const LevelGraph& lg, const std::vector<int>& community, int t) {
  LevelGraph out;
  out.self.assign(t, 0.0);
  out.volume.assign(t, 0.0);
  std::vector<std::vector<std::pair<int, double>>> rows(t);
  for (int i = 0; i < lg.size(); ++i) {
    const int ci = community[i];
    out.self[ci] += lg.self[i];
    out.volume[ci] += lg.volume[i];
    for (auto e = lg.offsets[i]; e < lg.offsets[i + 1]; ++e) {
      const int cj = community[lg.targets[e]];
      if (cj == ci)
        out.self[ci] += lg.weights[e];
      else
        rows[ci].emplace_back(cj, lg.weights[e]);
    }
  }
  out.offsets.assign(static_cast<std::size_t>(t) + 1, 0);
  for (int c = 0; c < t; ++c) {
    auto& row = rows[c];
    std::sort(row.begin(), row.end());
    std::size_t w = 0;
    for (std::size_t r = 0; r < row.size(); ++r) {
      if (w > 0 && row[w - 1].first == row[r].first)
        row[w - 1].second += row[r].second;
      else
        row[w++] = row[r];
    }
    row.resize(w);
    for (auto [cj, wt] : row) {
      out.targets.push_back(cj);
      out.weights.push_back(wt);
    }
    out.offsets[c + 1] = static_cast<std::int64_t>(out.targets.size());
  }
  return out;
}

LouvainResult louvain_once(const AttributedGraph& g, std::uint64_t seed) {
  const double two_m = static_cast<double>(g.two_m());
  std::mt19937_64 rng(seed);

  std::vector<int> node_comm(static_cast<std::size_t>(g.num_nodes()));
  std::iota(node_comm.begin(), node_comm.end(), 0);

  LouvainResult result;
  result.level_modularity.push_back(modularity_hard(g, Partition(node_comm)));

  LevelGraph level = from_graph(g);
  std::vector<int> community;
  while (true) {
    const std::int64_t moves = local_moving(level, two_m, community, rng);
    if (moves == 0) break;
    result.moves += moves;
    const int t = renumber(community);
    for (int& c : node_comm) c = community[c];
    result.level_modularity.push_back(modularity_hard(g, Partition(node_comm)));
    if (t == level.size()) break;
    level = aggregate(level, community, t);
  }

  // Refinement: single nodes may still gain by leaving the community their
  // aggregate was merged into.
  const LevelGraph base = from_graph(g);
  const std::int64_t refined = local_moving(base, two_m, node_comm, rng, true);
  if (refined > 0) {
    result.moves += refined;
    renumber(node_comm);
    result.level_modularity.push_back(modularity_hard(g, Partition(node_comm)));
  }
  result.partition = Partition::compact(node_comm);
  return result;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

LouvainResult louvain_run(const AttributedGraph& g, std::uint64_t seed, int restarts) {
  if (g.two_m() <= 0) throw std::invalid_argument("louvain: graph has no edges");
  if (restarts < 1) throw std::invalid_argument("louvain: restarts must be >= 1");
  // First run uses the seed itself; later ones derive from it. Ties keep the earlier run.
  LouvainResult best = louvain_once(g, seed);
  std::uint64_t state = seed;
  for (int r = 1; r < restarts; ++r) {
    state = splitmix(state);
    LouvainResult next = louvain_once(g, state);
    if (next.level_modularity.back() > best.level_modularity.back() + 1e-12) best = std::move(next);
  }
  return best;
}

Partition louvain_detect(const AttributedGraph& g, std::uint64_t seed, int restarts) {
  return louvain_run(g, seed, restarts).partition;
}

FilterResult filter_communities(const Partition& p, std::size_t n, double coef) {
  const int t = p.num_communities();
  if (t < 1) throw std::invalid_argument("filter_communities: partition has no communities");
  if (p.size() != n) throw std::invalid_argument("filter_communities: partition size differs from n");

  const std::vector<int> sizes = p.community_sizes();
  FilterResult fr;
  fr.mean = static_cast<double>(n) / t;
  double sq = 0.0;
  for (int s : sizes) sq += (s - fr.mean) * (s - fr.mean);
  fr.stddev = std::sqrt(sq / t);
  fr.threshold = fr.mean + coef * fr.stddev;

  auto members = p.members();
  for (int c = 0; c < t; ++c) {
    if (static_cast<double>(sizes[c]) >= fr.threshold) {
      fr.kept_ids.push_back(c);
      fr.member_lists.push_back(std::move(members[c]));
    }
  }
  fr.k = static_cast<int>(fr.kept_ids.size());
  if (fr.k == 0) throw DataError("no structural communities above threshold");
  if (fr.k == 1) spdlog::warn("only one structural community survived the size filter; memberships are constant");
  return fr;
}

}  // namespace modcd
