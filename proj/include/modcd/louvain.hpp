#pragma once

#include <cstdint>
#include <vector>

#include "modcd/graph.hpp"

namespace modcd {

struct LouvainResult {
  Partition partition;
  // Hard modularity of the singleton start followed by one entry per level.
  std::vector<double> level_modularity;
  // Accepted single-node moves over all levels.
  std::int64_t moves = 0;
};

// Two-phase Louvain (local moving + aggregation), resolution 1.
// Node visit order per level is a shuffle seeded by `seed`; among equal best
// gains the smallest community id wins and a node only leaves its community
// for a strictly positive gain. After aggregation stops, one more local-moving
// phase on the original nodes refines the result. The whole procedure runs
// `restarts` times (seeds derived from `seed`) and the highest-Q run is kept.
inline constexpr int kLouvainRestarts = 4;

LouvainResult louvain_run(const AttributedGraph& g, std::uint64_t seed, int restarts = kLouvainRestarts);
Partition louvain_detect(const AttributedGraph& g, std::uint64_t seed, int restarts = kLouvainRestarts);

// Size-threshold filter over pre-detected communities.
struct FilterResult {
  std::vector<int> kept_ids;  // ascending original community ids; index = community 0..k-1
  int k = 0;
  double threshold = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<std::vector<NodeId>> member_lists;
};

// Keeps communities of size >= mean + coef * stddev, where mean = n / t and
// stddev is the population deviation of the t community sizes.
// Throws DataError when no community survives.
FilterResult filter_communities(const Partition& p, std::size_t n, double coef = 0.5);

}  // namespace modcd
