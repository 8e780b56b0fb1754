#include "modcd/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include <spdlog/spdlog.h>

#include "modcd/error.hpp"

namespace modcd {

Partition::Partition(std::vector<int> assign) : assign_(std::move(assign)) {
  int max_id = -1;
  for (int c : assign_) {
    if (c < 0) throw std::invalid_argument("partition: negative community id");
    max_id = std::max(max_id, c);
  }
  std::vector<char> used(static_cast<std::size_t>(max_id + 1), 0);
  for (int c : assign_) used[c] = 1;
  if (std::find(used.begin(), used.end(), 0) != used.end())
    throw std::invalid_argument("partition: community ids are not contiguous");
  num_communities_ = max_id + 1;
}

Partition Partition::compact(std::span<const int> raw) {
  std::vector<int> ids(raw.begin(), raw.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<int> assign(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] < 0) throw std::invalid_argument("partition: negative community id");
    assign[i] = static_cast<int>(std::lower_bound(ids.begin(), ids.end(), raw[i]) - ids.begin());
  }
  return Partition(std::move(assign));
}

std::vector<int> Partition::community_sizes() const {
  std::vector<int> sizes(num_communities_, 0);
  for (int c : assign_) ++sizes[c];
  return sizes;
}

std::vector<std::vector<NodeId>> Partition::members() const {
  std::vector<std::vector<NodeId>> out(num_communities_);
  for (std::size_t i = 0; i < assign_.size(); ++i) out[assign_[i]].push_back(static_cast<NodeId>(i));
  return out;
}

std::vector<double> AttributedGraph::degrees() const {
  std::vector<double> d(static_cast<std::size_t>(num_nodes()));
  for (NodeId i = 0; i < num_nodes(); ++i) d[i] = static_cast<double>(degree(i));
  return d;
}

std::optional<Partition> AttributedGraph::label_partition() const {
  if (!labels_) return std::nullopt;
  return Partition(*labels_);
}

std::vector<Edge> AttributedGraph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(num_edges()));
  for (NodeId i = 0; i < num_nodes(); ++i)
    for (NodeId j : neighbors(i))
      if (i < j) out.emplace_back(i, j);
  return out;
}

AttributedGraph build_graph(std::span<const Edge> edges, SparseMatrix<double> features,
                            std::optional<std::vector<int>> labels) {
  const auto n = static_cast<NodeId>(features.rows());
  if (n <= 0) throw std::invalid_argument("build_graph: feature matrix has no rows");
  if (features.cols() < 1) throw std::invalid_argument("build_graph: feature dimension must be >= 1");

  AttributedGraph g;
  std::vector<Edge> directed;
  directed.reserve(edges.size() * 2);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw std::invalid_argument("build_graph: edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                  ") references a node outside 0.." + std::to_string(n - 1));
    if (u == v) {
      ++g.self_loops_dropped_;
      continue;
    }
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  const auto before = directed.size();
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());
  g.duplicates_dropped_ = static_cast<std::int64_t>(before - directed.size()) / 2;
  if (directed.empty()) throw std::invalid_argument("build_graph: empty edge set (modularity undefined)");
  if (g.self_loops_dropped_ > 0) spdlog::warn("dropped {} self-loop(s) from input edges", g.self_loops_dropped_);

  g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (auto [u, v] : directed) ++g.offsets_[u + 1];
  for (NodeId i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.targets_.reserve(directed.size());
  for (auto [u, v] : directed) g.targets_.push_back(v);

  if (labels) {
    if (static_cast<NodeId>(labels->size()) != n)
      throw DataError("build_graph: " + std::to_string(labels->size()) + " labels for " + std::to_string(n) +
                      " nodes");
    try {
      Partition check(*labels);
    } catch (const std::invalid_argument& e) {
      throw DataError(std::string("build_graph: labels invalid: ") + e.what());
    }
  }
  features.makeCompressed();
  g.features_ = std::move(features);
  g.labels_ = std::move(labels);
  return g;
}

AttributedGraph build_graph(std::span<const Edge> edges, const Matrix<double>& features,
                            std::optional<std::vector<int>> labels) {
  SparseMatrix<double> sparse = features.sparseView();
  return build_graph(edges, std::move(sparse), std::move(labels));
}

double modularity_hard(const AttributedGraph& g, const Partition& p) {
  const NodeId n = g.num_nodes();
  if (static_cast<NodeId>(p.size()) != n)
    throw std::invalid_argument("modularity_hard: partition covers " + std::to_string(p.size()) + " nodes, graph has " +
                                std::to_string(n));
  const double two_m = static_cast<double>(g.two_m());
  std::vector<double> internal(p.num_communities(), 0.0);
  std::vector<double> volume(p.num_communities(), 0.0);
  for (NodeId i = 0; i < n; ++i) {
    const int ci = p[i];
    volume[ci] += static_cast<double>(g.degree(i));
    for (NodeId j : g.neighbors(i))
      if (p[j] == ci) internal[ci] += 1.0;
  }
  double q = 0.0;
  for (int c = 0; c < p.num_communities(); ++c) {
    const double frac = volume[c] / two_m;
    q += internal[c] / two_m - frac * frac;
  }
  return q;
}

}  // namespace modcd
