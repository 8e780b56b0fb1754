#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace modcd {

using NodeId = std::int32_t;
using Edge = std::pair<NodeId, NodeId>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, int>;

// Hard node -> community assignment with contiguous ids 0..t-1, each used.
class Partition {
 public:
  Partition() = default;
  // Throws std::invalid_argument unless ids are exactly 0..t-1 with none unused.
  explicit Partition(std::vector<int> assign);

  // Relabels arbitrary non-negative ids to 0..t-1, preserving the order of ids.
  static Partition compact(std::span<const int> raw);

  [[nodiscard]] std::size_t size() const { return assign_.size(); }
  [[nodiscard]] int num_communities() const { return num_communities_; }
  [[nodiscard]] int operator[](std::size_t i) const { return assign_[i]; }
  [[nodiscard]] const std::vector<int>& assignment() const { return assign_; }
  [[nodiscard]] std::vector<int> community_sizes() const;
  [[nodiscard]] std::vector<std::vector<NodeId>> members() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> assign_;
  int num_communities_ = 0;
};

// Immutable undirected attributed graph. Adjacency is stored as a symmetric
// CSR without self-loops or duplicates; features as a sparse n x m matrix.
class AttributedGraph {
 public:
  [[nodiscard]] NodeId num_nodes() const { return static_cast<NodeId>(offsets_.size()) - 1; }
  [[nodiscard]] std::int64_t num_edges() const { return static_cast<std::int64_t>(targets_.size()) / 2; }
  // 2M, the total degree.
  [[nodiscard]] std::int64_t two_m() const { return static_cast<std::int64_t>(targets_.size()); }
  [[nodiscard]] std::int64_t degree(NodeId i) const { return offsets_[i + 1] - offsets_[i]; }
  [[nodiscard]] std::span<const NodeId> neighbors(NodeId i) const {
    return {targets_.data() + offsets_[i], static_cast<std::size_t>(degree(i))};
  }
  [[nodiscard]] std::vector<double> degrees() const;
  [[nodiscard]] std::span<const std::int64_t> offsets() const { return offsets_; }
  [[nodiscard]] std::span<const NodeId> targets() const { return targets_; }

  [[nodiscard]] const SparseMatrix<double>& features() const { return features_; }
  [[nodiscard]] int feature_dim() const { return static_cast<int>(features_.cols()); }
  [[nodiscard]] const std::optional<std::vector<int>>& labels() const { return labels_; }
  [[nodiscard]] std::optional<Partition> label_partition() const;

  [[nodiscard]] std::int64_t self_loops_dropped() const { return self_loops_dropped_; }
  [[nodiscard]] std::int64_t duplicates_dropped() const { return duplicates_dropped_; }

  // Each undirected edge once, as (i, j) with i < j, sorted.
  [[nodiscard]] std::vector<Edge> edge_list() const;

 private:
  friend AttributedGraph build_graph(std::span<const Edge>, SparseMatrix<double>,
                                     std::optional<std::vector<int>>);

  std::vector<std::int64_t> offsets_{0};
  std::vector<NodeId> targets_;
  SparseMatrix<double> features_;
  std::optional<std::vector<int>> labels_;
  std::int64_t self_loops_dropped_ = 0;
  std::int64_t duplicates_dropped_ = 0;
};

// Validates and symmetrizes an edge list. Self-loops are dropped and counted,
// duplicates (in either orientation) collapsed. n is the feature row count.
AttributedGraph build_graph(std::span<const Edge> edges, SparseMatrix<double> features,
                            std::optional<std::vector<int>> labels = std::nullopt);
AttributedGraph build_graph(std::span<const Edge> edges, const Matrix<double>& features,
                            std::optional<std::vector<int>> labels = std::nullopt);

// Newman modularity of a hard partition, O(|E| + n + t).
double modularity_hard(const AttributedGraph& g, const Partition& p);

}  // namespace modcd
