#pragma once

#include <limits>
#include <vector>

#include "modcd/graph.hpp"

namespace modcd {

// Co-occurrence counts between a predicted (rows) and a true (columns) partition.
struct ContingencyTable {
  std::vector<std::vector<std::int64_t>> counts;
  std::vector<std::int64_t> row_sums;
  std::vector<std::int64_t> col_sums;
  std::int64_t n = 0;

  [[nodiscard]] int rows() const { return static_cast<int>(row_sums.size()); }
  [[nodiscard]] int cols() const { return static_cast<int>(col_sums.size()); }
};

ContingencyTable contingency(const Partition& pred, const Partition& truth);

// Injective predicted -> true mapping maximizing the matched count.
// target[r] is the true id for predicted id r, or -1 when r is unmatched.
struct LabelMapping {
  std::vector<int> target;
  std::int64_t matched = 0;
};

// Hungarian method on the negated (zero-padded square) count matrix.
LabelMapping optimal_mapping(const ContingencyTable& ct);

double nmi(const Partition& pred, const Partition& truth);
double acc(const Partition& pred, const Partition& truth);
// Macro F1 over true classes after optimal mapping.
double f1(const Partition& pred, const Partition& truth);
double ari(const Partition& pred, const Partition& truth);

inline constexpr double kDbiInfinite = std::numeric_limits<double>::infinity();

// Davies-Bouldin index with Euclidean distances over the rows of `embedding`.
// Returns kDbiInfinite when two centroids coincide.
double dbi(const Matrix<double>& embedding, const Partition& pred);

struct MetricSuite {
  double nmi = 0.0;
  double acc = 0.0;
  double f1 = 0.0;
  double ari = 0.0;
};

MetricSuite supervised_metrics(const Partition& pred, const Partition& truth);

}  // namespace modcd
