#include "modcd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace modcd {
namespace {

void require_same_length(const Partition& pred, const Partition& truth, const char* what) {
  if (pred.size() != truth.size())
    throw std::invalid_argument(std::string(what) + ": prediction has " + std::to_string(pred.size()) +
                                " entries, truth has " + std::to_string(truth.size()));
  if (pred.size() == 0) throw std::invalid_argument(std::string(what) + ": empty partitions");
}

double comb2(std::int64_t x) { return 0.5 * static_cast<double>(x) * static_cast<double>(x - 1); }

// Minimum-cost perfect assignment on a square matrix (potential-based Hungarian).
// Returns row -> column.
std::vector<int> hungarian_min(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> col_owner(n + 1, 0), way(n + 1, 0);
  for (int row = 1; row <= n; ++row) {
    col_owner[0] = row;
    int col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const int r0 = col_owner[col0];
      double delta = inf;
      int col1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[r0 - 1][j - 1] - u[r0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = col0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          col1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[col_owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      col0 = col1;
    } while (col_owner[col0] != 0);
    do {
      const int col1 = way[col0];
      col_owner[col0] = col_owner[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j)
    if (col_owner[j] > 0) assignment[col_owner[j] - 1] = j - 1;
  return assignment;
}

}  // namespace

ContingencyTable contingency(const Partition& pred, const Partition& truth) {
  if (pred.size() != truth.size()) throw std::invalid_argument("contingency: partitions differ in length");
  ContingencyTable ct;
  ct.n = static_cast<std::int64_t>(pred.size());
  ct.counts.assign(pred.num_communities(), std::vector<std::int64_t>(truth.num_communities(), 0));
  ct.row_sums.assign(pred.num_communities(), 0);
  ct.col_sums.assign(truth.num_communities(), 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ++ct.counts[pred[i]][truth[i]];
    ++ct.row_sums[pred[i]];
    ++ct.col_sums[truth[i]];
  }
  return ct;
}

LabelMapping optimal_mapping(const ContingencyTable& ct) {
  const int r = ct.rows();
  const int s = ct.cols();
  const int size = std::max(r, s);
  std::vector<std::vector<double>> cost(size, std::vector<double>(size, 0.0));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < s; ++j) cost[i][j] = -static_cast<double>(ct.counts[i][j]);

  const std::vector<int> assignment = hungarian_min(cost);
  LabelMapping mapping;
  mapping.target.assign(r, -1);
  for (int i = 0; i < r; ++i) {
    if (assignment[i] < s) {
      mapping.target[i] = assignment[i];
      mapping.matched += ct.counts[i][assignment[i]];
    }
  }
  return mapping;
}

double nmi(const Partition& pred, const Partition& truth) {
  require_same_length(pred, truth, "nmi");
  const ContingencyTable ct = contingency(pred, truth);
  const double n = static_cast<double>(ct.n);
  double mi = 0.0;
  for (int i = 0; i < ct.rows(); ++i) {
    for (int j = 0; j < ct.cols(); ++j) {
      const auto c = ct.counts[i][j];
      if (c == 0) continue;
      const double pij = static_cast<double>(c) / n;
      mi += pij * std::log(static_cast<double>(c) * n /
                           (static_cast<double>(ct.row_sums[i]) * static_cast<double>(ct.col_sums[j])));
    }
  }
  auto entropy = [n](const std::vector<std::int64_t>& sums) {
    double h = 0.0;
    for (auto c : sums) {
      if (c == 0) continue;
      const double p = static_cast<double>(c) / n;
      h -= p * std::log(p);
    }
    return h;
  };
  const double h_pred = entropy(ct.row_sums);
  const double h_true = entropy(ct.col_sums);
  if (h_pred == 0.0 && h_true == 0.0) return 1.0;
  if (h_pred == 0.0 || h_true == 0.0) return 0.0;
  return std::clamp(mi / std::sqrt(h_pred * h_true), 0.0, 1.0);
}

double acc(const Partition& pred, const Partition& truth) {
  require_same_length(pred, truth, "acc");
  const ContingencyTable ct = contingency(pred, truth);
  return static_cast<double>(optimal_mapping(ct).matched) / static_cast<double>(ct.n);
}

double f1(const Partition& pred, const Partition& truth) {
  require_same_length(pred, truth, "f1");
  const ContingencyTable ct = contingency(pred, truth);
  const LabelMapping mapping = optimal_mapping(ct);

  double total = 0.0;
  for (int cls = 0; cls < ct.cols(); ++cls) {
    std::int64_t tp = 0;
    std::int64_t predicted = 0;
    for (int r = 0; r < ct.rows(); ++r) {
      if (mapping.target[r] != cls) continue;
      tp += ct.counts[r][cls];
      predicted += ct.row_sums[r];
    }
    if (tp == 0) continue;
    const double precision = static_cast<double>(tp) / static_cast<double>(predicted);
    const double recall = static_cast<double>(tp) / static_cast<double>(ct.col_sums[cls]);
    total += 2.0 * precision * recall / (precision + recall);
  }
  return total / ct.cols();
}

double ari(const Partition& pred, const Partition& truth) {
  require_same_length(pred, truth, "ari");
  if (pred.size() < 2) throw std::invalid_argument("ari: needs at least two nodes");
  const ContingencyTable ct = contingency(pred, truth);
  double index = 0.0;
  for (const auto& row : ct.counts)
    for (auto c : row) index += comb2(c);
  double sum_rows = 0.0;
  double sum_cols = 0.0;
  for (auto c : ct.row_sums) sum_rows += comb2(c);
  for (auto c : ct.col_sums) sum_cols += comb2(c);
  const double expected = sum_rows * sum_cols / comb2(ct.n);
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

double dbi(const Matrix<double>& embedding, const Partition& pred) {
  if (static_cast<Eigen::Index>(pred.size()) != embedding.rows())
    throw std::invalid_argument("dbi: partition length differs from embedding rows");
  const int k = pred.num_communities();
  if (k < 2) throw std::invalid_argument("dbi: needs at least two communities");

  Matrix<double> centroids = Matrix<double>::Zero(k, embedding.cols());
  const std::vector<int> sizes = pred.community_sizes();
  for (std::size_t i = 0; i < pred.size(); ++i) centroids.row(pred[i]) += embedding.row(static_cast<Eigen::Index>(i));
  for (int c = 0; c < k; ++c) centroids.row(c) /= sizes[c];

  std::vector<double> scatter(k, 0.0);
  for (std::size_t i = 0; i < pred.size(); ++i)
    scatter[pred[i]] += (embedding.row(static_cast<Eigen::Index>(i)) - centroids.row(pred[i])).norm();
  for (int c = 0; c < k; ++c) scatter[c] /= sizes[c];

  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    double worst = 0.0;
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      const double dist = (centroids.row(i) - centroids.row(j)).norm();
      if (dist < 1e-12) return kDbiInfinite;
      worst = std::max(worst, (scatter[i] + scatter[j]) / dist);
    }
    total += worst;
  }
  return total / k;
}

MetricSuite supervised_metrics(const Partition& pred, const Partition& truth) {
  return {nmi(pred, truth), acc(pred, truth), f1(pred, truth), ari(pred, truth)};
}

}  // namespace modcd
