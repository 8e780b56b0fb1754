#include "modcd/membership.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "modcd/error.hpp"

namespace modcd {

SimilarityMode parse_similarity_mode(std::string_view name) {
  if (name == "cosine") return SimilarityMode::cosine;
  if (name == "dot") return SimilarityMode::dot;
  throw std::invalid_argument("unknown similarity mode '" + std::string(name) + "'");
}

std::string_view to_string(SimilarityMode m) { return m == SimilarityMode::cosine ? "cosine" : "dot"; }

SoftmaxSign parse_softmax_sign(std::string_view name) {
  if (name == "plus") return SoftmaxSign::plus;
  if (name == "minus") return SoftmaxSign::minus;
  throw std::invalid_argument("unknown softmax sign '" + std::string(name) + "'");
}

std::string_view to_string(SoftmaxSign s) { return s == SoftmaxSign::plus ? "plus" : "minus"; }

template <typename Scalar>
Matrix<Scalar> compute_centers(const Matrix<Scalar>& h, const FilterResult& fr) {
  Matrix<Scalar> centers = Matrix<Scalar>::Zero(static_cast<Eigen::Index>(fr.member_lists.size()), h.cols());
  for (std::size_t c = 0; c < fr.member_lists.size(); ++c) {
    const auto& members = fr.member_lists[c];
    if (members.empty()) throw std::invalid_argument("compute_centers: community " + std::to_string(c) + " is empty");
    for (NodeId j : members) {
      if (j < 0 || j >= h.rows()) throw std::invalid_argument("compute_centers: member id out of range");
      centers.row(static_cast<Eigen::Index>(c)) += h.row(j);
    }
    centers.row(static_cast<Eigen::Index>(c)) /= static_cast<Scalar>(members.size());
  }
  return centers;
}

template <typename Scalar>
Matrix<Scalar> similarity(const Matrix<Scalar>& h, const Matrix<Scalar>& centers, SimilarityMode mode) {
  if (h.cols() != centers.cols()) throw std::invalid_argument("similarity: embedding and center widths differ");
  Matrix<Scalar> sim = h * centers.transpose();
  if (mode == SimilarityMode::cosine) {
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
      const Scalar norm = centers.row(c).norm();
      if (!(norm > Scalar(1e-12)))
        throw NumericalError("degenerate center: community " + std::to_string(c) + " has a zero-norm center");
      sim.col(c) /= norm;
    }
  }
  return sim;
}

template <typename Scalar>
Matrix<Scalar> soft_assign(const Matrix<Scalar>& sim, double delta, SoftmaxSign sign) {
  if (!(delta > 0.0)) throw std::invalid_argument("soft_assign: delta must be positive");
  const Scalar scale = static_cast<Scalar>(sign == SoftmaxSign::plus ? delta : -delta);
  Matrix<Scalar> p = sim * scale;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    auto row = p.row(i);
    row.array() = (row.array() - row.maxCoeff()).exp();
    row /= row.sum();
  }
  return p;
}

template <typename Scalar>
HardAssignment hard_assign(const Matrix<Scalar>& membership) {
  HardAssignment out;
  out.column.resize(static_cast<std::size_t>(membership.rows()));
  for (Eigen::Index i = 0; i < membership.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < membership.cols(); ++c)
      if (membership(i, c) > membership(i, best)) best = c;
    out.column[i] = static_cast<int>(best);
  }
  out.partition = Partition::compact(out.column);
  return out;
}

template <typename Scalar>
SoftModularityValue soft_modularity(const AttributedGraph& g, const Matrix<Scalar>& membership, double alpha) {
  const NodeId n = g.num_nodes();
  if (membership.rows() != n)
    throw std::invalid_argument("soft_modularity: membership has " + std::to_string(membership.rows()) +
                                " rows, graph has " + std::to_string(n) + " nodes");
  if (g.two_m() <= 0) throw std::invalid_argument("soft_modularity: graph has no edges");
  const Eigen::Index k = membership.cols();
  for (NodeId i = 0; i < n; ++i) {
    const double s = membership.row(i).template cast<double>().sum();
    if (std::abs(s - 1.0) > 1e-6)
      throw std::invalid_argument("soft_modularity: row " + std::to_string(i) + " sums to " + std::to_string(s));
  }

  const double two_m = static_cast<double>(g.two_m());
  double edge_term = 0.0;
  Eigen::VectorXd weighted = Eigen::VectorXd::Zero(k);
  for (NodeId i = 0; i < n; ++i) {
    const auto pi = membership.row(i).template cast<double>();
    weighted += static_cast<double>(g.degree(i)) * pi.transpose();
    for (NodeId j : g.neighbors(i)) edge_term += pi.dot(membership.row(j).template cast<double>());
  }
  SoftModularityValue v;
  v.q_prime = edge_term / two_m - weighted.squaredNorm() / (two_m * two_m);
  v.loss = -alpha * v.q_prime;
  return v;
}

template Matrix<float> compute_centers(const Matrix<float>&, const FilterResult&);
template Matrix<double> compute_centers(const Matrix<double>&, const FilterResult&);
template Matrix<float> similarity(const Matrix<float>&, const Matrix<float>&, SimilarityMode);
template Matrix<double> similarity(const Matrix<double>&, const Matrix<double>&, SimilarityMode);
template Matrix<float> soft_assign(const Matrix<float>&, double, SoftmaxSign);
template Matrix<double> soft_assign(const Matrix<double>&, double, SoftmaxSign);
template HardAssignment hard_assign(const Matrix<float>&);
template HardAssignment hard_assign(const Matrix<double>&);
template SoftModularityValue soft_modularity(const AttributedGraph&, const Matrix<float>&, double);
template SoftModularityValue soft_modularity(const AttributedGraph&, const Matrix<double>&, double);

}  // namespace modcd
