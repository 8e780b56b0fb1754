#include "modcd/encoder.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include <spdlog/spdlog.h>

namespace modcd {

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  if (name == "identity") return Activation::identity;
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::relu:
      return "relu";
    case Activation::tanh:
      return "tanh";
    case Activation::identity:
      return "identity";
  }
  return "?";
}

PropagationMatrix build_propagation(const AttributedGraph& g) {
  const NodeId n = g.num_nodes();
  std::vector<double> inv_sqrt(static_cast<std::size_t>(n));
  for (NodeId i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(g.degree(i) + 1));

  std::vector<Eigen::Triplet<double, int>> entries;
  entries.reserve(static_cast<std::size_t>(g.two_m() + n));
  for (NodeId i = 0; i < n; ++i) {
    entries.emplace_back(i, i, inv_sqrt[i] * inv_sqrt[i]);
    for (NodeId j : g.neighbors(i)) entries.emplace_back(i, j, inv_sqrt[i] * inv_sqrt[j]);
  }
  PropagationMatrix prop(n, n);
  prop.setFromTriplets(entries.begin(), entries.end());
  prop.makeCompressed();
  return prop;
}

Matrix<double> init_weights(int rows, int cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("init_weights: dimensions must be positive");
  std::mt19937_64 rng(seed);
  const double bound = std::sqrt(6.0 / (rows + cols));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix<double> w(rows, cols);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
  return w;
}

template <typename Scalar>
Matrix<Scalar> encode(const SparseMatrix<Scalar>& prop, const SparseMatrix<Scalar>& features,
                      const Matrix<Scalar>& weights, Activation activation, Matrix<Scalar>* pre_activation) {
  if (prop.rows() != prop.cols() || prop.cols() != features.rows())
    throw std::invalid_argument("encode: propagation matrix is " + std::to_string(prop.rows()) + "x" +
                                std::to_string(prop.cols()) + " but features have " +
                                std::to_string(features.rows()) + " rows");
  if (features.cols() != weights.rows())
    throw std::invalid_argument("encode: features have " + std::to_string(features.cols()) +
                                " columns but weights have " + std::to_string(weights.rows()) + " rows");

  Matrix<Scalar> projected = features * weights;
  Matrix<Scalar> pre = prop * projected;
  Matrix<Scalar> z;
  switch (activation) {
    case Activation::relu:
      z = pre.cwiseMax(Scalar(0));
      break;
    case Activation::tanh:
      z = pre.array().tanh().matrix();
      break;
    case Activation::identity:
      z = pre;
      break;
  }
  if (pre_activation) *pre_activation = std::move(pre);
  return z;
}

template <typename Scalar>
Scalar activation_derivative(Activation activation, Scalar pre) {
  switch (activation) {
    case Activation::relu:
      return pre > Scalar(0) ? Scalar(1) : Scalar(0);
    case Activation::tanh: {
      const Scalar t = std::tanh(pre);
      return Scalar(1) - t * t;
    }
    case Activation::identity:
      return Scalar(1);
  }
  return Scalar(0);
}

template <typename Scalar>
Matrix<Scalar> l2_normalize(const Matrix<Scalar>& z, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>* norms,
                            NormalizeStats* stats) {
  Matrix<Scalar> h(z.rows(), z.cols());
  if (norms) norms->resize(z.rows());
  std::int64_t zero_rows = 0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const Scalar norm = z.row(i).norm();
    if (norms) (*norms)(i) = norm;
    if (norm == Scalar(0)) ++zero_rows;
    h.row(i) = z.row(i) / std::max(norm, static_cast<Scalar>(kNormEpsilon));
  }
  if (zero_rows > 0) spdlog::warn("l2_normalize: {} zero embedding row(s)", zero_rows);
  if (stats) stats->zero_rows = zero_rows;
  return h;
}

template Matrix<float> encode(const SparseMatrix<float>&, const SparseMatrix<float>&, const Matrix<float>&,
                              Activation, Matrix<float>*);
template Matrix<double> encode(const SparseMatrix<double>&, const SparseMatrix<double>&, const Matrix<double>&,
                               Activation, Matrix<double>*);
template float activation_derivative(Activation, float);
template double activation_derivative(Activation, double);
template Matrix<float> l2_normalize(const Matrix<float>&, Eigen::Matrix<float, Eigen::Dynamic, 1>*,
                                    NormalizeStats*);
template Matrix<double> l2_normalize(const Matrix<double>&, Eigen::Matrix<double, Eigen::Dynamic, 1>*,
                                     NormalizeStats*);

}  // namespace modcd
