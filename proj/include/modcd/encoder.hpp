#pragma once

#include <cstdint>
#include <string_view>

#include "modcd/graph.hpp"

namespace modcd {

enum class Activation { relu, tanh, identity };

Activation parse_activation(std::string_view name);
std::string_view to_string(Activation a);

// Symmetrically normalized adjacency with self-loops, D^-1/2 (A + I) D^-1/2.
using PropagationMatrix = SparseMatrix<double>;

PropagationMatrix build_propagation(const AttributedGraph& g);

// Fan-scaled uniform init in +-sqrt(6 / (rows + cols)).
Matrix<double> init_weights(int rows, int cols, std::uint64_t seed);

// Z = f(prop * (X * W)). When `pre_activation` is non-null it receives
// prop * (X * W).
template <typename Scalar>
Matrix<Scalar> encode(const SparseMatrix<Scalar>& prop, const SparseMatrix<Scalar>& features,
                      const Matrix<Scalar>& weights, Activation activation,
                      Matrix<Scalar>* pre_activation = nullptr);

template <typename Scalar>
Scalar activation_derivative(Activation activation, Scalar pre);

struct NormalizeStats {
  std::int64_t zero_rows = 0;
};

inline constexpr double kNormEpsilon = 1e-12;

// Row-wise h_i = z_i / max(||z_i||, eps). `norms` (optional) receives ||z_i||.
template <typename Scalar>
Matrix<Scalar> l2_normalize(const Matrix<Scalar>& z, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>* norms = nullptr,
                            NormalizeStats* stats = nullptr);

}  // namespace modcd
