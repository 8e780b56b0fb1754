#pragma once

#include <string_view>
#include <vector>

#include "modcd/graph.hpp"
#include "modcd/louvain.hpp"

namespace modcd {

enum class SimilarityMode { cosine, dot };
// Sign of the softmax exponent. `plus` makes higher similarity more probable;
// `minus` uses exp(-delta * sim), so lower similarity is more probable.
enum class SoftmaxSign { plus, minus };

SimilarityMode parse_similarity_mode(std::string_view name);
std::string_view to_string(SimilarityMode m);
SoftmaxSign parse_softmax_sign(std::string_view name);
std::string_view to_string(SoftmaxSign s);

// Row c is the mean of the embedding rows of the c-th kept community.
template <typename Scalar>
Matrix<Scalar> compute_centers(const Matrix<Scalar>& h, const FilterResult& fr);

// n x k similarity. Cosine mode divides by the center norm (embedding rows are
// assumed unit-norm) and throws NumericalError on a zero-norm center.
template <typename Scalar>
Matrix<Scalar> similarity(const Matrix<Scalar>& h, const Matrix<Scalar>& centers, SimilarityMode mode);

// Row softmax of sign * delta * sim, max-subtracted.
template <typename Scalar>
Matrix<Scalar> soft_assign(const Matrix<Scalar>& sim, double delta, SoftmaxSign sign);

struct HardAssignment {
  // Raw argmax column per node (0..k-1, possibly with unused columns).
  std::vector<int> column;
  // Same assignment relabeled contiguously.
  Partition partition;
};

// Row argmax, ties toward the smallest column.
template <typename Scalar>
HardAssignment hard_assign(const Matrix<Scalar>& membership);

struct SoftModularityValue {
  double q_prime = 0.0;
  double loss = 0.0;
};

// Q' = tr(P^T A P) / 2M - ||P^T d||^2 / (2M)^2 and loss = -alpha * Q'.
// Throws std::invalid_argument if a row of P does not sum to 1 within 1e-6.
template <typename Scalar>
SoftModularityValue soft_modularity(const AttributedGraph& g, const Matrix<Scalar>& membership, double alpha = 1.0);

}  // namespace modcd
