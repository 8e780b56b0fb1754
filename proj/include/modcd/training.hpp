#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "modcd/encoder.hpp"
#include "modcd/graph.hpp"
#include "modcd/louvain.hpp"
#include "modcd/membership.hpp"

namespace modcd {

enum class Precision { f32, f64 };

Precision parse_precision(std::string_view name);
std::string_view to_string(Precision p);

struct TrainConfig {
  double delta = 30.0;
  double alpha = 0.001;
  double lr = 0.001;
  double weight_decay = 0.005;
  int iters = 300;
  int eval_interval = 10;
  int dim = 512;
  std::uint64_t seed = 0;
  double threshold_coef = 0.5;
  Activation activation = Activation::relu;
  SimilarityMode sim_mode = SimilarityMode::cosine;
  SoftmaxSign sign = SoftmaxSign::plus;
  Precision precision = Precision::f64;

  // Throws std::invalid_argument on a non-positive or inconsistent field.
  void validate() const;
};

template <typename Scalar>
struct AdamState {
  static constexpr double beta1 = 0.9;
  static constexpr double beta2 = 0.999;
  static constexpr double epsilon = 1e-8;

  Matrix<Scalar> first;
  Matrix<Scalar> second;
  std::int64_t step = 0;

  AdamState() = default;
  AdamState(Eigen::Index rows, Eigen::Index cols)
      : first(Matrix<Scalar>::Zero(rows, cols)), second(Matrix<Scalar>::Zero(rows, cols)) {}
};

// One bias-corrected Adam step with coupled L2 decay (grad + weight_decay * W).
template <typename Scalar>
void adam_step(Matrix<Scalar>& weights, const Matrix<Scalar>& grad, AdamState<Scalar>& state, double lr,
               double weight_decay);

template <typename Scalar>
struct ForwardArtifacts {
  Matrix<Scalar> pre_activation;
  Matrix<Scalar> z;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> row_norms;
  Matrix<Scalar> h;
  Matrix<Scalar> centers;
  Matrix<Scalar> sim;
  Matrix<Scalar> p;
};

template <typename Scalar>
struct LossAndGrad {
  double loss = 0.0;
  double q_prime = 0.0;
  Matrix<Scalar> grad;
  ForwardArtifacts<Scalar> artifacts;
};

template <typename Scalar>
ForwardArtifacts<Scalar> forward(const SparseMatrix<Scalar>& prop, const SparseMatrix<Scalar>& features,
                                 const Matrix<Scalar>& weights, const FilterResult& fr, const TrainConfig& cfg);

// Loss -alpha * Q' and its exact gradient with respect to the weights. The
// gradient flows through the centers as well as the memberships.
// Throws NumericalError when the loss or gradient is non-finite.
template <typename Scalar>
LossAndGrad<Scalar> loss_and_grad(const AttributedGraph& g, const SparseMatrix<Scalar>& prop,
                                  const SparseMatrix<Scalar>& features, const Matrix<Scalar>& weights,
                                  const FilterResult& fr, const TrainConfig& cfg);

struct EvalRecord {
  int iteration = 0;
  double loss = 0.0;
  double q_prime = 0.0;
  double q = 0.0;
  int num_communities = 0;
  std::optional<double> dbi;
  std::optional<double> nmi;
  std::optional<double> acc;
  std::optional<double> f1;
  std::optional<double> ari;
  double wall_ms = 0.0;
};

struct TrainHistory {
  std::vector<EvalRecord> records;
};

struct Timing {
  double louvain_ms = 0.0;
  double train_ms = 0.0;
  double total_ms = 0.0;
};

// Passed to the observer at every logged iteration.
struct EvalSnapshot {
  const EvalRecord& record;
  const Matrix<double>& h;
  const Matrix<double>& p;
};

using TrainObserver = std::function<void(const EvalSnapshot&)>;

struct TrainResult {
  TrainHistory history;
  Partition louvain;
  double louvain_q = 0.0;
  FilterResult filter;
  Matrix<double> embedding;
  Matrix<double> membership;
  HardAssignment assignment;
  // Metrics of the final partition, equal in meaning to an EvalRecord at `iters`.
  EvalRecord final_metrics;
  double initial_q_prime = 0.0;
  Timing timing;
};

// Full pipeline: Louvain pre-detection and size filter once, then `iters`
// full-batch Adam updates with centers recomputed from the current embedding
// each iteration. Metrics are logged after every `eval_interval` updates.
TrainResult train(const AttributedGraph& g, const TrainConfig& cfg, const TrainObserver& observer = {});

// Metrics for one (embedding, membership) state.
EvalRecord evaluate(const AttributedGraph& g, const Matrix<double>& h, const Matrix<double>& p, double alpha);

}  // namespace modcd
