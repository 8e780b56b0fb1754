#include "modcd/training.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>

#include <spdlog/spdlog.h>

#include "modcd/error.hpp"
#include "modcd/metrics.hpp"

namespace modcd {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Decorrelates the weight-init stream from the Louvain shuffle stream.
std::uint64_t weight_seed(std::uint64_t seed) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

template <typename Scalar>
[[noreturn]] void abort_non_finite(const char* what, double loss, const Matrix<Scalar>& weights,
                                   const Matrix<Scalar>& grad) {
  std::ostringstream msg;
  msg << "non-finite " << what << ": loss=" << loss << " |W|max=" << weights.cwiseAbs().maxCoeff()
      << " W finite=" << weights.allFinite() << " grad finite=" << grad.allFinite();
  throw NumericalError(msg.str());
}

}  // namespace

Precision parse_precision(std::string_view name) {
  if (name == "f32") return Precision::f32;
  if (name == "f64") return Precision::f64;
  throw std::invalid_argument("unknown precision '" + std::string(name) + "'");
}

std::string_view to_string(Precision p) { return p == Precision::f32 ? "f32" : "f64"; }

void TrainConfig::validate() const {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be non-negative");
  if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("weight decay must be non-negative");
  if (iters < 0) throw std::invalid_argument("iters must be non-negative");
  if (eval_interval < 1) throw std::invalid_argument("eval interval must be >= 1");
  if (iters > 0 && eval_interval > iters) throw std::invalid_argument("eval interval must not exceed iters");
  if (dim < 1) throw std::invalid_argument("embedding dimension must be >= 1");
  if (!std::isfinite(threshold_coef)) throw std::invalid_argument("threshold coefficient must be finite");
}

template <typename Scalar>
void adam_step(Matrix<Scalar>& weights, const Matrix<Scalar>& grad, AdamState<Scalar>& state, double lr,
               double weight_decay) {
  using S = AdamState<Scalar>;
  if (grad.rows() != weights.rows() || grad.cols() != weights.cols())
    throw std::invalid_argument("adam_step: gradient shape differs from weights");
  if (state.first.size() == 0) state = AdamState<Scalar>(weights.rows(), weights.cols());

  const Matrix<Scalar> g = grad + static_cast<Scalar>(weight_decay) * weights;
  ++state.step;
  const auto b1 = static_cast<Scalar>(S::beta1);
  const auto b2 = static_cast<Scalar>(S::beta2);
  state.first = b1 * state.first + (Scalar(1) - b1) * g;
  state.second = b2 * state.second + (Scalar(1) - b2) * g.cwiseProduct(g);
  const auto t = static_cast<double>(state.step);
  const auto c1 = static_cast<Scalar>(1.0 - std::pow(S::beta1, t));
  const auto c2 = static_cast<Scalar>(1.0 - std::pow(S::beta2, t));
  const auto eps = static_cast<Scalar>(S::epsilon);
  weights.array() -= static_cast<Scalar>(lr) * (state.first.array() / c1) /
                     ((state.second.array() / c2).sqrt() + eps);
}

template <typename Scalar>
ForwardArtifacts<Scalar> forward(const SparseMatrix<Scalar>& prop, const SparseMatrix<Scalar>& features,
                                 const Matrix<Scalar>& weights, const FilterResult& fr, const TrainConfig& cfg) {
  ForwardArtifacts<Scalar> a;
  a.z = encode(prop, features, weights, cfg.activation, &a.pre_activation);
  a.h = l2_normalize(a.z, &a.row_norms);
  a.centers = compute_centers(a.h, fr);
  a.sim = similarity(a.h, a.centers, cfg.sim_mode);
  a.p = soft_assign(a.sim, cfg.delta, cfg.sign);
  return a;
}

template <typename Scalar>
LossAndGrad<Scalar> loss_and_grad(const AttributedGraph& g, const SparseMatrix<Scalar>& prop,
                                  const SparseMatrix<Scalar>& features, const Matrix<Scalar>& weights,
                                  const FilterResult& fr, const TrainConfig& cfg) {
  if (fr.member_lists.empty()) throw std::invalid_argument("loss_and_grad: no structural communities");
  LossAndGrad<Scalar> out;
  out.artifacts = forward(prop, features, weights, fr, cfg);
  const auto& a = out.artifacts;
  const SoftModularityValue value = soft_modularity(g, a.p, cfg.alpha);
  out.q_prime = value.q_prime;
  out.loss = value.loss;

  const NodeId n = g.num_nodes();
  const Eigen::Index k = a.p.cols();
  const double two_m = static_cast<double>(g.two_m());

  // dL/dP = -(alpha / M) (A P - d (d^T P) / 2M)
  Matrix<Scalar> grad_p = Matrix<Scalar>::Zero(n, k);
  Eigen::Matrix<Scalar, 1, Eigen::Dynamic> dtp = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>::Zero(k);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j : g.neighbors(i)) grad_p.row(i) += a.p.row(j);
    dtp += static_cast<Scalar>(g.degree(i)) * a.p.row(i);
  }
  for (NodeId i = 0; i < n; ++i) grad_p.row(i) -= static_cast<Scalar>(g.degree(i) / two_m) * dtp;
  grad_p *= static_cast<Scalar>(-2.0 * cfg.alpha / two_m);

  // Softmax: dL/dlogit = P * (dL/dP - <dL/dP, P>_row), logits = sign * delta * sim.
  Matrix<Scalar> grad_sim(n, k);
  const auto logit_scale = static_cast<Scalar>(cfg.sign == SoftmaxSign::plus ? cfg.delta : -cfg.delta);
  for (NodeId i = 0; i < n; ++i) {
    const Scalar inner = grad_p.row(i).dot(a.p.row(i));
    grad_sim.row(i) = logit_scale * a.p.row(i).cwiseProduct((grad_p.row(i).array() - inner).matrix());
  }

  // Similarity -> embedding and centers.
  Matrix<Scalar> grad_h;
  Matrix<Scalar> grad_centers;
  if (cfg.sim_mode == SimilarityMode::dot) {
    grad_h = grad_sim * a.centers;
    grad_centers = grad_sim.transpose() * a.h;
  } else {
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> center_norms = a.centers.rowwise().norm();
    const Matrix<Scalar> unit_centers = center_norms.cwiseInverse().asDiagonal() * a.centers;
    grad_h = grad_sim * unit_centers;
    const Matrix<Scalar> grad_unit = grad_sim.transpose() * a.h;
    grad_centers.resize(k, a.h.cols());
    for (Eigen::Index c = 0; c < k; ++c) {
      const Scalar radial = unit_centers.row(c).dot(grad_unit.row(c));
      grad_centers.row(c) = (grad_unit.row(c) - radial * unit_centers.row(c)) / center_norms(c);
    }
  }

  // Centers are member means of H.
  for (std::size_t c = 0; c < fr.member_lists.size(); ++c) {
    const auto& members = fr.member_lists[c];
    const auto share = grad_centers.row(static_cast<Eigen::Index>(c)) / static_cast<Scalar>(members.size());
    for (NodeId j : members) grad_h.row(j) += share;
  }

  // L2 normalization then activation, reusing grad_h as the pre-activation gradient.
  const auto eps = static_cast<Scalar>(kNormEpsilon);
  for (NodeId i = 0; i < n; ++i) {
    const Scalar r = a.row_norms(i);
    if (r > eps) {
      const Scalar radial = a.h.row(i).dot(grad_h.row(i));
      grad_h.row(i) = (grad_h.row(i) - radial * a.h.row(i)) / r;
    } else {
      grad_h.row(i) /= eps;
    }
    for (Eigen::Index c = 0; c < grad_h.cols(); ++c)
      grad_h(i, c) *= activation_derivative(cfg.activation, a.pre_activation(i, c));
  }

  // pre = prop * X * W with prop symmetric.
  const Matrix<Scalar> grad_projected = prop * grad_h;
  out.grad = features.transpose() * grad_projected;

  if (!std::isfinite(out.loss)) abort_non_finite("loss", out.loss, weights, out.grad);
  if (!out.grad.allFinite()) abort_non_finite("gradient", out.loss, weights, out.grad);
  return out;
}

EvalRecord evaluate(const AttributedGraph& g, const Matrix<double>& h, const Matrix<double>& p, double alpha) {
  EvalRecord rec;
  const SoftModularityValue v = soft_modularity(g, p, alpha);
  rec.q_prime = v.q_prime;
  rec.loss = v.loss;
  const HardAssignment hard = hard_assign(p);
  rec.q = modularity_hard(g, hard.partition);
  rec.num_communities = hard.partition.num_communities();
  if (rec.num_communities >= 2) rec.dbi = dbi(h, hard.partition);
  if (const auto truth = g.label_partition()) {
    const MetricSuite m = supervised_metrics(hard.partition, *truth);
    rec.nmi = m.nmi;
    rec.acc = m.acc;
    rec.f1 = m.f1;
    rec.ari = m.ari;
  }
  return rec;
}

namespace {

template <typename Scalar>
void run_training(const AttributedGraph& g, const TrainConfig& cfg, const TrainObserver& observer,
                  Clock::time_point start, TrainResult& result) {
  const auto train_start = Clock::now();
  const SparseMatrix<Scalar> prop = build_propagation(g).template cast<Scalar>();
  const SparseMatrix<Scalar> features = g.features().template cast<Scalar>();
  Matrix<Scalar> weights = init_weights(g.feature_dim(), cfg.dim, weight_seed(cfg.seed)).template cast<Scalar>();
  AdamState<Scalar> adam(weights.rows(), weights.cols());

  auto snapshot = [&](const ForwardArtifacts<Scalar>& a, int iteration) {
    const Matrix<double> h = a.h.template cast<double>();
    const Matrix<double> p = a.p.template cast<double>();
    EvalRecord rec = evaluate(g, h, p, cfg.alpha);
    rec.iteration = iteration;
    rec.wall_ms = elapsed_ms(start);
    return std::tuple{rec, h, p};
  };

  result.initial_q_prime =
      soft_modularity(g, forward(prop, features, weights, result.filter, cfg).p, cfg.alpha).q_prime;

  for (int it = 1; it <= cfg.iters; ++it) {
    const LossAndGrad<Scalar> step = loss_and_grad(g, prop, features, weights, result.filter, cfg);
    adam_step(weights, step.grad, adam, cfg.lr, cfg.weight_decay);
    if (!weights.allFinite()) abort_non_finite("weights", step.loss, weights, step.grad);
    if (it % cfg.eval_interval == 0) {
      auto [rec, h, p] = snapshot(forward(prop, features, weights, result.filter, cfg), it);
      spdlog::info("iter {:4d}  loss {:.6g}  Q' {:.5f}  Q {:.5f}  k {}", it, rec.loss, rec.q_prime, rec.q,
                   rec.num_communities);
      if (observer) observer(EvalSnapshot{rec, h, p});
      result.history.records.push_back(std::move(rec));
    }
  }

  auto [rec, h, p] = snapshot(forward(prop, features, weights, result.filter, cfg), cfg.iters);
  result.final_metrics = rec;
  result.assignment = hard_assign(p);
  result.embedding = std::move(h);
  result.membership = std::move(p);
  result.timing.train_ms = elapsed_ms(train_start);
}

}  // namespace

TrainResult train(const AttributedGraph& g, const TrainConfig& cfg, const TrainObserver& observer) {
  cfg.validate();
  const auto start = Clock::now();
  TrainResult result;

  const LouvainResult louvain = louvain_run(g, cfg.seed);
  result.louvain = louvain.partition;
  result.louvain_q = louvain.level_modularity.back();
  result.filter = filter_communities(result.louvain, static_cast<std::size_t>(g.num_nodes()), cfg.threshold_coef);
  result.timing.louvain_ms = elapsed_ms(start);
  spdlog::info("louvain: {} communities, Q {:.5f}; kept k = {} (threshold {:.3f})",
               result.louvain.num_communities(), result.louvain_q, result.filter.k, result.filter.threshold);

  if (cfg.precision == Precision::f32)
    run_training<float>(g, cfg, observer, start, result);
  else
    run_training<double>(g, cfg, observer, start, result);
  result.timing.total_ms = elapsed_ms(start);
  return result;
}

template void adam_step(Matrix<float>&, const Matrix<float>&, AdamState<float>&, double, double);
template void adam_step(Matrix<double>&, const Matrix<double>&, AdamState<double>&, double, double);
template ForwardArtifacts<float> forward(const SparseMatrix<float>&, const SparseMatrix<float>&,
                                         const Matrix<float>&, const FilterResult&, const TrainConfig&);
template ForwardArtifacts<double> forward(const SparseMatrix<double>&, const SparseMatrix<double>&,
                                          const Matrix<double>&, const FilterResult&, const TrainConfig&);
template LossAndGrad<float> loss_and_grad(const AttributedGraph&, const SparseMatrix<float>&,
                                          const SparseMatrix<float>&, const Matrix<float>&, const FilterResult&,
                                          const TrainConfig&);
template LossAndGrad<double> loss_and_grad(const AttributedGraph&, const SparseMatrix<double>&,
                                           const SparseMatrix<double>&, const Matrix<double>&,
                                           const FilterResult&, const TrainConfig&);

}  // namespace modcd
