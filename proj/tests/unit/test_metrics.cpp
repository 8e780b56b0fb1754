#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "modcd/metrics.hpp"
#include "oracles.hpp"

using namespace modcd;
using namespace modcd::testing;

TEST_CASE("metrics: identical partitions score perfectly") {
  const Partition p({0, 0, 1, 1, 2});
  CHECK(nmi(p, p) == doctest::Approx(1.0));
  CHECK(acc(p, p) == 1.0);
  CHECK(f1(p, p) == doctest::Approx(1.0));
  CHECK(ari(p, p) == doctest::Approx(1.0));
  const Partition q({2, 2, 0, 0, 1});
  CHECK(nmi(Partition::compact(q.assignment()), p) == doctest::Approx(1.0));
  CHECK(acc(q, p) == 1.0);
}

TEST_CASE("metrics: fixed values") {
  const Partition pred({0, 0, 1, 1});
  const Partition truth({0, 1, 0, 1});
  CHECK(ari(pred, truth) == doctest::Approx(-0.5));
  CHECK(nmi(pred, truth) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(acc(pred, truth) == doctest::Approx(0.5));

  const Partition all_one({0, 0, 0});
  const Partition split({0, 0, 1});
  CHECK(acc(all_one, split) == doctest::Approx(2.0 / 3.0));
  CHECK(f1(all_one, split) == doctest::Approx(0.4));
  CHECK(nmi(all_one, split) == 0.0);
  CHECK(nmi(all_one, all_one) == 1.0);
  CHECK(ari(all_one, all_one) == 1.0);
  CHECK_THROWS_AS(ari(Partition({0}), Partition({0})), std::invalid_argument);
  CHECK_THROWS_AS(acc(Partition({0, 1}), Partition({0, 0, 0})), std::invalid_argument);
}

TEST_CASE("dbi: fixed values") {
  Matrix<double> h(4, 1);
  h << 0.0, 0.2, 2.0, 2.2;
  // scatter 0.1 in each cluster, centroid distance 2
  CHECK(dbi(h, Partition({0, 0, 1, 1})) == doctest::Approx(0.1));
  Matrix<double> same(4, 1);
  same << 0.0, 1.0, 0.0, 1.0;
  CHECK(dbi(same, Partition({0, 0, 1, 1})) == kDbiInfinite);
  CHECK_THROWS_AS(dbi(h, Partition({0, 0, 0, 0})), std::invalid_argument);
}

TEST_CASE("optimal_mapping: rectangular tables") {
  const auto more_pred = contingency(Partition({0, 0, 1, 2, 2, 2}), Partition({0, 0, 1, 1, 1, 1}));
  const auto m = optimal_mapping(more_pred);
  CHECK(m.matched == 5);
  CHECK(m.target[0] == 0);
  CHECK(m.target[2] == 1);
  CHECK(m.target[1] == -1);

  const auto more_truth = contingency(Partition({0, 0, 0, 0}), Partition({0, 1, 1, 2}));
  CHECK(optimal_mapping(more_truth).matched == 2);
  CHECK(optimal_mapping(more_truth).target[0] == 1);
}

TEST_CASE("metrics agree with brute-force oracles on random pairs") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 29);
    const auto a = Partition::compact(random_assignment(n, 1 + trial % 5, rng));
    const auto b = Partition::compact(random_assignment(n, 1 + (trial / 5) % 5, rng));
    CAPTURE(trial);
    CHECK(std::abs(ari(a, b) - naive_ari(a.assignment(), b.assignment())) <= 1e-12);
    CHECK(std::abs(nmi(a, b) - naive_nmi(a.assignment(), b.assignment())) <= 1e-12);
    CHECK(std::abs(acc(a, b) - exhaustive_acc(a.assignment(), b.assignment())) <= 1e-12);
    const auto candidates = exhaustive_f1_candidates(a.assignment(), b.assignment());
    const double got = f1(a, b);
    CHECK(std::any_of(candidates.begin(), candidates.end(), [&](double c) { return std::abs(c - got) <= 1e-12; }));
    CHECK(nmi(a, b) >= 0.0);
    CHECK(nmi(a, b) <= 1.0);
    CHECK(std::abs(nmi(a, b) - nmi(b, a)) <= 1e-12);
    CHECK(std::abs(ari(a, b) - ari(b, a)) <= 1e-12);
  }
}

TEST_CASE("metrics are invariant to relabeling the prediction") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = Partition::compact(random_assignment(25, 4, rng));
    const auto b = Partition::compact(random_assignment(25, 3, rng));
    std::vector<int> perm(static_cast<std::size_t>(a.num_communities()));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> relabeled(25);
    for (std::size_t i = 0; i < 25; ++i) relabeled[i] = perm[static_cast<std::size_t>(a[i])];
    const Partition c(relabeled);
    CHECK(ari(a, b) == doctest::Approx(ari(c, b)).epsilon(1e-12));
    CHECK(nmi(a, b) == doctest::Approx(nmi(c, b)).epsilon(1e-12));
    CHECK(acc(a, b) == doctest::Approx(acc(c, b)).epsilon(1e-12));
  }
}

TEST_CASE("dbi matches a direct computation") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix<double> h(30, 3);
    for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = gauss(rng);
    const auto p = Partition::compact(random_assignment(30, 2 + trial % 4, rng));
    if (p.num_communities() < 2) continue;
    const int k = p.num_communities();
    Matrix<double> cent = Matrix<double>::Zero(k, 3);
    std::vector<double> scatter(static_cast<std::size_t>(k), 0.0);
    const auto sizes = p.community_sizes();
    for (int i = 0; i < 30; ++i) cent.row(p[i]) += h.row(i) / sizes[static_cast<std::size_t>(p[i])];
    for (int i = 0; i < 30; ++i)
      scatter[static_cast<std::size_t>(p[i])] += (h.row(i) - cent.row(p[i])).norm() / sizes[static_cast<std::size_t>(p[i])];
    double total = 0;
    for (int a = 0; a < k; ++a) {
      double worst = 0;
      for (int b = 0; b < k; ++b)
        if (a != b) worst = std::max(worst, (scatter[a] + scatter[b]) / (cent.row(a) - cent.row(b)).norm());
      total += worst;
    }
    CHECK(dbi(h, p) == doctest::Approx(total / k).epsilon(1e-12));
  }
}
