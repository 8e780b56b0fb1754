#include <doctest.h>

#include <cmath>

#include "modcd/error.hpp"
#include "modcd/louvain.hpp"
#include "oracles.hpp"

using namespace modcd;
using namespace modcd::testing;

namespace {

// Best modularity over every set partition of n nodes (restricted growth strings).
double exhaustive_best_modularity(const AttributedGraph& g) {
  const auto adj = dense_adjacency(g);
  const auto n = static_cast<std::size_t>(g.num_nodes());
  std::vector<int> a(n, 0);
  double best = -1.0;
  while (true) {
    best = std::max(best, naive_modularity(adj, a));
    std::size_t i = n - 1;
    while (i > 0) {
      const int prefix_max = *std::max_element(a.begin(), a.begin() + static_cast<long>(i));
      if (a[i] <= prefix_max) break;
      a[i] = 0;
      --i;
    }
    if (i == 0) break;
    ++a[i];
  }
  return best;
}

}  // namespace

TEST_CASE("louvain: two disjoint triangles are recovered exactly") {
  const auto g = two_triangles();
  CHECK(exhaustive_best_modularity(g) == doctest::Approx(0.5));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = louvain_detect(g, seed);
    CHECK(p.num_communities() == 2);
    CHECK(p[0] == p[1]);
    CHECK(p[1] == p[2]);
    CHECK(p[3] == p[4]);
    CHECK(p[4] == p[5]);
    CHECK(modularity_hard(g, p) == doctest::Approx(0.5).epsilon(1e-14));
  }
}

TEST_CASE("louvain: K2 merges into one community") {
  const auto g = build_graph(std::vector<Edge>{{0, 1}}, Matrix<double>::Identity(2, 2));
  const auto p = louvain_detect(g, 0);
  CHECK(p.num_communities() == 1);
  CHECK(modularity_hard(g, p) == doctest::Approx(0.0));
}

TEST_CASE("louvain: karate club reaches Q >= 0.40") {
  const auto g = karate();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const double q = modularity_hard(g, louvain_detect(g, seed));
    CAPTURE(seed);
    CHECK(q >= 0.40);
  }
}

TEST_CASE("louvain: modularity never decreases across levels") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto g = random_graph(60, 0.08, seed);
    const auto r = louvain_run(g, seed);
    REQUIRE(r.level_modularity.size() >= 1);
    for (std::size_t l = 1; l < r.level_modularity.size(); ++l)
      CHECK(r.level_modularity[l] >= r.level_modularity[l - 1] - 1e-12);
    CHECK(modularity_hard(g, r.partition) == doctest::Approx(r.level_modularity.back()).epsilon(1e-12));
  }
}

TEST_CASE("louvain: result never beats the exhaustive optimum on small graphs") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto g = random_graph(8, 0.35, seed + 100);
    const double q = modularity_hard(g, louvain_detect(g, seed));
    CHECK(q <= exhaustive_best_modularity(g) + 1e-12);
    CHECK(q >= 0.0);
  }
}

TEST_CASE("louvain: fixed seed is deterministic") {
  const auto g = random_graph(80, 0.06, 5);
  CHECK(louvain_detect(g, 42).assignment() == louvain_detect(g, 42).assignment());
}

TEST_CASE("filter: sizes [10,10,10,2]") {
  std::vector<int> assign;
  for (int c = 0; c < 4; ++c) assign.insert(assign.end(), c < 3 ? 10 : 2, c);
  const auto fr = filter_communities(Partition(assign), 32);
  CHECK(fr.mean == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(std::abs(fr.stddev - std::sqrt(12.0)) <= 1e-12);
  CHECK(std::abs(fr.threshold - 9.732050807568877) <= 1e-9);
  CHECK(fr.k == 3);
  CHECK(fr.kept_ids == std::vector<int>{0, 1, 2});
  CHECK(fr.member_lists[1].front() == 10);
}

TEST_CASE("filter: equal sizes keep everything") {
  std::vector<int> assign;
  for (int c = 0; c < 4; ++c) assign.insert(assign.end(), 5, c);
  const auto fr = filter_communities(Partition(assign), 20);
  CHECK(fr.stddev == 0.0);
  CHECK(fr.threshold == 5.0);
  CHECK(fr.k == 4);
}

TEST_CASE("filter: sizes [100,1] keep one") {
  std::vector<int> assign(100, 0);
  assign.push_back(1);
  const auto fr = filter_communities(Partition(assign), 101);
  CHECK(fr.mean == doctest::Approx(50.5));
  CHECK(fr.stddev == doctest::Approx(49.5));
  CHECK(fr.threshold == doctest::Approx(75.25));
  CHECK(fr.k == 1);
}

TEST_CASE("filter: no survivors is an error") {
  std::vector<int> assign{0, 0, 0, 1};
  CHECK_NOTHROW(filter_communities(Partition(assign), 4));
  CHECK_THROWS_AS(filter_communities(Partition(assign), 4, 100.0), DataError);
}

TEST_CASE("filter: keeps exactly the communities at or above the threshold") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = Partition::compact(random_assignment(60, 1 + trial % 9, rng));
    const auto fr = filter_communities(p, 60);
    const auto sizes = p.community_sizes();
    std::vector<int> expected;
    for (int c = 0; c < p.num_communities(); ++c)
      if (sizes[c] >= fr.threshold) expected.push_back(c);
    CHECK(fr.kept_ids == expected);
    for (std::size_t i = 0; i < fr.kept_ids.size(); ++i)
      CHECK(static_cast<int>(fr.member_lists[i].size()) == sizes[fr.kept_ids[i]]);
  }
}
