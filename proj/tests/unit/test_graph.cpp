#include <doctest.h>

#include <random>

#include "modcd/graph.hpp"
#include "oracles.hpp"

using namespace modcd;
using namespace modcd::testing;

TEST_CASE("build_graph: single edge") {
  const std::vector<Edge> edges{{0, 1}};
  const auto g = build_graph(edges, Matrix<double>::Identity(2, 2));
  CHECK(g.num_nodes() == 2);
  CHECK(g.two_m() == 2);
  CHECK(g.degree(0) == 1);
  CHECK(g.degree(1) == 1);
}

TEST_CASE("build_graph: duplicates collapse and self-loops drop") {
  const std::vector<Edge> edges{{0, 1}, {1, 0}, {0, 0}};
  const auto g = build_graph(edges, Matrix<double>::Identity(2, 2));
  CHECK(g.num_edges() == 1);
  CHECK(g.self_loops_dropped() == 1);
  CHECK(g.duplicates_dropped() == 1);
  CHECK(g.edge_list() == std::vector<Edge>{{0, 1}});
}

TEST_CASE("build_graph: two disjoint triangles") {
  const auto g = two_triangles();
  CHECK(g.two_m() == 12);
  for (NodeId i = 0; i < 6; ++i) CHECK(g.degree(i) == 2);
}

TEST_CASE("build_graph: rejects bad input") {
  const Matrix<double> x = Matrix<double>::Identity(2, 2);
  CHECK_THROWS_AS(build_graph(std::vector<Edge>{{0, 2}}, x), std::invalid_argument);
  CHECK_THROWS_AS(build_graph(std::vector<Edge>{}, x), std::invalid_argument);
  CHECK_THROWS_AS(build_graph(std::vector<Edge>{{1, 1}}, x), std::invalid_argument);
  CHECK_THROWS_AS(build_graph(std::vector<Edge>{{0, 1}}, Matrix<double>(2, 0)), std::invalid_argument);
  CHECK_THROWS(build_graph(std::vector<Edge>{{0, 1}}, x, std::vector<int>{0}));
  CHECK_THROWS(build_graph(std::vector<Edge>{{0, 1}}, x, std::vector<int>{0, 2}));
}

TEST_CASE("adjacency symmetry and degree sums hold on random graphs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = random_graph(25, 0.2, seed);
    std::int64_t total = 0;
    for (NodeId i = 0; i < g.num_nodes(); ++i) {
      total += g.degree(i);
      const auto nb = g.neighbors(i);
      CHECK(std::adjacent_find(nb.begin(), nb.end()) == nb.end());
      for (NodeId j : nb) {
        CHECK(j != i);
        const auto back = g.neighbors(j);
        CHECK(std::binary_search(back.begin(), back.end(), i));
      }
    }
    CHECK(total == g.two_m());
    CHECK(g.two_m() == 2 * g.num_edges());
  }
}

TEST_CASE("partition: validation and compaction") {
  CHECK_THROWS_AS(Partition({0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(Partition({-1, 0}), std::invalid_argument);
  const auto p = Partition::compact(std::vector<int>{7, 3, 7, 9});
  CHECK(p.assignment() == std::vector<int>{1, 0, 1, 2});
  CHECK(p.num_communities() == 3);
  CHECK(p.community_sizes() == std::vector<int>{1, 2, 1});
}

TEST_CASE("modularity_hard: fixed values") {
  const auto tri = two_triangles();
  CHECK(modularity_hard(tri, Partition(std::vector<int>(6, 0))) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(modularity_hard(tri, Partition({0, 0, 0, 1, 1, 1})) == doctest::Approx(0.5).epsilon(1e-15));

  const auto k2 = build_graph(std::vector<Edge>{{0, 1}}, Matrix<double>::Identity(2, 2));
  CHECK(modularity_hard(k2, Partition({0, 1})) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK_THROWS_AS(modularity_hard(k2, Partition({0, 0, 1})), std::invalid_argument);
}

TEST_CASE("modularity_hard matches the O(n^2) double loop") {
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g = random_graph(5 + static_cast<NodeId>(seed % 26), 0.2, seed);
    const auto adj = dense_adjacency(g);
    const int t = 1 + static_cast<int>(seed % 5);
    const auto raw = random_assignment(static_cast<std::size_t>(g.num_nodes()), t, rng);
    const auto p = Partition::compact(raw);
    CHECK(std::abs(modularity_hard(g, p) - naive_modularity(adj, p.assignment())) <= 1e-12);
  }
}

TEST_CASE("modularity is invariant under relabeling") {
  std::mt19937_64 rng(3);
  const auto g = random_graph(30, 0.15, 99);
  for (int trial = 0; trial < 20; ++trial) {
    const auto raw = random_assignment(30, 4, rng);
    const auto base = Partition::compact(raw);
    std::vector<int> perm(base.num_communities());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> relabeled(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) relabeled[i] = perm[base[i]];
    CHECK(modularity_hard(g, base) == doctest::Approx(modularity_hard(g, Partition(relabeled))).epsilon(1e-14));
  }
}
