#include <doctest.h>

#include <cmath>

#include "modcd/encoder.hpp"
#include "oracles.hpp"

using namespace modcd;
using namespace modcd::testing;

TEST_CASE("build_propagation: small graphs") {
  const auto k2 = build_graph(std::vector<Edge>{{0, 1}}, Matrix<double>::Identity(2, 2));
  const Matrix<double> p2(build_propagation(k2));
  CHECK(p2.isApprox(Matrix<double>::Constant(2, 2, 0.5), 1e-15));

  const auto path = build_graph(std::vector<Edge>{{0, 1}, {1, 2}}, Matrix<double>::Identity(3, 3));
  const Matrix<double> p3(build_propagation(path));
  CHECK(p3(0, 1) == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-14));
  CHECK(p3(0, 1) == doctest::Approx(0.40825).epsilon(1e-5));
  CHECK(p3(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(p3(0, 2) == 0.0);
}

TEST_CASE("build_propagation: isolated node keeps a unit diagonal") {
  const auto g = build_graph(std::vector<Edge>{{0, 1}}, Matrix<double>::Identity(3, 3));
  const Matrix<double> p(build_propagation(g));
  CHECK(p(2, 2) == 1.0);
}

TEST_CASE("build_propagation matches a dense construction and is symmetric") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = random_graph(20, 0.2, seed);
    const Matrix<double> p(build_propagation(g));
    CHECK((p - p.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((p - naive_propagation(dense_adjacency(g))).cwiseAbs().maxCoeff() <= 1e-12);
    for (NodeId i = 0; i < g.num_nodes(); ++i) CHECK(p(i, i) == doctest::Approx(1.0 / (g.degree(i) + 1)));
  }
}

TEST_CASE("encode: identity pipeline returns X") {
  const SparseMatrix<double> eye = Matrix<double>::Identity(3, 3).sparseView();
  Matrix<double> x(3, 2);
  x << 1, -2, 3, 4, -5, 6;
  const SparseMatrix<double> xs = x.sparseView();
  const Matrix<double> z = encode(eye, xs, Matrix<double>::Identity(2, 2).eval(), Activation::identity);
  CHECK(z.isApprox(x));
}

TEST_CASE("encode: K2 propagation mixes the two rows") {
  const auto k2 = build_graph(std::vector<Edge>{{0, 1}}, Matrix<double>::Identity(2, 2));
  const Matrix<double> z =
      encode(build_propagation(k2), k2.features(), Matrix<double>::Identity(2, 2).eval(), Activation::identity);
  CHECK(z.isApprox(Matrix<double>::Constant(2, 2, 0.5), 1e-15));
}

TEST_CASE("encode: relu zeroes negative rows") {
  const SparseMatrix<double> eye = Matrix<double>::Identity(1, 1).sparseView();
  Matrix<double> x(1, 2);
  x << -1, -3;
  const Matrix<double> z = encode(eye, SparseMatrix<double>(x.sparseView()), Matrix<double>::Identity(2, 2).eval(),
                                  Activation::relu);
  CHECK(z.isZero());
  NormalizeStats stats;
  const Matrix<double> h = l2_normalize<double>(z, nullptr, &stats);
  CHECK(h.isZero());
  CHECK(stats.zero_rows == 1);
}

TEST_CASE("encode: dimension mismatch is rejected") {
  const auto g = two_triangles();
  CHECK_THROWS_AS(encode(build_propagation(g), g.features(), Matrix<double>::Zero(3, 4).eval(), Activation::relu),
                  std::invalid_argument);
  const SparseMatrix<double> small = Matrix<double>::Identity(2, 2).sparseView();
  CHECK_THROWS_AS(encode(small, g.features(), Matrix<double>::Zero(2, 4).eval(), Activation::relu),
                  std::invalid_argument);
}

TEST_CASE("encode is linear in W under the identity activation") {
  const auto g = random_graph(15, 0.3, 4, 5);
  const auto prop = build_propagation(g);
  const Matrix<double> w1 = init_weights(5, 3, 1);
  const Matrix<double> w2 = init_weights(5, 3, 2);
  const double a = 0.7, b = -1.9;
  const Matrix<double> lhs = encode(prop, g.features(), (a * w1 + b * w2).eval(), Activation::identity);
  const Matrix<double> rhs = a * encode(prop, g.features(), w1, Activation::identity) +
                             b * encode(prop, g.features(), w2, Activation::identity);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("l2_normalize: fixed rows and idempotence") {
  Matrix<double> z(3, 2);
  z << 3, 4, 1, 0, 0, 0;
  const Matrix<double> h = l2_normalize(z);
  CHECK(h(0, 0) == doctest::Approx(0.6));
  CHECK(h(0, 1) == doctest::Approx(0.8));
  CHECK(h(1, 0) == 1.0);
  CHECK(h.row(2).isZero());

  const auto g = random_graph(20, 0.2, 8, 6);
  const Matrix<double> zz =
      encode(build_propagation(g), g.features(), init_weights(6, 4, 3), Activation::tanh);
  const Matrix<double> once = l2_normalize(zz);
  const Matrix<double> twice = l2_normalize(once);
  CHECK((once - twice).cwiseAbs().maxCoeff() <= 1e-12);
  for (Eigen::Index i = 0; i < once.rows(); ++i) CHECK(std::abs(once.row(i).norm() - 1.0) <= 1e-12);
}

TEST_CASE("init_weights: bounded and seeded") {
  const Matrix<double> w = init_weights(10, 6, 5);
  CHECK(w.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 16.0));
  CHECK(w == init_weights(10, 6, 5));
  CHECK(w != init_weights(10, 6, 6));
}

TEST_CASE("activation names round-trip") {
  for (auto a : {Activation::relu, Activation::tanh, Activation::identity}) CHECK(parse_activation(to_string(a)) == a);
  CHECK_THROWS_AS(parse_activation("gelu"), std::invalid_argument);
}
