#include <doctest.h>

#include <random>

#include "fwkit/oracles.hpp"

using namespace fwkit;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

void check_answer(const VPolytope& P, const Vector& g, const OracleAnswer& a) {
  CHECK(a.vertex == P.vertex(a.atom_index));
  CHECK(std::abs(a.inner_product - g.dot(a.vertex)) <= 1e-12 * (1 + std::abs(a.inner_product)));
}

}  // namespace

TEST_CASE("lmo examples") {
  const auto D = VPolytope::simplex(3);
  CHECK(lmo(D, vec({3, 1, 2})).atom_index == 1);
  CHECK(lmo(D, vec({0, 0, 0})).atom_index == 0);
  const auto B = VPolytope::box(2, -1, 1);
  CHECK(lmo(B, vec({1, -2})).vertex.isApprox(vec({-1, 1})));
  const auto L = VPolytope::l1ball(3);
  const auto a = lmo(L, vec({0.5, -2, 1}));
  CHECK(a.vertex.isApprox(vec({0, 1, 0})));
}

TEST_CASE("lmo fast paths agree with enumeration on random gradients") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> small(-2, 2);
  const std::vector<VPolytope> polys = {VPolytope::simplex(5), VPolytope::box(4, -1, 2),
                                        VPolytope::l1ball(4)};
  for (const auto& P : polys) {
    for (int t = 0; t < 1000; ++t) {
      Vector grad(P.dimension());
      // every fourth gradient has integer entries to exercise ties
      for (auto& gi : grad) gi = (t % 4 == 0) ? small(rng) : g(rng);
      const auto fast = lmo(P, grad);
      const auto slow = lmo_enumerate(P, grad);
      check_answer(P, grad, fast);
      CHECK(fast.atom_index == slow.atom_index);
      CHECK(fast.inner_product == slow.inner_product);
    }
  }
}

TEST_CASE("lmo is covariant under linear maps") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  const auto P = VPolytope::box(3, 0, 1);
  Matrix M(3, 3);
  for (auto& m : M.reshaped()) m = g(rng);
  std::vector<Vector> mapped;
  for (const auto& v : P.vertices()) mapped.push_back(M * v);
  const VPolytope MP(mapped);
  for (int t = 0; t < 100; ++t) {
    Vector grad(3);
    for (auto& gi : grad) gi = g(rng);
    const auto a = lmo(MP, grad);
    const auto b = lmo(P, M.transpose() * grad);
    CHECK(a.atom_index == b.atom_index);
  }
}

TEST_CASE("away vertex examples") {
  const auto D = VPolytope::simplex(3);
  CHECK(away_vertex(ActiveSet({{0, 0.5}, {1, 0.5}}), D, vec({3, 1, 2})).atom_index == 0);
  CHECK(away_vertex(ActiveSet::vertex(2), D, vec({5, -1, 0})).atom_index == 2);
  CHECK(away_vertex(ActiveSet({{0, 0.2}, {1, 0.3}, {2, 0.5}}), D, vec({1, 1, 0})).atom_index == 0);
}

TEST_CASE("fw gap examples") {
  const auto D = VPolytope::simplex(3);
  CHECK(fw_gap(Vector::Zero(3), vec({0.2, 0.3, 0.5}), D) == 0.0);
  const auto seg = VPolytope::simplex(2);
  const Vector x = vec({0, 1});
  const Vector grad = x - vec({1, 0});
  CHECK(fw_gap(grad, x, seg) == doctest::Approx(2.0));
  // optimum of 1/2|x - c|^2 with c inside the simplex
  const Vector c = vec({0.5, 0.3, 0.2});
  CHECK(fw_gap(Vector::Zero(3), c, D) <= 1e-9);
  // tiny negative values are clamped
  CHECK(fw_gap(vec({1, 1, 1 + 1e-11}), vec({1, 0, 0}), D) == 0.0);
}

TEST_CASE("pairwise gap examples") {
  const auto D = VPolytope::simplex(3);
  const Vector grad = vec({3, 1, 2});
  const auto s = lmo(D, grad);
  const auto v = away_vertex(ActiveSet({{0, 0.2}, {1, 0.3}, {2, 0.5}}), D, grad);
  CHECK(pairwise_gap(grad, s, v) == doctest::Approx(2.0));
  CHECK(pairwise_gap(Vector::Zero(3), s, v) == 0.0);
  CHECK(pairwise_gap(grad, s, s) == 0.0);
}

TEST_CASE("inexact lmo") {
  const auto D = VPolytope::simplex(3);
  const Vector grad = vec({3, 1, 2});
  const Vector x = vec({1, 0, 0});
  CHECK(inexact_lmo(D, grad, x, 0.5).atom_index == 2);
  const auto exact = inexact_lmo(D, grad, x, 1.0);
  CHECK(exact.atom_index == lmo(D, grad).atom_index);

  // zero gap: the answer still has nonnegative descent
  const Vector y = vec({0, 1, 0});
  const auto z = inexact_lmo(D, grad, y, 0.5);
  CHECK(grad.dot(y - z.vertex) >= 0.0);
}

TEST_CASE("inexact lmo always honours the accuracy guarantee") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  const auto P = VPolytope::box(3, -1, 1);
  for (auto mode : {InexactMode::adversarial, InexactMode::randomized}) {
    for (double nu : {0.1, 0.25, 0.5, 0.9}) {
      for (int t = 0; t < 200; ++t) {
        Vector grad(3), x(3);
        for (auto& gi : grad) gi = g(rng);
        for (auto& xi : x) xi = std::tanh(g(rng));
        const auto a = inexact_lmo(P, grad, x, nu, mode, &rng);
        const double gap = grad.dot(x) - lmo(P, grad).inner_product;
        check_answer(P, grad, a);
        CHECK(grad.dot(x - a.vertex) >= nu * gap - 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(inexact_lmo(P, Vector::Ones(3), Vector::Zero(3), 0.5, InexactMode::randomized),
                  ConfigError);
}

TEST_CASE("rounding-level ties resolve to the lowest index") {
  Vector g(3);
  g << -0.6, -0.6 - 1e-16, 1.2;
  const auto simplex = VPolytope::simplex(3);
  CHECK(lmo(simplex, g).atom_index == 0);
  CHECK(lmo_enumerate(simplex, g).atom_index == 0);
  ActiveSet aset;
  aset.mutable_weights()[1] = 0.5;
  aset.mutable_weights()[2] = 0.5;
  Vector h(3);
  h << 0.0, 1.0, 1.0 - 1e-16;
  CHECK(away_vertex(aset, simplex, h).atom_index == 1);
}
