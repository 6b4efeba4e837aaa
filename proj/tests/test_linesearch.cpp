#include <doctest.h>

#include <random>

#include "fwkit/linesearch.hpp"

using namespace fwkit;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("exact quadratic line search") {
  const Matrix I = Matrix::Identity(2, 2);
  const Vector grad = vec({1, 0});
  const Vector d = vec({-1, 0});
  CHECK(exact_quadratic(I, grad, d, 1.0) == doctest::Approx(1.0));
  CHECK(exact_quadratic(I, grad, d, 0.5) == doctest::Approx(0.5));
  CHECK(exact_quadratic(I, grad, -d, 1.0) == 0.0);
  CHECK(exact_quadratic(Matrix::Zero(2, 2), grad, d, 0.7) == 0.7);
}

TEST_CASE("golden section basics") {
  const auto f = QuadraticObjective::distance_to(vec({0.3, 0.0}));
  const Vector x = vec({1, 0});
  CHECK(golden_section(f, x, vec({-1, 0}), 1.0) == doctest::Approx(0.7).epsilon(1e-8));

  const FunctionObjective down(
      1, [](const Vector& y) { return -y(0); }, [](const Vector&) { return vec({-1}); });
  CHECK(golden_section(down, vec({0}), vec({1}), 0.8) == doctest::Approx(0.8).epsilon(1e-10));
  const FunctionObjective up(
      1, [](const Vector& y) { return y(0); }, [](const Vector&) { return vec({1}); });
  CHECK(golden_section(up, vec({0}), vec({1}), 0.8) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("golden section agrees with exact search on random quadratic segments") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (int t = 0; t < 500; ++t) {
    Matrix B(4, 4);
    for (auto& b : B.reshaped()) b = g(rng);
    const Matrix A = B.transpose() * B;
    Vector b(4), x(4), d(4);
    for (auto& v : b) v = g(rng);
    for (auto& v : x) v = g(rng);
    for (auto& v : d) v = g(rng);
    const QuadraticObjective q(0.5 * (A + A.transpose()), b);
    const double gmax = u(rng);
    const double exact = exact_quadratic(q.A(), q.gradient(x), d, gmax);
    const double golden = golden_section(q, x, d, gmax, 1e-10, 200);
    CHECK(std::abs(exact - golden) <= 1e-7);
  }
}

TEST_CASE("analytic step rules") {
  CHECK(rule_fw(0.0, 2.0) == 0.0);
  CHECK(rule_fw(2.0, 2.0) == 1.0);
  CHECK(rule_fw(1.0, 4.0) == 0.25);
  CHECK_THROWS_AS(rule_fw(1.0, 0.0), ConfigError);
  CHECK(rule_afw(4.0, 1.0, 10.0) == 1.0);
  CHECK(rule_afw(1.0, 1.0, 0.2) == 0.2);
  CHECK(rule_afw(1.0, 2.0, 1.0) == 0.25);
  CHECK_THROWS_AS(rule_afw(1.0, -1.0, 1.0), ConfigError);
  for (double gap : {0.0, 0.1, 1.0, 50.0}) {
    for (double gm : {0.01, 0.5, 3.0}) {
      const double r = rule_afw(gap, 1.0, gm);
      CHECK(r >= 0.0);
      CHECK(r <= std::min(1.0, gm));
    }
  }
}
