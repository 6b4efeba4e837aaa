#include <doctest.h>

#include <cmath>

#include "fwkit/constants.hpp"
#include "fwkit/kernels.hpp"

using namespace fwkit;

TEST_CASE("serial and parallel reductions agree bit for bit") {
  const SampleFn fn = [](std::mt19937_64& rng, std::size_t i) -> std::optional<double> {
    const double u = uniform01(rng);
    if (i % 7 == 3) return std::nullopt;
    return std::sin(1e3 * u) * static_cast<double>(i % 13);
  };
  for (std::size_t n : {1, 63, 64, 65, 1000, 5000}) {
    for (auto op : {Reduce::min, Reduce::max}) {
      const auto a = reduce_samples_serial(n, 42, op, fn);
      const auto b = reduce_samples_parallel(n, 42, op, fn);
      CHECK(a.value == b.value);
      CHECK(a.accepted == b.accepted);
      CHECK(a.skipped == b.skipped);
      CHECK(a.accepted + a.skipped == n);
    }
  }
}

TEST_CASE("sample sets are nested") {
  std::vector<double> seen;
  const SampleFn record = [](std::mt19937_64& rng, std::size_t) -> std::optional<double> {
    return uniform01(rng);
  };
  double prev = 2.0;
  for (std::size_t n : {1, 5, 64, 100, 640}) {
    const double v = *reduce_samples_serial(n, 3, Reduce::min, record).value;
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("exceptions inside parallel regions propagate") {
  const SampleFn bad = [](std::mt19937_64&, std::size_t i) -> std::optional<double> {
    if (i == 500) throw NumericError("boom");
    return 0.0;
  };
  CHECK_THROWS_AS(reduce_samples_parallel(1000, 1, Reduce::min, bad), NumericError);
  CHECK_THROWS_AS(reduce_samples_serial(1000, 1, Reduce::min, bad), NumericError);
}

TEST_CASE("estimators agree across execution policies") {
  const auto P = VPolytope::box(3, 0, 1);
  Matrix A = Matrix::Identity(3, 3);
  A(0, 1) = A(1, 0) = 0.3;
  const QuadraticObjective q(A, Vector::Constant(3, -0.6));
  CHECK(curvature_sampled(q, P, 3000, 1, CurvatureSide::forward, Exec::serial).value ==
        curvature_sampled(q, P, 3000, 1, CurvatureSide::forward, Exec::parallel).value);
  CHECK(mu_away_estimate(q, P, 600, 1, Exec::serial).value ==
        mu_away_estimate(q, P, 600, 1, Exec::parallel).value);
  const Vector xs = Vector::Constant(3, 0.5);
  const QuadraticObjective centred(Matrix::Identity(3, 3), -xs);
  CHECK(mu_fw_estimate(centred, P, xs, 3000, 1, Exec::serial).value ==
        mu_fw_estimate(centred, P, xs, 3000, 1, Exec::parallel).value);
}

TEST_CASE("sample points lie in the polytope") {
  auto rng = chunk_generator(1, 0);
  for (const auto& P : {VPolytope::simplex(5), VPolytope::box(3, -2, 1), VPolytope::l1ball(4)}) {
    for (int i = 0; i < 500; ++i) CHECK(P.contains(sample_point(P, rng), 1e-12));
  }
}
