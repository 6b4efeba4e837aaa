#include <doctest.h>

#include <cmath>
#include <random>

#include "fwkit/constants.hpp"
#include "fwkit/geometry.hpp"

using namespace fwkit;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Matrix random_psd(Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix B(n, n);
  for (auto& b : B.reshaped()) b = g(rng);
  Matrix A = B.transpose() * B / static_cast<double>(n) + 0.1 * Matrix::Identity(n, n);
  return 0.5 * (A + A.transpose());
}

double brute_force_curvature(const Matrix& A, const VPolytope& P) {
  double best = 0.0;
  for (const auto& u : P.vertices())
    for (const auto& v : P.vertices()) best = std::max(best, (u - v).dot(A * (u - v)));
  return best;
}

QuadraticObjective linear(const Vector& b) {
  return QuadraticObjective(Matrix::Zero(b.size(), b.size()), b);
}

}  // namespace

TEST_CASE("exact curvature of quadratics") {
  const auto c3 = curvature_quadratic_exact(Matrix::Identity(3, 3), VPolytope::simplex(3));
  CHECK(c3.cf == doctest::Approx(2.0));
  CHECK(c3.cf_minus == c3.cf);
  CHECK(c3.cf_away == c3.cf);
  CHECK(curvature_quadratic_exact(Matrix::Identity(2, 2), VPolytope::box(2, -1, 1)).cf ==
        doctest::Approx(8.0));
  CHECK(curvature_quadratic_exact(Matrix::Zero(3, 3), VPolytope::simplex(3)).cf == 0.0);
  for (unsigned s = 0; s < 5; ++s) {
    const Matrix A = random_psd(3, s);
    const auto P = VPolytope::box(3, 0, 1);
    CHECK(curvature_quadratic_exact(A, P).cf == doctest::Approx(brute_force_curvature(A, P)));
  }
}

TEST_CASE("exact curvature is invariant under reparameterization") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  const Matrix A = random_psd(3, 1);
  const auto P = VPolytope::simplex(3);
  Matrix M(3, 3);
  for (auto& m : M.reshaped()) m = g(rng);
  M += 3.0 * Matrix::Identity(3, 3);
  std::vector<Vector> mapped;
  for (const auto& v : P.vertices()) mapped.push_back(M.inverse() * v);
  const Matrix Ahat = M.transpose() * A * M;
  CHECK(curvature_quadratic_exact(0.5 * (Ahat + Ahat.transpose()), VPolytope(mapped)).cf ==
        doctest::Approx(curvature_quadratic_exact(A, P).cf).epsilon(1e-9));
}

TEST_CASE("sampled curvature") {
  const auto D = VPolytope::simplex(3);
  const auto f = QuadraticObjective::distance_to(vec({0.5, 0.3, 0.2}));
  const double v = *curvature_sampled(f, D, 100000, 1).value;
  CHECK(v >= 2.0 - 0.05);
  CHECK(v <= 2.0 + 1e-9);
  CHECK(*curvature_sampled(linear(vec({1, 2, 3})), D, 1000, 1).value <= 1e-12);
  CHECK(*curvature_sampled(f, D, 1, 9).value == *curvature_sampled(f, D, 1, 9).value);
  CHECK_THROWS_AS(curvature_sampled(f, D, 0, 1), ConfigError);
}

TEST_CASE("sampled curvature never exceeds the exact value") {
  for (unsigned s = 0; s < 5; ++s) {
    const QuadraticObjective q(random_psd(3, s), Vector::Constant(3, 0.2));
    for (const auto& P : {VPolytope::simplex(3), VPolytope::box(3, 0, 1)}) {
      const double exact = curvature_quadratic_exact(q.A(), P).cf;
      for (auto side : {CurvatureSide::forward, CurvatureSide::backward}) {
        CHECK(*curvature_sampled(q, P, 2000, s, side).value <= exact + 1e-9);
      }
    }
  }
}

TEST_CASE("interior strong convexity estimate") {
  const auto D = VPolytope::simplex(3);
  const Vector c = vec({0.5, 0.3, 0.2});
  const auto f = QuadraticObjective::distance_to(c);
  const double delta = interior_radius(c, D);
  const auto est = mu_fw_estimate(f, D, c, 20000, 3);
  CHECK(*est.value >= 1.0 * delta * delta);
  CHECK(*est.value <= 2.0 + 1e-9);

  const Vector e1 = D.vertex(0);
  const auto g = QuadraticObjective::distance_to(vec({2, 0, 0}));
  const double coarse = *mu_fw_estimate(g, D, e1, 100, 3).value;
  const double fine = *mu_fw_estimate(g, D, e1, 20000, 3).value;
  CHECK(fine <= coarse);
  CHECK(fine < 1e-2);

  const auto lin = linear(vec({0, 1, 1}));
  CHECK(*mu_fw_estimate(lin, D, e1, 500, 3).value <= 1e-12);

  CHECK_THROWS_AS(mu_fw_estimate(f, D, e1, 10, 3), ConfigError);
}

TEST_CASE("away strong convexity estimate") {
  const auto D = VPolytope::simplex(3);
  const auto f = QuadraticObjective::distance_to(vec({0.6, 0.6, -0.2}));
  const double cf = curvature_quadratic_exact(f.A(), D).cf;
  const double pdirw = pyramidal_width_estimate(D, 2000, 1);
  const double mu_a = *mu_away_estimate(f, D, 3000, 4).value;
  CHECK(mu_a <= cf + 1e-9);
  CHECK(mu_a >= 1.0 * pdirw * pdirw);
  CHECK(*mu_away_estimate(linear(vec({1, 0, 2})), D, 300, 4).value == 0.0);
  CHECK_THROWS_AS(mu_away_estimate(f, VPolytope::box(5, 0, 1), 10, 1), UnsupportedError);
}

TEST_CASE("estimates are monotone in the sample count") {
  const auto P = VPolytope::box(3, 0, 1);
  const QuadraticObjective q(random_psd(3, 4), Vector::Constant(3, -0.4));
  const Vector xs = vec({0.5, 0.5, 0.5});
  const QuadraticObjective centred(Matrix::Identity(3, 3), -xs);
  double prev_fw = std::numeric_limits<double>::infinity();
  double prev_away = prev_fw;
  for (std::size_t n : {1, 10, 64, 65, 200, 1000}) {
    const double fw = *mu_fw_estimate(centred, P, xs, n, 8).value;
    const double away = mu_away_estimate(q, P, n, 8).value.value_or(prev_away);
    CHECK(fw <= prev_fw);
    CHECK(away <= prev_away);
    prev_fw = fw;
    prev_away = away;
  }
}

TEST_CASE("rate constants") {
  ConstantEstimates e;
  e.cf = e.cf_minus = e.cf_away = 2.0;
  e.mu_fw = 2.0;
  e.mu_away = 2.0;
  auto r = rate_constants(e, 1.0);
  CHECK(r.rho_fw == 0.5);
  CHECK(r.rho_away == 0.25);
  r = rate_constants(e, 0.5);
  CHECK(r.rho_fw == 0.25);
  e.cf = 0.0;
  CHECK_THROWS_AS(rate_constants(e, 1.0), ConfigError);
  e.cf = 2.0;
  CHECK_THROWS_AS(rate_constants(e, 0.0), ConfigError);
}

TEST_CASE("bound checks on the interior reference instance") {
  const auto D = VPolytope::simplex(3);
  const Vector c = vec({0.5, 0.3, 0.2});
  const auto f = QuadraticObjective::distance_to(c);
  ConstantEstimates e;
  const auto cv = curvature_quadratic_exact(f.A(), D);
  e.cf = cv.cf;
  e.cf_minus = cv.cf_minus;
  e.cf_away = cv.cf_away;
  e.mu_fw = *mu_fw_estimate(f, D, c, 5000, 1).value;
  e.mu_away = *mu_away_estimate(f, D, 2000, 1).value;
  e.delta = interior_radius(c, D);
  e.pdirw = pyramidal_width_estimate(D, 2000, 1);
  const auto checks = bound_checks(e, f, D, c);
  REQUIRE(checks.size() == 5);
  for (const auto& b : checks) CHECK_MESSAGE(b.pass, b.name);
  // curvature equals diam^2 * lambda_max for the identity on the simplex
  CHECK(checks[0].lhs == doctest::Approx(checks[0].rhs).epsilon(1e-9));
  CHECK(D.diameter() * D.diameter() == doctest::Approx(2.0));

  // linear objective: the strong convexity checks hold at zero
  const auto lin = linear(vec({1, 0, 0}));
  ConstantEstimates z;
  const auto zc = bound_checks(z, lin, D, D.vertex(1));
  CHECK(zc[2].pass);
  CHECK(zc[3].pass);
}

TEST_CASE("restricted strong convexity") {
  // A = diag(1, 0) is singular on R^2 but positive along the segment e1 -> e2.
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = 1.0;
  CHECK(restricted_strong_convexity(A, VPolytope::simplex(2)) == doctest::Approx(0.5));
  CHECK(restricted_strong_convexity(Matrix::Identity(3, 3), VPolytope::simplex(3)) ==
        doctest::Approx(1.0));
  CHECK(lipschitz_constant(2.0 * Matrix::Identity(2, 2)) == doctest::Approx(2.0));
}
