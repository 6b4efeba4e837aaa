#include <doctest.h>

#include "fwkit/lp.hpp"

using namespace fwkit;

TEST_CASE("lp: small maximization") {
  // max x + y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
  Matrix A(2, 4);
  A << 1, 2, 1, 0, 3, 1, 0, 1;
  Vector b(2);
  b << 4, 6;
  Vector c(4);
  c << 1, 1, 0, 0;
  const auto r = lp::solve_standard_form(A, b, c);
  REQUIRE(r.status == lp::Status::optimal);
  CHECK(r.objective == doctest::Approx(2.8));
  CHECK(r.z(0) == doctest::Approx(1.6));
  CHECK(r.z(1) == doctest::Approx(1.2));
}

TEST_CASE("lp: infeasible and unbounded") {
  Matrix A(1, 2);
  A << 1, 1;
  Vector b(1);
  b << -1;
  CHECK(lp::solve_standard_form(A, b, Vector::Zero(2)).status == lp::Status::infeasible);

  Matrix U(1, 2);
  U << 1, -1;
  Vector bu(1);
  bu << 0;
  Vector cu(2);
  cu << 1, 0;
  CHECK(lp::solve_standard_form(U, bu, cu).status == lp::Status::unbounded);
}

TEST_CASE("lp: redundant equality rows") {
  Matrix A(3, 3);
  A << 1, 1, 1, 2, 2, 2, 1, 0, 0;
  Vector b(3);
  b << 1, 2, 0.25;
  Vector c(3);
  c << 0, 1, 0;
  const auto r = lp::solve_standard_form(A, b, c);
  REQUIRE(r.status == lp::Status::optimal);
  CHECK(r.objective == doctest::Approx(0.75));
  CHECK((A * r.z - b).norm() < 1e-12);
}

TEST_CASE("lp: degenerate vertex does not cycle") {
  // Classic degenerate example; Bland's rule must terminate.
  Matrix A(3, 7);
  A << 0.5, -5.5, -2.5, 9, 1, 0, 0,
       0.5, -1.5, -0.5, 1, 0, 1, 0,
       1, 0, 0, 0, 0, 0, 1;
  Vector b(3);
  b << 0, 0, 1;
  Vector c(7);
  c << 10, -57, -9, -24, 0, 0, 0;
  const auto r = lp::solve_standard_form(A, b, c);
  REQUIRE(r.status == lp::Status::optimal);
  CHECK(r.objective == doctest::Approx(1.0));
}
