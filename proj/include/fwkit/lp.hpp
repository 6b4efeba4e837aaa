#pragma once

#include "fwkit/core.hpp"

namespace fwkit::lp {

enum class Status { optimal, infeasible, unbounded };

struct Result {
  Status status = Status::infeasible;
  Vector z;
  double objective = 0.0;
};

/// Dense two-phase tableau simplex for
///   maximize c'z  subject to  Az = b,  z >= 0,
/// with Bland's rule.  Meant for the tiny feasibility problems that arise in
/// support enumeration (a handful of rows, a few dozen columns).
Result solve_standard_form(const Matrix& A, const Vector& b, const Vector& c,
                           double tol = 1e-11);

}  // namespace fwkit::lp
