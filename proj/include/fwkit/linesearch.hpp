#pragma once

#include "fwkit/core.hpp"

namespace fwkit {

/// argmin over [0, gamma_max] of the quadratic along d:
/// clamp(-<grad, d> / d'Ad, 0, gamma_max).  A flat direction (d'Ad = 0) goes
/// to gamma_max when it descends and stays at 0 otherwise.
double exact_quadratic(const Matrix& A, const Vector& grad, const Vector& d, double gamma_max);

/// Golden-section search for argmin over [0, gamma_max] of obj(x + gamma d).
/// The endpoints are compared against the interior estimate, so boundary
/// minimizers are returned exactly.
double golden_section(const Objective& obj, const Vector& x, const Vector& d, double gamma_max,
                      double tol = 1e-10, std::size_t max_iters = 200);

/// min(1, gap / cf)
double rule_fw(double gap, double cf);

/// min(1, gamma_max, pair_gap / (2 cf_away))
double rule_afw(double pair_gap, double cf_away, double gamma_max);

}  // namespace fwkit
