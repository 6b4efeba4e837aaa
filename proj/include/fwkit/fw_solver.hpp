#pragma once

#include "fwkit/core.hpp"

namespace fwkit {

/// Standard Frank-Wolfe: every step moves toward the LMO vertex.
///
/// Step rules: fixed_schedule (2/(k+2)), analytic_cf (min{1, nu g_k / Cf}
/// using `constants.cf`), line_search_exact (quadratics only) and
/// line_search_golden.  With cfg.nu < 1 the LMO is replaced by the inexact
/// oracle; the run stops once the oracle's own certificate <grad, x - s> drops
/// to cfg.gap_tolerance, while the recorded `gap` stays the exact FW gap.
RunTrace solve_fw(const Objective& obj, const VPolytope& poly, const ActiveSet& x0,
                  const SolverConfig& cfg, const ConstantEstimates& constants = {});

}  // namespace fwkit
