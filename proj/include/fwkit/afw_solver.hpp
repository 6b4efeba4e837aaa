#pragma once

#include <utility>

#include "fwkit/core.hpp"
#include "fwkit/oracles.hpp"

namespace fwkit {

enum class Branch { fw, away };

struct DirectionChoice {
  Vector direction;
  Branch branch = Branch::fw;
};

/// FW direction s - x unless the away direction x - v is strictly steeper
/// along the gradient.
DirectionChoice select_direction(const Vector& grad, const Vector& x, const OracleAnswer& s,
                                 const OracleAnswer& v);

/// Largest feasible away step alpha / (1 - alpha); alpha must lie in (0, 1).
double gamma_max(double alpha_v);

/// alpha_s <- (1 - gamma) alpha_s + gamma, alpha_v <- (1 - gamma) alpha_v
/// otherwise; gamma = 1 collapses the set onto s.
ActiveSet apply_fw_update(const ActiveSet& aset, std::size_t s_index, double gamma,
                          double drop_tolerance = 1e-12);

/// alpha_v <- (1 + gamma) alpha_v - gamma for the away atom and
/// (1 + gamma) alpha otherwise.  The flag reports a drop step, i.e. the away
/// atom left the active set.
std::pair<ActiveSet, bool> apply_away_update(const ActiveSet& aset, std::size_t v_index,
                                             double gamma, double gamma_max,
                                             double drop_tolerance = 1e-12);

/// Frank-Wolfe with away steps.  Step rules: line_search_exact,
/// line_search_golden, analytic_cfa (uses `constants.cf_away`).  The recorded
/// gap is the pairwise gap <-grad, s_k - v_k>, which also drives termination.
RunTrace solve_afw(const Objective& obj, const VPolytope& poly, const ActiveSet& x0,
                   const SolverConfig& cfg, const ConstantEstimates& constants = {});

}  // namespace fwkit
