#pragma once

#include <cmath>

#include <fmt/format.h>

#include "fwkit/core.hpp"
#include "fwkit/linesearch.hpp"

namespace fwkit::detail {

inline const QuadraticObjective* as_quadratic(const Objective& obj) {
  return dynamic_cast<const QuadraticObjective*>(&obj);
}

inline void check_start(const Objective& obj, const VPolytope& poly, const ActiveSet& x0) {
  if (obj.dimension() != poly.dimension()) {
    throw StructuralError("solver: objective and polytope dimensions differ");
  }
  if (x0.empty()) throw StructuralError("solver: empty starting active set");
  if (std::abs(x0.weight_sum() - 1.0) > 1e-10) {
    throw StructuralError("solver: starting weights must sum to one");
  }
  for (const auto& kv : x0.weights()) (void)poly.vertex(kv.first);
}

// Clamps gap values in [-1e-10, 0) to zero and counts the clamp.
inline double floor_gap(double g, RunTrace& trace) {
  if (g < 0.0 && g >= -1e-10) {
    ++trace.clamped_gaps;
    return 0.0;
  }
  return g;
}

inline void evaluate(const Objective& obj, const Vector& x, double& f, Vector& grad) {
  f = obj.value(x);
  grad = obj.gradient(x);
  if (!std::isfinite(f) || !grad.allFinite()) {
    throw NumericError("solver: non-finite objective value or gradient");
  }
}

inline bool is_line_search(StepRule r) {
  return r == StepRule::line_search_exact || r == StepRule::line_search_golden;
}

inline double line_search(const Objective& obj, const SolverConfig& cfg, const Vector& x,
                          const Vector& grad, const Vector& d, double gmax) {
  if (cfg.step_rule == StepRule::line_search_exact) {
    const auto* quad = as_quadratic(obj);
    if (quad == nullptr) throw ConfigError("line_search_exact needs a quadratic objective");
    return exact_quadratic(quad->A(), grad, d, gmax);
  }
  return golden_section(obj, x, d, gmax, cfg.golden_tolerance, cfg.golden_max_iters);
}

inline void check_descent(const Objective& obj, const SolverConfig& cfg, RunTrace& trace,
                          std::size_t k, double f_before, const Vector& x_after) {
  if (!is_line_search(cfg.step_rule)) return;
  const double f_after = obj.value(x_after);
  if (f_after > f_before + 1e-12 * std::max(1.0, std::abs(f_before))) {
    trace.violations.push_back(
        fmt::format("iteration {}: objective increased from {:.17g} to {:.17g}", k, f_before, f_after));
  }
}

}  // namespace fwkit::detail
