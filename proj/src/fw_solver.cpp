#include "fwkit/fw_solver.hpp"

#include <random>

#include "fwkit/afw_solver.hpp"
#include "fwkit/oracles.hpp"
#include "solver_common.hpp"

namespace fwkit {

RunTrace solve_fw(const Objective& obj, const VPolytope& poly, const ActiveSet& x0,
                  const SolverConfig& cfg, const ConstantEstimates& constants) {
  cfg.validate();
  detail::check_start(obj, poly, x0);
  if (cfg.step_rule == StepRule::analytic_cfa) {
    throw ConfigError("solve_fw: analytic_cfa is an away-steps rule");
  }
  if (cfg.step_rule == StepRule::analytic_cf && !(constants.cf > 0.0)) {
    throw ConfigError("solve_fw: analytic_cf needs a positive curvature constant");
  }
  if (cfg.step_rule == StepRule::line_search_exact && detail::as_quadratic(obj) == nullptr) {
    throw ConfigError("solve_fw: line_search_exact needs a quadratic objective");
  }
  const bool inexact = cfg.nu < 1.0;

  RunTrace trace;
  trace.solver_id = inexact ? "fw-inexact" : "fw";
  trace.seed = cfg.seed;
  std::mt19937_64 rng(cfg.seed);

  ActiveSet aset = x0;
  double f = 0.0;
  Vector grad;
  for (std::size_t k = 0;; ++k) {
    const Vector x = active_set_point(aset, poly);
    detail::evaluate(obj, x, f, grad);

    const OracleAnswer exact = lmo(poly, grad);
    const double gap = detail::floor_gap(grad.dot(x) - exact.inner_product, trace);
    const OracleAnswer s =
        inexact ? inexact_lmo(poly, grad, x, cfg.nu, cfg.inexact_mode, &rng) : exact;
    const double certified = inexact ? detail::floor_gap(grad.dot(x) - s.inner_product, trace) : gap;

    IterateRecord rec;
    rec.k = k;
    rec.x = x;
    rec.f_value = f;
    rec.gap = gap;
    rec.fw_gap = gap;
    rec.active_size = aset.size();
    rec.weight_sum = aset.weight_sum();
    rec.min_weight = aset.min_weight();

    if (certified <= cfg.gap_tolerance || k >= cfg.max_iters) {
      trace.records.push_back(std::move(rec));
      break;
    }

    const Vector d = s.vertex - x;
    double gamma = 0.0;
    switch (cfg.step_rule) {
      case StepRule::fixed_schedule: gamma = 2.0 / (static_cast<double>(k) + 2.0); break;
      case StepRule::analytic_cf: gamma = rule_fw(cfg.nu * gap, constants.cf); break;
      default: gamma = detail::line_search(obj, cfg, x, grad, d, 1.0); break;
    }

    aset = apply_fw_update(aset, s.atom_index, gamma, cfg.drop_tolerance);
    rec.step_type = StepType::fw;
    rec.gamma = gamma;
    rec.gamma_max = 1.0;
    rec.descent = certified;
    rec.atom = s.atom_index;
    trace.records.push_back(std::move(rec));
    detail::check_descent(obj, cfg, trace, k, f, active_set_point(aset, poly));
  }
  return trace;
}

}  // namespace fwkit
