#include "fwkit/afw_solver.hpp"

#include <fmt/format.h>

#include "solver_common.hpp"

namespace fwkit {

DirectionChoice select_direction(const Vector& grad, const Vector& x, const OracleAnswer& s,
                                 const OracleAnswer& v) {
  Vector d_fw = s.vertex - x;
  Vector d_away = x - v.vertex;
  if (grad.dot(d_fw) <= grad.dot(d_away)) return {std::move(d_fw), Branch::fw};
  return {std::move(d_away), Branch::away};
}

double gamma_max(double alpha_v) {
  if (!(alpha_v > 0.0) || alpha_v >= 1.0) {
    throw StructuralError(fmt::format("gamma_max: away weight {} outside (0, 1)", alpha_v));
  }
  return alpha_v / (1.0 - alpha_v);
}

ActiveSet apply_fw_update(const ActiveSet& aset, std::size_t s_index, double gamma,
                          double drop_tolerance) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw StructuralError(fmt::format("apply_fw_update: step {} outside [0, 1]", gamma));
  }
  if (gamma >= 1.0) return ActiveSet::vertex(s_index);
  ActiveSet out = aset;
  auto& w = out.mutable_weights();
  for (auto& kv : w) kv.second *= (1.0 - gamma);
  w[s_index] += gamma;
  out.prune(drop_tolerance);
  return out;
}

std::pair<ActiveSet, bool> apply_away_update(const ActiveSet& aset, std::size_t v_index,
                                             double gamma, double gmax, double drop_tolerance) {
  if (!aset.contains(v_index)) {
    throw StructuralError(fmt::format("apply_away_update: atom {} is not active", v_index));
  }
  if (gamma < 0.0 || gamma > gmax + 1e-12) {
    throw StructuralError(
        fmt::format("apply_away_update: step {} outside [0, {}]", gamma, gmax));
  }
  ActiveSet out = aset;
  auto& w = out.mutable_weights();
  for (auto& kv : w) kv.second *= (1.0 + gamma);
  w[v_index] -= gamma;
  bool dropped = gamma >= gmax - 1e-12;
  if (dropped) w.erase(v_index);
  out.prune(drop_tolerance);
  if (!out.contains(v_index)) dropped = true;
  return {std::move(out), dropped};
}

RunTrace solve_afw(const Objective& obj, const VPolytope& poly, const ActiveSet& x0,
                   const SolverConfig& cfg, const ConstantEstimates& constants) {
  cfg.validate();
  detail::check_start(obj, poly, x0);
  switch (cfg.step_rule) {
    case StepRule::line_search_exact:
      if (detail::as_quadratic(obj) == nullptr) {
        throw ConfigError("solve_afw: line_search_exact needs a quadratic objective");
      }
      break;
    case StepRule::line_search_golden: break;
    case StepRule::analytic_cfa:
      if (!(constants.cf_away > 0.0)) {
        throw ConfigError("solve_afw: analytic_cfa needs a positive away curvature constant");
      }
      break;
    default: throw ConfigError("solve_afw: unsupported step rule for away steps");
  }

  RunTrace trace;
  trace.solver_id = "afw";
  trace.seed = cfg.seed;

  ActiveSet aset = x0;
  double f = 0.0;
  Vector grad;
  for (std::size_t k = 0;; ++k) {
    bool retried = false;
    for (;;) {
      const Vector x = active_set_point(aset, poly);
      detail::evaluate(obj, x, f, grad);
      const OracleAnswer s = lmo(poly, grad);
      const OracleAnswer v = away_vertex(aset, poly, grad);
      const double fw = detail::floor_gap(grad.dot(x) - s.inner_product, trace);
      const double pair = detail::floor_gap(pairwise_gap(grad, s, v), trace);

      IterateRecord rec;
      rec.k = k;
      rec.x = x;
      rec.f_value = f;
      rec.gap = pair;
      rec.fw_gap = fw;
      rec.active_size = aset.size();
      rec.weight_sum = aset.weight_sum();
      rec.min_weight = aset.min_weight();

      if (pair <= cfg.gap_tolerance || k >= cfg.max_iters) {
        trace.records.push_back(std::move(rec));
        return trace;
      }

      const DirectionChoice choice = select_direction(grad, x, s, v);
      double gmax = 1.0;
      if (choice.branch == Branch::away) {
        gmax = gamma_max(aset.weight(v.atom_index));
        if (gmax < 1e-14 && !retried) {
          // Numerical dust on the away atom: prune it and redo the iteration.
          aset.erase(v.atom_index);
          aset.prune(cfg.drop_tolerance);
          retried = true;
          continue;
        }
      }

      double gamma = 0.0;
      if (cfg.step_rule == StepRule::analytic_cfa) {
        gamma = rule_afw(pair, constants.cf_away, gmax);
      } else {
        gamma = detail::line_search(obj, cfg, x, grad, choice.direction, gmax);
      }

      if (choice.branch == Branch::fw) {
        aset = apply_fw_update(aset, s.atom_index, gamma, cfg.drop_tolerance);
        rec.step_type = StepType::fw;
        rec.atom = s.atom_index;
      } else {
        auto [next, dropped] =
            apply_away_update(aset, v.atom_index, gamma, gmax, cfg.drop_tolerance);
        aset = std::move(next);
        rec.step_type = dropped ? StepType::drop : StepType::away;
        rec.atom = v.atom_index;
      }
      rec.gamma = gamma;
      rec.gamma_max = gmax;
      rec.descent = -grad.dot(choice.direction);
      trace.records.push_back(std::move(rec));
      detail::check_descent(obj, cfg, trace, k, f, active_set_point(aset, poly));
      break;
    }
  }
}

}  // namespace fwkit
