#include "fwkit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "fwkit/afw_solver.hpp"
#include "fwkit/fw_solver.hpp"
#include "fwkit/geometry.hpp"

namespace fwkit {

namespace {

constexpr double kVacuous = 1e-12;

std::string num(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

std::string_view to_string(SolverKind s) { return s == SolverKind::fw ? "fw" : "afw"; }

SolverKind solver_kind_from_string(std::string_view name) {
  if (name == "fw") return SolverKind::fw;
  if (name == "afw") return SolverKind::afw;
  throw ConfigError(fmt::format("unknown solver '{}' (expected fw or afw)", name));
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::vacuous: return "VACUOUS";
  }
  return "FAIL";
}

ConstantEstimates compute_constants(const ProblemSpec& spec, const ConstantOptions& opts) {
  ConstantEstimates est;
  const auto& f = spec.objective;
  const auto& poly = spec.poly;

  const CurvatureTriple cv = curvature_quadratic_exact(f.A(), poly);
  est.cf = cv.cf;
  est.cf_minus = cv.cf_minus;
  est.cf_away = cv.cf_away;
  est.cf_prov = est.cf_minus_prov = est.cf_away_prov = Provenance::exact;

  est.mu_fw = *mu_fw_estimate(f, poly, spec.xstar, opts.samples, opts.seed, opts.exec).value;
  est.mu_fw_prov = Provenance::sampled_upper_bound;

  if (poly.size() <= kSupportEnumerationCap) {
    est.mu_away = *mu_away_estimate(f, poly, opts.samples, opts.seed, opts.exec).value;
    est.mu_away_prov = Provenance::sampled_upper_bound;
  }

  try {
    est.delta = interior_radius(spec.xstar, poly);
    est.delta_prov = Provenance::exact;
  } catch (const UnsupportedError&) {
  }

  if (opts.pdirw_override) {
    est.pdirw = *opts.pdirw_override;
    est.pdirw_prov = Provenance::sampled_upper_bound;
  } else {
    try {
      est.pdirw = pyramidal_width_estimate(poly, opts.pdirw_directions, opts.seed, opts.exec);
      est.pdirw_prov = Provenance::sampled_upper_bound;
    } catch (const UnsupportedError&) {
    }
  }

  if (est.cf > 0.0) {
    const RateConstants r = rate_constants(est, opts.nu);
    est.rho_fw = r.rho_fw;
    est.rho_fw_prov = Provenance::sampled_upper_bound;
    if (est.mu_away_prov != Provenance::unavailable) {
      est.rho_away = r.rho_away;
      est.rho_away_prov = Provenance::sampled_upper_bound;
    }
  }
  return est;
}

CertifiedConstants certified_constants(const ProblemSpec& spec, const ConstantEstimates& est, double nu) {
  CertifiedConstants c;
  c.mu = restricted_strong_convexity(spec.objective.A(), spec.poly);
  if (est.delta_prov != Provenance::unavailable) c.mu_fw = c.mu * est.delta * est.delta;
  if (est.pdirw_prov != Provenance::unavailable) c.mu_away = c.mu * est.pdirw * est.pdirw;
  if (est.cf > 0.0) c.rho_fw = std::min(nu / 2.0, nu * nu * c.mu_fw / est.cf);
  if (est.cf_away > 0.0) c.rho_away = c.mu_away / (4.0 * est.cf_away);
  return c;
}

bool ExperimentResult::all_passed() const {
  return std::none_of(audits.begin(), audits.end(),
                      [](const AuditLine& a) { return a.verdict == Verdict::fail; });
}

RateFit fit_geometric_rate(const std::vector<double>& h, const std::vector<StepType>& steps,
                           const FitOptions& opts) {
  if (h.size() != steps.size()) throw StructuralError("rate fit: series lengths differ");
  if (h.size() < 10) throw ConfigError("rate fit: need at least 10 records");
  const std::size_t last = opts.last == 0 ? h.size() : std::min(opts.last, h.size());
  RateFit fit;
  std::vector<double> xs, ys;
  std::size_t t = 0;
  for (std::size_t k = 0; k < last; ++k) {
    if (k > 0 && steps[k - 1] != StepType::drop) ++t;
    if (k < opts.first) continue;
    if (!(h[k] >= opts.floor)) {
      fit.truncated = true;
      break;
    }
    if (k > opts.first && steps[k - 1] == StepType::drop) {
      ++fit.excluded_drop_steps;
      continue;
    }
    xs.push_back(static_cast<double>(t));
    ys.push_back(std::log(h[k]));
  }
  if (xs.size() < 2) throw NumericError("rate fit: fewer than two points above the floor");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + slope * (xs[i] - mx));
    ss_res += r * r;
  }
  fit.rho_empirical = 1.0 - std::exp(slope);
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.steps_used = xs.size();
  return fit;
}

RateFit fit_geometric_rate(const RunTrace& trace, double fstar, const FitOptions& opts) {
  std::vector<double> h;
  std::vector<StepType> steps;
  for (const auto& r : trace.records) {
    h.push_back(r.f_value - fstar);
    steps.push_back(r.step_type);
  }
  return fit_geometric_rate(h, steps, opts);
}

std::vector<double> suboptimality_series(const ProblemSpec& spec, const RunTrace& trace) {
  std::vector<double> h;
  h.reserve(trace.records.size());
  for (const auto& r : trace.records) h.push_back(spec.suboptimality(r.x));
  return h;
}

RunTrace run_solver(const ProblemSpec& spec, const SolverConfig& cfg, SolverKind solver,
                    const ConstantEstimates& constants) {
  RunTrace tr = solver == SolverKind::fw
                    ? solve_fw(spec.objective, spec.poly, spec.default_start(), cfg, constants)
                    : solve_afw(spec.objective, spec.poly, spec.default_start(), cfg, constants);
  tr.problem_id = spec.name;
  return tr;
}

namespace {

bool is_line_search(StepRule r) {
  return r == StepRule::line_search_exact || r == StepRule::line_search_golden;
}

AuditLine per_step_audit(std::string name, std::string statement, const std::vector<double>& h,
                         const RunTrace& trace, double rho, bool non_drop_only) {
  AuditLine a{std::move(name), std::move(statement), 1.0 - rho, 0.0, Verdict::pass, {}};
  const double h0 = h.front();
  double worst = 0.0;
  std::size_t checked = 0;
  std::optional<std::size_t> first_bad;
  for (std::size_t k = 0; k + 1 < h.size(); ++k) {
    const StepType st = trace.records[k].step_type;
    if (st == StepType::none || (non_drop_only && st == StepType::drop)) continue;
    ++checked;
    if (h[k] > 0.0) worst = std::max(worst, (h[k + 1] - 1e-12 * h0) / h[k]);
    if (h[k + 1] > (1.0 - rho) * h[k] + 1e-12 * h0 && !first_bad) first_bad = k;
  }
  a.observed = worst;
  if (rho <= kVacuous) {
    a.verdict = Verdict::vacuous;
    a.detail = fmt::format("rate constant {:.3g} is zero; worst observed ratio {:.6f}", rho, worst);
  } else if (first_bad) {
    a.verdict = Verdict::fail;
    a.detail = fmt::format("first violation at k={} ({} steps checked)", *first_bad, checked);
  } else {
    a.detail = fmt::format("{} steps checked", checked);
  }
  return a;
}

}  // namespace

std::vector<AuditLine> audit_trace(const ProblemSpec& spec, const RunTrace& trace, SolverKind solver,
                                   const SolverConfig& cfg, const ConstantEstimates& est,
                                   const CertifiedConstants& cert) {
  std::vector<AuditLine> out;
  const auto h = suboptimality_series(spec, trace);
  const auto& recs = trace.records;

  {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < recs.size(); ++k) worst = std::max(worst, h[k] - recs[k].fw_gap);
    out.push_back({"gap-certificate", "suboptimality never exceeds the duality gap", 1e-10, worst,
                   worst <= 1e-10 ? Verdict::pass : Verdict::fail,
                   fmt::format("{} records, {} tiny negative gaps clamped", recs.size(), trace.clamped_gaps)});
  }
  {
    double worst_sum = 0.0, min_weight = 1.0;
    for (const auto& r : recs) {
      worst_sum = std::max(worst_sum, std::abs(r.weight_sum - 1.0));
      min_weight = std::min(min_weight, r.min_weight);
    }
    const bool ok = worst_sum <= 1e-10 && min_weight > cfg.drop_tolerance;
    out.push_back({"weight-invariants", "weights sum to one and stay above the drop tolerance", 1e-10,
                   worst_sum, ok ? Verdict::pass : Verdict::fail,
                   fmt::format("smallest weight {:.3g}", min_weight)});
  }
  if (is_line_search(cfg.step_rule)) {
    out.push_back({"monotone-descent", "line search never increases the objective", 0.0,
                   static_cast<double>(trace.violations.size()),
                   trace.violations.empty() ? Verdict::pass : Verdict::fail,
                   trace.violations.empty() ? std::string("no increases") : trace.violations.front()});
  }

  if (solver == SolverKind::fw) {
    if (cfg.step_rule == StepRule::analytic_cf || is_line_search(cfg.step_rule)) {
      out.push_back(per_step_audit(
          "fw-linear-rate",
          fmt::format("h[k+1] <= (1 - min(nu/2, nu^2 mu delta^2 / Cf)) h[k] + 1e-12 h[0], nu={}", cfg.nu),
          h, trace, cert.rho_fw, false));
    }
    if (cfg.step_rule == StepRule::fixed_schedule && cfg.nu == 1.0 && est.cf > 0.0) {
      double worst = 0.0;
      bool ok = true;
      for (std::size_t k = 1; k < h.size(); ++k) {
        const double bound = 2.0 * est.cf / (static_cast<double>(k) + 2.0);
        worst = std::max(worst, h[k] / bound);
        ok = ok && h[k] <= bound + 1e-12;
      }
      out.push_back({"fw-sublinear-rate", "h[k] <= 2 Cf / (k + 2) for k >= 1", 1.0, worst,
                     ok ? Verdict::pass : Verdict::fail, "observed is the largest h[k] / bound"});
    }
    return out;
  }

  {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : recs) {
      if (r.step_type != StepType::none) worst = std::min(worst, r.descent - r.gap / 2.0);
    }
    if (worst == std::numeric_limits<double>::infinity()) worst = 0.0;
    out.push_back({"gap-direction", "descent along the chosen direction is at least half the pairwise gap",
                   -1e-12, worst, worst >= -1e-12 ? Verdict::pass : Verdict::fail,
                   "observed is min(descent - gap/2)"});
  }
  if (cfg.step_rule == StepRule::analytic_cfa || is_line_search(cfg.step_rule)) {
    out.push_back(per_step_audit("afw-linear-rate",
                                 "non-drop steps: h[k+1] <= (1 - mu pdirw^2 / (4 CfA)) h[k] + 1e-12 h[0]",
                                 h, trace, cert.rho_away, true));
    if (spec.poly.kind() == PolytopeKind::simplex && est.cf_away > 0.0) {
      const double w = 2.0 / std::sqrt(static_cast<double>(spec.poly.dimension()));
      const double rho_c = cert.mu * w * w / (4.0 * est.cf_away);
      auto line = per_step_audit("afw-linear-rate-conjectured-width",
                                 "same bound with the conjectured simplex width 2/sqrt(d)", h, trace,
                                 rho_c, true);
      line.detail += fmt::format("; width estimate {:.6f} vs conjectured {:.6f}", est.pdirw, w);
      out.push_back(std::move(line));
    }
    {
      const double s0 = static_cast<double>(recs.front().active_size);
      std::size_t drops = 0;
      double worst = -std::numeric_limits<double>::infinity();
      bool ok = true;
      for (std::size_t k = 0; k < recs.size(); ++k) {
        const double bound = (s0 - 1.0 + static_cast<double>(k)) / 2.0;
        worst = std::max(worst, static_cast<double>(drops) - bound);
        ok = ok && static_cast<double>(drops) <= bound;
        drops += recs[k].step_type == StepType::drop ? 1 : 0;
      }
      out.push_back({"afw-drop-count", "drop steps among the first k are at most (|S0| - 1 + k)/2", 0.0,
                     worst, ok ? Verdict::pass : Verdict::fail,
                     fmt::format("{} drop steps in {} iterations", trace.drop_count(), recs.size() - 1)});
    }
    {
      AuditLine a{"afw-global-rate", "h[k] <= h[0] exp(-rho k / 2) + 1e-12", cert.rho_away, 0.0,
                  Verdict::pass, {}};
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < h.size(); ++k) {
        const double bound = h.front() * std::exp(-0.5 * cert.rho_away * static_cast<double>(k)) + 1e-12;
        worst = std::max(worst, h[k] - bound);
      }
      a.observed = worst;
      if (cert.rho_away <= kVacuous) {
        a.verdict = Verdict::vacuous;
        a.detail = "rate constant is zero";
      } else {
        a.verdict = worst <= 0.0 ? Verdict::pass : Verdict::fail;
        a.detail = "observed is max(h[k] - bound)";
      }
      out.push_back(std::move(a));
    }
  }
  return out;
}

ExperimentResult run_experiment(const ProblemSpec& spec, const SolverConfig& cfg, SolverKind solver,
                                const ConstantOptions& opts, bool all_checks) {
  ConstantOptions o = opts;
  o.nu = cfg.nu;
  ExperimentResult res;
  res.constants = compute_constants(spec, o);
  res.certified = certified_constants(spec, res.constants, cfg.nu);
  res.trace = run_solver(spec, cfg, solver, res.constants);
  res.audits = audit_trace(spec, res.trace, solver, cfg, res.constants, res.certified);

  if (all_checks) {
    try {
      for (const auto& b : bound_checks(res.constants, spec.objective, spec.poly, spec.xstar)) {
        res.audits.push_back({"constants: " + b.name, "inequality between constants", b.rhs, b.lhs,
                              b.pass ? Verdict::pass : Verdict::fail,
                              fmt::format("margin {:.3g}", b.margin())});
      }
    } catch (const UnsupportedError& e) {
      res.audits.push_back({"constants", "inequalities between constants", 0, 0, Verdict::vacuous, e.what()});
    }
    if (cfg.nu == 1.0 && res.constants.cf > 0.0 && solver == SolverKind::fw &&
        cfg.step_rule != StepRule::fixed_schedule) {
      const auto h = suboptimality_series(spec, res.trace);
      double worst = 0.0;
      for (std::size_t k = 1; k < h.size(); ++k) {
        worst = std::max(worst, h[k] / (2.0 * res.constants.cf / (static_cast<double>(k) + 2.0)));
      }
      res.audits.push_back({"fw-sublinear-rate", "h[k] <= 2 Cf / (k + 2) for k >= 1", 1.0, worst,
                            worst <= 1.0 + 1e-12 ? Verdict::pass : Verdict::fail,
                            "observed is the largest h[k] / bound"});
    }
  }

  if (res.trace.records.size() >= 10) {
    std::vector<StepType> steps;
    for (const auto& r : res.trace.records) steps.push_back(r.step_type);
    try {
      res.fit = fit_geometric_rate(suboptimality_series(spec, res.trace), steps);
    } catch (const NumericError&) {
    }
  }
  return res;
}

void write_trace_csv(std::ostream& out, const ProblemSpec& spec, const RunTrace& trace) {
  out << "k,f_value,h_k,gap,step_type,gamma,gamma_max,active_size\n";
  for (const auto& r : trace.records) {
    out << fmt::format("{},{},{},{},{},{},{},{}\n", r.k, num(r.f_value), num(spec.suboptimality(r.x)),
                       num(r.gap), to_string(r.step_type), num(r.gamma), num(r.gamma_max), r.active_size);
  }
}

namespace {

struct Field {
  const char* name;
  double value;
  Provenance prov;
};

std::vector<Field> fields(const ConstantEstimates& e) {
  return {{"cf", e.cf, e.cf_prov},           {"cf_minus", e.cf_minus, e.cf_minus_prov},
          {"cf_away", e.cf_away, e.cf_away_prov}, {"mu_fw", e.mu_fw, e.mu_fw_prov},
          {"mu_away", e.mu_away, e.mu_away_prov}, {"delta", e.delta, e.delta_prov},
          {"pdirw", e.pdirw, e.pdirw_prov},    {"rho_fw", e.rho_fw, e.rho_fw_prov},
          {"rho_away", e.rho_away, e.rho_away_prov}};
}

}  // namespace

void write_constants_csv(std::ostream& out, const ConstantEstimates& est) {
  const auto fs = fields(est);
  std::vector<std::string> head, row;
  for (const auto& f : fs) {
    head.emplace_back(f.name);
    row.push_back(num(f.value));
  }
  for (const auto& f : fs) {
    head.push_back(std::string(f.name) + "_provenance");
    row.emplace_back(to_string(f.prov));
  }
  out << fmt::format("{}\n{}\n", fmt::join(head, ","), fmt::join(row, ","));
}

void write_constants_text(std::ostream& out, const ConstantEstimates& est) {
  for (const auto& f : fields(est)) {
    out << fmt::format("{:<9} = {:<24} ({})\n", f.name, num(f.value), to_string(f.prov));
  }
}

void write_audits(std::ostream& out, const std::vector<AuditLine>& audits) {
  for (const auto& a : audits) {
    out << fmt::format("[{}] {}: {} | bound={} observed={} | {}\n", to_string(a.verdict), a.name,
                       a.statement, num(a.bound), num(a.observed), a.detail);
  }
}

ProblemSpec transform_problem(const ProblemSpec& spec, const Matrix& M) {
  const Eigen::Index n = spec.poly.dimension();
  if (M.rows() != n || M.cols() != n) throw StructuralError("transform: matrix has the wrong shape");
  const Eigen::FullPivLU<Matrix> lu(M);
  if (!lu.isInvertible()) throw StructuralError("transform: matrix is singular");
  std::vector<Vector> vertices;
  for (const auto& v : spec.poly.vertices()) vertices.push_back(lu.solve(v));
  std::vector<Halfspace> halfspaces;
  for (const auto& h : spec.poly.halfspaces()) halfspaces.push_back({M.transpose() * h.normal, h.offset});
  VPolytope poly(std::move(vertices), PolytopeKind::generic, std::move(halfspaces));
  const Matrix A = M.transpose() * spec.objective.A() * M;
  QuadraticObjective f(0.5 * (A + A.transpose()), M.transpose() * spec.objective.b(), spec.objective.c());
  const Vector hint = lu.solve(spec.xstar);
  return make_problem(spec.name + "@transformed", std::move(poly), std::move(f), &hint);
}

Matrix random_transform(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto orthogonal = [&] {
    Matrix G(n, n);
    for (auto& x : G.reshaped()) x = g(rng);
    return Matrix(Eigen::HouseholderQR<Matrix>(G).householderQ());
  };
  const Matrix U = orthogonal();
  const Matrix V = orthogonal();
  Vector s(n);
  for (auto& si : s) si = std::pow(10.0, u(rng));
  return U * s.asDiagonal() * V.transpose();
}

Matrix permutation_transform(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Eigen::Index> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), Eigen::Index{0});
  std::shuffle(p.begin(), p.end(), rng);
  Matrix P = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) P(i, p[static_cast<std::size_t>(i)]) = 1.0;
  return P;
}

bool InvarianceReport::constants_match() const {
  return std::abs(curvature - curvature_transformed) <= 1e-9 * std::max(1.0, std::abs(curvature));
}

bool InvarianceReport::passed(double tol) const {
  return max_deviation <= tol && step_types_match && drop_counts_match && lengths_match && constants_match();
}

InvarianceReport affine_invariance_check(const ProblemSpec& spec, const Matrix& M,
                                         const SolverConfig& cfg, SolverKind solver) {
  const ProblemSpec hat = transform_problem(spec, M);
  InvarianceReport rep;
  ConstantEstimates est, est_hat;
  const auto cv = curvature_quadratic_exact(spec.objective.A(), spec.poly);
  const auto cv_hat = curvature_quadratic_exact(hat.objective.A(), hat.poly);
  est.cf = est.cf_minus = est.cf_away = cv.cf;
  est_hat.cf = est_hat.cf_minus = est_hat.cf_away = cv_hat.cf;
  rep.curvature = cv.cf;
  rep.curvature_transformed = cv_hat.cf;

  const RunTrace a = run_solver(spec, cfg, solver, est);
  const RunTrace b = run_solver(hat, cfg, solver, est_hat);
  rep.lengths_match = a.records.size() == b.records.size();
  rep.drop_counts_match = a.drop_count() == b.drop_count();
  rep.iterations = std::min(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < rep.iterations; ++k) {
    rep.max_deviation = std::max(rep.max_deviation, (M * b.records[k].x - a.records[k].x).norm());
    if (a.records[k].step_type != b.records[k].step_type) rep.step_types_match = false;
  }
  return rep;
}

}  // namespace fwkit
