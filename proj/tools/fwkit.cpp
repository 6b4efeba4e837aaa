#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "fwkit/geometry.hpp"
#include "fwkit/harness.hpp"

using namespace fwkit;

namespace {

enum Exit { kOk = 0, kAuditFailed = 1, kConfig = 2, kNumeric = 3 };

struct RunOptions {
  std::string problem;
  std::string solver = "afw";
  std::string step_rule;
  double nu = 1.0;
  std::size_t max_iters = 1000;
  double gap_tol = 1e-12;
  std::uint64_t seed = 0;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--problem", o.problem, "problem JSON file or family:NAME:DIM:SEED")->required();
  cmd->add_option("--solver", o.solver, "fw or afw")->check(CLI::IsMember({"fw", "afw"}));
  cmd->add_option("--step-rule", o.step_rule,
                  "fixed_schedule, analytic_cf, analytic_cfa, line_search_exact or line_search_golden");
  cmd->add_option("--nu", o.nu, "multiplicative oracle accuracy in (0, 1]");
  cmd->add_option("--max-iters", o.max_iters, "iteration limit");
  cmd->add_option("--gap-tol", o.gap_tol, "stop once the certified gap is below this");
  cmd->add_option("--seed", o.seed, "seed for the inexact oracle and the samplers");
}

SolverConfig make_config(const RunOptions& o, SolverKind solver) {
  SolverConfig cfg;
  cfg.step_rule = o.step_rule.empty()
                      ? (solver == SolverKind::fw ? StepRule::analytic_cf : StepRule::line_search_exact)
                      : step_rule_from_string(o.step_rule);
  cfg.nu = o.nu;
  cfg.max_iters = o.max_iters;
  cfg.gap_tolerance = o.gap_tol;
  cfg.seed = o.seed;
  return cfg;
}

// Writes to the file, or to stdout when the path is empty or "-".
template <typename F>
void emit(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot open '{}' for writing", path));
  write(out);
}

int cmd_solve(const RunOptions& o, const std::string& out) {
  const auto spec = load_problem(o.problem);
  const SolverKind solver = solver_kind_from_string(o.solver);
  const SolverConfig cfg = make_config(o, solver);
  ConstantEstimates est;
  const auto cv = curvature_quadratic_exact(spec.objective.A(), spec.poly);
  est.cf = cv.cf;
  est.cf_minus = cv.cf_minus;
  est.cf_away = cv.cf_away;
  est.cf_prov = est.cf_minus_prov = est.cf_away_prov = Provenance::exact;
  const RunTrace tr = run_solver(spec, cfg, solver, est);
  emit(out, [&](std::ostream& os) { write_trace_csv(os, spec, tr); });
  const auto& last = tr.records.back();
  std::cerr << fmt::format("{} {} on {}: {} iterations, gap {:.3e}, h {:.3e}, {} drop steps\n", o.solver,
                           to_string(cfg.step_rule), spec.name, last.k, last.gap,
                           spec.suboptimality(last.x), tr.drop_count());
  return kOk;
}

int cmd_constants(const std::string& problem, std::size_t samples, std::uint64_t seed, std::size_t directions,
                  const std::string& out) {
  const auto spec = load_problem(problem);
  ConstantOptions opts;
  opts.samples = samples;
  opts.seed = seed;
  opts.pdirw_directions = directions;
  const auto est = compute_constants(spec, opts);
  write_constants_text(std::cout, est);
  if (!out.empty()) emit(out, [&](std::ostream& os) { write_constants_csv(os, est); });
  return kOk;
}

int cmd_pdirw(const std::string& polytope, std::size_t directions, std::uint64_t seed) {
  const auto poly = load_polytope(polytope);
  const auto res = pyramidal_width_search(poly, directions, seed);
  std::cout << fmt::format("pdirw = {:.17g}\n", res.value);
  std::cout << fmt::format("face = [{}]\n", fmt::join(res.face, ", "));
  std::cout << fmt::format("base_point = [{:.6f}]\n", fmt::join(res.base_point, ", "));
  std::cout << fmt::format("direction = [{:.6f}]\n", fmt::join(res.direction, ", "));
  std::cout << fmt::format("faces_searched = {}\nevaluations = {}\n", res.faces_searched, res.evaluations);
  return kOk;
}

int cmd_audit(const RunOptions& o, std::size_t samples, bool all_theorems) {
  const auto spec = load_problem(o.problem);
  ConstantOptions opts;
  opts.samples = samples;
  opts.seed = o.seed;
  bool ok = true;
  auto run = [&](SolverKind solver, const RunOptions& ro) {
    const auto res = run_experiment(spec, make_config(ro, solver), solver, opts, all_theorems);
    std::cout << fmt::format("== {} {} on {} ({} iterations)\n", to_string(solver),
                             to_string(make_config(ro, solver).step_rule), spec.name,
                             res.trace.records.back().k);
    write_audits(std::cout, res.audits);
    if (res.fit) {
      std::cout << fmt::format("fitted rate: rho = {:.6g}, r^2 = {:.4f}, {} points, {} drop steps excluded\n",
                               res.fit->rho_empirical, res.fit->r_squared, res.fit->steps_used,
                               res.fit->excluded_drop_steps);
    }
    ok = ok && res.all_passed();
  };
  const SolverKind main = solver_kind_from_string(o.solver);
  run(main, o);
  if (all_theorems) {
    RunOptions other = o;
    other.step_rule.clear();
    run(main == SolverKind::fw ? SolverKind::afw : SolverKind::fw, other);
  }
  return ok ? kOk : kAuditFailed;
}

Matrix parse_transform(const std::string& text, Eigen::Index n) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("transform must be scale:c, random:seed or permute:seed");
  const std::string kind = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);
  try {
    if (kind == "scale") {
      const double c = std::stod(arg);
      if (c == 0.0) throw ConfigError("scale transform needs a nonzero factor");
      return c * Matrix::Identity(n, n);
    }
    if (kind == "random") return random_transform(n, std::stoull(arg));
    if (kind == "permute") return permutation_transform(n, std::stoull(arg));
  } catch (const std::logic_error&) {
    throw ConfigError(fmt::format("transform '{}': bad argument", text));
  }
  throw ConfigError(fmt::format("unknown transform '{}'", text));
}

int cmd_invariance(RunOptions o, const std::string& transform, bool both) {
  const auto spec = load_problem(o.problem);
  const Matrix M = parse_transform(transform, spec.poly.dimension());
  bool ok = true;
  for (SolverKind s : {SolverKind::fw, SolverKind::afw}) {
    if (!both && s != solver_kind_from_string(o.solver)) continue;
    const auto rep = affine_invariance_check(spec, M, make_config(o, s), s);
    std::cout << fmt::format(
        "[{}] {}: max |M xhat - x| = {:.3e} over {} iterations, step types {}, drop counts {}, lengths {}, "
        "curvature {:.17g} vs {:.17g}\n",
        rep.passed() ? "PASS" : "FAIL", to_string(s), rep.max_deviation, rep.iterations,
        rep.step_types_match ? "match" : "differ", rep.drop_counts_match ? "match" : "differ",
        rep.lengths_match ? "match" : "differ", rep.curvature, rep.curvature_transformed);
    ok = ok && rep.passed();
  }
  return ok ? kOk : kAuditFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frank-Wolfe and away-steps Frank-Wolfe experiment driver"};
  app.require_subcommand(1);

  RunOptions solve_opts;
  std::string solve_out;
  auto* solve = app.add_subcommand("solve", "run a solver and write the trace CSV");
  add_run_options(solve, solve_opts);
  solve->add_option("--out", solve_out, "trace CSV path (stdout if omitted)");

  std::string c_problem, c_out;
  std::size_t c_samples = 20000, c_directions = 2000;
  std::uint64_t c_seed = 0;
  auto* constants = app.add_subcommand("constants", "estimate curvature, strong convexity and width constants");
  constants->add_option("--problem", c_problem, "problem JSON file or family:NAME:DIM:SEED")->required();
  constants->add_option("--samples", c_samples, "samples per sampled constant");
  constants->add_option("--seed", c_seed, "sampling seed");
  constants->add_option("--directions", c_directions, "pyramidal width directions per base point");
  constants->add_option("--out", c_out, "constants CSV path");

  std::string g_polytope;
  std::size_t g_directions = 2000;
  std::uint64_t g_seed = 0;
  auto* geometry = app.add_subcommand("geometry", "polytope geometry");
  geometry->require_subcommand(1);
  auto* pdirw = geometry->add_subcommand("pdirw", "search for the pyramidal width");
  pdirw->add_option("--polytope", g_polytope, "simplex:d, box:d or file:<problem.json>")->required();
  pdirw->add_option("--directions", g_directions, "directions per base point");
  pdirw->add_option("--seed", g_seed, "search seed");

  RunOptions audit_opts;
  std::size_t a_samples = 20000;
  bool all_theorems = false;
  auto* audit = app.add_subcommand("audit", "run a solver and check the convergence bounds");
  add_run_options(audit, audit_opts);
  audit->add_option("--samples", a_samples, "samples per sampled constant");
  audit->add_flag("--all-theorems", all_theorems, "also check the constant inequalities and the other solver");

  RunOptions inv_opts;
  inv_opts.max_iters = 200;
  inv_opts.gap_tol = 1e-9;
  std::string transform;
  auto* invariance = app.add_subcommand("invariance", "compare trajectories under a change of variables");
  add_run_options(invariance, inv_opts);
  invariance->add_option("--transform", transform, "scale:c, random:seed or permute:seed")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*solve) return cmd_solve(solve_opts, solve_out);
    if (*constants) return cmd_constants(c_problem, c_samples, c_seed, c_directions, c_out);
    if (*pdirw) return cmd_pdirw(g_polytope, g_directions, g_seed);
    if (*audit) return cmd_audit(audit_opts, a_samples, all_theorems);
    if (*invariance) return cmd_invariance(inv_opts, transform, invariance->count("--solver") == 0);
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    // Configuration, structural and unsupported-input errors all stem from
    // the request itself.
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kOk;
}
