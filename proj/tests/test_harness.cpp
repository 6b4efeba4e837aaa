#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fwkit/harness.hpp"

using namespace fwkit;

namespace {

ConstantOptions quick_constants() {
  ConstantOptions o;
  o.samples = 2000;
  o.pdirw_directions = 200;
  return o;
}

SolverConfig config(StepRule rule, std::size_t iters, double tol = 1e-12) {
  SolverConfig c;
  c.step_rule = rule;
  c.max_iters = iters;
  c.gap_tolerance = tol;
  return c;
}

const AuditLine& find(const std::vector<AuditLine>& audits, const std::string& name) {
  for (const auto& a : audits)
    if (a.name == name) return a;
  FAIL("missing audit line " << name);
  return audits.front();
}

}  // namespace

TEST_CASE("rate fit on an exactly geometric series") {
  std::vector<double> h;
  for (int k = 0; k < 50; ++k) h.push_back(std::pow(0.9, k));
  const std::vector<StepType> steps(h.size(), StepType::fw);
  const RateFit fit = fit_geometric_rate(h, steps);
  CHECK(std::abs(fit.rho_empirical - 0.1) <= 1e-9);
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK(fit.steps_used == 50);
  CHECK_FALSE(fit.truncated);
}

TEST_CASE("rate fit on a constant series") {
  const std::vector<double> h(20, 0.3);
  const std::vector<StepType> steps(h.size(), StepType::away);
  const RateFit fit = fit_geometric_rate(h, steps);
  CHECK(fit.rho_empirical == 0.0);
  CHECK(fit.r_squared == 1.0);
}

TEST_CASE("rate fit skips drop steps and stops at the floor") {
  // Every third step is a drop that leaves h unchanged; the remaining steps
  // contract by 0.8, so the fit over non-drop steps is exact.
  std::vector<double> h;
  std::vector<StepType> steps;
  double v = 1.0;
  for (int k = 0; k < 300; ++k) {
    h.push_back(v);
    const bool drop = k % 3 == 2;
    steps.push_back(drop ? StepType::drop : StepType::fw);
    if (!drop) v *= 0.8;
  }
  const RateFit fit = fit_geometric_rate(h, steps);
  CHECK(std::abs(fit.rho_empirical - 0.2) <= 1e-9);
  CHECK(fit.excluded_drop_steps > 0);
  CHECK(fit.truncated);
  CHECK(fit.r_squared >= 0.0);
  CHECK(fit.r_squared <= 1.0);
}

TEST_CASE("rate fit preconditions") {
  CHECK_THROWS_AS(fit_geometric_rate(std::vector<double>(5, 1.0), std::vector<StepType>(5, StepType::fw)),
                  ConfigError);
  std::vector<double> tiny(12, 1e-20);
  CHECK_THROWS_AS(fit_geometric_rate(tiny, std::vector<StepType>(12, StepType::fw)), NumericError);
  FitOptions window;
  window.first = 5;
  window.last = 15;
  std::vector<double> h;
  for (int k = 0; k < 30; ++k) h.push_back(k < 10 ? 1.0 : std::pow(0.5, k));
  const RateFit fit = fit_geometric_rate(h, std::vector<StepType>(30, StepType::fw), window);
  CHECK(fit.steps_used == 10);
}

TEST_CASE("interior FW with the analytic step passes the linear rate audit") {
  for (Eigen::Index n : {3, 5}) {
    const auto spec = generate_problem("simplex_interior", n, 0);
    const auto res = run_experiment(spec, config(StepRule::analytic_cf, 300), SolverKind::fw, quick_constants());
    CHECK(find(res.audits, "fw-linear-rate").verdict == Verdict::pass);
    CHECK(find(res.audits, "gap-certificate").verdict == Verdict::pass);
    CHECK(res.all_passed());
    CHECK(res.certified.rho_fw > 0.0);
  }
}

TEST_CASE("AFW on a face optimum passes the away-step audits") {
  const auto spec = generate_problem("simplex_face", 3, 0);
  const auto res =
      run_experiment(spec, config(StepRule::line_search_exact, 300), SolverKind::afw, quick_constants());
  CHECK(find(res.audits, "afw-linear-rate").verdict == Verdict::pass);
  CHECK(find(res.audits, "afw-drop-count").verdict == Verdict::pass);
  CHECK(find(res.audits, "afw-global-rate").verdict == Verdict::pass);
  CHECK(find(res.audits, "gap-direction").verdict == Verdict::pass);
  CHECK(res.all_passed());
}

TEST_CASE("AFW fitted rate is at least the certified rate") {
  int fitted = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto spec = generate_problem("simplex_face", 5, seed);
    const auto res =
        run_experiment(spec, config(StepRule::line_search_exact, 300), SolverKind::afw, quick_constants());
    CHECK(res.all_passed());
    if (!res.fit) continue;
    ++fitted;
    CHECK(res.fit->rho_empirical >= res.certified.rho_away - 1e-6);
    CHECK(res.fit->r_squared >= 0.0);
  }
  CHECK(fitted > 0);
}

TEST_CASE("FW on a face optimum reports the interior bound as vacuous") {
  const auto spec = generate_problem("simplex_face", 3, 0);
  const auto res =
      run_experiment(spec, config(StepRule::line_search_exact, 1000), SolverKind::fw, quick_constants());
  const auto& line = find(res.audits, "fw-linear-rate");
  CHECK(line.verdict == Verdict::vacuous);
  FitOptions tail;
  tail.first = 800;
  tail.last = 1001;
  const RateFit fit = fit_geometric_rate(suboptimality_series(spec, res.trace),
                                         std::vector<StepType>(res.trace.records.size(), StepType::fw), tail);
  CHECK(1.0 - fit.rho_empirical > 0.99);
}

TEST_CASE("all-theorems mode adds the constant inequalities") {
  const auto spec = generate_problem("random_psd_simplex", 3, 4);
  const auto res =
      run_experiment(spec, config(StepRule::line_search_exact, 100), SolverKind::afw, quick_constants(), true);
  int constant_lines = 0;
  for (const auto& a : res.audits) {
    if (a.name.rfind("constants: ", 0) == 0) {
      ++constant_lines;
      CHECK_MESSAGE(a.verdict == Verdict::pass, a.name);
    }
  }
  CHECK(constant_lines == 5);
}

TEST_CASE("trace CSV output is byte-identical across reruns") {
  const auto spec = generate_problem("random_psd_box", 3, 2);
  auto render = [&] {
    const auto res =
        run_experiment(spec, config(StepRule::line_search_golden, 80), SolverKind::afw, quick_constants());
    std::ostringstream trace, consts;
    write_trace_csv(trace, spec, res.trace);
    write_constants_csv(consts, res.constants);
    return trace.str() + consts.str();
  };
  const std::string a = render();
  CHECK(a == render());
  CHECK(a.rfind("k,f_value,h_k,gap,step_type,gamma,gamma_max,active_size\n", 0) == 0);
  CHECK(a.find("cf,cf_minus,cf_away,mu_fw,mu_away,delta,pdirw,rho_fw,rho_away,cf_provenance") != std::string::npos);
}

TEST_CASE("constants report marks provenance") {
  const auto spec = generate_problem("simplex_interior", 3, 0);
  const auto est = compute_constants(spec, quick_constants());
  CHECK(est.cf_prov == Provenance::exact);
  CHECK(est.mu_fw_prov == Provenance::sampled_upper_bound);
  CHECK(est.pdirw_prov == Provenance::sampled_upper_bound);
  CHECK(est.cf == doctest::Approx(2.0));
  std::ostringstream text;
  write_constants_text(text, est);
  CHECK(text.str().find("(exact)") != std::string::npos);
}

TEST_CASE("unsupported geometry is marked unavailable") {
  const auto spec = generate_problem("box_interior", 5, 0);
  const auto est = compute_constants(spec, quick_constants());
  CHECK(est.mu_away_prov == Provenance::unavailable);
  CHECK(est.pdirw_prov == Provenance::unavailable);
  CHECK(est.rho_away_prov == Provenance::unavailable);
  CHECK(est.cf_prov == Provenance::exact);
}

TEST_CASE("affine invariance examples") {
  SolverConfig cfg = config(StepRule::line_search_exact, 200, 1e-9);
  for (const char* fam : {"simplex_interior", "simplex_face"}) {
    const auto spec = generate_problem(fam, 3, 0);
    const Matrix transforms[] = {2.0 * Matrix::Identity(3, 3), random_transform(3, 7),
                                 permutation_transform(3, 5)};
    for (const auto& M : transforms) {
      for (SolverKind s : {SolverKind::fw, SolverKind::afw}) {
        CAPTURE(std::string(fam));
        const auto rep = affine_invariance_check(spec, M, cfg, s);
        CHECK(rep.max_deviation <= 1e-8);
        CHECK(rep.step_types_match);
        CHECK(rep.drop_counts_match);
        CHECK(rep.lengths_match);
        CHECK(rep.constants_match());
        CHECK(rep.passed());
      }
    }
  }
}

TEST_CASE("random transforms are well conditioned") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix M = random_transform(4, seed);
    Eigen::JacobiSVD<Matrix> svd(M);
    const auto s = svd.singularValues();
    CHECK(s.maxCoeff() / s.minCoeff() <= 10.0 + 1e-9);
    CHECK(s.minCoeff() >= 1.0 - 1e-9);
  }
  const Matrix P = permutation_transform(5, 3);
  CHECK((P * P.transpose() - Matrix::Identity(5, 5)).norm() == 0.0);
}

TEST_CASE("transformed problem keeps the objective values") {
  const auto spec = generate_problem("random_psd_simplex", 3, 1);
  const Matrix M = random_transform(3, 2);
  const auto hat = transform_problem(spec, M);
  CHECK(hat.fstar == doctest::Approx(spec.fstar).epsilon(1e-10));
  for (std::size_t i = 0; i < spec.poly.size(); ++i)
    CHECK((M * hat.poly.vertex(i) - spec.poly.vertex(i)).norm() < 1e-12);
  CHECK_THROWS_AS(transform_problem(spec, Matrix::Zero(3, 3)), StructuralError);
}
