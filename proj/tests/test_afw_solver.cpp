#include <doctest.h>

#include <cmath>

#include "fwkit/afw_solver.hpp"

using namespace fwkit;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

OracleAnswer answer(const VPolytope& P, std::size_t i, const Vector& g) {
  return OracleAnswer{i, P.vertex(i), g.dot(P.vertex(i))};
}

}  // namespace

TEST_CASE("direction selection") {
  const auto D = VPolytope::simplex(3);
  const Vector c = vec({0.5, 0.3, 0.2});
  {
    const Vector x = D.vertex(0);
    const Vector g = x - c;
    const auto s = lmo(D, g);
    CHECK(s.atom_index == 1);
    CHECK(g.dot(s.vertex - x) == doctest::Approx(-0.8));
    const auto choice = select_direction(g, x, s, answer(D, 0, g));
    CHECK(choice.branch == Branch::fw);
  }
  {
    // x is the lmo answer and the only atom: the away direction vanishes.
    const Vector x = D.vertex(0);
    const Vector g = vec({-1, 0, 0});
    const auto s = lmo(D, g);
    CHECK(select_direction(g, x, s, s).branch == Branch::fw);
  }
  {
    // <g, d_fw> = -0.25 and <g, d_away> = -0.4
    const Vector x = vec({0.5, 0.5, 0});
    const Vector g = vec({0.8, 0.0, 0.15});
    CHECK(g.dot(D.vertex(2) - x) == doctest::Approx(-0.25));
    CHECK(g.dot(x - D.vertex(0)) == doctest::Approx(-0.4));
    CHECK(select_direction(g, x, answer(D, 2, g), answer(D, 0, g)).branch == Branch::away);
  }
}

TEST_CASE("gamma_max") {
  CHECK(gamma_max(0.25) == doctest::Approx(1.0 / 3.0));
  CHECK(gamma_max(0.5) == 1.0);
  CHECK(gamma_max(1e-6) == doctest::Approx(1.000001e-6).epsilon(1e-12));
  CHECK(gamma_max(1e-3) > gamma_max(1e-4));
  CHECK_THROWS_AS(gamma_max(1.0), StructuralError);
  CHECK_THROWS_AS(gamma_max(0.0), StructuralError);
}

TEST_CASE("fw update") {
  const ActiveSet a({{0, 0.5}, {1, 0.5}});
  const auto b = apply_fw_update(a, 2, 0.2, 1e-12);
  CHECK(b.weight(0) == doctest::Approx(0.4));
  CHECK(b.weight(1) == doctest::Approx(0.4));
  CHECK(b.weight(2) == doctest::Approx(0.2));
  CHECK(apply_fw_update(a, 2, 1.0, 1e-12) == ActiveSet::vertex(2));
  CHECK(apply_fw_update(ActiveSet::vertex(0), 0, 0.3, 1e-12) == ActiveSet::vertex(0));
}

TEST_CASE("away update") {
  const ActiveSet a({{0, 0.7}, {1, 0.3}});
  const double gm = gamma_max(0.3);
  CHECK(gm == doctest::Approx(3.0 / 7.0));
  const auto [dropped_set, dropped] = apply_away_update(a, 1, gm, gm, 1e-12);
  CHECK(dropped);
  CHECK(dropped_set == ActiveSet::vertex(0));

  const auto [b, b_dropped] = apply_away_update(a, 1, 0.1, gm, 1e-12);
  CHECK_FALSE(b_dropped);
  CHECK(b.weight(0) == doctest::Approx(0.77));
  CHECK(b.weight(1) == doctest::Approx(0.23));

  const auto [c, c_dropped] = apply_away_update(a, 1, 0.0, gm, 1e-12);
  CHECK_FALSE(c_dropped);
  CHECK(c.weight(0) == doctest::Approx(0.7));

  CHECK_THROWS_AS(apply_away_update(a, 2, 0.1, gm, 1e-12), StructuralError);
  CHECK_THROWS_AS(apply_away_update(a, 1, 0.9, gm, 1e-12), StructuralError);
}

TEST_CASE("afw on an edge optimum") {
  const auto D = VPolytope::simplex(3);
  const auto f = QuadraticObjective::distance_to(vec({0.6, 0.6, -0.2}));
  const Vector xstar = vec({0.5, 0.5, 0.0});
  const double fstar = f.value(xstar);
  SolverConfig cfg;
  cfg.max_iters = 300;
  cfg.gap_tolerance = 1e-12;
  const auto tr = solve_afw(f, D, ActiveSet::vertex(2), cfg, {});
  REQUIRE(tr.records.size() >= 2);
  CHECK(tr.records.back().f_value - fstar <= 1e-12);
  std::size_t drops = 0;
  for (std::size_t k = 0; k < tr.records.size(); ++k) {
    const auto& r = tr.records[k];
    CHECK(std::abs(r.weight_sum - 1.0) <= 1e-10);
    CHECK(r.f_value - fstar <= r.fw_gap + 1e-10);
    if (r.step_type != StepType::none) CHECK(r.descent >= r.gap / 2.0 - 1e-12);
    if (r.step_type == StepType::away || r.step_type == StepType::drop) {
      CHECK(r.gamma <= r.gamma_max + 1e-12);
    }
    if (k + 1 < tr.records.size()) CHECK(tr.records[k + 1].f_value <= r.f_value + 1e-12);
    drops += (r.step_type == StepType::drop);
    CHECK(2 * drops <= k + 1);
  }
  CHECK(tr.drop_count() >= 1);
}

TEST_CASE("afw start at the optimum") {
  const auto D = VPolytope::simplex(3);
  const auto f = QuadraticObjective::distance_to(vec({0, 0, 1}));
  CHECK(solve_afw(f, D, ActiveSet::vertex(2), SolverConfig{}, {}).records.size() == 1);
}

TEST_CASE("afw analytic and golden rules converge") {
  const auto D = VPolytope::box(2, 0, 1);
  const Vector c = vec({0.3, 1.5});
  const auto f = QuadraticObjective::distance_to(c);
  const double fstar = f.value(vec({0.3, 1.0}));
  ConstantEstimates e;
  e.cf = e.cf_minus = e.cf_away = 2.0;
  for (auto rule : {StepRule::analytic_cfa, StepRule::line_search_golden}) {
    SolverConfig cfg;
    cfg.step_rule = rule;
    cfg.max_iters = 2000;
    cfg.gap_tolerance = 1e-9;
    const auto tr = solve_afw(f, D, ActiveSet::vertex(0), cfg, e);
    CHECK(tr.records.back().f_value - fstar <= 1e-8);
  }
  SolverConfig bad;
  bad.step_rule = StepRule::fixed_schedule;
  CHECK_THROWS_AS(solve_afw(f, D, ActiveSet::vertex(0), bad, e), ConfigError);
  bad.step_rule = StepRule::analytic_cfa;
  CHECK_THROWS_AS(solve_afw(f, D, ActiveSet::vertex(0), bad, {}), ConfigError);
}
