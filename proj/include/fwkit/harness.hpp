#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fwkit/constants.hpp"
#include "fwkit/core.hpp"
#include "fwkit/problems.hpp"

namespace fwkit {

enum class SolverKind { fw, afw };
std::string_view to_string(SolverKind s);
SolverKind solver_kind_from_string(std::string_view name);

struct ConstantOptions {
  std::size_t samples = 20000;
  std::uint64_t seed = 0;
  /// Directions per base point for the pyramidal-width search.
  std::size_t pdirw_directions = 2000;
  /// Skip the search and use this width (e.g. when shared across instances).
  std::optional<double> pdirw_override;
  double nu = 1.0;
  Exec exec = Exec::parallel;
};

/// Exact curvature, sampled strong-convexity estimates, interior radius,
/// pyramidal width and the derived rates.  Quantities that cannot be computed
/// for the instance are marked unavailable.
ConstantEstimates compute_constants(const ProblemSpec& spec, const ConstantOptions& opts = {});

/// Certified constants used by the audits: mu * delta^2 for the interior rate
/// and mu * pdirw^2 for the away-steps rate, with mu the strong convexity
/// modulus on the affine hull.
struct CertifiedConstants {
  double mu = 0.0;
  double mu_fw = 0.0;
  double mu_away = 0.0;
  double rho_fw = 0.0;
  double rho_away = 0.0;
};
CertifiedConstants certified_constants(const ProblemSpec& spec, const ConstantEstimates& est, double nu);

enum class Verdict { pass, fail, vacuous };
std::string_view to_string(Verdict v);

struct AuditLine {
  std::string name;
  /// The statement being checked, in words.
  std::string statement;
  double bound = 0.0;
  double observed = 0.0;
  Verdict verdict = Verdict::pass;
  std::string detail;
};

struct RateFit {
  double rho_empirical = 0.0;
  double r_squared = 1.0;
  std::size_t steps_used = 0;
  std::size_t excluded_drop_steps = 0;
  /// True when the fit stopped at the floating-point floor.
  bool truncated = false;
};

struct FitOptions {
  /// Records [first, last) are considered; last = 0 means the whole trace.
  std::size_t first = 0;
  std::size_t last = 0;
  double floor = 1e-13;
};

/// Least-squares fit of log h_k against the number of non-drop steps taken
/// before k, over records that are not drop steps.  rho = 1 - exp(slope).
RateFit fit_geometric_rate(const std::vector<double>& h, const std::vector<StepType>& steps,
                           const FitOptions& opts = {});
RateFit fit_geometric_rate(const RunTrace& trace, double fstar, const FitOptions& opts = {});

/// Suboptimality of every record, computed accurately from the optimum.
std::vector<double> suboptimality_series(const ProblemSpec& spec, const RunTrace& trace);

struct ExperimentResult {
  RunTrace trace;
  ConstantEstimates constants;
  CertifiedConstants certified;
  std::vector<AuditLine> audits;
  std::optional<RateFit> fit;
  [[nodiscard]] bool all_passed() const;
};

RunTrace run_solver(const ProblemSpec& spec, const SolverConfig& cfg, SolverKind solver,
                    const ConstantEstimates& constants);

/// Runs the solver and appends the audits that apply to it.  With
/// all_checks, the constant inequalities and the sublinear rate check are
/// added as well.
ExperimentResult run_experiment(const ProblemSpec& spec, const SolverConfig& cfg, SolverKind solver,
                                const ConstantOptions& opts = {}, bool all_checks = false);

/// Audits of an existing trace (used by run_experiment).
std::vector<AuditLine> audit_trace(const ProblemSpec& spec, const RunTrace& trace, SolverKind solver,
                                   const SolverConfig& cfg, const ConstantEstimates& est,
                                   const CertifiedConstants& cert);

void write_trace_csv(std::ostream& out, const ProblemSpec& spec, const RunTrace& trace);
void write_constants_csv(std::ostream& out, const ConstantEstimates& est);
void write_constants_text(std::ostream& out, const ConstantEstimates& est);
void write_audits(std::ostream& out, const std::vector<AuditLine>& audits);

/// Problem seen through x = M y: objective f(M y) over the vertices M^-1 v in
/// the same order.
ProblemSpec transform_problem(const ProblemSpec& spec, const Matrix& M);

/// U diag(s) V' with Haar-random U, V and singular values in [1, 10].
Matrix random_transform(Eigen::Index n, std::uint64_t seed);
Matrix permutation_transform(Eigen::Index n, std::uint64_t seed);

struct InvarianceReport {
  double max_deviation = 0.0;
  bool step_types_match = true;
  bool drop_counts_match = true;
  bool lengths_match = true;
  double curvature = 0.0;
  double curvature_transformed = 0.0;
  std::size_t iterations = 0;
  [[nodiscard]] bool constants_match() const;
  [[nodiscard]] bool passed(double tol = 1e-8) const;
};

InvarianceReport affine_invariance_check(const ProblemSpec& spec, const Matrix& M,
                                         const SolverConfig& cfg, SolverKind solver);

}  // namespace fwkit
