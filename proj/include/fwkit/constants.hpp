#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fwkit/core.hpp"
#include "fwkit/kernels.hpp"

namespace fwkit {

struct CurvatureTriple {
  double cf = 0.0;
  double cf_minus = 0.0;
  double cf_away = 0.0;
};

/// For a quadratic the curvature bracket is (gamma^2/2)(s-x)'A(s-x), so every
/// curvature constant equals max over vertex pairs of (u-v)'A(u-v).
CurvatureTriple curvature_quadratic_exact(const Matrix& A, const VPolytope& poly);

enum class CurvatureSide { forward, backward };

/// Sampled sup of (2/gamma^2) * bregman(x, x + gamma (s - x)) (forward) or
/// with the step reversed (backward).  A lower bound on the true constant.
SampleStats curvature_sampled(const Objective& obj, const VPolytope& poly, std::size_t num_samples,
                              std::uint64_t seed, CurvatureSide side = CurvatureSide::forward,
                              Exec exec = Exec::parallel);

/// Sampled inf of (2/gamma^2) * bregman(x, x + gamma (sbar - x)) where sbar is
/// the exit point of the ray from x through xstar.  An upper bound on the true
/// interior constant.  Degenerate rays are counted as skipped.
SampleStats mu_fw_estimate(const Objective& obj, const VPolytope& poly, const Vector& xstar,
                           std::size_t num_samples, std::uint64_t seed, Exec exec = Exec::parallel);

/// Sampled inf over pairs (x, xstar) with <grad f(x), xstar - x> < 0 of
/// (2/gamma_A^2) * bregman(x, xstar) with
/// gamma_A = <grad, xstar - x> / <grad, s_f(x) - v_f(x)>.  The first |V| samples
/// are the vertex pairs (u, s_f(u)).  An upper bound on the true constant.
SampleStats mu_away_estimate(const Objective& obj, const VPolytope& poly, std::size_t num_samples,
                             std::uint64_t seed, Exec exec = Exec::parallel);

struct RateConstants {
  double rho_fw = 0.0;
  double rho_away = 0.0;
};

/// rho_fw = min(nu/2, nu^2 mu_fw / cf), rho_away = mu_away / (4 cf_away).
RateConstants rate_constants(const ConstantEstimates& est, double nu = 1.0);

/// Smallest eigenvalue of A restricted to span(D - D): the Euclidean strong
/// convexity modulus of the quadratic on the polytope's affine hull.
double restricted_strong_convexity(const Matrix& A, const VPolytope& poly);

/// Largest eigenvalue of A.
double lipschitz_constant(const Matrix& A);

struct BoundCheck {
  std::string name;
  /// The check passes when lhs <= rhs.
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  [[nodiscard]] double margin() const { return rhs - lhs; }
};

/// Relations between the constants, each oriented so that the sampled side can
/// only make the check harder, never easier:
///   cf <= diam^2 * L, mu_fw <= cf, mu * delta^2 <= mu_fw,
///   mu * pdirw^2 <= mu_away, mu_away <= cf.
std::vector<BoundCheck> bound_checks(const ConstantEstimates& est, const QuadraticObjective& quad,
                                     const VPolytope& poly, const Vector& xstar);

}  // namespace fwkit
