#include "fwkit/constants.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "fwkit/geometry.hpp"
#include "fwkit/oracles.hpp"

namespace fwkit {

namespace {

double checked(double v, const char* who) {
  if (!std::isfinite(v)) throw NumericError(fmt::format("{}: non-finite evaluation", who));
  return v;
}

Vector checked_gradient(const Objective& obj, const Vector& x, const char* who) {
  Vector g = obj.gradient(x);
  if (!g.allFinite()) throw NumericError(fmt::format("{}: non-finite gradient", who));
  return g;
}

void require_samples(std::size_t n, const char* who) {
  if (n == 0) throw ConfigError(fmt::format("{}: need at least one sample", who));
}

// gamma = 10^(-3u): a log grid over [1e-3, 1].
double log_step(std::mt19937_64& rng) { return std::pow(10.0, -3.0 * uniform01(rng)); }

std::size_t random_vertex(const VPolytope& poly, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, poly.size() - 1);
  return pick(rng);
}

}  // namespace

CurvatureTriple curvature_quadratic_exact(const Matrix& A, const VPolytope& poly) {
  if (A.rows() != poly.dimension() || A.cols() != poly.dimension()) {
    throw StructuralError("curvature_quadratic_exact: matrix and polytope dimensions differ");
  }
  double best = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    for (std::size_t j = i + 1; j < poly.size(); ++j) {
      const Vector d = poly.vertex(i) - poly.vertex(j);
      best = std::max(best, d.dot(A * d));
    }
  }
  return CurvatureTriple{best, best, best};
}

SampleStats curvature_sampled(const Objective& obj, const VPolytope& poly, std::size_t num_samples,
                              std::uint64_t seed, CurvatureSide side, Exec exec) {
  require_samples(num_samples, "curvature_sampled");
  const double sign = side == CurvatureSide::forward ? 1.0 : -1.0;
  auto sample = [&](std::mt19937_64& rng, std::size_t) -> std::optional<double> {
    const Vector x = sample_point(poly, rng);
    const Vector& s = poly.vertex(random_vertex(poly, rng));
    const double gamma = log_step(rng);
    const Vector y = x + (sign * gamma) * (s - x);
    return checked(2.0 / (gamma * gamma) * obj.bregman(x, y), "curvature_sampled");
  };
  SampleStats out = reduce_samples(num_samples, seed, Reduce::max, sample, exec);
  if (!out.value) out.value = 0.0;
  return out;
}

SampleStats mu_fw_estimate(const Objective& obj, const VPolytope& poly, const Vector& xstar,
                           std::size_t num_samples, std::uint64_t seed, Exec exec) {
  require_samples(num_samples, "mu_fw_estimate");
  require_dimension(xstar, poly.dimension(), "mu_fw_estimate");
  const Vector gstar = checked_gradient(obj, xstar, "mu_fw_estimate");
  if (fw_gap(gstar, xstar, poly) > 1e-8 * std::max(1.0, gstar.norm())) {
    throw ConfigError("mu_fw_estimate: xstar is not optimal");
  }
  auto sample = [&](std::mt19937_64& rng, std::size_t) -> std::optional<double> {
    Vector x = sample_point(poly, rng);
    if (uniform01(rng) < 0.5) {
      // Points close to the optimum, at log-uniform distance scales.
      const double t = std::pow(10.0, -4.0 * uniform01(rng));
      x = xstar + t * (x - xstar);
    }
    const double gamma = log_step(rng);
    if ((x - xstar).norm() <= 1e-12 * (1.0 + xstar.norm())) return std::nullopt;
    const Vector sbar = ray_boundary_intersection(x, xstar, poly);
    const Vector y = x + gamma * (sbar - x);
    return checked(2.0 / (gamma * gamma) * obj.bregman(x, y), "mu_fw_estimate");
  };
  SampleStats out = reduce_samples(num_samples, seed, Reduce::min, sample, exec);
  if (!out.value) out.value = 0.0;
  return out;
}

SampleStats mu_away_estimate(const Objective& obj, const VPolytope& poly, std::size_t num_samples,
                             std::uint64_t seed, Exec exec) {
  require_samples(num_samples, "mu_away_estimate");
  if (poly.size() > kSupportEnumerationCap) {
    throw UnsupportedError("mu_away_estimate: vertex count exceeds the enumeration cap");
  }
  auto sample = [&](std::mt19937_64& rng, std::size_t index) -> std::optional<double> {
    Vector x;
    Vector target;
    Vector g;
    OracleAnswer s;
    if (index < poly.size()) {
      x = poly.vertex(index);
      g = checked_gradient(obj, x, "mu_away_estimate");
      s = lmo(poly, g);
      target = s.vertex;
    } else {
      x = sample_point(poly, rng);
      g = checked_gradient(obj, x, "mu_away_estimate");
      s = lmo(poly, g);
      const double u = uniform01(rng);
      if (u < 1.0 / 3.0) {
        target = poly.vertex(random_vertex(poly, rng));
      } else if (u < 2.0 / 3.0) {
        target = sample_point(poly, rng);
      } else {
        target = s.vertex;
      }
    }
    const double slope = g.dot(target - x);
    if (!(slope < 0.0)) return std::nullopt;
    const double denom = s.inner_product - worst_case_away_value(g, x, poly);
    if (!(denom < 0.0)) return std::nullopt;
    const double gamma_a = slope / denom;
    return checked(2.0 / (gamma_a * gamma_a) * obj.bregman(x, target), "mu_away_estimate");
  };
  SampleStats out = reduce_samples(num_samples, seed, Reduce::min, sample, exec);
  if (!out.value) out.value = 0.0;
  return out;
}

RateConstants rate_constants(const ConstantEstimates& est, double nu) {
  if (!(est.cf > 0.0) || !(est.cf_away > 0.0)) {
    throw ConfigError("rate_constants: curvature constants must be positive");
  }
  if (!(nu > 0.0 && nu <= 1.0)) throw ConfigError("rate_constants: nu must lie in (0, 1]");
  return RateConstants{std::min(nu / 2.0, nu * nu * est.mu_fw / est.cf),
                       est.mu_away / (4.0 * est.cf_away)};
}

double restricted_strong_convexity(const Matrix& A, const VPolytope& poly) {
  const Matrix Q = poly.direction_basis();
  if (Q.cols() == 0) return 0.0;
  const Matrix R = Q.transpose() * A * Q;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (R + R.transpose()), Eigen::EigenvaluesOnly);
  return std::max(0.0, eig.eigenvalues().minCoeff());
}

double lipschitz_constant(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(A, Eigen::EigenvaluesOnly);
  return std::max(0.0, eig.eigenvalues().maxCoeff());
}

std::vector<BoundCheck> bound_checks(const ConstantEstimates& est, const QuadraticObjective& quad,
                                     const VPolytope& poly, const Vector& xstar) {
  const double mu = restricted_strong_convexity(quad.A(), poly);
  const double diam = poly.diameter();
  const double lip = lipschitz_constant(quad.A());
  const double delta = interior_radius(xstar, poly);
  std::vector<BoundCheck> out;
  auto add = [&](std::string name, double lhs, double rhs) {
    out.push_back(BoundCheck{std::move(name), lhs, rhs, lhs <= rhs});
  };
  add("curvature <= diam^2 * lipschitz", est.cf, diam * diam * lip + 1e-9);
  add("mu_fw <= curvature", est.mu_fw, est.cf + 1e-9);
  add("mu * delta^2 <= mu_fw", mu * delta * delta, est.mu_fw);
  add("mu * pdirw^2 <= mu_away", mu * est.pdirw * est.pdirw, est.mu_away);
  add("mu_away <= curvature", est.mu_away, est.cf_away + 1e-9);
  return out;
}

}  // namespace fwkit
