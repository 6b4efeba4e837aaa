#include "fwkit/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <vector>
#include <limits>

namespace fwkit {

namespace {

OracleAnswer answer(const VPolytope& poly, std::size_t idx, const Vector& grad) {
  const Vector& v = poly.vertex(idx);
  return {idx, v, grad.dot(v)};
}

// Values within this fraction of the largest magnitude count as ties, so a
// reparameterized problem resolves rounding-level ties like the original.
constexpr double kTieTolerance = 1e-12;

double tie_slack(double scale) { return kTieTolerance * scale; }

std::size_t simplex_index(const Vector& grad) {
  const double slack = tie_slack(grad.cwiseAbs().maxCoeff());
  const double best = grad.minCoeff();
  Eigen::Index j = 0;
  while (grad(j) > best + slack) ++j;
  return static_cast<std::size_t>(j);
}

std::size_t box_index(const Vector& grad) {
  // Upper bound wherever the gradient is negative; near-zero components keep
  // the lower bound, which is the lower-index tie.
  const double slack = tie_slack(grad.cwiseAbs().maxCoeff());
  std::size_t mask = 0;
  for (Eigen::Index j = 0; j < grad.size(); ++j) {
    if (grad(j) < -slack) mask |= std::size_t{1} << j;
  }
  return mask;
}

std::size_t l1ball_index(const Vector& grad) {
  const double top = grad.cwiseAbs().maxCoeff();
  const double slack = tie_slack(top);
  Eigen::Index best = 0;
  while (std::abs(grad(best)) < top - slack) ++best;
  const auto base = 2 * static_cast<std::size_t>(best);
  return grad(best) > slack ? base + 1 : base;
}

}  // namespace

OracleAnswer lmo_enumerate(const VPolytope& poly, const Vector& grad) {
  require_dimension(grad, poly.dimension(), "lmo gradient");
  std::vector<double> vals(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) vals[i] = grad.dot(poly.vertex(i));
  const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
  const double slack = tie_slack(std::max(std::abs(*lo), std::abs(*hi)));
  std::size_t best = 0;
  while (vals[best] > *lo + slack) ++best;
  return {best, poly.vertex(best), vals[best]};
}

OracleAnswer lmo(const VPolytope& poly, const Vector& grad) {
  require_dimension(grad, poly.dimension(), "lmo gradient");
  switch (poly.kind()) {
    case PolytopeKind::simplex: return answer(poly, simplex_index(grad), grad);
    case PolytopeKind::box: return answer(poly, box_index(grad), grad);
    case PolytopeKind::l1ball: return answer(poly, l1ball_index(grad), grad);
    case PolytopeKind::generic: break;
  }
  return lmo_enumerate(poly, grad);
}

OracleAnswer away_vertex(const ActiveSet& aset, const VPolytope& poly, const Vector& grad) {
  require_dimension(grad, poly.dimension(), "away-vertex gradient");
  if (aset.empty()) throw StructuralError("away_vertex: empty active set");
  double top = -std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (const auto& [idx, w] : aset.weights()) {
    const double val = grad.dot(poly.vertex(idx));
    top = std::max(top, val);
    scale = std::max(scale, std::abs(val));
  }
  for (const auto& [idx, w] : aset.weights()) {
    const double val = grad.dot(poly.vertex(idx));
    if (val >= top - tie_slack(scale)) return {idx, poly.vertex(idx), val};
  }
  throw NumericError("away_vertex: non-finite inner products");
}

double fw_gap(const Vector& grad, const Vector& x, const VPolytope& poly) {
  require_dimension(x, poly.dimension(), "fw_gap point");
  const double g = grad.dot(x) - lmo(poly, grad).inner_product;
  return (g < 0.0 && g >= -1e-10) ? 0.0 : g;
}

double pairwise_gap(const Vector& grad, const OracleAnswer& s, const OracleAnswer& v) {
  return -grad.dot(s.vertex - v.vertex);
}

OracleAnswer inexact_lmo(const VPolytope& poly, const Vector& grad, const Vector& x, double nu,
                         InexactMode mode, std::mt19937_64* rng) {
  if (!(nu > 0.0 && nu <= 1.0)) throw ConfigError("inexact_lmo: nu must lie in (0, 1]");
  require_dimension(grad, poly.dimension(), "inexact_lmo gradient");
  require_dimension(x, poly.dimension(), "inexact_lmo point");
  if (nu == 1.0) return lmo(poly, grad);
  const double gx = grad.dot(x);
  std::vector<double> descent(poly.size());
  double gap = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    descent[i] = gx - grad.dot(poly.vertex(i));
    gap = std::max(gap, descent[i]);
  }
  const double threshold = nu * std::max(gap, 0.0);

  std::vector<std::size_t> admissible;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    if (descent[i] >= threshold) admissible.push_back(i);
  }
  if (admissible.empty()) {
    // Only reachable when every descent is negative (x outside D); fall back to the exact answer.
    return lmo_enumerate(poly, grad);
  }
  if (mode == InexactMode::randomized) {
    if (rng == nullptr) throw ConfigError("inexact_lmo: randomized mode needs a generator");
    std::uniform_int_distribution<std::size_t> pick(0, admissible.size() - 1);
    return answer(poly, admissible[pick(*rng)], grad);
  }
  std::size_t worst = admissible.front();
  for (auto i : admissible) {
    if (descent[i] < descent[worst]) worst = i;
  }
  return answer(poly, worst, grad);
}

}  // namespace fwkit
