#include "fwkit/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace fwkit {

void require_dimension(const Vector& v, Eigen::Index n, std::string_view what) {
  if (v.size() != n) {
    throw StructuralError(
        fmt::format("{}: dimension mismatch (got {}, expected {})", what, v.size(), n));
  }
}

bool all_finite(const Vector& v) { return v.allFinite(); }

double Objective::bregman(const Vector& x, const Vector& y) const {
  return value(y) - value(x) - gradient(x).dot(y - x);
}

QuadraticObjective::QuadraticObjective(Matrix A, Vector b, double c)
    : A_(std::move(A)), b_(std::move(b)), c_(c) {
  if (A_.rows() != A_.cols() || A_.rows() != b_.size()) {
    throw StructuralError("quadratic objective: A must be n x n with n = len(b)");
  }
  if (A_ != A_.transpose()) {
    throw StructuralError("quadratic objective: A must be exactly symmetric");
  }
  if (!A_.allFinite() || !b_.allFinite() || !std::isfinite(c_)) {
    throw NumericError("quadratic objective: non-finite coefficients");
  }
  if (A_.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(A_, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10) {
      throw StructuralError("quadratic objective: A is not positive semidefinite");
    }
  }
}

QuadraticObjective QuadraticObjective::distance_to(const Vector& target) {
  const auto n = target.size();
  return QuadraticObjective(Matrix::Identity(n, n), -target, 0.5 * target.squaredNorm());
}

double QuadraticObjective::value(const Vector& x) const {
  require_dimension(x, dimension(), "quadratic value");
  return 0.5 * x.dot(A_ * x) + b_.dot(x) + c_;
}

Vector QuadraticObjective::gradient(const Vector& x) const {
  require_dimension(x, dimension(), "quadratic gradient");
  return A_ * x + b_;
}

double QuadraticObjective::bregman(const Vector& x, const Vector& y) const {
  return 0.5 * curvature_along(y - x);
}

double QuadraticObjective::curvature_along(const Vector& d) const { return d.dot(A_ * d); }

double gradient_check(const Objective& obj, const Vector& x, double step) {
  const Vector g = obj.gradient(x);
  if (!g.allFinite() || !std::isfinite(obj.value(x))) {
    throw NumericError("gradient_check: non-finite value or gradient");
  }
  double worst = 0.0;
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + step;
    const double up = obj.value(probe);
    probe(i) = x(i) - step;
    const double down = obj.value(probe);
    probe(i) = x(i);
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("gradient_check: non-finite value near x");
    }
    const double fd = (up - down) / (2.0 * step);
    worst = std::max(worst, std::abs(g(i) - fd) / (1.0 + std::abs(g(i))));
  }
  return worst;
}

std::string_view to_string(PolytopeKind kind) {
  switch (kind) {
    case PolytopeKind::simplex: return "simplex";
    case PolytopeKind::box: return "box";
    case PolytopeKind::l1ball: return "l1ball";
    case PolytopeKind::generic: return "generic";
  }
  return "generic";
}

PolytopeKind polytope_kind_from_string(std::string_view name) {
  if (name == "simplex") return PolytopeKind::simplex;
  if (name == "box") return PolytopeKind::box;
  if (name == "l1ball") return PolytopeKind::l1ball;
  if (name == "generic") return PolytopeKind::generic;
  throw ConfigError(fmt::format("unknown polytope kind '{}'", name));
}

VPolytope::VPolytope(std::vector<Vector> vertices, PolytopeKind kind,
                     std::vector<Halfspace> halfspaces)
    : vertices_(std::move(vertices)), kind_(kind), halfspaces_(std::move(halfspaces)) {
  if (vertices_.empty()) throw StructuralError("polytope: empty vertex list");
  dim_ = vertices_.front().size();
  for (const auto& v : vertices_) {
    require_dimension(v, dim_, "polytope vertex");
    if (!v.allFinite()) throw NumericError("polytope: non-finite vertex");
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices_.size(); ++j) {
      if ((vertices_[i] - vertices_[j]).norm() <= 1e-12) {
        throw StructuralError(fmt::format("polytope: vertices {} and {} coincide", i, j));
      }
    }
  }
  for (const auto& h : halfspaces_) {
    require_dimension(h.normal, dim_, "halfspace normal");
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (h.normal.dot(vertices_[i]) > h.offset + 1e-10) {
        throw StructuralError(fmt::format("polytope: vertex {} violates a halfspace", i));
      }
    }
  }
}

VPolytope VPolytope::simplex(Eigen::Index n) {
  if (n < 1) throw ConfigError("simplex: dimension must be positive");
  std::vector<Vector> vs;
  for (Eigen::Index i = 0; i < n; ++i) vs.push_back(Vector::Unit(n, i));
  std::vector<Halfspace> hs;
  for (Eigen::Index i = 0; i < n; ++i) hs.push_back({-Vector::Unit(n, i), 0.0});
  hs.push_back({Vector::Ones(n), 1.0});
  hs.push_back({-Vector::Ones(n), -1.0});
  return VPolytope(std::move(vs), PolytopeKind::simplex, std::move(hs));
}

VPolytope VPolytope::box(const Vector& lower, const Vector& upper) {
  const auto n = lower.size();
  require_dimension(upper, n, "box bounds");
  if (n < 1 || n > 20) throw ConfigError("box: dimension must be in [1, 20]");
  if ((upper - lower).minCoeff() <= 0.0) throw ConfigError("box: need lower < upper");
  std::vector<Vector> vs;
  const std::size_t count = std::size_t{1} << n;
  for (std::size_t mask = 0; mask < count; ++mask) {
    Vector v(n);
    for (Eigen::Index j = 0; j < n; ++j) v(j) = ((mask >> j) & 1U) ? upper(j) : lower(j);
    vs.push_back(std::move(v));
  }
  std::vector<Halfspace> hs;
  for (Eigen::Index j = 0; j < n; ++j) {
    hs.push_back({-Vector::Unit(n, j), -lower(j)});
    hs.push_back({Vector::Unit(n, j), upper(j)});
  }
  VPolytope p(std::move(vs), PolytopeKind::box, std::move(hs));
  p.lower_ = lower;
  p.upper_ = upper;
  return p;
}

VPolytope VPolytope::box(Eigen::Index n, double lo, double hi) {
  return box(Vector::Constant(n, lo), Vector::Constant(n, hi));
}

VPolytope VPolytope::l1ball(Eigen::Index n) {
  if (n < 1) throw ConfigError("l1ball: dimension must be positive");
  std::vector<Vector> vs;
  for (Eigen::Index i = 0; i < n; ++i) {
    vs.push_back(Vector::Unit(n, i));
    vs.push_back(-Vector::Unit(n, i));
  }
  std::vector<Halfspace> hs;
  if (n <= 10) {
    const std::size_t count = std::size_t{1} << n;
    for (std::size_t mask = 0; mask < count; ++mask) {
      Vector normal(n);
      for (Eigen::Index j = 0; j < n; ++j) normal(j) = ((mask >> j) & 1U) ? -1.0 : 1.0;
      hs.push_back({std::move(normal), 1.0});
    }
  }
  return VPolytope(std::move(vs), PolytopeKind::l1ball, std::move(hs));
}

const Vector& VPolytope::vertex(std::size_t i) const {
  if (i >= vertices_.size()) {
    throw StructuralError(fmt::format("atom index {} out of range ({} atoms)", i, vertices_.size()));
  }
  return vertices_[i];
}

bool VPolytope::contains(const Vector& x, double tol) const {
  require_dimension(x, dim_, "membership test");
  if (!halfspaces_.empty()) {
    return std::all_of(halfspaces_.begin(), halfspaces_.end(),
                       [&](const Halfspace& h) { return h.normal.dot(x) <= h.offset + tol; });
  }
  throw UnsupportedError("membership test needs a halfspace description");
}

Vector VPolytope::barycenter() const {
  Vector c = Vector::Zero(dim_);
  for (const auto& v : vertices_) c += v;
  return c / static_cast<double>(vertices_.size());
}

double VPolytope::diameter() const {
  double best = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices_.size(); ++j) {
      best = std::max(best, (vertices_[i] - vertices_[j]).norm());
    }
  }
  return best;
}

Matrix VPolytope::direction_basis(double tol) const {
  if (vertices_.size() < 2) return Matrix(dim_, 0);
  Matrix diffs(dim_, static_cast<Eigen::Index>(vertices_.size() - 1));
  for (std::size_t i = 1; i < vertices_.size(); ++i) {
    diffs.col(static_cast<Eigen::Index>(i - 1)) = vertices_[i] - vertices_[0];
  }
  Eigen::JacobiSVD<Matrix> svd(diffs, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double scale = sv.size() > 0 ? std::max(1.0, sv(0)) : 1.0;
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > tol * scale) ++rank;
  return svd.matrixU().leftCols(rank);
}

VPolytope VPolytope::sub_polytope(const std::vector<std::size_t>& indices) const {
  std::vector<Vector> vs;
  vs.reserve(indices.size());
  for (auto i : indices) vs.push_back(vertex(i));
  return VPolytope(std::move(vs), PolytopeKind::generic, halfspaces_);
}

ActiveSet::ActiveSet(Weights weights) : weights_(std::move(weights)) {
  for (const auto& [idx, w] : weights_) {
    if (!(w > 0.0) || w > 1.0 + 1e-10) {
      throw StructuralError(fmt::format("active set: weight of atom {} is {}", idx, w));
    }
  }
  if (!weights_.empty() && std::abs(weight_sum() - 1.0) > 1e-10) {
    throw StructuralError("active set: weights must sum to one");
  }
}

ActiveSet ActiveSet::vertex(std::size_t index) { return ActiveSet(Weights{{index, 1.0}}); }

double ActiveSet::weight(std::size_t index) const {
  const auto it = weights_.find(index);
  return it == weights_.end() ? 0.0 : it->second;
}

double ActiveSet::weight_sum() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0,
                         [](double acc, const auto& kv) { return acc + kv.second; });
}

double ActiveSet::min_weight() const {
  double m = 1.0;
  for (const auto& kv : weights_) m = std::min(m, kv.second);
  return m;
}

void ActiveSet::prune(double drop_tolerance) {
  std::erase_if(weights_, [&](const auto& kv) { return kv.second <= drop_tolerance; });
  const double total = weight_sum();
  if (total <= 0.0) throw NumericError("active set: all weights vanished");
  for (auto& kv : weights_) kv.second /= total;
}

Vector active_set_point(const ActiveSet& aset, const VPolytope& poly) {
  Vector x = Vector::Zero(poly.dimension());
  for (const auto& [idx, w] : aset.weights()) x += w * poly.vertex(idx);
  return x;
}

std::string_view to_string(StepType t) {
  switch (t) {
    case StepType::fw: return "fw";
    case StepType::away: return "away";
    case StepType::drop: return "drop";
    case StepType::none: return "none";
  }
  return "none";
}

std::size_t RunTrace::drop_count() const {
  return static_cast<std::size_t>(std::count_if(
      records.begin(), records.end(), [](const auto& r) { return r.step_type == StepType::drop; }));
}

std::string_view to_string(StepRule r) {
  switch (r) {
    case StepRule::fixed_schedule: return "fixed_schedule";
    case StepRule::analytic_cf: return "analytic_cf";
    case StepRule::line_search_exact: return "line_search_exact";
    case StepRule::line_search_golden: return "line_search_golden";
    case StepRule::analytic_cfa: return "analytic_cfa";
  }
  return "line_search_exact";
}

StepRule step_rule_from_string(std::string_view name) {
  for (auto r : {StepRule::fixed_schedule, StepRule::analytic_cf, StepRule::line_search_exact,
                 StepRule::line_search_golden, StepRule::analytic_cfa}) {
    if (to_string(r) == name) return r;
  }
  throw ConfigError(fmt::format("unknown step rule '{}'", name));
}

void SolverConfig::validate() const {
  if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
  if (!(gap_tolerance >= 0.0)) throw ConfigError("gap_tolerance must be nonnegative");
  if (!(nu > 0.0 && nu <= 1.0)) throw ConfigError("nu must lie in (0, 1]");
  if (!(drop_tolerance >= 0.0)) throw ConfigError("drop_tolerance must be nonnegative");
  if (!(golden_tolerance > 0.0)) throw ConfigError("golden_tolerance must be positive");
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::exact: return "exact";
    case Provenance::sampled_lower_bound: return "sampled_lower_bound";
    case Provenance::sampled_upper_bound: return "sampled_upper_bound";
    case Provenance::unavailable: return "unavailable";
  }
  return "unavailable";
}

std::vector<std::string> ConstantEstimates::invariant_violations() const {
  std::vector<std::string> out;
  if (std::abs(cf_away - std::max(cf, cf_minus)) > 1e-12 * std::max(1.0, cf_away)) {
    out.emplace_back("cf_away != max(cf, cf_minus)");
  }
  if (mu_fw > cf + 1e-9) out.emplace_back("mu_fw > cf");
  if (mu_away > cf + 1e-9) out.emplace_back("mu_away > cf");
  for (double v : {cf, cf_minus, cf_away, mu_fw, mu_away, delta, pdirw, rho_fw, rho_away}) {
    if (v < 0.0) {
      out.emplace_back("negative constant");
      break;
    }
  }
  return out;
}

}  // namespace fwkit
