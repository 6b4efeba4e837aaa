#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fwkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Error classes. The CLI maps them onto exit codes (config -> 2, numeric -> 3).
class StructuralError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class NumericError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class UnsupportedError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_dimension(const Vector& v, Eigen::Index n, std::string_view what);
bool all_finite(const Vector& v);

/// Differentiable convex objective, evaluated as a black box.
class Objective {
 public:
  virtual ~Objective() = default;

  [[nodiscard]] virtual Eigen::Index dimension() const = 0;
  [[nodiscard]] virtual double value(const Vector& x) const = 0;
  [[nodiscard]] virtual Vector gradient(const Vector& x) const = 0;

  /// f(y) - f(x) - <grad f(x), y - x>.  Subclasses with a closed form
  /// override this to avoid the cancellation in the generic difference.
  [[nodiscard]] virtual double bregman(const Vector& x, const Vector& y) const;
};

/// f(x) = 1/2 x'Ax + b'x + c with A symmetric positive semidefinite.
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(Matrix A, Vector b, double c = 0.0);

  /// 1/2 |x - target|^2
  static QuadraticObjective distance_to(const Vector& target);

  [[nodiscard]] Eigen::Index dimension() const override { return b_.size(); }
  [[nodiscard]] double value(const Vector& x) const override;
  [[nodiscard]] Vector gradient(const Vector& x) const override;
  [[nodiscard]] double bregman(const Vector& x, const Vector& y) const override;

  [[nodiscard]] const Matrix& A() const { return A_; }
  [[nodiscard]] const Vector& b() const { return b_; }
  [[nodiscard]] double c() const { return c_; }

  /// Quadratic form d'Ad.
  [[nodiscard]] double curvature_along(const Vector& d) const;

 private:
  Matrix A_;
  Vector b_;
  double c_;
};

/// Functional objective, mostly for tests of the generic code paths.
class FunctionObjective final : public Objective {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;
  FunctionObjective(Eigen::Index n, ValueFn value, GradFn grad)
      : n_(n), value_(std::move(value)), grad_(std::move(grad)) {}

  [[nodiscard]] Eigen::Index dimension() const override { return n_; }
  [[nodiscard]] double value(const Vector& x) const override { return value_(x); }
  [[nodiscard]] Vector gradient(const Vector& x) const override { return grad_(x); }

 private:
  Eigen::Index n_;
  ValueFn value_;
  GradFn grad_;
};

/// Max over coordinates of |analytic - central difference| / (1 + |analytic|).
double gradient_check(const Objective& obj, const Vector& x, double step = 1e-6);

enum class PolytopeKind { simplex, box, l1ball, generic };
std::string_view to_string(PolytopeKind kind);
PolytopeKind polytope_kind_from_string(std::string_view name);

/// <normal, x> <= offset
struct Halfspace {
  Vector normal;
  double offset = 0.0;
};

/// Polytope given by its vertex list.  Simplex, box and l1-ball carry their
/// halfspace description; generic polytopes may or may not.
class VPolytope {
 public:
  VPolytope(std::vector<Vector> vertices, PolytopeKind kind = PolytopeKind::generic,
            std::vector<Halfspace> halfspaces = {});

  /// conv{e_1, ..., e_n} in R^n.
  static VPolytope simplex(Eigen::Index n);
  /// Vertex i has coordinate j at upper(j) iff bit j of i is set.
  static VPolytope box(const Vector& lower, const Vector& upper);
  static VPolytope box(Eigen::Index n, double lo, double hi);
  /// conv{+e_1, -e_1, +e_2, -e_2, ...}; facets are listed when n <= 10.
  static VPolytope l1ball(Eigen::Index n);

  [[nodiscard]] Eigen::Index dimension() const { return dim_; }
  [[nodiscard]] std::size_t size() const { return vertices_.size(); }
  [[nodiscard]] const std::vector<Vector>& vertices() const { return vertices_; }
  [[nodiscard]] const Vector& vertex(std::size_t i) const;
  [[nodiscard]] PolytopeKind kind() const { return kind_; }
  [[nodiscard]] const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
  [[nodiscard]] bool has_halfspaces() const { return !halfspaces_.empty(); }

  // Box bounds; empty unless kind() == box.
  [[nodiscard]] const Vector& lower() const { return lower_; }
  [[nodiscard]] const Vector& upper() const { return upper_; }

  [[nodiscard]] bool contains(const Vector& x, double tol = 1e-9) const;
  [[nodiscard]] Vector barycenter() const;
  /// Largest pairwise Euclidean vertex distance.
  [[nodiscard]] double diameter() const;
  /// Orthonormal basis (columns) of span(D - D).
  [[nodiscard]] Matrix direction_basis(double tol = 1e-10) const;

  /// Polytope with vertices {vertices[i] : i in indices}, same order.  Keeps
  /// the parent's halfspaces, which remain valid.
  [[nodiscard]] VPolytope sub_polytope(const std::vector<std::size_t>& indices) const;

 private:
  std::vector<Vector> vertices_;
  PolytopeKind kind_;
  std::vector<Halfspace> halfspaces_;
  Vector lower_, upper_;
  Eigen::Index dim_ = 0;
};

/// Convex-combination state (S, alpha) over atoms of a VPolytope.
class ActiveSet {
 public:
  using Weights = std::map<std::size_t, double>;

  ActiveSet() = default;
  explicit ActiveSet(Weights weights);
  static ActiveSet vertex(std::size_t index);

  [[nodiscard]] const Weights& weights() const { return weights_; }
  [[nodiscard]] std::size_t size() const { return weights_.size(); }
  [[nodiscard]] bool empty() const { return weights_.empty(); }
  [[nodiscard]] bool contains(std::size_t index) const { return weights_.count(index) != 0; }
  [[nodiscard]] double weight(std::size_t index) const;
  [[nodiscard]] double weight_sum() const;
  [[nodiscard]] double min_weight() const;

  /// Removes weights at or below `drop_tolerance` and rescales the rest to sum to one.
  void prune(double drop_tolerance);
  void erase(std::size_t index) { weights_.erase(index); }
  Weights& mutable_weights() { return weights_; }

  friend bool operator==(const ActiveSet&, const ActiveSet&) = default;

 private:
  Weights weights_;
};

/// sum_v alpha_v * v
Vector active_set_point(const ActiveSet& aset, const VPolytope& poly);

enum class StepType { fw, away, drop, none };
std::string_view to_string(StepType t);

struct IterateRecord {
  std::size_t k = 0;
  Vector x;
  double f_value = 0.0;
  /// Solver certificate: FW gap for the standard solver, pairwise gap for AFW.
  double gap = 0.0;
  /// max_s <grad, x - s> over the polytope, always exact.
  double fw_gap = 0.0;
  /// <-grad, d_k> for the direction actually taken (0 when no step).
  double descent = 0.0;
  StepType step_type = StepType::none;
  double gamma = 0.0;
  double gamma_max = 0.0;
  std::size_t active_size = 0;
  /// Atom the step moved toward (fw) or away from (away/drop).
  std::optional<std::size_t> atom;
  double weight_sum = 1.0;
  double min_weight = 1.0;
};

struct RunTrace {
  std::vector<IterateRecord> records;
  std::string problem_id;
  std::string solver_id;
  std::uint64_t seed = 0;
  /// Invariant breaches detected while running (non-descent and the like).
  std::vector<std::string> violations;
  /// Count of gap values in [-1e-10, 0) that were clamped to zero.
  std::size_t clamped_gaps = 0;

  [[nodiscard]] std::size_t drop_count() const;
};

enum class StepRule { fixed_schedule, analytic_cf, line_search_exact, line_search_golden, analytic_cfa };
std::string_view to_string(StepRule r);
StepRule step_rule_from_string(std::string_view name);

enum class InexactMode { adversarial, randomized };

struct SolverConfig {
  std::size_t max_iters = 1000;
  double gap_tolerance = 1e-10;
  StepRule step_rule = StepRule::line_search_exact;
  double drop_tolerance = 1e-12;
  /// Oracle accuracy; values below one switch the FW solver to the inexact oracle.
  double nu = 1.0;
  InexactMode inexact_mode = InexactMode::adversarial;
  std::uint64_t seed = 0;
  double golden_tolerance = 1e-10;
  std::size_t golden_max_iters = 200;

  void validate() const;
};

enum class Provenance { exact, sampled_lower_bound, sampled_upper_bound, unavailable };
std::string_view to_string(Provenance p);

struct ConstantEstimates {
  double cf = 0.0;
  double cf_minus = 0.0;
  double cf_away = 0.0;
  double mu_fw = 0.0;
  double mu_away = 0.0;
  double delta = 0.0;
  double pdirw = 0.0;
  double rho_fw = 0.0;
  double rho_away = 0.0;

  Provenance cf_prov = Provenance::unavailable;
  Provenance cf_minus_prov = Provenance::unavailable;
  Provenance cf_away_prov = Provenance::unavailable;
  Provenance mu_fw_prov = Provenance::unavailable;
  Provenance mu_away_prov = Provenance::unavailable;
  Provenance delta_prov = Provenance::unavailable;
  Provenance pdirw_prov = Provenance::unavailable;
  Provenance rho_fw_prov = Provenance::unavailable;
  Provenance rho_away_prov = Provenance::unavailable;

  /// Checks the documented relations between the fields; returns the broken ones.
  [[nodiscard]] std::vector<std::string> invariant_violations() const;
};

}  // namespace fwkit
