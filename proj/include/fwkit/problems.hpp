#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "fwkit/core.hpp"

namespace fwkit {

enum class OptimumLocation { interior, face, vertex };
std::string_view to_string(OptimumLocation loc);

/// A quadratic test instance with its precomputed optimum.
struct ProblemSpec {
  std::string name;
  VPolytope poly;
  QuadraticObjective objective;
  Vector xstar;
  double fstar = 0.0;
  OptimumLocation location = OptimumLocation::interior;

  /// Default starting point: the last vertex.
  [[nodiscard]] ActiveSet default_start() const { return ActiveSet::vertex(poly.size() - 1); }
  /// f(x) - f*, evaluated as <grad f(x*), x - x*> + bregman(x*, x) so that it
  /// keeps full relative accuracy near the optimum.
  [[nodiscard]] double suboptimality(const Vector& x) const;
};

/// Families: simplex_interior, simplex_face, simplex_vertex, box_interior,
/// box_face, random_psd_simplex, random_psd_box.
ProblemSpec generate_problem(std::string_view family, Eigen::Index dimension, std::uint64_t seed);

/// Euclidean projection onto the unit simplex (sort-based).
Vector project_simplex(const Vector& y);
/// Euclidean projection onto the box [lower, upper].
Vector project_box(const Vector& y, const Vector& lower, const Vector& upper);

/// Minimizer of a quadratic over a polytope: projected gradient with an exact
/// polish on the identified face for simplices and boxes, a long away-steps
/// run otherwise.
Vector solve_quadratic_optimum(const QuadraticObjective& f, const VPolytope& poly);

/// Classifies x by the dimension of the smallest face containing it.
OptimumLocation classify_location(const Vector& x, const VPolytope& poly);

/// Builds the spec around a given polytope and objective, computing the
/// optimum when no usable hint is given.
ProblemSpec make_problem(std::string name, VPolytope poly, QuadraticObjective objective,
                         const Vector* optimum_hint = nullptr);

/// Throws StructuralError unless the gap at xstar is at most 1e-9 and fstar
/// matches f(xstar).
void validate_problem(const ProblemSpec& spec);

/// "family:NAME:DIM:SEED" or a path to a JSON problem file.
ProblemSpec load_problem(const std::string& source);
ProblemSpec load_problem_json(const std::string& path);
std::string problem_to_json(const ProblemSpec& spec);

/// Parses a polytope given as simplex:d, box:d or file:<problem.json>.
VPolytope load_polytope(const std::string& source);

}  // namespace fwkit
