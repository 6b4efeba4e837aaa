#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "fwkit/core.hpp"
#include "fwkit/kernels.hpp"
#include "fwkit/oracles.hpp"

namespace fwkit {

/// Vertex subsets are enumerated exhaustively, so the vertex count is capped.
inline constexpr std::size_t kSupportEnumerationCap = 16;
/// Minimum weight for a convex combination to count as proper.
inline constexpr double kSupportTolerance = 1e-9;

/// A vertex subset S together with strictly positive weights reproducing x.
struct ProperSupport {
  std::vector<std::size_t> atom_indices;
  std::map<std::size_t, double> weights;
};

/// Weights on `subset` that reproduce x with the largest possible minimum
/// weight, or nullopt when no combination with min weight >= kSupportTolerance
/// exists.
std::optional<std::map<std::size_t, double>> proper_weights(const Vector& x, const VPolytope& poly,
                                                            const std::vector<std::size_t>& subset);

/// Whether x lies in conv{vertex(i) : i in subset}.
bool in_hull(const Vector& x, const VPolytope& poly, const std::vector<std::size_t>& subset);

/// All proper supports of x, ordered by the bitmask of their vertex indices.
std::vector<ProperSupport> enumerate_proper_supports(const Vector& x, const VPolytope& poly,
                                                     std::size_t cap = kSupportEnumerationCap);

/// min over proper supports S of argmax_{v in S} <grad, v>, lowest index on ties.
OracleAnswer worst_case_away_vertex(const Vector& grad, const Vector& x, const VPolytope& poly);

/// <grad, v_f(x)> computed without enumerating supports: the smallest threshold
/// t such that x is a convex combination of vertices with <grad, v> <= t.
double worst_case_away_value(const Vector& grad, const Vector& x, const VPolytope& poly);

/// Extent of the points along d / |d|.
double directional_width(const std::vector<Vector>& points, const Vector& d);

/// min over proper supports S of x of the directional width of
/// S + {argmax_v <d, v>}.  Cross-checked internally against the closed form
/// <d/|d|, s - v_f> with v_f the worst-case away vertex for gradient -d.
double pyramidal_dir_width(const VPolytope& poly, const Vector& d, const Vector& x);

struct Face {
  std::vector<std::size_t> vertex_indices;
  int dimension = 0;
};

/// All nonempty faces (vertices included), found from the active-halfspace
/// pattern of each vertex.  Needs a halfspace description.
std::vector<Face> enumerate_faces(const VPolytope& poly);

/// Affine dimension of the vertex set.
int affine_dimension(const VPolytope& poly);

struct PyramidalWidthResult {
  double value = 0.0;
  /// Witness: face (indices into the polytope), base point and direction.
  std::vector<std::size_t> face;
  Vector base_point;
  Vector direction;
  std::size_t evaluations = 0;
  std::size_t faces_searched = 0;
};

/// Sampled search over faces, base points and feasible directions.  The
/// result is an upper bound on the pyramidal width and depends only on the
/// polytope and the seed.
PyramidalWidthResult pyramidal_width_search(const VPolytope& poly, std::size_t directions_per_base,
                                            std::uint64_t seed, Exec exec = Exec::parallel);

double pyramidal_width_estimate(const VPolytope& poly, std::size_t directions_per_base,
                                std::uint64_t seed, Exec exec = Exec::parallel);

/// Point where the ray from x through xstar leaves the polytope.
Vector ray_boundary_intersection(const Vector& x, const Vector& xstar, const VPolytope& poly);

/// Distance from xstar to the relative boundary of the polytope.
double interior_radius(const Vector& xstar, const VPolytope& poly);

}  // namespace fwkit
