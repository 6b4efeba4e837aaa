#pragma once

#include <random>

#include "fwkit/core.hpp"

namespace fwkit {

struct OracleAnswer {
  std::size_t atom_index = 0;
  Vector vertex;
  /// <grad, vertex>
  double inner_product = 0.0;
};

/// Linear minimization oracle: argmin_v <grad, v> over the vertices, lowest
/// index on ties.  Simplex, box and l1-ball use closed forms.
OracleAnswer lmo(const VPolytope& poly, const Vector& grad);

/// Reference LMO by plain enumeration of all vertices.
OracleAnswer lmo_enumerate(const VPolytope& poly, const Vector& grad);

/// argmax_{v in S} <grad, v>, lowest index on ties.
OracleAnswer away_vertex(const ActiveSet& aset, const VPolytope& poly, const Vector& grad);

/// <grad, x> - min_v <grad, v>.  Values in [-1e-10, 0) are clamped to zero.
double fw_gap(const Vector& grad, const Vector& x, const VPolytope& poly);

/// <-grad, s - v>
double pairwise_gap(const Vector& grad, const OracleAnswer& s, const OracleAnswer& v);

/// Inexact oracle with multiplicative accuracy nu: only vertices with
/// <grad, x - v> >= nu * g(x) are admissible.  The adversarial mode returns the
/// admissible vertex with the least descent (lowest index on ties); the
/// randomized mode draws one admissible vertex uniformly.
OracleAnswer inexact_lmo(const VPolytope& poly, const Vector& grad, const Vector& x, double nu,
                         InexactMode mode = InexactMode::adversarial,
                         std::mt19937_64* rng = nullptr);

}  // namespace fwkit
