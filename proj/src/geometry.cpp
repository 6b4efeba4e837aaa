#include "fwkit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "fwkit/lp.hpp"

namespace fwkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_cap(const VPolytope& poly, std::size_t cap, const char* who) {
  if (poly.size() > cap) {
    throw UnsupportedError(
        fmt::format("{}: {} vertices exceed the enumeration cap of {}", who, poly.size(), cap));
  }
}

std::vector<std::size_t> mask_indices(std::uint32_t mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; mask != 0; ++i, mask >>= 1) {
    if ((mask & 1u) != 0) out.push_back(i);
  }
  return out;
}

// Columns [v_i; 1] for i in subset.
Matrix combination_matrix(const VPolytope& poly, const std::vector<std::size_t>& subset) {
  const Eigen::Index n = poly.dimension();
  Matrix M(n + 1, static_cast<Eigen::Index>(subset.size()));
  for (std::size_t j = 0; j < subset.size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    M.col(col).head(n) = poly.vertex(subset[j]);
    M(n, col) = 1.0;
  }
  return M;
}

Vector lifted(const Vector& x) {
  Vector b(x.size() + 1);
  b.head(x.size()) = x;
  b(x.size()) = 1.0;
  return b;
}

std::size_t argmax_inner(const VPolytope& poly, const Vector& d) {
  std::size_t best = 0;
  double best_val = -kInf;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const double val = d.dot(poly.vertex(i));
    if (val > best_val) {
      best_val = val;
      best = i;
    }
  }
  return best;
}

}  // namespace

std::optional<std::map<std::size_t, double>> proper_weights(const Vector& x, const VPolytope& poly,
                                                            const std::vector<std::size_t>& subset) {
  require_dimension(x, poly.dimension(), "proper_weights");
  if (subset.empty()) return std::nullopt;
  // Substitute lambda_i = mu_i + t with mu >= 0 and maximize t.
  const Matrix V = combination_matrix(poly, subset);
  const auto k = V.cols();
  Matrix A(V.rows(), k + 1);
  A.leftCols(k) = V;
  A.col(k) = V.rowwise().sum();
  Vector c = Vector::Zero(k + 1);
  c(k) = 1.0;
  const lp::Result res = lp::solve_standard_form(A, lifted(x), c);
  if (res.status != lp::Status::optimal) return std::nullopt;
  const double t = res.z(k);
  if (t < kSupportTolerance) return std::nullopt;
  Vector lambda = res.z.head(k).array() + t;
  lambda /= lambda.sum();
  if ((V.topRows(x.size()) * lambda - x).norm() > kSupportTolerance) return std::nullopt;
  if (lambda.minCoeff() < kSupportTolerance) return std::nullopt;
  std::map<std::size_t, double> weights;
  for (std::size_t j = 0; j < subset.size(); ++j) {
    weights[subset[j]] = lambda(static_cast<Eigen::Index>(j));
  }
  return weights;
}

bool in_hull(const Vector& x, const VPolytope& poly, const std::vector<std::size_t>& subset) {
  require_dimension(x, poly.dimension(), "in_hull");
  if (subset.empty()) return false;
  const Matrix V = combination_matrix(poly, subset);
  const lp::Result res = lp::solve_standard_form(V, lifted(x), Vector::Zero(V.cols()));
  return res.status == lp::Status::optimal;
}

std::vector<ProperSupport> enumerate_proper_supports(const Vector& x, const VPolytope& poly,
                                                     std::size_t cap) {
  check_cap(poly, std::min(cap, kSupportEnumerationCap), "enumerate_proper_supports");
  require_dimension(x, poly.dimension(), "enumerate_proper_supports");
  std::vector<ProperSupport> out;
  const auto m = static_cast<std::uint32_t>(poly.size());
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    auto subset = mask_indices(mask);
    if (auto w = proper_weights(x, poly, subset)) {
      out.push_back(ProperSupport{std::move(subset), std::move(*w)});
    }
  }
  std::sort(out.begin(), out.end(), [](const ProperSupport& a, const ProperSupport& b) {
    return a.atom_indices < b.atom_indices;
  });
  return out;
}

OracleAnswer worst_case_away_vertex(const Vector& grad, const Vector& x, const VPolytope& poly) {
  require_dimension(grad, poly.dimension(), "worst_case_away_vertex");
  const auto supports = enumerate_proper_supports(x, poly);
  if (supports.empty()) {
    throw StructuralError("worst_case_away_vertex: point has no proper support in the polytope");
  }
  std::optional<std::size_t> best;
  double best_val = kInf;
  for (const auto& S : supports) {
    std::size_t vs = S.atom_indices.front();
    double vs_val = grad.dot(poly.vertex(vs));
    for (std::size_t i : S.atom_indices) {
      const double val = grad.dot(poly.vertex(i));
      if (val > vs_val) {
        vs_val = val;
        vs = i;
      }
    }
    if (!best || vs_val < best_val || (vs_val == best_val && vs < *best)) {
      best = vs;
      best_val = vs_val;
    }
  }
  return OracleAnswer{*best, poly.vertex(*best), best_val};
}

double worst_case_away_value(const Vector& grad, const Vector& x, const VPolytope& poly) {
  require_dimension(grad, poly.dimension(), "worst_case_away_value");
  check_cap(poly, kSupportEnumerationCap, "worst_case_away_value");
  std::vector<double> vals(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) vals[i] = grad.dot(poly.vertex(i));
  std::vector<double> levels = vals;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  auto below = [&](double t) {
    std::vector<std::size_t> subset;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (vals[i] <= t) subset.push_back(i);
    }
    return in_hull(x, poly, subset);
  };
  // x always lies in the full hull, so the top level is feasible.
  std::size_t lo = 0;
  std::size_t hi = levels.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (below(levels[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return levels[lo];
}

double directional_width(const std::vector<Vector>& points, const Vector& d) {
  const double norm = d.norm();
  if (!(norm > 0.0)) throw StructuralError("directional_width: zero direction");
  if (points.empty()) throw StructuralError("directional_width: empty point set");
  double lo = kInf;
  double hi = -kInf;
  for (const auto& p : points) {
    const double v = d.dot(p) / norm;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

double pyramidal_dir_width(const VPolytope& poly, const Vector& d, const Vector& x) {
  require_dimension(d, poly.dimension(), "pyramidal_dir_width");
  const double norm = d.norm();
  if (!(norm > 0.0)) throw StructuralError("pyramidal_dir_width: zero direction");
  const auto supports = enumerate_proper_supports(x, poly);
  if (supports.empty()) {
    throw StructuralError("pyramidal_dir_width: point has no proper support in the polytope");
  }
  const std::size_t s = argmax_inner(poly, d);
  double by_definition = kInf;
  for (const auto& S : supports) {
    std::vector<Vector> pts;
    for (std::size_t i : S.atom_indices) pts.push_back(poly.vertex(i));
    pts.push_back(poly.vertex(s));
    by_definition = std::min(by_definition, directional_width(pts, d));
  }
  const OracleAnswer v = worst_case_away_vertex(-d, x, poly);
  const double by_identity = d.dot(poly.vertex(s) - v.vertex) / norm;
  if (std::abs(by_definition - by_identity) > 1e-10 * std::max(1.0, std::abs(by_definition))) {
    throw NumericError(fmt::format(
        "pyramidal_dir_width: support minimum {:.17g} disagrees with away-vertex form {:.17g}",
        by_definition, by_identity));
  }
  return by_definition;
}

int affine_dimension(const VPolytope& poly) {
  return static_cast<int>(poly.direction_basis().cols());
}

std::vector<Face> enumerate_faces(const VPolytope& poly) {
  const auto& hs = poly.halfspaces();
  if (hs.empty()) throw UnsupportedError("enumerate_faces: polytope has no halfspace description");
  if (hs.size() > 64) throw UnsupportedError("enumerate_faces: more than 64 halfspaces");

  std::vector<std::uint64_t> active(poly.size(), 0);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    for (std::size_t h = 0; h < hs.size(); ++h) {
      const double slack = hs[h].offset - hs[h].normal.dot(poly.vertex(i));
      if (std::abs(slack) <= 1e-9 * std::max(1.0, hs[h].normal.norm())) {
        active[i] |= std::uint64_t{1} << h;
      }
    }
  }

  std::set<std::uint64_t> masks(active.begin(), active.end());
  for (bool grown = true; grown;) {
    grown = false;
    const std::vector<std::uint64_t> current(masks.begin(), masks.end());
    for (std::size_t a = 0; a < current.size(); ++a) {
      for (std::size_t b = a + 1; b < current.size(); ++b) {
        if (masks.insert(current[a] & current[b]).second) grown = true;
      }
    }
  }

  std::set<std::vector<std::size_t>> seen;
  std::vector<Face> faces;
  for (std::uint64_t mask : masks) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      if ((active[i] & mask) == mask) members.push_back(i);
    }
    if (members.empty() || !seen.insert(members).second) continue;
    const int dim = affine_dimension(poly.sub_polytope(members));
    faces.push_back(Face{std::move(members), dim});
  }
  std::sort(faces.begin(), faces.end(), [](const Face& a, const Face& b) {
    if (a.dimension != b.dimension) return a.dimension < b.dimension;
    return a.vertex_indices < b.vertex_indices;
  });
  return faces;
}

namespace {

// Evaluates the pyramidal directional width of one face at one base point for
// many directions.  Supports are enumerated once; each evaluation then only
// needs the inner products of the face's vertices with the direction.
class BasePointProbe {
 public:
  BasePointProbe(const VPolytope& face, const Vector& x) : face_(face), x_(x) {
    for (const auto& S : enumerate_proper_supports(x, face)) supports_.push_back(S.atom_indices);
    if (supports_.empty()) {
      throw StructuralError("pyramidal width: base point outside its face");
    }
    for (std::size_t i = 0; i < face.size(); ++i) {
      Vector g = face.vertex(i) - x;
      if (g.norm() > 1e-12) {
        generators_.push_back(std::move(g));
        generator_vertex_.push_back(i);
      }
    }
    ip_.resize(face.size());
  }

  [[nodiscard]] std::size_t generator_count() const { return generators_.size(); }
  [[nodiscard]] const std::vector<std::size_t>& generator_vertex() const { return generator_vertex_; }

  [[nodiscard]] Vector direction(const std::vector<double>& w) const {
    Vector d = Vector::Zero(x_.size());
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (w[j] != 0.0) d += w[j] * generators_[j];
    }
    return d;
  }

  // Width for direction d; +inf for a numerically zero direction.
  double width(const Vector& d) {
    const double norm = d.norm();
    if (!(norm > 1e-14)) return kInf;
    ++evaluations_;
    std::size_t s = 0;
    for (std::size_t i = 0; i < face_.size(); ++i) {
      ip_[i] = d.dot(face_.vertex(i)) / norm;
      if (ip_[i] > ip_[s]) s = i;
    }
    // Support-minimum form.
    double by_definition = kInf;
    for (const auto& S : supports_) {
      double hi = ip_[s];
      double lo = ip_[s];
      for (std::size_t i : S) {
        hi = std::max(hi, ip_[i]);
        lo = std::min(lo, ip_[i]);
      }
      by_definition = std::min(by_definition, hi - lo);
    }
    // Away-vertex form with gradient -d: v_S maximizes <-d, v> over S, and the
    // worst-case away vertex minimizes <-d, v_S> over supports.
    std::size_t vf = supports_.front().front();
    double vf_val = kInf;
    for (const auto& S : supports_) {
      std::size_t vs = S.front();
      for (std::size_t i : S) {
        if (-ip_[i] > -ip_[vs]) vs = i;
      }
      if (-ip_[vs] < vf_val) {
        vf_val = -ip_[vs];
        vf = vs;
      }
    }
    const double by_identity = ip_[s] - ip_[vf];
    if (std::abs(by_definition - by_identity) > 1e-10 * std::max(1.0, std::abs(by_definition))) {
      throw NumericError(fmt::format(
          "pyramidal width: support minimum {:.17g} disagrees with away-vertex form {:.17g}",
          by_definition, by_identity));
    }
    return by_definition;
  }

  [[nodiscard]] std::size_t evaluations() const { return evaluations_; }

 private:
  const VPolytope& face_;
  Vector x_;
  std::vector<std::vector<std::size_t>> supports_;
  std::vector<Vector> generators_;
  std::vector<std::size_t> generator_vertex_;
  std::vector<double> ip_;
  std::size_t evaluations_ = 0;
};

struct Task {
  std::size_t face;
  Vector base_point;
};

struct TaskResult {
  double value = kInf;
  Vector direction;
  std::size_t evaluations = 0;
};

// Subsets used for structured base points and directions: all of them for
// small faces, singletons and pairs otherwise.
std::vector<std::vector<std::size_t>> anchor_subsets(std::size_t m) {
  std::vector<std::vector<std::size_t>> out;
  if (m <= 5) {
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) out.push_back(mask_indices(mask));
    return out;
  }
  for (std::size_t i = 0; i < m; ++i) out.push_back({i});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) out.push_back({i, j});
  }
  std::vector<std::size_t> all(m);
  std::iota(all.begin(), all.end(), std::size_t{0});
  out.push_back(std::move(all));
  return out;
}

Vector subset_mean(const VPolytope& face, const std::vector<std::size_t>& subset) {
  Vector q = Vector::Zero(face.dimension());
  for (std::size_t i : subset) q += face.vertex(i);
  return q / static_cast<double>(subset.size());
}

TaskResult search_base_point(const VPolytope& face, const Vector& x, std::size_t directions,
                             std::mt19937_64& rng) {
  BasePointProbe probe(face, x);
  TaskResult result;
  const std::size_t g = probe.generator_count();
  if (g == 0) return result;

  std::vector<double> best_w(g, 0.0);
  auto consider = [&](const std::vector<double>& w) {
    const Vector d = probe.direction(w);
    const double val = probe.width(d);
    if (val < result.value) {
      result.value = val;
      result.direction = d;
      best_w = w;
    }
  };

  // Directions toward subset barycenters: (mean of S) - x = sum_{i in S} (v_i - x)/|S|.
  std::vector<std::size_t> slot(face.size(), g);
  for (std::size_t j = 0; j < g; ++j) slot[probe.generator_vertex()[j]] = j;
  for (const auto& subset : anchor_subsets(face.size())) {
    std::vector<double> w(g, 0.0);
    bool any = false;
    for (std::size_t i : subset) {
      if (slot[i] < g) {
        w[slot[i]] = 1.0 / static_cast<double>(subset.size());
        any = true;
      }
    }
    if (any) consider(w);
  }

  std::exponential_distribution<double> expo(1.0);
  std::uniform_int_distribution<std::size_t> size_dist(1, g);
  std::vector<std::size_t> order(g);
  for (std::size_t n = 0; n < directions; ++n) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t k = size_dist(rng);
    std::vector<double> w(g, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, g - 1);
      std::swap(order[i], order[pick(rng)]);
      w[order[i]] = expo(rng);
    }
    consider(w);
  }

  // Local refinement of the best weights.
  if (result.value < kInf && g > 1) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> coord(0, g - 1);
    const std::size_t budget = std::max<std::size_t>(200, directions / 5);
    double sigma = 0.5;
    std::size_t failures = 0;
    for (std::size_t it = 0; it < budget && sigma > 1e-8; ++it) {
      std::vector<double> w = best_w;
      const double scale = *std::max_element(w.begin(), w.end());
      if (uniform01(rng) < 0.5) {
        const std::size_t j = coord(rng);
        w[j] = std::max(0.0, w[j] + sigma * scale * gauss(rng));
      } else {
        for (auto& wj : w) wj = std::max(0.0, wj + sigma * scale * gauss(rng));
      }
      if (uniform01(rng) < 0.1) w[coord(rng)] = 0.0;
      const double before = result.value;
      consider(w);
      if (result.value < before) {
        failures = 0;
      } else if (++failures >= 30) {
        sigma *= 0.5;
        failures = 0;
      }
    }
  }
  result.evaluations = probe.evaluations();
  return result;
}

}  // namespace

PyramidalWidthResult pyramidal_width_search(const VPolytope& poly, std::size_t directions_per_base,
                                            std::uint64_t seed, Exec exec) {
  if (poly.size() > kSupportEnumerationCap) {
    throw UnsupportedError("pyramidal_width_estimate: more than 16 vertices");
  }
  if (!poly.has_halfspaces()) {
    throw UnsupportedError("pyramidal_width_estimate: polytope has no halfspace description");
  }
  if (affine_dimension(poly) > 4) {
    throw UnsupportedError("pyramidal_width_estimate: affine dimension above 4");
  }

  std::vector<VPolytope> faces;
  std::vector<std::vector<std::size_t>> face_indices;
  for (const auto& f : enumerate_faces(poly)) {
    if (f.dimension < 1) continue;
    faces.push_back(poly.sub_polytope(f.vertex_indices));
    face_indices.push_back(f.vertex_indices);
  }

  std::vector<Task> tasks;
  constexpr std::size_t kRandomBasePoints = 4;
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    for (const auto& subset : anchor_subsets(faces[fi].size())) {
      tasks.push_back(Task{fi, subset_mean(faces[fi], subset)});
    }
    auto rng = chunk_generator(seed ^ 0x5bd1e995u, fi);
    for (std::size_t r = 0; r < kRandomBasePoints; ++r) {
      tasks.push_back(Task{fi, sample_point(faces[fi], rng)});
    }
  }

  std::vector<TaskResult> results(tasks.size());
  run_tasks(
      tasks.size(), seed,
      [&](std::mt19937_64& rng, std::size_t t) {
        results[t] =
            search_base_point(faces[tasks[t].face], tasks[t].base_point, directions_per_base, rng);
      },
      exec);

  PyramidalWidthResult out;
  out.value = kInf;
  out.faces_searched = faces.size();
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    out.evaluations += results[t].evaluations;
    if (results[t].value < out.value) {
      out.value = results[t].value;
      out.face = face_indices[tasks[t].face];
      out.base_point = tasks[t].base_point;
      out.direction = results[t].direction;
    }
  }
  if (out.value == kInf) out.value = 0.0;
  return out;
}

double pyramidal_width_estimate(const VPolytope& poly, std::size_t directions_per_base,
                                std::uint64_t seed, Exec exec) {
  return pyramidal_width_search(poly, directions_per_base, seed, exec).value;
}

Vector ray_boundary_intersection(const Vector& x, const Vector& xstar, const VPolytope& poly) {
  require_dimension(x, poly.dimension(), "ray_boundary_intersection");
  require_dimension(xstar, poly.dimension(), "ray_boundary_intersection");
  const Vector d = xstar - x;
  const double dnorm = d.norm();
  if (!(dnorm > 1e-15 * (1.0 + x.norm()))) {
    throw StructuralError("ray_boundary_intersection: degenerate ray (x equals xstar)");
  }
  double t = kInf;
  const double eps = 1e-14 * dnorm;
  switch (poly.kind()) {
    case PolytopeKind::simplex:
      for (Eigen::Index j = 0; j < d.size(); ++j) {
        if (d(j) < -eps) t = std::min(t, std::max(0.0, x(j)) / -d(j));
      }
      break;
    case PolytopeKind::box:
      for (Eigen::Index j = 0; j < d.size(); ++j) {
        if (d(j) > eps) t = std::min(t, (poly.upper()(j) - x(j)) / d(j));
        if (d(j) < -eps) t = std::min(t, (poly.lower()(j) - x(j)) / d(j));
      }
      break;
    default:
      if (!poly.has_halfspaces()) {
        throw UnsupportedError(
            "ray_boundary_intersection: generic polytope without halfspace description");
      }
      for (const auto& h : poly.halfspaces()) {
        const double rate = h.normal.dot(d);
        if (rate > eps * h.normal.norm()) t = std::min(t, (h.offset - h.normal.dot(x)) / rate);
      }
      break;
  }
  if (t == kInf) throw StructuralError("ray_boundary_intersection: ray never leaves the polytope");
  return x + std::max(t, 1.0) * d;
}

double interior_radius(const Vector& xstar, const VPolytope& poly) {
  require_dimension(xstar, poly.dimension(), "interior_radius");
  if (!poly.has_halfspaces()) {
    throw UnsupportedError("interior_radius: polytope has no halfspace description");
  }
  if (!poly.contains(xstar)) throw StructuralError("interior_radius: point outside the polytope");
  const Eigen::Index n = poly.dimension();
  switch (poly.kind()) {
    case PolytopeKind::simplex: {
      if (n == 1) return 0.0;
      const double scale = std::sqrt(1.0 - 1.0 / static_cast<double>(n));
      return std::max(0.0, xstar.minCoeff()) / scale;
    }
    case PolytopeKind::box: {
      double r = kInf;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (poly.upper()(j) <= poly.lower()(j)) continue;
        r = std::min({r, xstar(j) - poly.lower()(j), poly.upper()(j) - xstar(j)});
      }
      return r == kInf ? 0.0 : std::max(0.0, r);
    }
    default: {
      const Matrix Q = poly.direction_basis();
      double r = kInf;
      for (const auto& h : poly.halfspaces()) {
        bool hull = true;
        for (const auto& v : poly.vertices()) {
          if (std::abs(h.offset - h.normal.dot(v)) > 1e-9 * std::max(1.0, h.normal.norm())) {
            hull = false;
            break;
          }
        }
        if (hull) continue;
        const double pn = (Q * (Q.transpose() * h.normal)).norm();
        if (pn <= 1e-12) continue;
        r = std::min(r, (h.offset - h.normal.dot(xstar)) / pn);
      }
      return r == kInf ? 0.0 : std::max(0.0, r);
    }
  }
}

}  // namespace fwkit
