#include "fwkit/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "fwkit/afw_solver.hpp"
#include "fwkit/constants.hpp"
#include "fwkit/geometry.hpp"
#include "fwkit/oracles.hpp"

namespace fwkit {

using nlohmann::json;

std::string_view to_string(OptimumLocation loc) {
  switch (loc) {
    case OptimumLocation::interior: return "interior";
    case OptimumLocation::face: return "face";
    case OptimumLocation::vertex: return "vertex";
  }
  return "interior";
}

double ProblemSpec::suboptimality(const Vector& x) const {
  return objective.gradient(xstar).dot(x - xstar) + objective.bregman(xstar, x);
}

Vector project_simplex(const Vector& y) {
  const Eigen::Index n = y.size();
  std::vector<double> u(y.data(), y.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cumulative += u[static_cast<std::size_t>(j)];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[static_cast<std::size_t>(j)] - t > 0.0) tau = t;
  }
  return (y.array() - tau).max(0.0).matrix();
}

Vector project_box(const Vector& y, const Vector& lower, const Vector& upper) {
  return y.cwiseMax(lower).cwiseMin(upper);
}

namespace {

double gap_at(const QuadraticObjective& f, const VPolytope& poly, const Vector& x) {
  return fw_gap(f.gradient(x), x, poly);
}

// Solves the KKT system on the face identified by x and returns the exact
// minimizer there, or nullopt when it leaves the polytope.
std::optional<Vector> polish(const QuadraticObjective& f, const VPolytope& poly, const Vector& x) {
  const Eigen::Index n = x.size();
  const Matrix& A = f.A();
  const Vector& b = f.b();
  std::vector<Eigen::Index> free;
  Vector out = x;
  if (poly.kind() == PolytopeKind::simplex) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (x(i) > 1e-10) free.push_back(i);
    }
    const auto m = static_cast<Eigen::Index>(free.size());
    Matrix K = Matrix::Zero(m + 1, m + 1);
    Vector rhs(m + 1);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index c = 0; c < m; ++c) K(a, c) = A(free[a], free[c]);
      K(a, m) = 1.0;
      K(m, a) = 1.0;
      rhs(a) = -b(free[a]);
    }
    rhs(m) = 1.0;
    Eigen::FullPivLU<Matrix> lu(K);
    if (!lu.isInvertible()) return std::nullopt;
    const Vector sol = lu.solve(rhs);
    out.setZero();
    for (Eigen::Index a = 0; a < m; ++a) out(free[a]) = sol(a);
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double lo = poly.lower()(i), hi = poly.upper()(i);
      const double tol = 1e-10 * std::max(1.0, hi - lo);
      if (x(i) <= lo + tol) {
        out(i) = lo;
      } else if (x(i) >= hi - tol) {
        out(i) = hi;
      } else {
        free.push_back(i);
      }
    }
    const auto m = static_cast<Eigen::Index>(free.size());
    if (m == 0) return out;
    Matrix K(m, m);
    Vector rhs(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index c = 0; c < m; ++c) K(a, c) = A(free[a], free[c]);
      double r = -b(free[a]);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (std::find(free.begin(), free.end(), j) == free.end()) r -= A(free[a], j) * out(j);
      }
      rhs(a) = r;
    }
    Eigen::FullPivLU<Matrix> lu(K);
    if (!lu.isInvertible()) return std::nullopt;
    const Vector sol = lu.solve(rhs);
    for (Eigen::Index a = 0; a < m; ++a) out(free[a]) = sol(a);
  }
  if (!poly.contains(out, 1e-14)) return std::nullopt;
  return out;
}

Vector projected_gradient(const QuadraticObjective& f, const VPolytope& poly) {
  auto project = [&](const Vector& y) {
    return poly.kind() == PolytopeKind::simplex ? project_simplex(y)
                                                : project_box(y, poly.lower(), poly.upper());
  };
  const double L = lipschitz_constant(f.A());
  if (!(L > 0.0)) return lmo(poly, f.b()).vertex;
  Vector x = project(poly.barycenter());
  for (int it = 0; it < 200000; ++it) {
    const Vector next = project(x - f.gradient(x) / L);
    const double moved = (next - x).norm();
    x = next;
    if (moved <= 1e-16 * (1.0 + x.norm())) break;
    if (it % 50 == 0 && gap_at(f, poly, x) <= 1e-14) break;
  }
  if (auto p = polish(f, poly, x)) {
    if (gap_at(f, poly, *p) <= gap_at(f, poly, x)) return *p;
  }
  return x;
}

Vector away_steps_optimum(const QuadraticObjective& f, const VPolytope& poly) {
  SolverConfig cfg;
  cfg.max_iters = 200000;
  cfg.gap_tolerance = 1e-14;
  cfg.step_rule = StepRule::line_search_exact;
  const RunTrace tr = solve_afw(f, poly, ActiveSet::vertex(0), cfg, {});
  return tr.records.back().x;
}

Vector dirichlet(Eigen::Index n, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  Vector w(n);
  for (auto& wi : w) wi = expo(rng);
  return w / w.sum();
}

Matrix random_psd(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix B(n, n);
  for (auto& b : B.reshaped()) b = g(rng);
  Matrix A = B.transpose() * B / static_cast<double>(n) + 0.1 * Matrix::Identity(n, n);
  return 0.5 * (A + A.transpose());
}

ProblemSpec distance_problem(std::string name, VPolytope poly, const Vector& c, const Vector& xstar) {
  return make_problem(std::move(name), std::move(poly), QuadraticObjective::distance_to(c), &xstar);
}

}  // namespace

Vector solve_quadratic_optimum(const QuadraticObjective& f, const VPolytope& poly) {
  if (poly.kind() == PolytopeKind::simplex || poly.kind() == PolytopeKind::box) {
    return projected_gradient(f, poly);
  }
  return away_steps_optimum(f, poly);
}

OptimumLocation classify_location(const Vector& x, const VPolytope& poly) {
  const int full = affine_dimension(poly);
  int dim = full;
  if (poly.kind() == PolytopeKind::simplex) {
    dim = static_cast<int>((x.array() > 1e-9).count()) - 1;
  } else if (poly.kind() == PolytopeKind::box) {
    dim = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      dim += (x(i) > poly.lower()(i) + 1e-9 && x(i) < poly.upper()(i) - 1e-9) ? 1 : 0;
    }
  } else if (poly.has_halfspaces()) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      bool keep = true;
      for (const auto& h : poly.halfspaces()) {
        const double tol = 1e-9 * std::max(1.0, h.normal.norm());
        if (std::abs(h.offset - h.normal.dot(x)) <= tol &&
            std::abs(h.offset - h.normal.dot(poly.vertex(i))) > tol) {
          keep = false;
          break;
        }
      }
      if (keep) members.push_back(i);
    }
    dim = affine_dimension(poly.sub_polytope(members));
  } else if (poly.size() <= kSupportEnumerationCap) {
    std::vector<std::size_t> members;
    for (const auto& S : enumerate_proper_supports(x, poly)) {
      members.insert(members.end(), S.atom_indices.begin(), S.atom_indices.end());
    }
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (!members.empty()) dim = affine_dimension(poly.sub_polytope(members));
  }
  if (dim <= 0) return OptimumLocation::vertex;
  if (dim >= full) return OptimumLocation::interior;
  return OptimumLocation::face;
}

ProblemSpec make_problem(std::string name, VPolytope poly, QuadraticObjective objective,
                         const Vector* optimum_hint) {
  if (objective.dimension() != poly.dimension()) {
    throw StructuralError("problem: objective and polytope dimensions differ");
  }
  Vector xstar;
  if (optimum_hint != nullptr && optimum_hint->size() == poly.dimension() &&
      poly.contains(*optimum_hint) && gap_at(objective, poly, *optimum_hint) <= 1e-9) {
    xstar = *optimum_hint;
  } else {
    xstar = solve_quadratic_optimum(objective, poly);
  }
  const double fstar = objective.value(xstar);
  const OptimumLocation loc = classify_location(xstar, poly);
  ProblemSpec spec{std::move(name), std::move(poly), std::move(objective), std::move(xstar), fstar, loc};
  validate_problem(spec);
  return spec;
}

void validate_problem(const ProblemSpec& spec) {
  const double gap = gap_at(spec.objective, spec.poly, spec.xstar);
  if (!(gap <= 1e-9)) {
    throw StructuralError(fmt::format("problem {}: gap {:.3g} at the stored optimum", spec.name, gap));
  }
  if (std::abs(spec.fstar - spec.objective.value(spec.xstar)) > 1e-12 * std::max(1.0, std::abs(spec.fstar))) {
    throw StructuralError(fmt::format("problem {}: stored optimal value is stale", spec.name));
  }
}

ProblemSpec generate_problem(std::string_view family, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + 12345);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::string name = fmt::format("{}:{}:{}", family, n, seed);
  auto need = [&](bool ok, const char* why) {
    if (!ok) throw ConfigError(fmt::format("family {} with dimension {}: {}", family, n, why));
  };

  if (family == "simplex_interior") {
    need(n >= 2, "needs dimension >= 2");
    Vector c(n);
    if (seed == 0 && n == 3) {
      c << 0.5, 0.3, 0.2;
    } else if (seed == 0) {
      // decreasing ramp summing to one
      for (Eigen::Index i = 0; i < n; ++i) c(i) = static_cast<double>(n - i);
      c /= c.sum();
    } else {
      c = 0.5 * dirichlet(n, rng) + Vector::Constant(n, 0.5 / static_cast<double>(n));
    }
    return distance_problem(name, VPolytope::simplex(n), c, c);
  }
  if (family == "simplex_face") {
    need(n >= 3, "needs dimension >= 3");
    Vector c(n), p = Vector::Zero(n);
    if (seed == 0) {
      c.setConstant(-0.2);
      c(0) = c(1) = 0.6;
      p(0) = p(1) = 0.5;
    } else {
      // optimum p in the relative interior of a random face with 2..n-1 vertices;
      // c = p + tau*1 - u with u > 0 off the face projects back onto p
      std::uniform_int_distribution<Eigen::Index> size_dist(2, n - 1);
      const Eigen::Index k = size_dist(rng);
      std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
      std::iota(idx.begin(), idx.end(), Eigen::Index{0});
      std::shuffle(idx.begin(), idx.end(), rng);
      const Vector w = 0.5 * dirichlet(k, rng) + Vector::Constant(k, 0.5 / static_cast<double>(k));
      for (Eigen::Index j = 0; j < k; ++j) p(idx[static_cast<std::size_t>(j)]) = w(j);
      const double tau = 0.1;
      for (Eigen::Index i = 0; i < n; ++i) c(i) = p(i) > 0.0 ? p(i) + tau : tau - 0.1 - 0.4 * unif(rng);
    }
    return distance_problem(name, VPolytope::simplex(n), c, p);
  }
  if (family == "simplex_vertex") {
    need(n >= 2, "needs dimension >= 2");
    Vector c = Vector::Zero(n);
    c(0) = 2.0;
    return distance_problem(name, VPolytope::simplex(n), c, Vector::Unit(n, 0));
  }
  if (family == "box_interior" || family == "box_face") {
    need(n >= 1 && n <= 12, "box families need dimension in [1, 12]");
    Vector c(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      c(i) = seed == 0 ? 0.3 + 0.4 * static_cast<double>(i + 1) / static_cast<double>(n + 1)
                       : 0.2 + 0.6 * unif(rng);
    }
    if (family == "box_face") c(0) = 1.5;
    VPolytope poly = VPolytope::box(n, 0.0, 1.0);
    const Vector xstar = project_box(c, poly.lower(), poly.upper());
    return distance_problem(name, std::move(poly), c, xstar);
  }
  if (family == "random_psd_simplex" || family == "random_psd_box") {
    const bool box = family == "random_psd_box";
    need(n >= 2 && (!box || n <= 12), "needs dimension >= 2 (at most 12 for boxes)");
    Matrix A = random_psd(n, rng);
    std::normal_distribution<double> g(0.0, 0.5);
    Vector b(n);
    for (auto& bi : b) bi = g(rng);
    VPolytope poly = box ? VPolytope::box(n, 0.0, 1.0) : VPolytope::simplex(n);
    return make_problem(name, std::move(poly), QuadraticObjective(std::move(A), b));
  }
  throw ConfigError(fmt::format("unknown problem family '{}'", family));
}

namespace {

Vector to_vector(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(fmt::format("problem file: {} must be an array", what));
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

json from_vector(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open problem file '{}'", path));
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("problem file '{}': {}", path, e.what()));
  }
}

VPolytope polytope_from_json(const json& j, Eigen::Index dimension) {
  const std::string kind = j.value("kind", "generic");
  if (kind == "simplex") return VPolytope::simplex(dimension);
  if (kind == "l1ball") return VPolytope::l1ball(dimension);
  if (kind == "box") {
    const auto& bounds = j.at("bounds");
    return VPolytope::box(to_vector(bounds.at("lower"), "lower"), to_vector(bounds.at("upper"), "upper"));
  }
  if (kind != "generic") throw ConfigError(fmt::format("unknown polytope kind '{}'", kind));
  std::vector<Vector> vertices;
  for (const auto& v : j.at("vertices")) vertices.push_back(to_vector(v, "vertex"));
  std::vector<Halfspace> halfspaces;
  if (j.contains("halfspaces")) {
    for (const auto& h : j.at("halfspaces")) {
      halfspaces.push_back(Halfspace{to_vector(h.at("normal"), "normal"), h.at("offset").get<double>()});
    }
  }
  return VPolytope(std::move(vertices), PolytopeKind::generic, std::move(halfspaces));
}

Eigen::Index dimension_of(const json& j) {
  if (j.contains("dimension")) return j.at("dimension").get<Eigen::Index>();
  const auto& p = j.at("polytope");
  if (p.contains("vertices")) return static_cast<Eigen::Index>(p.at("vertices").at(0).size());
  return static_cast<Eigen::Index>(j.at("objective").at("b").size());
}

}  // namespace

ProblemSpec load_problem_json(const std::string& path) {
  const json j = read_json(path);
  try {
    const Eigen::Index n = dimension_of(j);
    VPolytope poly = polytope_from_json(j.at("polytope"), n);
    const auto& obj = j.at("objective");
    if (obj.value("kind", "quadratic") != "quadratic") {
      throw ConfigError("problem file: only quadratic objectives are supported");
    }
    Matrix A(n, n);
    const auto& rows = obj.at("A");
    if (rows.size() != static_cast<std::size_t>(n)) throw ConfigError("problem file: A has wrong shape");
    for (Eigen::Index r = 0; r < n; ++r) A.row(r) = to_vector(rows[static_cast<std::size_t>(r)], "A row").transpose();
    QuadraticObjective f(std::move(A), to_vector(obj.at("b"), "b"), obj.value("c", 0.0));
    std::optional<Vector> hint;
    if (j.contains("optimum_hint")) hint = to_vector(j.at("optimum_hint").at("x"), "optimum_hint.x");
    return make_problem(j.value("name", path), std::move(poly), std::move(f), hint ? &*hint : nullptr);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("problem file '{}': {}", path, e.what()));
  } catch (const StructuralError& e) {
    throw ConfigError(fmt::format("problem file '{}': {}", path, e.what()));
  }
}

std::string problem_to_json(const ProblemSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["dimension"] = spec.poly.dimension();
  json p;
  p["kind"] = std::string(to_string(spec.poly.kind()));
  if (spec.poly.kind() == PolytopeKind::box) {
    p["bounds"] = {{"lower", from_vector(spec.poly.lower())}, {"upper", from_vector(spec.poly.upper())}};
  } else if (spec.poly.kind() == PolytopeKind::generic) {
    p["vertices"] = json::array();
    for (const auto& v : spec.poly.vertices()) p["vertices"].push_back(from_vector(v));
    if (spec.poly.has_halfspaces()) {
      p["halfspaces"] = json::array();
      for (const auto& h : spec.poly.halfspaces()) {
        p["halfspaces"].push_back({{"normal", from_vector(h.normal)}, {"offset", h.offset}});
      }
    }
  }
  j["polytope"] = p;
  json A = json::array();
  for (Eigen::Index r = 0; r < spec.objective.A().rows(); ++r) {
    A.push_back(from_vector(spec.objective.A().row(r).transpose()));
  }
  j["objective"] = {{"kind", "quadratic"}, {"A", A}, {"b", from_vector(spec.objective.b())},
                    {"c", spec.objective.c()}};
  j["optimum_hint"] = {{"x", from_vector(spec.xstar)}, {"f", spec.fstar}};
  return j.dump(2);
}

ProblemSpec load_problem(const std::string& source) {
  constexpr std::string_view prefix = "family:";
  if (source.rfind(prefix, 0) != 0) return load_problem_json(source);
  std::vector<std::string> parts;
  std::stringstream ss(source.substr(prefix.size()));
  for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
  if (parts.size() != 3) {
    throw ConfigError(fmt::format("problem '{}': expected family:NAME:DIM:SEED", source));
  }
  try {
    return generate_problem(parts[0], std::stol(parts[1]), std::stoull(parts[2]));
  } catch (const std::logic_error&) {
    throw ConfigError(fmt::format("problem '{}': dimension and seed must be integers", source));
  }
}

VPolytope load_polytope(const std::string& source) {
  const auto colon = source.find(':');
  if (colon == std::string::npos) throw ConfigError(fmt::format("polytope '{}': expected kind:arg", source));
  const std::string kind = source.substr(0, colon);
  const std::string arg = source.substr(colon + 1);
  if (kind == "file") {
    const json j = read_json(arg);
    try {
      return polytope_from_json(j.at("polytope"), dimension_of(j));
    } catch (const json::exception& e) {
      throw ConfigError(fmt::format("polytope file '{}': {}", arg, e.what()));
    }
  }
  Eigen::Index d = 0;
  try {
    d = std::stol(arg);
  } catch (const std::logic_error&) {
    throw ConfigError(fmt::format("polytope '{}': dimension must be an integer", source));
  }
  if (kind == "simplex") return VPolytope::simplex(d);
  if (kind == "box") return VPolytope::box(d, 0.0, 1.0);
  throw ConfigError(fmt::format("unknown polytope '{}'", source));
}

}  // namespace fwkit
