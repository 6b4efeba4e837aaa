#include "fwkit/linesearch.hpp"

#include <algorithm>
#include <cmath>

namespace fwkit {

double exact_quadratic(const Matrix& A, const Vector& grad, const Vector& d, double gamma_max) {
  require_dimension(grad, A.rows(), "line search gradient");
  require_dimension(d, A.rows(), "line search direction");
  const double slope = grad.dot(d);
  if (slope >= 0.0) return 0.0;
  const double curv = d.dot(A * d);
  if (curv <= 0.0) return gamma_max;
  return std::clamp(-slope / curv, 0.0, gamma_max);
}

double golden_section(const Objective& obj, const Vector& x, const Vector& d, double gamma_max,
                      double tol, std::size_t max_iters) {
  if (!(tol > 0.0)) throw ConfigError("golden_section: tolerance must be positive");
  if (!(gamma_max > 0.0)) return 0.0;
  auto phi = [&](double g) {
    const double v = obj.value(x + g * d);
    if (!std::isfinite(v)) throw NumericError("golden_section: non-finite objective on segment");
    return v;
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0;
  double hi = gamma_max;
  double a = hi - inv_phi * (hi - lo);
  double b = lo + inv_phi * (hi - lo);
  double fa = phi(a);
  double fb = phi(b);
  for (std::size_t it = 0; it < max_iters && hi - lo > tol; ++it) {
    if (fa <= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = phi(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = phi(b);
    }
  }
  double best = 0.5 * (lo + hi);
  double f_best = phi(best);
  for (double cand : {0.0, gamma_max}) {
    const double fc = phi(cand);
    if (fc < f_best) {
      f_best = fc;
      best = cand;
    }
  }
  return best;
}

double rule_fw(double gap, double cf) {
  if (!(cf > 0.0)) throw ConfigError("rule_fw: curvature constant must be positive");
  return std::min(1.0, std::max(gap, 0.0) / cf);
}

double rule_afw(double pair_gap, double cf_away, double gamma_max) {
  if (!(cf_away > 0.0)) throw ConfigError("rule_afw: curvature constant must be positive");
  if (!(gamma_max > 0.0)) throw ConfigError("rule_afw: gamma_max must be positive");
  return std::min({1.0, gamma_max, std::max(pair_gap, 0.0) / (2.0 * cf_away)});
}

}  // namespace fwkit
