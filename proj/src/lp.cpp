#include "fwkit/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace fwkit::lp {

namespace {

class Tableau {
 public:
  Tableau(const Matrix& A, const Vector& b)
      : m_(A.rows()), n_(A.cols()), t_(Matrix::Zero(A.rows() + 1, A.cols() + A.rows() + 1)),
        basis_(static_cast<std::size_t>(A.rows())), live_(static_cast<std::size_t>(A.rows()), true) {
    for (Eigen::Index i = 0; i < m_; ++i) {
      const double sign = b(i) < 0.0 ? -1.0 : 1.0;
      t_.row(i).head(n_) = sign * A.row(i);
      t_(i, n_ + i) = 1.0;
      t_(i, rhs()) = sign * b(i);
      basis_[static_cast<std::size_t>(i)] = n_ + i;
    }
  }

  [[nodiscard]] Eigen::Index rhs() const { return n_ + m_; }
  [[nodiscard]] Eigen::Index obj() const { return m_; }

  void pivot(Eigen::Index r, Eigen::Index j) {
    t_.row(r) /= t_(r, j);
    for (Eigen::Index i = 0; i <= m_; ++i) {
      if (i != r && t_(i, j) != 0.0) t_.row(i) -= t_(i, j) * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = j;
  }

  // Sets the objective row for maximizing cost'z (cost over all columns) and
  // makes it canonical with respect to the current basis.
  void set_objective(const Vector& cost) {
    t_.row(obj()).setZero();
    t_.row(obj()).head(cost.size()) = -cost.transpose();
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (!live_[static_cast<std::size_t>(i)]) continue;
      const auto bj = basis_[static_cast<std::size_t>(i)];
      const double coeff = t_(obj(), bj);
      if (coeff != 0.0) t_.row(obj()) -= coeff * t_.row(i);
    }
  }

  // Runs simplex iterations over columns [0, ncols).  Returns false when unbounded.
  bool optimize(Eigen::Index ncols, double tol) {
    const std::size_t cap = 50 * static_cast<std::size_t>(m_ + n_ + 1);
    for (std::size_t it = 0; it < cap; ++it) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < ncols; ++j) {
        if (t_(obj(), j) < -tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (!live_[static_cast<std::size_t>(i)] || t_(i, enter) <= tol) continue;
        const double ratio = t_(i, rhs()) / t_(i, enter);
        const bool better = leave < 0 || ratio < best - tol;
        const bool tie_lower = leave >= 0 && std::abs(ratio - best) <= tol &&
                               basis_[static_cast<std::size_t>(i)] <
                                   basis_[static_cast<std::size_t>(leave)];
        if (better || tie_lower) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw NumericError("lp: iteration cap reached");
  }

  // After phase one: pivots artificial variables out of the basis or retires
  // their rows when the constraint is redundant.
  void expel_artificials(double tol) {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < n_) continue;
      Eigen::Index col = -1;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (std::abs(t_(i, j)) > tol) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        pivot(i, col);
      } else {
        live_[static_cast<std::size_t>(i)] = false;
      }
    }
  }

  [[nodiscard]] double objective_value() const { return t_(obj(), rhs()); }

  [[nodiscard]] Vector solution() const {
    Vector z = Vector::Zero(n_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const auto bj = basis_[static_cast<std::size_t>(i)];
      if (live_[static_cast<std::size_t>(i)] && bj < n_) z(bj) = std::max(0.0, t_(i, rhs()));
    }
    return z;
  }

 private:
  Eigen::Index m_, n_;
  Matrix t_;
  std::vector<Eigen::Index> basis_;
  std::vector<bool> live_;
};

}  // namespace

Result solve_standard_form(const Matrix& A, const Vector& b, const Vector& c, double tol) {
  if (A.rows() != b.size() || A.cols() != c.size()) {
    throw StructuralError("lp: inconsistent problem dimensions");
  }
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  Tableau tab(A, b);

  Vector phase_one = Vector::Zero(n + m);
  phase_one.tail(m).setConstant(-1.0);
  tab.set_objective(phase_one);
  tab.optimize(n + m, tol);
  const double scale = 1.0 + b.lpNorm<1>();
  if (tab.objective_value() < -1e3 * tol * scale) return {Status::infeasible, Vector(), 0.0};

  tab.expel_artificials(1e3 * tol);
  Vector phase_two = Vector::Zero(n + m);
  phase_two.head(n) = c;
  tab.set_objective(phase_two);
  if (!tab.optimize(n, tol)) return {Status::unbounded, Vector(), 0.0};

  Result out;
  out.status = Status::optimal;
  out.z = tab.solution();
  out.objective = c.dot(out.z);
  return out;
}

}  // namespace fwkit::lp
