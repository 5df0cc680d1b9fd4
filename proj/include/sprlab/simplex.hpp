#pragma once

// Dense revised simplex with Bland's anti-cycling rule.
//
// Two entry points:
//   solve_standard    min c'x  s.t. A x = b, x >= 0
//   solve_inequality  min c'x  s.t. G x <= h, x free
//
// solve_inequality works on the dual standard form
//   min h'y  s.t. G'y = -c, y >= 0
// so the optimal basis is a set of rows of G, the simplex multipliers are the
// primal point, and the basic y are the constraint multipliers. That is the
// shape the parametric analysis wants: a basis is a candidate binding set.

#include "sprlab/linalg.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

namespace sprlab::lp {

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

struct SimplexOptions {
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  double pivot_tol = 1e-9;
  int refactor_every = 32;
  int max_iter = 50000;
};

struct StandardResult {
  Status status = Status::Infeasible;
  Vec x;                    // primal, size n
  Vec duals;                // simplex multipliers pi, size m (pi' A_B = c_B)
  double objective = 0.0;
  std::vector<Index> basis; // basic column per row; entries >= n are artificials
  int iterations = 0;
};

namespace detail {

class RevisedSimplex {
 public:
  RevisedSimplex(const Mat& A, const Vec& b, const SimplexOptions& opt)
      : opt_(opt), m_(A.rows()), n_(A.cols()), sign_(Vec::Ones(A.rows())) {
    A_ = A;
    b_ = b;
    for (Index i = 0; i < m_; ++i) {
      if (b_(i) < 0) {
        sign_(i) = -1.0;
        A_.row(i) *= -1.0;
        b_(i) = -b_(i);
      }
    }
    basis_.resize(static_cast<std::size_t>(m_));
    for (Index i = 0; i < m_; ++i) basis_[static_cast<std::size_t>(i)] = n_ + i;
    is_basic_.assign(static_cast<std::size_t>(n_ + m_), false);
    for (Index i = 0; i < m_; ++i) is_basic_[static_cast<std::size_t>(n_ + i)] = true;
    Binv_ = Mat::Identity(m_, m_);
    xB_ = b_;
  }

  StandardResult run(const Vec& c) {
    StandardResult res;
    // Phase 1: minimise the sum of artificials.
    Vec c1 = Vec::Zero(n_ + m_);
    c1.tail(m_).setOnes();
    Status s1 = iterate(c1, /*allow_artificial=*/true, res.iterations);
    if (s1 == Status::IterationLimit) {
      res.status = s1;
      return res;
    }
    double infeas = 0.0;
    for (Index i = 0; i < m_; ++i)
      if (basis_[static_cast<std::size_t>(i)] >= n_) infeas += xB_(i);
    if (infeas > opt_.feas_tol * (1.0 + b_.cwiseAbs().maxCoeff())) {
      res.status = Status::Infeasible;
      return res;
    }
    drive_out_artificials();

    Vec c2 = Vec::Zero(n_ + m_);
    c2.head(n_) = c;
    Status s2 = iterate(c2, /*allow_artificial=*/false, res.iterations);
    res.status = s2;
    if (s2 != Status::Optimal) return res;

    res.x = Vec::Zero(n_);
    for (Index i = 0; i < m_; ++i) {
      Index j = basis_[static_cast<std::size_t>(i)];
      if (j < n_) res.x(j) = std::max(0.0, xB_(i));
    }
    Vec cB(m_);
    for (Index i = 0; i < m_; ++i) cB(i) = c2(basis_[static_cast<std::size_t>(i)]);
    Vec pi = Binv_.transpose() * cB;
    res.duals = sign_.cwiseProduct(pi);
    res.objective = c.dot(res.x);
    res.basis = basis_;
    return res;
  }

 private:
  Vec column(Index j) const {
    if (j < n_) return A_.col(j);
    Vec e = Vec::Zero(m_);
    e(j - n_) = 1.0;
    return e;
  }

  void refactor() {
    Mat B(m_, m_);
    for (Index i = 0; i < m_; ++i) B.col(i) = column(basis_[static_cast<std::size_t>(i)]);
    Eigen::PartialPivLU<Mat> lu(B);
    Binv_ = lu.inverse();
    xB_ = Binv_ * b_;
  }

  void pivot(Index row, Index entering, const Vec& u) {
    const double p = u(row);
    Binv_.row(row) /= p;
    xB_(row) /= p;
    for (Index i = 0; i < m_; ++i) {
      if (i == row || u(i) == 0.0) continue;
      Binv_.row(i) -= u(i) * Binv_.row(row);
      xB_(i) -= u(i) * xB_(row);
    }
    is_basic_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(row)])] = false;
    basis_[static_cast<std::size_t>(row)] = entering;
    is_basic_[static_cast<std::size_t>(entering)] = true;
    if (++since_refactor_ >= opt_.refactor_every) {
      refactor();
      since_refactor_ = 0;
    }
  }

  Status iterate(const Vec& cost, bool allow_artificial, int& iterations) {
    const Index ncols = allow_artificial ? n_ + m_ : n_;
    while (true) {
      if (iterations >= opt_.max_iter) return Status::IterationLimit;
      Vec cB(m_);
      for (Index i = 0; i < m_; ++i) cB(i) = cost(basis_[static_cast<std::size_t>(i)]);
      Vec pi = Binv_.transpose() * cB;

      // Bland: lowest-index improving column.
      Index entering = -1;
      for (Index j = 0; j < ncols; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)]) continue;
        double d = cost(j) - (j < n_ ? A_.col(j).dot(pi) : pi(j - n_));
        if (d < -opt_.opt_tol) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return Status::Optimal;

      Vec u = Binv_ * column(entering);
      Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < m_; ++i) {
        if (u(i) <= opt_.pivot_tol) continue;
        double ratio = std::max(0.0, xB_(i)) / u(i);
        if (leave < 0 || ratio < best - 1e-12) {
          best = ratio;
          leave = i;
        } else if (ratio <= best + 1e-12 &&
                   basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]) {
          leave = i;
        }
      }
      if (leave < 0) return Status::Unbounded;
      pivot(leave, entering, u);
      ++iterations;
    }
  }

  void drive_out_artificials() {
    for (Index i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < n_) continue;
      Index best_j = -1;
      double best_mag = opt_.pivot_tol * 1e3;
      for (Index j = 0; j < n_; ++j) {
        if (is_basic_[static_cast<std::size_t>(j)]) continue;
        double mag = std::abs(Binv_.row(i).dot(A_.col(j)));
        if (mag > best_mag) {
          best_mag = mag;
          best_j = j;
        }
      }
      // No candidate means the row is linearly dependent; the artificial
      // stays basic at zero and can never leave in phase 2.
      if (best_j >= 0) pivot(i, best_j, Binv_ * A_.col(best_j));
    }
    refactor();
    since_refactor_ = 0;
  }

  SimplexOptions opt_;
  Index m_, n_;
  Mat A_;
  Vec b_;
  Vec sign_;
  std::vector<Index> basis_;
  std::vector<bool> is_basic_;
  Mat Binv_;
  Vec xB_;
  int since_refactor_ = 0;
};

}  // namespace detail

inline StandardResult solve_standard(const Mat& A, const Vec& b, const Vec& c,
                                     const SimplexOptions& opt = {}) {
  detail::RevisedSimplex rs(A, b, opt);
  return rs.run(c);
}

struct InequalityResult {
  Status status = Status::Infeasible;
  Vec x;                     // primal point
  Vec y;                     // row multipliers, y >= 0, G'y = -c
  Vec slack;                 // h - G x
  double objective = 0.0;    // c'x
  std::vector<Index> basis;  // rows of G in the optimal basis
  int iterations = 0;
};

// min c'x s.t. G x <= h with x free. Requires G to have full column rank for
// a unique primal point; otherwise x is one optimal point among many.
inline InequalityResult solve_inequality(const Mat& G, const Vec& h, const Vec& c,
                                         const SimplexOptions& opt = {}) {
  InequalityResult out;
  StandardResult sr = solve_standard(G.transpose(), -c, h, opt);
  out.iterations = sr.iterations;
  switch (sr.status) {
    case Status::Optimal: break;
    // Dual infeasible means the primal is unbounded (or itself infeasible).
    case Status::Infeasible: out.status = Status::Unbounded; return out;
    // Dual unbounded means the primal is infeasible.
    case Status::Unbounded: out.status = Status::Infeasible; return out;
    case Status::IterationLimit: out.status = Status::IterationLimit; return out;
  }
  out.status = Status::Optimal;
  out.x = sr.duals;
  out.y = sr.x;
  out.slack = h - G * out.x;
  out.objective = c.dot(out.x);
  for (Index j : sr.basis)
    if (j < G.rows()) out.basis.push_back(j);
  std::sort(out.basis.begin(), out.basis.end());
  return out;
}

}  // namespace sprlab::lp
