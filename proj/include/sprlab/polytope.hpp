#pragma once

// H-polyhedra {x : A x <= b}: Chebyshev centres, redundancy removal, facet
// centres and 2-D vertex lists.

#include "sprlab/error.hpp"
#include "sprlab/linalg.hpp"
#include "sprlab/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace sprlab {

struct Polyhedron {
  Mat A;
  Vec b;

  Index dim() const { return A.cols(); }
  Index rows() const { return A.rows(); }

  bool contains(const Vec& x, double tol = 0.0) const {
    if (rows() == 0) return true;
    return ((A * x - b).array() <= tol).all();
  }
  // Largest constraint violation (negative when strictly inside).
  double max_violation(const Vec& x) const {
    if (rows() == 0) return -std::numeric_limits<double>::infinity();
    return (A * x - b).maxCoeff();
  }
};

struct LoadBox {
  Vec lower, upper;

  Index dim() const { return lower.size(); }
  double diagonal() const { return (upper - lower).norm(); }
  bool contains(const Vec& x, double tol = 0.0) const {
    return ((x - upper).array() <= tol).all() && ((lower - x).array() <= tol).all();
  }
  Polyhedron as_polyhedron() const {
    const Index d = dim();
    Polyhedron p;
    p.A.resize(2 * d, d);
    p.A << Mat::Identity(d, d), -Mat::Identity(d, d);
    p.b.resize(2 * d);
    p.b << upper, -lower;
    return p;
  }
};

inline LoadBox make_box(const Vec& lower, const Vec& upper) {
  if (lower.size() != upper.size() || !((lower.array() < upper.array()).all()))
    throw ValidationError("load box: lower must be < upper elementwise");
  return {lower, upper};
}

inline Polyhedron stack(const Polyhedron& p, const Polyhedron& q) {
  Polyhedron r;
  r.A.resize(p.rows() + q.rows(), p.dim());
  r.b.resize(p.rows() + q.rows());
  if (p.rows() > 0) {
    r.A.topRows(p.rows()) = p.A;
    r.b.head(p.rows()) = p.b;
  }
  if (q.rows() > 0) {
    r.A.bottomRows(q.rows()) = q.A;
    r.b.tail(q.rows()) = q.b;
  }
  return r;
}

// Scale every row to unit norm; rows with a vanishing normal are dropped
// (they constrain nothing) unless their right-hand side makes the set empty.
inline Polyhedron normalize_rows(const Polyhedron& p, double zero_tol = 1e-10) {
  std::vector<Index> keep;
  Vec norms(p.rows());
  for (Index i = 0; i < p.rows(); ++i) {
    norms(i) = p.A.row(i).norm();
    if (norms(i) > zero_tol) {
      keep.push_back(i);
    } else if (p.b(i) < -1e-9) {
      throw DegenerateError("polyhedron is empty (0 <= negative)");
    }
  }
  Polyhedron out;
  out.A.resize(static_cast<Index>(keep.size()), p.dim());
  out.b.resize(static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const Index i = keep[k];
    out.A.row(static_cast<Index>(k)) = p.A.row(i) / norms(i);
    out.b(static_cast<Index>(k)) = p.b(i) / norms(i);
  }
  return out;
}

struct Ball {
  Vec center;
  double radius = 0.0;
};

// Largest inscribed ball. `radius_cap` keeps the LP bounded for unbounded
// polyhedra. Returns nullopt when the polyhedron is empty.
inline std::optional<Ball> chebyshev_center(const Polyhedron& p, double radius_cap = 1e6) {
  const Index d = p.dim(), m = p.rows();
  Mat G(m + 1, d + 1);
  Vec h(m + 1);
  for (Index i = 0; i < m; ++i) {
    G.row(i).head(d) = p.A.row(i);
    G(i, d) = p.A.row(i).norm();
    h(i) = p.b(i);
  }
  G.row(m).setZero();
  G(m, d) = 1.0;
  h(m) = radius_cap;
  Vec c = Vec::Zero(d + 1);
  c(d) = -1.0;
  auto r = lp::solve_inequality(G, h, c);
  if (r.status != lp::Status::Optimal) return std::nullopt;
  if (r.x(d) < -1e-9) return std::nullopt;
  return Ball{r.x.head(d), r.x(d)};
}

// Drop rows implied by the others. Row i is redundant when maximising a_i'x
// over the remaining rows (plus a_i'x <= b_i + 1 to keep it bounded) cannot
// exceed b_i.
inline Polyhedron remove_redundant(const Polyhedron& p, double tol = 1e-9) {
  const Index d = p.dim();
  std::vector<bool> active(static_cast<std::size_t>(p.rows()), true);
  for (Index i = 0; i < p.rows(); ++i) {
    std::vector<Index> others;
    for (Index j = 0; j < p.rows(); ++j)
      if (j != i && active[static_cast<std::size_t>(j)]) others.push_back(j);
    Mat G(static_cast<Index>(others.size()) + 1, d);
    Vec h(static_cast<Index>(others.size()) + 1);
    for (std::size_t k = 0; k < others.size(); ++k) {
      G.row(static_cast<Index>(k)) = p.A.row(others[k]);
      h(static_cast<Index>(k)) = p.b(others[k]);
    }
    G.row(G.rows() - 1) = p.A.row(i);
    h(h.size() - 1) = p.b(i) + 1.0;
    auto r = lp::solve_inequality(G, h, -p.A.row(i).transpose());
    if (r.status == lp::Status::Infeasible) {
      // Remaining rows already describe an empty set; nothing is redundant
      // in a meaningful sense, keep the row.
      continue;
    }
    if (r.status != lp::Status::Optimal) continue;
    const double best = -r.objective;
    if (best <= p.b(i) + tol * (1.0 + std::abs(p.b(i)))) active[static_cast<std::size_t>(i)] = false;
  }
  Polyhedron out;
  Index n = static_cast<Index>(std::count(active.begin(), active.end(), true));
  out.A.resize(n, d);
  out.b.resize(n);
  Index k = 0;
  for (Index i = 0; i < p.rows(); ++i) {
    if (!active[static_cast<std::size_t>(i)]) continue;
    out.A.row(k) = p.A.row(i);
    out.b(k) = p.b(i);
    ++k;
  }
  return out;
}

// Centre of the largest (d-1)-ball inside facet `row` of p, restricted to
// `extra` (typically the load box). Radii are measured within the facet's
// hyperplane. Rows of p are assumed unit-norm.
inline std::optional<Ball> facet_center(const Polyhedron& p, Index row,
                                        const Polyhedron& extra = {}, double radius_cap = 1e6) {
  const Index d = p.dim();
  const Polyhedron all = extra.rows() > 0 ? stack(p, extra) : p;
  const Vec a = p.A.row(row).transpose();
  const double an = a.norm();
  const Vec u = a / an;
  std::vector<Index> idx;
  for (Index i = 0; i < all.rows(); ++i)
    if (i != row) idx.push_back(i);
  const Index m = static_cast<Index>(idx.size());
  Mat G(m + 3, d + 1);
  Vec h(m + 3);
  for (Index k = 0; k < m; ++k) {
    const Vec aj = all.A.row(idx[static_cast<std::size_t>(k)]).transpose();
    G.row(k).head(d) = aj.transpose();
    G(k, d) = (aj - aj.dot(u) * u).norm();
    h(k) = all.b(idx[static_cast<std::size_t>(k)]);
  }
  G.row(m).head(d) = a.transpose();
  G(m, d) = 0.0;
  h(m) = p.b(row);
  G.row(m + 1).head(d) = -a.transpose();
  G(m + 1, d) = 0.0;
  h(m + 1) = -p.b(row);
  G.row(m + 2).setZero();
  G(m + 2, d) = 1.0;
  h(m + 2) = radius_cap;
  Vec c = Vec::Zero(d + 1);
  c(d) = -1.0;
  auto r = lp::solve_inequality(G, h, c);
  if (r.status != lp::Status::Optimal) return std::nullopt;
  return Ball{r.x.head(d), r.x(d)};
}

// Vertices of a bounded 2-D polygon in counter-clockwise order.
inline std::vector<Vec> polygon_vertices(const Polyhedron& p, double tol = 1e-7) {
  if (p.dim() != 2) throw ValidationError("polygon_vertices: polyhedron is not 2-D");
  std::vector<Vec> pts;
  for (Index i = 0; i < p.rows(); ++i) {
    for (Index j = i + 1; j < p.rows(); ++j) {
      Eigen::Matrix2d M;
      M << p.A(i, 0), p.A(i, 1), p.A(j, 0), p.A(j, 1);
      if (std::abs(M.determinant()) < 1e-12) continue;
      Eigen::Vector2d v = M.inverse() * Eigen::Vector2d(p.b(i), p.b(j));
      Vec x = v;
      if (!p.contains(x, tol * (1.0 + x.norm()))) continue;
      bool dup = false;
      for (const Vec& q : pts)
        if ((q - x).norm() < 1e-6 * (1.0 + x.norm())) dup = true;
      if (!dup) pts.push_back(x);
    }
  }
  if (pts.empty()) return pts;
  Vec c = Vec::Zero(2);
  for (const Vec& q : pts) c += q;
  c /= static_cast<double>(pts.size());
  std::sort(pts.begin(), pts.end(), [&](const Vec& a, const Vec& b) {
    return std::atan2(a(1) - c(1), a(0) - c(0)) < std::atan2(b(1) - c(1), b(0) - c(0));
  });
  return pts;
}

inline double polygon_area(const std::vector<Vec>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec& a = v[i];
    const Vec& b = v[(i + 1) % v.size()];
    s += a(0) * b(1) - a(1) * b(0);
  }
  return 0.5 * std::abs(s);
}

}  // namespace sprlab
