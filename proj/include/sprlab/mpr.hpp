#pragma once

// Multi-parametric analysis of the dispatch LP: system patterns, the
// polyhedral region of loads sharing a pattern, enumeration of all regions
// inside a load box, adjacency and price-uniqueness checks.

#include "sprlab/error.hpp"
#include "sprlab/grid.hpp"
#include "sprlab/linalg.hpp"
#include "sprlab/polytope.hpp"
#include "sprlab/random.hpp"
#include "sprlab/sced.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace sprlab {

// Binding rows of the dispatch LP (0-based), sorted, with the redundant
// balance- row removed. Row 0 (balance+) is always present.
struct SystemPattern {
  std::vector<Index> binding;
  Index n_rows = 0;

  std::vector<int> one_based() const {
    std::vector<int> out;
    for (Index i : binding) out.push_back(static_cast<int>(i) + 1);
    return out;
  }
  // 1-based listing including both balance rows, the way tables print it.
  std::vector<int> printed() const {
    std::vector<int> out{1, 2};
    for (Index i : binding)
      if (i >= 2) out.push_back(static_cast<int>(i) + 1);
    return out;
  }
  friend bool operator==(const SystemPattern& a, const SystemPattern& b) {
    return a.binding == b.binding;
  }
  friend bool operator<(const SystemPattern& a, const SystemPattern& b) {
    return a.binding < b.binding;
  }
};

struct SPRRecord {
  SystemPattern pattern;
  Polyhedron region;  // unit-norm rows, minimal; region = {pd : A pd <= b}
  LMPVector lmp;
  Vec interior_point;
  double inradius = 0.0;
  Vec dual_y;  // multipliers on pattern.binding, same order
};

inline SystemPattern optimal_partition(const DispatchSolution& sol) {
  if (sol.degenerate) throw DegenerateError("optimal_partition: " + sol.degeneracy_reason);
  return SystemPattern{sol.binding, sol.rhs.size()};
}

namespace detail {

inline Mat rows_of(const Mat& M, const std::vector<Index>& idx) {
  Mat out(static_cast<Index>(idx.size()), M.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Index>(k)) = M.row(idx[k]);
  return out;
}
inline Vec rows_of(const Vec& v, const std::vector<Index>& idx) {
  Vec out(static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out(static_cast<Index>(k)) = v(idx[k]);
  return out;
}

// LMP from multipliers on the binding rows.
inline LMPVector lmp_from_duals(const ParametricLP& lp, const std::vector<Index>& binding,
                                const Vec& yB) {
  Vec y = Vec::Zero(lp.rows());
  for (std::size_t k = 0; k < binding.size(); ++k) y(binding[k]) = yB(static_cast<Index>(k));
  const double lambda1 = y(1) - y(0);
  const Vec mu_u = y.segment(lp.line_row(0, true), lp.n_line);
  const Vec mu_l = y.segment(lp.line_row(0, false), lp.n_line);
  LMPVector out;
  out.lambda = Vec::Constant(lp.H.cols(), lambda1) - lp.H.transpose() * (mu_u - mu_l);
  return out;
}

}  // namespace detail

struct RegionOptions {
  std::optional<LoadBox> box;    // where to look for the interior point
  double min_radius = 1e-7;
};

// Region of loads with the given pattern. With x = (A_B)^-1 (b + W pd)_B the
// non-binding rows must stay slack: A_N x < (b + W pd)_N, i.e.
//   (A_N A_B^-1 W_B - W_N) pd < b_N - A_N A_B^-1 b_B.
inline SPRRecord region_of(const SystemPattern& pattern, const ParametricLP& lp,
                           const RegionOptions& opt = {}) {
  const std::vector<Index>& B = pattern.binding;
  if (B.empty() || B.front() != 0) throw ValidationError("region_of: pattern must contain row 1");
  if (static_cast<Index>(B.size()) != lp.n_gen)
    throw DegenerateError("region_of: pattern size differs from generator count");
  std::vector<Index> N;
  for (Index i = 0; i < lp.rows(); ++i)
    if (!std::binary_search(B.begin(), B.end(), i)) N.push_back(i);

  const Mat AB = detail::rows_of(lp.A, B);
  Eigen::FullPivLU<Mat> lu(AB);
  if (!lu.isInvertible()) throw SingularError("region_of: binding rows are linearly dependent");

  Vec yB = lu.transpose().solve(Vec(-lp.c));
  const double ytol = kDualTol * (1.0 + lp.c.cwiseAbs().maxCoeff());
  for (std::size_t k = 1; k < B.size(); ++k)
    if (yB(static_cast<Index>(k)) <= ytol)
      throw ValidationError("region_of: pattern is not optimal for this cost vector");

  const Mat M = detail::rows_of(lp.A, N) * lu.inverse();
  Polyhedron raw;
  raw.A = M * detail::rows_of(lp.W, B) - detail::rows_of(lp.W, N);
  raw.b = detail::rows_of(lp.b, N) - M * detail::rows_of(lp.b, B);

  SPRRecord rec;
  rec.pattern = pattern;
  rec.region = remove_redundant(normalize_rows(raw));
  rec.dual_y = yB;
  rec.lmp = detail::lmp_from_duals(lp, B, yB);

  Polyhedron search = rec.region;
  if (opt.box) search = stack(search, opt.box->as_polyhedron());
  auto ball = chebyshev_center(search);
  if (!ball || ball->radius <= opt.min_radius)
    throw DegenerateError("region_of: region is empty or lower-dimensional");
  rec.interior_point = ball->center;
  rec.inradius = ball->radius;
  return rec;
}

struct EnumerateOptions {
  double step_frac = 1e-4;        // facet step as a fraction of the box diagonal
  int jitter_retries = 2;         // each retry multiplies the step by 10
  int seed_tries = 2000;
  int coverage_samples = 4000;    // post-pass that re-seeds from uncovered samples
  std::uint64_t seed = 20160101;
};

struct EnumerationLog {
  int lp_solves = 0;
  int degenerate_skips = 0;    // facet crossings that never left a degenerate point
  int degenerate_samples = 0;  // seed or coverage points that were degenerate
  int coverage_reseeds = 0;
};

inline std::vector<SPRRecord> enumerate_sprs(const ParametricLP& lp, const LoadBox& box,
                                             const EnumerateOptions& opt = {},
                                             EnumerationLog* log = nullptr) {
  if (box.dim() != lp.n_load()) throw ValidationError("enumerate_sprs: box dimension mismatch");
  EnumerationLog local;
  EnumerationLog& lg = log ? *log : local;
  const double eps = opt.step_frac * box.diagonal();
  const Polyhedron box_poly = box.as_polyhedron();
  RegionOptions ropt;
  ropt.box = box;

  std::vector<SPRRecord> regions;
  std::set<std::vector<Index>> seen;
  std::deque<std::size_t> frontier;
  CounterRng rng(opt.seed, 1);

  auto try_point = [&](const Vec& pd) -> std::optional<SystemPattern> {
    ++lg.lp_solves;
    auto sol = try_solve_lp(lp, pd);
    if (!sol) return std::nullopt;
    if (sol->degenerate) {
      ++lg.degenerate_samples;
      return std::nullopt;
    }
    return optimal_partition(*sol);
  };
  auto add = [&](const SystemPattern& pat) {
    if (!seen.insert(pat.binding).second) return;
    try {
      regions.push_back(region_of(pat, lp, ropt));
      frontier.push_back(regions.size() - 1);
    } catch (const DegenerateError&) {
      ++lg.degenerate_skips;  // touches the box only on a boundary
    }
  };
  auto random_point = [&]() {
    Vec p(box.dim());
    for (Index k = 0; k < box.dim(); ++k) p(k) = rng.uniform(box.lower(k), box.upper(k));
    return p;
  };

  auto explore = [&]() {
    while (!frontier.empty()) {
      const std::size_t ri = frontier.front();
      frontier.pop_front();
      const Polyhedron region = regions[ri].region;
      for (Index f = 0; f < region.rows(); ++f) {
        auto fc = facet_center(region, f, box_poly);
        if (!fc || fc->radius <= 1e-9) continue;
        const Vec normal = region.A.row(f).transpose();
        for (int attempt = 0; attempt <= opt.jitter_retries; ++attempt) {
          Vec p = fc->center + eps * std::pow(10.0, attempt) * normal;
          if (attempt > 0) {
            Vec t(box.dim());
            for (Index k = 0; k < box.dim(); ++k) t(k) = rng.uniform(-1.0, 1.0);
            t -= t.dot(normal) * normal;
            if (t.norm() > 0) p += std::min(fc->radius, eps * std::pow(10.0, attempt)) * 0.5 * t / t.norm();
          }
          if (!box.contains(p)) break;
          ++lg.lp_solves;
          auto sol = try_solve_lp(lp, p);
          if (!sol) break;  // left the feasible set
          if (sol->degenerate) {
            ++lg.degenerate_skips;
            continue;
          }
          add(optimal_partition(*sol));
          break;
        }
      }
    }
  };

  // Seed: box centre, then random points.
  Vec centre = 0.5 * (box.lower + box.upper);
  if (auto pat = try_point(centre)) add(*pat);
  for (int t = 0; regions.empty() && t < opt.seed_tries; ++t)
    if (auto pat = try_point(random_point())) add(*pat);
  if (regions.empty()) throw InfeasibleError("enumerate_sprs: no feasible non-degenerate seed in box");
  explore();

  // Facet stepping from facet centres can miss a neighbour that touches only
  // part of a facet; re-seed from samples no known region covers.
  for (int s = 0; s < opt.coverage_samples; ++s) {
    Vec p = random_point();
    bool covered = false;
    for (const SPRRecord& r : regions)
      if (r.region.contains(p, 1e-9)) {
        covered = true;
        break;
      }
    if (covered) continue;
    if (auto pat = try_point(p)) {
      if (!seen.count(pat->binding)) {
        ++lg.coverage_reseeds;
        add(*pat);
        explore();
      }
    }
  }
  return regions;
}

inline std::vector<SPRRecord> enumerate_sprs(const NetworkCase& nc, const LoadBox& box,
                                             const EnumerateOptions& opt = {},
                                             EnumerationLog* log = nullptr) {
  return enumerate_sprs(build_sced(nc, compute_shift_factors(nc)), box, opt, log);
}

// Default exploration box: [-2 max, +2 max] per load bus, where max is the
// total generation capacity.
inline LoadBox default_box(const NetworkCase& nc) {
  const double cap = std::max(1.0, nc.pmax().sum());
  return make_box(Vec::Constant(nc.n_load(), -2.0 * cap), Vec::Constant(nc.n_load(), 2.0 * cap));
}

// Which region contains pd (closure with tolerance), or -1.
inline int locate(const std::vector<SPRRecord>& regions, const Vec& pd, double tol = 1e-9) {
  for (std::size_t i = 0; i < regions.size(); ++i)
    if (regions[i].region.contains(pd, tol)) return static_cast<int>(i);
  return -1;
}

// Patterns differ in exactly one row and the closures share a (d-1)-face.
inline bool are_adjacent(const SPRRecord& r1, const SPRRecord& r2, double tol = 1e-7) {
  const auto& b1 = r1.pattern.binding;
  const auto& b2 = r2.pattern.binding;
  if (b1.size() != b2.size()) return false;
  std::vector<Index> diff;
  std::set_difference(b1.begin(), b1.end(), b2.begin(), b2.end(), std::back_inserter(diff));
  if (diff.size() != 1) return false;

  const Polyhedron& p = r1.region;
  const Polyhedron& q = r2.region;
  for (Index i = 0; i < p.rows(); ++i) {
    const Vec a = p.A.row(i).transpose();
    // Rows of q parallel to the candidate hyperplane must agree with it;
    // the others enter the facet LP.
    Polyhedron extra;
    std::vector<Index> keep;
    bool consistent = true;
    for (Index j = 0; j < q.rows(); ++j) {
      const double cosang = q.A.row(j).dot(a);
      if (std::abs(std::abs(cosang) - 1.0) < 1e-9) {
        const double offset = cosang > 0 ? p.b(i) : -p.b(i);
        if (offset > q.b(j) + tol * (1.0 + std::abs(q.b(j)))) consistent = false;
        continue;
      }
      keep.push_back(j);
    }
    if (!consistent) continue;
    extra.A = detail::rows_of(q.A, keep);
    extra.b = detail::rows_of(q.b, keep);
    auto fc = facet_center(p, i, extra);
    if (fc && fc->radius > tol) return true;
  }
  return false;
}

struct UniquenessReport {
  bool unique = true;
  std::optional<std::pair<std::size_t, std::size_t>> offending;
};

inline UniquenessReport verify_unique_lmps(const std::vector<SPRRecord>& regions, double tol = 1e-6) {
  UniquenessReport rep;
  for (std::size_t i = 0; i < regions.size(); ++i)
    for (std::size_t j = i + 1; j < regions.size(); ++j)
      if (inf_norm(regions[i].lmp.lambda - regions[j].lmp.lambda) <= tol) {
        rep.unique = false;
        rep.offending = {i, j};
        return rep;
      }
  return rep;
}

struct CostAdmission {
  bool admitted = false;
  Vec y;  // multipliers on the pattern rows under the new cost
  std::string diagnostic;
};

// The region of a pattern depends on the cost only through the requirement
// A_B' y_B = -c with y_B > 0 on every row except the balance row, whose
// multiplier is free.
inline CostAdmission pattern_admits_cost(const SystemPattern& pattern, const ParametricLP& lp,
                                         const Vec& c_new, double margin = 1e-9) {
  CostAdmission out;
  if (c_new.size() != lp.n_gen) throw ValidationError("pattern_admits_cost: cost dimension mismatch");
  const Mat AB = detail::rows_of(lp.A, pattern.binding);
  if (AB.rows() != AB.cols()) {
    out.diagnostic = "pattern is not square (degenerate)";
    return out;
  }
  Eigen::FullPivLU<Mat> lu(AB);
  if (!lu.isInvertible()) {
    out.diagnostic = "binding rows are singular";
    return out;
  }
  out.y = lu.transpose().solve(Vec(-c_new));
  out.admitted = true;
  for (Index k = 1; k < out.y.size(); ++k) {
    if (out.y(k) <= margin) {
      out.admitted = false;
      out.diagnostic = "multiplier on row " + std::to_string(pattern.binding[static_cast<std::size_t>(k)] + 1) +
                       " is " + std::to_string(out.y(k));
      break;
    }
  }
  return out;
}

}  // namespace sprlab
