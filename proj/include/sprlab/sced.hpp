#pragma once

// Security-constrained economic dispatch in parametric form
//
//   min c'PG  s.t.  A PG + s = b + W PD,  s >= 0
//
// with rows ordered [balance+, balance-, line+ (n_l), line- (n_l),
// gen+ (n_g), gen- (n_g)]. PD is the vector of loads at the case's load buses.

#include "sprlab/error.hpp"
#include "sprlab/grid.hpp"
#include "sprlab/linalg.hpp"
#include "sprlab/simplex.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace sprlab {

enum class RowKind { BalanceUpper, BalanceLower, LineUpper, LineLower, GenUpper, GenLower };

inline const char* to_string(RowKind k) {
  switch (k) {
    case RowKind::BalanceUpper: return "balance+";
    case RowKind::BalanceLower: return "balance-";
    case RowKind::LineUpper: return "line+";
    case RowKind::LineLower: return "line-";
    case RowKind::GenUpper: return "gen+";
    case RowKind::GenLower: return "gen-";
  }
  return "?";
}

struct RowLabel {
  RowKind kind;
  Index element;  // line or generator index; 0 for balance rows
};

struct ParametricLP {
  Mat A;  // n_c x n_g
  Vec b;  // n_c
  Mat W;  // n_c x n_d
  Vec c;  // n_g
  std::vector<RowLabel> labels;
  Mat H;  // n_l x n_b, kept for LMP reconstruction
  Index n_line = 0;
  Index n_gen = 0;

  Index rows() const { return A.rows(); }
  Index n_load() const { return W.cols(); }
  Index line_row(Index l, bool upper) const { return 2 + (upper ? 0 : n_line) + l; }
  Index gen_row(Index g, bool upper) const { return 2 + 2 * n_line + (upper ? 0 : n_gen) + g; }
  Vec rhs(const Vec& pd) const { return b + W * pd; }
};

struct SCEDOverrides {
  std::optional<Vec> ratings;  // F, MW per line
  std::optional<Vec> gen_lo;
  std::optional<Vec> gen_hi;
};

inline ParametricLP build_sced(const NetworkCase& nc, const ShiftFactorMatrix& sf,
                               const SCEDOverrides& ov = {}) {
  const Index nl = nc.n_line(), ng = nc.n_gen(), nd = nc.n_load();
  if (sf.H.rows() != nl || sf.H.cols() != nc.n_bus())
    throw ValidationError("build_sced: shift factor matrix has wrong shape");
  Vec F = ov.ratings.value_or(nc.ratings());
  Vec lo = ov.gen_lo.value_or(nc.pmin());
  Vec hi = ov.gen_hi.value_or(nc.pmax());
  if (F.size() != nl || lo.size() != ng || hi.size() != ng)
    throw ValidationError("build_sced: override dimension mismatch");

  const Mat HG = sf.H * nc.gen_incidence();
  const Mat HL = sf.H * nc.load_incidence();
  const Index nc_rows = 2 + 2 * nl + 2 * ng;

  ParametricLP lp;
  lp.n_line = nl;
  lp.n_gen = ng;
  lp.H = sf.H;
  lp.c = nc.costs();
  lp.A = Mat::Zero(nc_rows, ng);
  lp.W = Mat::Zero(nc_rows, nd);
  lp.b = Vec::Zero(nc_rows);
  lp.labels.reserve(static_cast<std::size_t>(nc_rows));

  lp.A.row(0).setOnes();
  lp.W.row(0).setOnes();
  lp.A.row(1).setConstant(-1.0);
  lp.W.row(1).setConstant(-1.0);
  lp.labels.push_back({RowKind::BalanceUpper, 0});
  lp.labels.push_back({RowKind::BalanceLower, 0});

  for (Index l = 0; l < nl; ++l) {
    lp.A.row(lp.line_row(l, true)) = HG.row(l);
    lp.W.row(lp.line_row(l, true)) = HL.row(l);
    lp.b(lp.line_row(l, true)) = F(l);
  }
  for (Index l = 0; l < nl; ++l) lp.labels.push_back({RowKind::LineUpper, l});
  for (Index l = 0; l < nl; ++l) {
    lp.A.row(lp.line_row(l, false)) = -HG.row(l);
    lp.W.row(lp.line_row(l, false)) = -HL.row(l);
    lp.b(lp.line_row(l, false)) = F(l);
  }
  for (Index l = 0; l < nl; ++l) lp.labels.push_back({RowKind::LineLower, l});
  for (Index g = 0; g < ng; ++g) {
    lp.A(lp.gen_row(g, true), g) = 1.0;
    lp.b(lp.gen_row(g, true)) = hi(g);
  }
  for (Index g = 0; g < ng; ++g) lp.labels.push_back({RowKind::GenUpper, g});
  for (Index g = 0; g < ng; ++g) {
    lp.A(lp.gen_row(g, false), g) = -1.0;
    lp.b(lp.gen_row(g, false)) = -lo(g);
  }
  for (Index g = 0; g < ng; ++g) lp.labels.push_back({RowKind::GenLower, g});
  return lp;
}

inline constexpr double kBindingTol = 1e-7;
inline constexpr double kDualTol = 1e-9;

struct DispatchSolution {
  Vec pd;            // parameter the LP was solved at
  Vec pg;            // MW
  double objective = 0.0;
  double lambda1 = 0.0;  // energy price, $/MWh
  Vec mu_upper, mu_lower;    // line multipliers for flow <= F and flow >= -F
  Vec eta_upper, eta_lower;  // generator limit multipliers
  Vec y;             // stacked multipliers, one per LP row
  Vec slack;         // b + W pd - A pg
  Vec rhs;           // b + W pd
  std::vector<Index> binding;  // rows with zero slack, balance- removed
  bool degenerate = false;
  std::string degeneracy_reason;
  double binding_tol = kBindingTol;
};

inline bool is_binding(double slack, double rhs, double tol = kBindingTol) {
  return slack <= tol * (1.0 + std::abs(rhs));
}

// Returns nullopt when the load vector lies outside the feasible set.
// Unbounded problems (no finite optimum) throw.
inline std::optional<DispatchSolution> try_solve_lp(const ParametricLP& lp, const Vec& pd) {
  if (pd.size() != lp.n_load()) throw ValidationError("solve_lp: load vector has wrong dimension");
  if (!pd.allFinite()) throw ValidationError("solve_lp: load vector is not finite");
  DispatchSolution sol;
  sol.pd = pd;
  sol.rhs = lp.rhs(pd);
  lp::InequalityResult r = lp::solve_inequality(lp.A, sol.rhs, lp.c);
  if (r.status == lp::Status::Infeasible) return std::nullopt;
  if (r.status == lp::Status::Unbounded) throw UnboundedError("solve_lp: dispatch is unbounded");
  if (r.status != lp::Status::Optimal) throw std::runtime_error("solve_lp: simplex iteration limit");

  const Index nl = lp.n_line, ng = lp.n_gen;
  sol.pg = r.x;
  sol.objective = r.objective;
  sol.y = r.y;
  sol.slack = r.slack;
  sol.lambda1 = r.y(1) - r.y(0);
  sol.mu_upper = r.y.segment(lp.line_row(0, true), nl);
  sol.mu_lower = r.y.segment(lp.line_row(0, false), nl);
  sol.eta_upper = r.y.segment(lp.gen_row(0, true), ng);
  sol.eta_lower = r.y.segment(lp.gen_row(0, false), ng);

  sol.binding.push_back(0);
  for (Index i = 2; i < lp.rows(); ++i)
    if (is_binding(sol.slack(i), sol.rhs(i))) sol.binding.push_back(i);

  const double ytol = kDualTol * (1.0 + lp.c.cwiseAbs().maxCoeff());
  if (static_cast<Index>(sol.binding.size()) != ng) {
    sol.degenerate = true;
    sol.degeneracy_reason = std::to_string(sol.binding.size()) + " binding rows for " +
                            std::to_string(ng) + " generators";
  } else {
    for (Index i : sol.binding) {
      if (i < 2) continue;
      if (sol.y(i) <= ytol) {
        sol.degenerate = true;
        sol.degeneracy_reason = "zero multiplier on binding row " + std::to_string(i + 1);
        break;
      }
    }
  }
  return sol;
}

inline DispatchSolution solve_lp(const ParametricLP& lp, const Vec& pd) {
  auto sol = try_solve_lp(lp, pd);
  if (!sol) throw InfeasibleError("solve_lp: load vector is outside the feasible set");
  return *std::move(sol);
}

struct LMPVector {
  Vec lambda;  // $/MWh per bus
};

// Energy price plus congestion component. Line multipliers enter with a minus
// sign because H maps injections (generation minus load) to flow, so serving
// one more MW of load at a bus moves flow by -H(:,bus).
inline LMPVector compute_lmp(const DispatchSolution& sol, const ShiftFactorMatrix& sf) {
  if (sol.mu_upper.size() != sf.H.rows()) throw ValidationError("compute_lmp: dimension mismatch");
  LMPVector out;
  out.lambda = Vec::Constant(sf.H.cols(), sol.lambda1) -
               sf.H.transpose() * (sol.mu_upper - sol.mu_lower);
  return out;
}

inline NetworkCase apply_dlr(const NetworkCase& nc, double xi) {
  if (!(xi > -1.0)) throw ValidationError("apply_dlr: xi must be > -1");
  NetworkCase out = nc;
  for (Line& l : out.lines) l.rating *= (1.0 + xi);
  return out;
}

// Generator bounds intersected with what the ramp rates allow from the
// previous dispatch over dt minutes.
inline NetworkCase apply_ramp(const NetworkCase& nc, const Vec& pg_prev, double dt) {
  if (pg_prev.size() != nc.n_gen()) throw ValidationError("apply_ramp: dimension mismatch");
  if (!(dt >= 0.0)) throw ValidationError("apply_ramp: dt must be >= 0");
  NetworkCase out = nc;
  for (Index g = 0; g < nc.n_gen(); ++g) {
    Generator& gen = out.generators[static_cast<std::size_t>(g)];
    const double p = pg_prev(g);
    const double slop = 1e-6 * (1.0 + std::abs(gen.pmax) + std::abs(gen.pmin));
    if (p < gen.pmin - slop || p > gen.pmax + slop)
      throw ValidationError("apply_ramp: previous dispatch of generator " + std::to_string(g + 1) +
                            " outside its limits");
    const double lo = std::max(gen.pmin, p - gen.ramp_down * dt);
    const double hi = std::min(gen.pmax, p + gen.ramp_up * dt);
    if (lo > hi + slop)
      throw InfeasibleError("apply_ramp: empty bound interval for generator " + std::to_string(g + 1));
    gen.pmin = lo;
    gen.pmax = std::max(lo, hi);
  }
  return out;
}

}  // namespace sprlab
