#pragma once

// Pattern identification from data: linear soft-margin SVMs (SMO), one-vs-one
// voting, Platt scaling, pairwise coupling and the 1-D critical-load-level
// baseline.

#include "sprlab/error.hpp"
#include "sprlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace sprlab {

struct RowMeta {
  std::string scenario = "slr";
  double xi = 0.0;
  long step = 0;
  bool degenerate = false;
};

struct FeatureSchema {
  std::vector<int> buses;  // 0-based columns of the full load vector
  bool total = false;      // trailing column holds the system load
  int label_bus = -1;      // >= 0 when labels are single-bus prices

  Index dim() const { return static_cast<Index>(buses.size()) + (total ? 1 : 0); }
};

struct LabeledDataset {
  Mat X;                    // n x d features (MW)
  Mat lmps;                 // n x k true prices ($/MWh), k = n_b or 1
  std::vector<int> labels;  // class per row
  Mat class_lmps;           // n_class x k representative prices
  std::vector<RowMeta> meta;
  FeatureSchema schema;

  Index size() const { return X.rows(); }
  Index n_class() const { return class_lmps.rows(); }

  LabeledDataset subset(const std::vector<Index>& rows) const {
    LabeledDataset s;
    s.X.resize(static_cast<Index>(rows.size()), X.cols());
    s.lmps.resize(static_cast<Index>(rows.size()), lmps.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      s.X.row(static_cast<Index>(k)) = X.row(rows[k]);
      s.lmps.row(static_cast<Index>(k)) = lmps.row(rows[k]);
      s.labels.push_back(labels[static_cast<std::size_t>(rows[k])]);
      if (!meta.empty()) s.meta.push_back(meta[static_cast<std::size_t>(rows[k])]);
    }
    s.class_lmps = class_lmps;
    s.schema = schema;
    return s;
  }
};

inline bool same_price(const Vec& a, const Vec& b, double tol) {
  return inf_norm(a - b) <= tol * std::max(1.0, inf_norm(b));
}

// Rows whose price vectors agree within tol (relative, inf-norm) share a
// class. Classes are numbered in order of first appearance.
inline LabeledDataset group_labels(const Mat& loads, const Mat& lmps, double tol = 1e-6) {
  if (loads.rows() != lmps.rows()) throw ValidationError("group_labels: row count mismatch");
  LabeledDataset ds;
  ds.X = loads;
  ds.lmps = lmps;
  std::vector<Vec> reps;
  ds.labels.resize(static_cast<std::size_t>(loads.rows()));
  for (Index i = 0; i < lmps.rows(); ++i) {
    const Vec v = lmps.row(i).transpose();
    int cls = -1;
    for (std::size_t c = 0; c < reps.size(); ++c)
      if (same_price(v, reps[c], tol)) {
        cls = static_cast<int>(c);
        break;
      }
    if (cls < 0) {
      cls = static_cast<int>(reps.size());
      reps.push_back(v);
    }
    ds.labels[static_cast<std::size_t>(i)] = cls;
  }
  ds.class_lmps.resize(static_cast<Index>(reps.size()), lmps.cols());
  for (std::size_t c = 0; c < reps.size(); ++c) ds.class_lmps.row(static_cast<Index>(c)) = reps[c].transpose();
  ds.schema.buses.resize(static_cast<std::size_t>(loads.cols()));
  std::iota(ds.schema.buses.begin(), ds.schema.buses.end(), 0);
  return ds;
}

// ---------------------------------------------------------------- binary SVM

struct BinarySVM {
  Vec w;
  double b = 0.0;  // decision value f(x) = w'x - b
  double C = 1.0;
  int class_i = 0, class_j = 1;  // +1 side, -1 side
  double slack_sum = 0.0;
  double primal = 0.0, dual = 0.0;
  long iterations = 0;
  bool converged = true;

  double decision(const Vec& x) const { return w.dot(x) - b; }
  double margin_width() const { return 2.0 / w.norm(); }
};

struct SVMOptions {
  double eps = 1e-6;  // stop when the maximal KKT violation falls below eps
  double gap = 1e-6;  // ... or the relative duality gap does
  long max_iter = 0;  // 0 -> 200 n + 100000
};

namespace detail {

// Offset from free multipliers (else the middle of the feasible interval),
// slack and both objective values.
inline void svm_summary(const Mat& X, const Vec& yv, const Vec& alpha, const Vec& G, double C, const Vec& w,
                        BinarySVM& m) {
  const Index n = X.rows();
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
  int n_free = 0;
  for (Index t = 0; t < n; ++t) {
    const double yG = yv(t) * G(t);
    if (alpha(t) >= C) {
      if (yv(t) < 0) ub = std::min(ub, yG);
      else lb = std::max(lb, yG);
    } else if (alpha(t) <= 0) {
      if (yv(t) > 0) ub = std::min(ub, yG);
      else lb = std::max(lb, yG);
    } else {
      ++n_free;
      sum_free += yG;
    }
  }
  m.w = w;
  m.b = n_free > 0 ? sum_free / n_free : 0.5 * (ub + lb);
  // y f = G + 1 - y b
  m.slack_sum = (1.0 - (G.array() + 1.0 - yv.array() * m.b)).max(0.0).sum();
  m.primal = 0.5 * w.squaredNorm() + C * m.slack_sum;
  m.dual = alpha.sum() - 0.5 * w.squaredNorm();
}

}  // namespace detail

// Soft-margin linear SVM
//   min 1/2 |w|^2 + C sum s_i  s.t.  y_i (w'x_i - b) >= 1 - s_i, s >= 0
// solved in the dual by SMO with second-order working set selection.
inline BinarySVM train_binary_svm(const Mat& X, const std::vector<int>& y, double C,
                                  const SVMOptions& opt = {}) {
  const Index n = X.rows(), d = X.cols();
  if (static_cast<Index>(y.size()) != n) throw ValidationError("train_binary_svm: label count mismatch");
  if (!(C > 0.0)) throw ValidationError("train_binary_svm: C must be > 0");
  bool has_pos = false, has_neg = false;
  for (int v : y) {
    if (v == 1) has_pos = true;
    else if (v == -1) has_neg = true;
    else throw ValidationError("train_binary_svm: labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) throw ValidationError("train_binary_svm: both classes must be present");

  const double tau = 1e-12;
  Vec yv(n), alpha = Vec::Zero(n), G = Vec::Constant(n, -1.0), Kd(n);
  for (Index i = 0; i < n; ++i) {
    yv(i) = y[static_cast<std::size_t>(i)];
    Kd(i) = X.row(i).squaredNorm();
  }
  Vec w = Vec::Zero(d), Ki(n), Xdw(n);
  auto is_up = [&](Index t) { return (yv(t) > 0 && alpha(t) < C) || (yv(t) < 0 && alpha(t) > 0); };
  auto is_low = [&](Index t) { return (yv(t) > 0 && alpha(t) > 0) || (yv(t) < 0 && alpha(t) < C); };

  const long max_iter = opt.max_iter > 0 ? opt.max_iter : 200 * static_cast<long>(n) + 100000;
  BinarySVM m;
  m.C = C;
  long it = 0;
  for (; it < max_iter; ++it) {
    double gmax = -std::numeric_limits<double>::infinity();
    Index i = -1;
    for (Index t = 0; t < n; ++t)
      if (is_up(t) && -yv(t) * G(t) >= gmax) {
        if (-yv(t) * G(t) > gmax || i < 0) i = t;
        gmax = -yv(t) * G(t);
      }
    if (i < 0) break;
    double gmin = std::numeric_limits<double>::infinity();
    double obj_min = std::numeric_limits<double>::infinity();
    Index j = -1;
    const Vec xi = X.row(i).transpose();
    Ki.noalias() = X * xi;
    for (Index t = 0; t < n; ++t) {
      if (!is_low(t)) continue;
      const double v = -yv(t) * G(t);
      gmin = std::min(gmin, v);
      const double bdiff = gmax - v;
      if (bdiff > 0) {
        double a = Kd(i) + Kd(t) - 2.0 * Ki(t);
        if (a <= 0) a = tau;
        const double o = -(bdiff * bdiff) / a;
        if (o < obj_min) {
          obj_min = o;
          j = t;
        }
      }
    }
    if (j < 0 || gmax - gmin < opt.eps) break;
    if (opt.gap > 0 && it > 0 && it % 256 == 0) {
      detail::svm_summary(X, yv, alpha, G, C, w, m);
      if (m.primal - m.dual <= opt.gap * std::max(1.0, std::abs(m.primal))) break;
    }

    const double Kij = Ki(j);
    const double oi = alpha(i), oj = alpha(j);
    if (yv(i) != yv(j)) {
      double quad = Kd(i) + Kd(j) - 2.0 * Kij;
      if (quad <= 0) quad = tau;
      const double delta = (-G(i) - G(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0 && alpha(j) < 0) {
        alpha(j) = 0;
        alpha(i) = diff;
      } else if (diff <= 0 && alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = -diff;
      }
      if (diff > 0 && alpha(i) > C) {
        alpha(i) = C;
        alpha(j) = C - diff;
      } else if (diff <= 0 && alpha(j) > C) {
        alpha(j) = C;
        alpha(i) = C + diff;
      }
    } else {
      double quad = Kd(i) + Kd(j) - 2.0 * Kij;
      if (quad <= 0) quad = tau;
      const double delta = (G(i) - G(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > C && alpha(i) > C) {
        alpha(i) = C;
        alpha(j) = sum - C;
      } else if (sum <= C && alpha(j) < 0) {
        alpha(j) = 0;
        alpha(i) = sum;
      }
      if (sum > C && alpha(j) > C) {
        alpha(j) = C;
        alpha(i) = sum - C;
      } else if (sum <= C && alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = sum;
      }
    }
    const Vec dw = yv(i) * (alpha(i) - oi) * xi + yv(j) * (alpha(j) - oj) * X.row(j).transpose();
    w += dw;
    Xdw.noalias() = X * dw;
    G.array() += yv.array() * Xdw.array();
  }
  m.iterations = it;
  m.converged = it < max_iter;
  w = X.transpose() * (alpha.array() * yv.array()).matrix();  // drop accumulated drift
  G = (yv.array() * (X * w).array()).matrix() - Vec::Ones(n);
  detail::svm_summary(X, yv, alpha, G, C, w, m);
  return m;
}

// ---------------------------------------------------------------- Platt

struct PlattParams {
  double A = 0.0, B = 0.0;
  int iterations = 0;
  bool converged = true;
  std::vector<double> nll_trace;  // objective after each accepted step

  // Probability of the +1 side given decision value f.
  double prob(double f) const {
    const double z = A * f + B;
    return z >= 0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
  }
};

inline std::pair<double, double> platt_targets(int n_pos, int n_neg) {
  return {(n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0)};
}

inline double platt_nll(const std::vector<double>& f, const std::vector<double>& t, double A, double B) {
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double z = A * f[k] + B;
    // t log r + (1-t) log(1-r) with r = 1/(1+e^z), computed stably
    if (z >= 0) s += t[k] * z + std::log1p(std::exp(-z));
    else s += (t[k] - 1.0) * z + std::log1p(std::exp(z));
  }
  return s;
}

// Newton's method with backtracking (Lin, Lin and Weng's variant of Platt).
inline PlattParams fit_platt_scores(const std::vector<double>& f, const std::vector<int>& y,
                                    int max_iter = 200, double tol = 1e-10) {
  if (f.size() != y.size()) throw ValidationError("fit_platt: size mismatch");
  int np = 0, nn = 0;
  for (int v : y) (v > 0 ? np : nn)++;
  if (np == 0 || nn == 0) throw ValidationError("fit_platt: both classes must be present");
  const auto [hi, lo] = platt_targets(np, nn);
  std::vector<double> t(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) t[k] = y[k] > 0 ? hi : lo;

  const double sigma = 1e-12, min_step = 1e-10;
  PlattParams p;
  p.A = 0.0;
  p.B = std::log((nn + 1.0) / (np + 1.0));
  double fval = platt_nll(f, t, p.A, p.B);
  p.nll_trace.push_back(fval);
  p.converged = false;
  for (int it = 0; it < max_iter; ++it) {
    double h11 = sigma, h22 = sigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      const double z = p.A * f[k] + p.B;
      double pk, qk;
      if (z >= 0) {
        pk = std::exp(-z) / (1.0 + std::exp(-z));
        qk = 1.0 / (1.0 + std::exp(-z));
      } else {
        pk = 1.0 / (1.0 + std::exp(z));
        qk = std::exp(z) / (1.0 + std::exp(z));
      }
      const double d2 = pk * qk;
      h11 += f[k] * f[k] * d2;
      h22 += d2;
      h21 += f[k] * d2;
      const double d1 = t[k] - pk;
      g1 += f[k] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) {
      p.converged = true;
      break;
    }
    const double det = h11 * h22 - h21 * h21;
    const double dA = -(h22 * g1 - h21 * g2) / det;
    const double dB = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * dA + g2 * dB;
    double step = 1.0;
    bool accepted = false;
    double newf = fval;
    while (step >= min_step) {
      const double nA = p.A + step * dA, nB = p.B + step * dB;
      newf = platt_nll(f, t, nA, nB);
      if (newf < fval + 1e-4 * step * gd) {
        p.A = nA;
        p.B = nB;
        accepted = true;
        break;
      }
      step /= 2.0;
    }
    p.iterations = it + 1;
    if (!accepted) break;  // line search failed; keep last iterate
    const double change = fval - newf;
    fval = newf;
    p.nll_trace.push_back(fval);
    if (std::abs(change) < tol) {
      p.converged = true;
      break;
    }
  }
  return p;
}

inline PlattParams fit_platt(const BinarySVM& svm, const Mat& X, const std::vector<int>& y) {
  std::vector<double> f(static_cast<std::size_t>(X.rows()));
  for (Index k = 0; k < X.rows(); ++k) f[static_cast<std::size_t>(k)] = svm.decision(X.row(k).transpose());
  return fit_platt_scores(f, y);
}

// ---------------------------------------------------------------- coupling

struct CouplingResult {
  Vec p;
  int sweeps = 0;
  bool converged = true;
};

// Hastie-Tibshirani pairwise coupling. r(i,j) estimates P(i | i or j) and
// n(i,j) weighs the pair; both are n x n with r(j,i) = 1 - r(i,j).
inline CouplingResult couple_pairwise(const Mat& r, const Mat& nij, double tol = 1e-8,
                                      int max_sweeps = 10000) {
  const Index k = r.rows();
  CouplingResult out;
  out.p = Vec::Constant(k, 1.0 / static_cast<double>(k));
  if (k == 1) return out;
  Vec prev = out.p;
  out.converged = false;
  for (int s = 0; s < max_sweeps; ++s) {
    prev = out.p;
    for (Index i = 0; i < k; ++i) {
      double num = 0.0, den = 0.0;
      for (Index j = 0; j < k; ++j) {
        if (j == i) continue;
        const double pij = out.p(i) + out.p(j);
        const double mu = pij > 0 ? out.p(i) / pij : 0.5;
        num += nij(i, j) * r(i, j);
        den += nij(i, j) * mu;
      }
      if (den > 0) out.p(i) *= num / den;
      const double tot = out.p.sum();
      if (tot > 0) out.p /= tot;
    }
    out.sweeps = s + 1;
    if (inf_norm(out.p - prev) < tol) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) {
    out.p = 0.5 * (out.p + prev);
    out.p /= out.p.sum();
  }
  return out;
}

// ---------------------------------------------------------------- one-vs-one

struct PairModel {
  BinarySVM svm;
  PlattParams platt;
  int n_ij = 0;
};

struct OvOModel {
  std::vector<int> classes;   // global class ids, ascending
  Mat class_lmps;             // one row per entry of `classes`
  std::vector<PairModel> pairs;  // (a,b) local indices with a<b, row-major
  FeatureSchema schema;
  double C = 1.0;

  Index n_local() const { return static_cast<Index>(classes.size()); }
  std::size_t pair_index(Index a, Index b) const {
    const std::size_t n = classes.size();
    const std::size_t aa = static_cast<std::size_t>(a), bb = static_cast<std::size_t>(b);
    return aa * n - aa * (aa + 1) / 2 + (bb - aa - 1);
  }
};

struct OvOOptions {
  double C = 1000.0;
  bool standardize = true;  // solve each pair on z-scored features
  bool platt = true;
  SVMOptions svm;
};

inline BinarySVM train_pair(const Mat& X, const std::vector<int>& y, const OvOOptions& opt) {
  if (!opt.standardize) return train_binary_svm(X, y, opt.C, opt.svm);
  const Vec mean = X.colwise().mean().transpose();
  Vec sd(X.cols());
  for (Index c = 0; c < X.cols(); ++c) {
    const double v = (X.col(c).array() - mean(c)).square().mean();
    sd(c) = v > 1e-24 ? std::sqrt(v) : 1.0;
  }
  Mat Z = (X.rowwise() - mean.transpose()).array().rowwise() / sd.transpose().array();
  BinarySVM m = train_binary_svm(Z, y, opt.C, opt.svm);
  // back to raw units: w_z'((x - m)/s) - b_z = (w_z/s)'x - (b_z + w_z'(m/s))
  const Vec w = m.w.array() / sd.array();
  m.b = m.b + w.dot(mean);
  m.w = w;
  return m;
}

inline OvOModel train_ovo(const LabeledDataset& ds, const OvOOptions& opt = {}) {
  std::vector<std::vector<Index>> rows(static_cast<std::size_t>(ds.n_class()));
  for (std::size_t r = 0; r < ds.labels.size(); ++r) {
    const int c = ds.labels[r];
    if (c < 0 || c >= ds.n_class()) throw ValidationError("train_ovo: label out of range");
    rows[static_cast<std::size_t>(c)].push_back(static_cast<Index>(r));
  }
  OvOModel m;
  m.schema = ds.schema;
  m.C = opt.C;
  for (std::size_t c = 0; c < rows.size(); ++c)
    if (!rows[c].empty()) m.classes.push_back(static_cast<int>(c));
  if (m.classes.size() < 2) throw ValidationError("train_ovo: need at least two classes");
  m.class_lmps.resize(m.n_local(), ds.class_lmps.cols());
  for (Index a = 0; a < m.n_local(); ++a)
    m.class_lmps.row(a) = ds.class_lmps.row(m.classes[static_cast<std::size_t>(a)]);

  for (Index a = 0; a < m.n_local(); ++a) {
    for (Index b = a + 1; b < m.n_local(); ++b) {
      const auto& ra = rows[static_cast<std::size_t>(m.classes[static_cast<std::size_t>(a)])];
      const auto& rb = rows[static_cast<std::size_t>(m.classes[static_cast<std::size_t>(b)])];
      Mat X(static_cast<Index>(ra.size() + rb.size()), ds.X.cols());
      std::vector<int> y;
      Index k = 0;
      for (Index r : ra) {
        X.row(k++) = ds.X.row(r);
        y.push_back(1);
      }
      for (Index r : rb) {
        X.row(k++) = ds.X.row(r);
        y.push_back(-1);
      }
      PairModel pm;
      pm.svm = train_pair(X, y, opt);
      pm.svm.class_i = m.classes[static_cast<std::size_t>(a)];
      pm.svm.class_j = m.classes[static_cast<std::size_t>(b)];
      pm.n_ij = static_cast<int>(X.rows());
      if (opt.platt) pm.platt = fit_platt(pm.svm, X, y);
      m.pairs.push_back(std::move(pm));
    }
  }
  return m;
}

struct Prediction {
  int label = -1;     // global class id
  Vec lmp;
  std::vector<int> votes;  // per local class
};

inline void check_dim(const OvOModel& m, const Vec& x) {
  if (m.pairs.empty() || x.size() != m.pairs.front().svm.w.size())
    throw ValidationError("predict: feature dimension does not match the model");
}

// Max vote; ties go to the lowest class id.
inline Prediction predict(const OvOModel& m, const Vec& x) {
  check_dim(m, x);
  Prediction out;
  out.votes.assign(m.classes.size(), 0);
  std::size_t k = 0;
  for (Index a = 0; a < m.n_local(); ++a)
    for (Index b = a + 1; b < m.n_local(); ++b, ++k)
      ++out.votes[static_cast<std::size_t>(m.pairs[k].svm.decision(x) >= 0 ? a : b)];
  const auto best = std::max_element(out.votes.begin(), out.votes.end());  // first max wins
  const Index local = static_cast<Index>(best - out.votes.begin());
  out.label = m.classes[static_cast<std::size_t>(local)];
  out.lmp = m.class_lmps.row(local).transpose();
  return out;
}

inline CouplingResult posterior_multiclass(const OvOModel& m, const Vec& x) {
  check_dim(m, x);
  const Index k = m.n_local();
  Mat r = Mat::Constant(k, k, 0.5), n = Mat::Zero(k, k);
  std::size_t idx = 0;
  for (Index a = 0; a < k; ++a)
    for (Index b = a + 1; b < k; ++b, ++idx) {
      const PairModel& pm = m.pairs[idx];
      double p = pm.platt.prob(pm.svm.decision(x));
      p = std::clamp(p, 1e-7, 1.0 - 1e-7);
      r(a, b) = p;
      r(b, a) = 1.0 - p;
      n(a, b) = n(b, a) = pm.n_ij;
    }
  return couple_pairwise(r, n);
}

// ---------------------------------------------------------------- CLL

struct CLLThreshold {
  double b = 0.0;
  double objective = 0.0;
};

// Hinge objective sum max(0, 1 - y_i (t_i - b)), minimised exactly. The
// minimisers form an interval; its midpoint is returned.
inline CLLThreshold train_cll(const Vec& total, const std::vector<int>& y, double C = 1.0) {
  if (static_cast<Index>(y.size()) != total.size()) throw ValidationError("train_cll: size mismatch");
  if (!(C > 0.0)) throw ValidationError("train_cll: C must be > 0");
  std::vector<double> u, v;  // breakpoints t-1 of positives, t+1 of negatives
  for (Index i = 0; i < total.size(); ++i) {
    if (y[static_cast<std::size_t>(i)] == 1) u.push_back(total(i) - 1.0);
    else if (y[static_cast<std::size_t>(i)] == -1) v.push_back(total(i) + 1.0);
    else throw ValidationError("train_cll: labels must be +1 or -1");
  }
  if (u.empty() || v.empty()) throw ValidationError("train_cll: both classes must be present");
  std::sort(u.begin(), u.end());
  std::sort(v.begin(), v.end());
  std::vector<double> pu(u.size() + 1, 0.0), pv(v.size() + 1, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) pu[i + 1] = pu[i] + u[i];
  for (std::size_t i = 0; i < v.size(); ++i) pv[i + 1] = pv[i] + v[i];
  auto g = [&](double b) {
    const std::size_t ku = static_cast<std::size_t>(std::lower_bound(u.begin(), u.end(), b) - u.begin());
    const std::size_t kv = static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), b) - v.begin());
    const double a = static_cast<double>(ku) * b - pu[ku];
    const double c = (pv[v.size()] - pv[kv]) - static_cast<double>(v.size() - kv) * b;
    return a + c;
  };
  std::vector<double> cand(u);
  cand.insert(cand.end(), v.begin(), v.end());
  std::sort(cand.begin(), cand.end());
  double best = std::numeric_limits<double>::infinity();
  for (double b : cand) best = std::min(best, g(b));
  const double slack = 1e-9 * (1.0 + std::abs(best));
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double b : cand)
    if (g(b) <= best + slack) {
      lo = std::min(lo, b);
      hi = std::max(hi, b);
    }
  CLLThreshold out;
  out.b = 0.5 * (lo + hi);
  out.objective = C * g(out.b);
  return out;
}

// Multi-class CLL: one threshold on the system load per class pair, both
// orientations tried. Stored as an OvOModel over the single feature.
inline OvOModel train_cll_ovo(const LabeledDataset& ds, double C = 1.0) {
  LabeledDataset one = ds;
  one.X = ds.X.rowwise().sum();
  std::vector<std::vector<Index>> rows(static_cast<std::size_t>(ds.n_class()));
  for (std::size_t r = 0; r < ds.labels.size(); ++r)
    rows[static_cast<std::size_t>(ds.labels[r])].push_back(static_cast<Index>(r));
  OvOModel m;
  m.schema = ds.schema;
  m.C = C;
  for (std::size_t c = 0; c < rows.size(); ++c)
    if (!rows[c].empty()) m.classes.push_back(static_cast<int>(c));
  if (m.classes.size() < 2) throw ValidationError("train_cll_ovo: need at least two classes");
  m.class_lmps.resize(m.n_local(), ds.class_lmps.cols());
  for (Index a = 0; a < m.n_local(); ++a)
    m.class_lmps.row(a) = ds.class_lmps.row(m.classes[static_cast<std::size_t>(a)]);
  for (Index a = 0; a < m.n_local(); ++a)
    for (Index b = a + 1; b < m.n_local(); ++b) {
      const auto& ra = rows[static_cast<std::size_t>(m.classes[static_cast<std::size_t>(a)])];
      const auto& rb = rows[static_cast<std::size_t>(m.classes[static_cast<std::size_t>(b)])];
      Vec t(static_cast<Index>(ra.size() + rb.size()));
      std::vector<int> y;
      Index k = 0;
      for (Index r : ra) {
        t(k++) = one.X(r, 0);
        y.push_back(1);
      }
      for (Index r : rb) {
        t(k++) = one.X(r, 0);
        y.push_back(-1);
      }
      const CLLThreshold up = train_cll(t, y, C);
      const CLLThreshold down = train_cll(-t, y, C);
      PairModel pm;
      pm.svm.C = C;
      pm.svm.w = Vec::Constant(1, up.objective <= down.objective ? 1.0 : -1.0);
      pm.svm.b = up.objective <= down.objective ? up.b : down.b;
      pm.svm.slack_sum = std::min(up.objective, down.objective) / C;
      pm.svm.class_i = m.classes[static_cast<std::size_t>(a)];
      pm.svm.class_j = m.classes[static_cast<std::size_t>(b)];
      pm.n_ij = static_cast<int>(t.size());
      m.pairs.push_back(std::move(pm));
    }
  m.schema.buses.clear();
  m.schema.total = true;
  return m;
}

// ---------------------------------------------------------------- views

// Keep some columns of the full load vector and optionally append the row
// sum. `ds` must carry full-information features.
inline LabeledDataset project_features(const LabeledDataset& ds, const std::vector<int>& keep_buses,
                                       bool include_total) {
  if (keep_buses.empty() && !include_total) throw ValidationError("project_features: empty projection");
  for (int b : keep_buses)
    if (b < 0 || b >= ds.X.cols()) throw ValidationError("project_features: bus index out of range");
  LabeledDataset out = ds;
  out.X.resize(ds.X.rows(), static_cast<Index>(keep_buses.size()) + (include_total ? 1 : 0));
  for (std::size_t k = 0; k < keep_buses.size(); ++k) out.X.col(static_cast<Index>(k)) = ds.X.col(keep_buses[k]);
  if (include_total) out.X.col(out.X.cols() - 1) = ds.X.rowwise().sum();
  out.schema.buses.clear();
  for (int b : keep_buses) out.schema.buses.push_back(ds.schema.buses.empty() ? b : ds.schema.buses[static_cast<std::size_t>(b)]);
  out.schema.total = include_total;
  return out;
}

// Merge classes that share the price at one bus.
inline LabeledDataset relabel_by_bus(const LabeledDataset& ds, int bus, double tol = 1e-6) {
  if (bus < 0 || bus >= ds.lmps.cols()) throw ValidationError("relabel_by_bus: bus out of range");
  const Mat col = ds.lmps.col(bus);
  LabeledDataset g = group_labels(ds.X, col, tol);
  g.meta = ds.meta;
  g.schema = ds.schema;
  g.schema.label_bus = bus;
  return g;
}

}  // namespace sprlab
