// One PASS/FAIL line per acceptance criterion, then the diagnostics.

#include "../appendix_d.hpp"
#include "../common.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace sprlab;
using namespace testing_util;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string vec_str(const Vec& v) {
  std::ostringstream os;
  os << "(";
  for (Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v(i);
  os << ")";
  return os.str();
}

// signed distance to the boundary of {A x <= b}: > 0 inside
double depth(const Polyhedron& p, const Vec& x) {
  double d = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < p.rows(); ++i) d = std::min(d, (p.b(i) - p.A.row(i).dot(x)) / p.A.row(i).norm());
  return d;
}

LabeledDataset uniform_data(const NetworkCase& nc, Mode mode, Index n, std::uint64_t seed, const LoadBox& box) {
  ScenarioConfig cfg;
  cfg.mode = mode;
  cfg.n_samples = n;
  cfg.seed = seed;
  cfg.box = box;
  return generate_dataset(nc, cfg);
}

std::vector<int> load_cols(const NetworkCase& nc) { return nc.load_buses; }

OvOModel svm_fit(const LabeledDataset& tr, double C, bool platt = false) {
  OvOOptions o;
  o.C = C;
  o.platt = platt;
  return train_ovo(tr, o);
}

const LoadBox& plot_box() {
  static const LoadBox b = make_box(v2(-100, -100), v2(200, 200));
  return b;
}

// ---------------------------------------------------------------- 1

Outcome c1() {
  const auto t0 = clock_type::now();
  const auto rs = enumerate_sprs(fig1(), plot_box());
  const double t = seconds_since(t0);
  const auto all = enumerate_sprs(fig1(), default_box(fig1()));
  Outcome o;
  o.pass = rs.size() == 5 && t < 5.0;
  o.detail = std::to_string(rs.size()) + " regions on [-100,200]^2 (want 5), " + std::to_string(all.size()) +
             " on the whole feasible set; " + fmt("%.3f s", t);
  if (rs.size() != 5) {
    std::set<std::vector<Index>> in;
    for (const auto& r : rs) in.insert(r.pattern.binding);
    for (const auto& r : all)
      if (!in.count(r.pattern.binding)) {
        const auto v = polygon_vertices(r.region.rows() ? stack(r.region, default_box(fig1()).as_polyhedron()) : r.region);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const Vec& p : v) lo = std::min(lo, p(1)), hi = std::max(hi, p(1));
        o.detail += "; missing LMP " + vec_str(r.lmp.lambda) + " spans PD3 in [" + fmt("%.1f", lo) + ", " +
                    fmt("%.1f", hi) + "]";
      }
  }
  return o;
}

// ---------------------------------------------------------------- 2

Outcome c2() {
  const auto t0 = clock_type::now();
  const NetworkCase nc = fig13();
  const auto rs = enumerate_sprs(nc, default_box(nc));
  Outcome o;
  std::ostringstream d;
  d << rs.size() << " regions";
  bool ok = rs.size() == 10;

  const auto& printed = fixture::appendix_d();
  std::vector<Vec> want;
  for (const auto& pr : printed) want.push_back(v3(pr.lmp[0], pr.lmp[1], pr.lmp[2]));
  int lmp_hits = 0;
  for (const Vec& w : want)
    for (const auto& r : rs)
      if ((r.lmp.lambda - w).cwiseAbs().maxCoeff() < 1e-9) {
        ++lmp_hits;
        break;
      }
  ok = ok && lmp_hits == 10;
  d << ", " << lmp_hits << "/10 printed LMP vectors";

  CounterRng rng(20160101, 3);
  std::vector<Vec> pts;
  for (int s = 0; s < 10000; ++s) pts.push_back(v2(rng.uniform(-300, 400), rng.uniform(-300, 400)));
  int set_equal = 0;
  std::string bad;
  for (std::size_t k = 0; k < printed.size(); ++k) {
    const auto& pr = printed[k];
    Polyhedron P;
    P.A.resize(static_cast<Index>(pr.A.size()), 2);
    P.b.resize(static_cast<Index>(pr.b.size()));
    for (std::size_t i = 0; i < pr.A.size(); ++i) {
      P.A(static_cast<Index>(i), 0) = pr.A[i][0];
      P.A(static_cast<Index>(i), 1) = pr.A[i][1];
      P.b(static_cast<Index>(i)) = pr.b[i];
    }
    const SPRRecord* mine = nullptr;
    for (const auto& r : rs)
      if (r.pattern.printed() == pr.pattern) mine = &r;
    if (!mine) {
      bad += " SPR" + std::to_string(k + 1) + ":no-pattern";
      continue;
    }
    int disagree = 0;
    for (const Vec& p : pts) {
      const double a = depth(mine->region, p), b = depth(P, p);
      if (std::abs(a) <= 1e-6 || std::abs(b) <= 1e-6) continue;
      disagree += (a > 0) != (b > 0);
    }
    if (disagree == 0) ++set_equal;
    else bad += " SPR" + std::to_string(k + 1) + ":" + std::to_string(disagree);
  }
  ok = ok && set_equal == 10;
  d << ", " << set_equal << "/10 printed inequality systems set-equal";
  if (!bad.empty()) d << " (disagreeing samples:" << bad << ")";
  const double t = seconds_since(t0);
  d << "; " << fmt("%.3f s", t);
  o.pass = ok && t < 30.0;
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- 3

Outcome c3() {
  Outcome o;
  std::ostringstream d;
  bool ok = true;
  for (const auto& nc : {fig1(), fig13()}) {
    const auto rs = enumerate_sprs(nc, default_box(nc));
    const auto u = verify_unique_lmps(rs);
    ok = ok && u.unique;
    d << nc.name << " " << rs.size() << " distinct=" << (u.unique ? "yes" : "no") << "; ";
  }
  CounterRng rng(7, 4);
  int done = 0, tried = 0, regions = 0;
  while (done < 20 && tried < 500) {
    ++tried;
    const int nb = 3 + static_cast<int>(rng() % 4);
    const int ng = 2 + static_cast<int>(rng() % 2);
    NetworkCase nc = random_case(rng, nb, ng);
    // two load buses away from the slack
    const int a = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(nb - 1));
    int b = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(nb - 1));
    if (b == a) b = a % (nb - 1) + 1;
    nc.load_buses = {std::min(a, b), std::max(a, b)};
    const double cap = nc.pmax().sum();
    EnumerationLog log;
    std::vector<SPRRecord> rs;
    try {
      rs = enumerate_sprs(nc, make_box(v2(-cap, -cap), v2(cap, cap)), {}, &log);
    } catch (const std::runtime_error&) {
      continue;
    }
    if (log.degenerate_skips > 0) continue;
    ++done;
    regions += static_cast<int>(rs.size());
    const auto u = verify_unique_lmps(rs);
    if (!u.unique) {
      ok = false;
      d << "random case " << done << " repeats an LMP; ";
    }
  }
  ok = ok && done == 20;
  d << done << " random non-degenerate cases (" << tried << " drawn, " << regions << " regions), all distinct="
    << (ok ? "yes" : "no");
  o.pass = ok;
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- 4

Outcome c4() {
  const NetworkCase nc = fig1();
  const LoadBox whole = default_box(nc);
  const auto base = enumerate_sprs(nc, whole);
  Outcome o;
  std::ostringstream d;
  bool normals = true;
  for (double xi : {0.1, -0.1}) {
    const auto moved = enumerate_sprs(apply_dlr(nc, xi), whole);
    std::map<std::vector<Index>, const SPRRecord*> by;
    for (const auto& r : base) by[r.pattern.binding] = &r;
    if (moved.size() != base.size()) normals = false;
    for (const auto& r : moved) {
      auto it = by.find(r.pattern.binding);
      if (it == by.end()) {
        normals = false;
        continue;
      }
      for (Index i = 0; i < r.region.rows(); ++i) {
        double best = -1;
        for (Index j = 0; j < it->second->region.rows(); ++j)
          best = std::max(best, r.region.A.row(i).normalized().dot(it->second->region.A.row(j).normalized()));
        if (best < 1 - 1e-9) normals = false;
      }
    }
  }
  d << "normals unchanged=" << (normals ? "yes" : "no");

  // Monte-Carlo areas with common samples
  CounterRng rng(20160101, 5);
  const Index n = 100000;
  std::vector<Vec> pts;
  for (Index s = 0; s < n; ++s) pts.push_back(v2(rng.uniform(-100, 200), rng.uniform(-100, 200)));
  const auto sf = compute_shift_factors(nc);
  std::map<double, std::map<std::string, long>> counts;
  for (double xi : {-0.1, 0.0, 0.1}) {
    const auto lp = build_sced(apply_dlr(nc, xi), sf);
    for (const Vec& p : pts) {
      auto sol = try_solve_lp(lp, p);
      if (!sol) continue;
      ++counts[xi][vec_str(compute_lmp(*sol, sf).lambda.unaryExpr([](double v) { return std::round(v * 1e6) / 1e6; }))];
    }
  }
  const std::string spr3 = "(50,50,50)";
  const long a0 = counts[0.0][spr3], up = counts[0.1][spr3], dn = counts[-0.1][spr3];
  const bool sign = up > a0 && dn < a0;
  d << "; area fraction of LMP (50,50,50): " << fmt("%.4f", double(dn) / n) << " @-10%, "
    << fmt("%.4f", double(a0) / n) << " @0, " << fmt("%.4f", double(up) / n) << " @+10%";
  d << "; others (-10% / 0 / +10%):";
  for (const auto& [k, v] : counts[0.0]) {
    if (k == spr3) continue;
    d << " " << k << " " << counts[-0.1][k] << "/" << v << "/" << counts[0.1][k];
  }
  o.pass = normals && sign;
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- 5

Outcome c5(OvOModel* keep) {
  const auto t0 = clock_type::now();
  const NetworkCase nc = fig1();
  const LabeledDataset ds = project_features(uniform_data(nc, Mode::SLR, 8640, 1, plot_box()), load_cols(nc), false);
  const FoldReport rep = cross_validate(ds, 5, 1, [](const LabeledDataset& tr) { return svm_fit(tr, 1000.0); });
  const double t = seconds_since(t0);
  if (keep) *keep = svm_fit(ds, 1000.0);
  Outcome o;
  o.pass = rep.alpha_mean >= 0.99 && rep.beta_mean >= 0.99 && t < 60.0;
  o.detail = std::to_string(ds.n_class()) + " classes; alpha " + fmt("%.4f%%", 100 * rep.alpha_mean) + ", beta " +
             fmt("%.4f%%", 100 * rep.beta_mean) + " (want >= 99%); " + fmt("%.1f s", t);
  return o;
}

// ---------------------------------------------------------------- 6

Outcome c6() {
  const auto t0 = clock_type::now();
  const NetworkCase nc = fig1();
  double a = 0, b = 0;
  std::ostringstream d;
  for (std::uint64_t seed : {1, 2, 3}) {
    const LabeledDataset ds =
        project_features(uniform_data(nc, Mode::DLR, 8640, seed, plot_box()), load_cols(nc), false);
    const FoldReport rep = cross_validate(ds, 5, seed, [](const LabeledDataset& tr) { return svm_fit(tr, 1.0); });
    a += rep.alpha_mean / 3;
    b += rep.beta_mean / 3;
    d << "seed " << seed << ": " << ds.n_class() << " classes alpha " << fmt("%.2f%%", 100 * rep.alpha_mean)
      << " beta " << fmt("%.2f%%", 100 * rep.beta_mean) << "; ";
  }
  const double t = seconds_since(t0);
  const bool ta = std::abs(100 * a - 94.23) <= 3.0, tb = std::abs(100 * b - 96.23) <= 2.0;
  d << "mean alpha " << fmt("%.2f%%", 100 * a) << (ta ? " (in" : " (outside") << " 94.23 +- 3), mean beta "
    << fmt("%.2f%%", 100 * b) << (tb ? " (in" : " (outside") << " 96.23 +- 2); " << fmt("%.1f s", t);
  Outcome o;
  o.pass = ta && tb && t < 120.0;
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- 7

Outcome c7() {
  const NetworkCase nc = fig1();
  std::ostringstream d;
  std::vector<double> betas;
  for (double r : {0.5, 1.0, 2.0}) {
    double b = 0;
    for (std::uint64_t seed : {1, 2, 3}) {
      ScenarioConfig cfg;
      cfg.mode = Mode::RAMP;
      cfg.n_samples = 1440;
      cfg.seed = seed;
      cfg.ramp_scale = r;
      cfg.sampling = Sampling::NormalProfile;
      cfg.profile = synthetic_profile(nc.n_load(), 288, 50.0);
      GenerationLog log;
      const LabeledDataset ds = project_features(generate_dataset(nc, cfg, &log), load_cols(nc), false);
      const FoldReport rep = cross_validate(ds, 5, seed, [](const LabeledDataset& tr) { return svm_fit(tr, 1.0); });
      b += rep.beta_mean / 3;
    }
    betas.push_back(b);
    d << "R/R0=" << r << ": beta " << fmt("%.3f%%", 100 * b) << "; ";
  }
  const bool mono = betas[0] <= betas[1] && betas[1] <= betas[2];
  d << "monotone=" << (mono ? "yes" : "no") << " (3-seed means)";
  return {mono, d.str()};
}

// ---------------------------------------------------------------- 8

Outcome c8() {
  const NetworkCase nc = fig11();
  const LoadBox box = make_box(Vec::Constant(3, -100), Vec::Constant(3, 200));
  double svm = 0, cll = 0;
  for (std::uint64_t seed : {1, 2, 3}) {
    const LabeledDataset ds = uniform_data(nc, Mode::SLR, 2000, seed, box);
    svm += cross_validate(ds, 5, seed, [](const LabeledDataset& tr) { return svm_fit(tr, 1000.0); }).beta_mean / 3;
    const LabeledDataset one = project_features(ds, {}, true);
    cll += cross_validate(one, 5, seed, [](const LabeledDataset& tr) { return train_cll_ovo(tr, 1.0); }).beta_mean / 3;
  }
  return {svm >= cll, "overall beta: SVM " + fmt("%.2f%%", 100 * svm) + ", CLL " + fmt("%.2f%%", 100 * cll)};
}

// ---------------------------------------------------------------- 9

Outcome c9() {
  const NetworkCase nc = fig1();
  const LabeledDataset ds = project_features(uniform_data(nc, Mode::DLR, 2000, 9, plot_box()), load_cols(nc), false);
  const OvOModel m = svm_fit(ds, 1.0, true);
  CounterRng rng(20160101, 6);
  double worst_sum = 0, worst_neg = 0;
  for (int q = 0; q < 10000; ++q) {
    const Vec x = v2(rng.uniform(-150, 250), rng.uniform(-150, 250));
    const Vec p = posterior_multiclass(m, x).p;
    worst_sum = std::max(worst_sum, std::abs(p.sum() - 1.0));
    worst_neg = std::min(worst_neg, p.minCoeff());
  }
  long steps = 0, increases = 0;
  for (const PairModel& pm : m.pairs)
    for (std::size_t k = 1; k < pm.platt.nll_trace.size(); ++k, ++steps)
      increases += pm.platt.nll_trace[k] > pm.platt.nll_trace[k - 1];
  double worst_rt = 0;
  for (int t = 0; t < 100; ++t) {
    Vec p(3);
    for (Index i = 0; i < 3; ++i) p(i) = rng.uniform(0.02, 1.0);
    p /= p.sum();
    Mat r(3, 3), n = Mat::Constant(3, 3, 1.0);
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 3; ++j) r(i, j) = i == j ? 0.5 : p(i) / (p(i) + p(j));
    worst_rt = std::max(worst_rt, (couple_pairwise(r, n).p - p).cwiseAbs().maxCoeff());
  }
  Outcome o;
  o.pass = worst_sum <= 1e-6 && worst_neg >= -1e-6 && increases == 0 && worst_rt <= 1e-6;
  o.detail = "max |sum p - 1| " + fmt("%.2e", worst_sum) + ", min p " + fmt("%.2e", worst_neg) + "; Platt: " +
             std::to_string(increases) + " increases over " + std::to_string(steps) + " accepted steps in " +
             std::to_string(m.pairs.size()) + " pairs; coupling round trip max error " + fmt("%.2e", worst_rt);
  return o;
}

// ---------------------------------------------------------------- 10

Outcome c10() {
  NetworkCase nc = fig13();
  nc.generators[2].cost = 65;
  const auto sf = compute_shift_factors(nc);
  const auto lp = build_sced(nc, sf);
  const auto rs = enumerate_sprs(lp, default_box(nc));
  int r79 = 0, r100 = 0;
  std::string which;
  for (const auto& r : rs) {
    r79 += !pattern_admits_cost(r.pattern, lp, v3(20, 50, 79)).admitted;
    if (!pattern_admits_cost(r.pattern, lp, v3(20, 50, 100)).admitted) {
      ++r100;
      which += " [";
      for (std::size_t k = 0; k < r.pattern.printed().size(); ++k)
        which += (k ? "," : "") + std::to_string(r.pattern.printed()[k]);
      which += "]";
    }
  }
  Outcome o;
  o.pass = rs.size() == 10 && r79 == 0 && r100 == 3;
  o.detail = std::to_string(rs.size()) + " patterns at c=(20,50,65); rejecting c3=79: " + std::to_string(r79) +
             ", rejecting c3=100: " + std::to_string(r100) + which;
  return o;
}

// ---------------------------------------------------------------- 11

Outcome c11(const OvOModel& m) {
  const NetworkCase nc = fig1();
  const auto sf = compute_shift_factors(nc);
  const auto lp = build_sced(nc, sf);
  const auto rs = enumerate_sprs(lp, default_box(nc));
  const double margin = 1e-3 * (plot_box().upper - plot_box().lower).norm();
  CounterRng rng(20160101, 7);
  int taken = 0, agree = 0;
  long drawn = 0;
  while (taken < 1000 && drawn < 1000000) {
    ++drawn;
    const Vec p = v2(rng.uniform(-100, 200), rng.uniform(-100, 200));
    const int i = locate(rs, p);
    if (i < 0 || depth(rs[static_cast<std::size_t>(i)].region, p) < margin) continue;
    auto sol = try_solve_lp(lp, p);
    if (!sol) continue;
    ++taken;
    const Vec truth = compute_lmp(*sol, sf).lambda;
    agree += (predict(m, p).lmp - truth).cwiseAbs().maxCoeff() < 1e-6;
  }
  return {taken == 1000 && agree >= 990,
          std::to_string(agree) + "/" + std::to_string(taken) + " agree (want >= 990), margin " +
              fmt("%.3f MW", margin)};
}

}  // namespace

int main() {
  OvOModel slr_model;
  std::vector<std::pair<std::string, std::function<Outcome()>>> crit = {
      {"SPR count, Fig. 1 system", c1},
      {"Fig. 13 regions and prices", c2},
      {"distinct LMP vectors", c3},
      {"DLR shifts boundaries only", c4},
      {"SLR pipeline", [&] { return c5(&slr_model); }},
      {"DLR pipeline", c6},
      {"ramp trend", c7},
      {"CLL vs SVM", c8},
      {"calibration", c9},
      {"cost robustness", c10},
      {"oracle equivalence", [&] { return c11(slr_model); }},
  };
  int failed = 0;
  std::vector<std::string> lines;
  for (std::size_t k = 0; k < crit.size(); ++k) {
    const auto t0 = clock_type::now();
    Outcome o;
    try {
      o = crit[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double t = seconds_since(t0);
    failed += !o.pass;
    char head[160];
    std::snprintf(head, sizeof head, "%s %2zu %-30s %7.2fs  ", o.pass ? "PASS" : "FAIL", k + 1, crit[k].first.c_str(), t);
    std::printf("%s%s\n", head, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(crit.size()) - failed, crit.size());
  return failed == 0 ? 0 : 1;
}
