#pragma once

// File formats: dataset CSV, region JSON, model JSON, fold reports, lattice
// CSV.

#include "sprlab/error.hpp"
#include "sprlab/eval.hpp"
#include "sprlab/learn.hpp"
#include "sprlab/linalg.hpp"
#include "sprlab/mpr.hpp"
#include "sprlab/polytope.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace sprlab {

using json = nlohmann::json;

inline std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline json vec_json(const Vec& v) { return to_std(v); }

inline Vec json_vec(const json& j) {
  std::vector<double> v = j.get<std::vector<double>>();
  return to_vec(v);
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  return out;
}

inline void write_json(const std::string& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": parse error at byte " + std::to_string(e.byte));
  }
}

// ---------------------------------------------------------------- dataset

inline void write_dataset_csv(std::ostream& out, const LabeledDataset& ds) {
  const Index nb = ds.X.cols(), nl = ds.lmps.cols();
  out << "idx";
  for (Index k = 0; k < nb; ++k) out << ",PD_" << k + 1;
  for (Index k = 0; k < nl; ++k) out << ",LMP_" << k + 1;
  out << ",xi,scenario\n";
  for (Index i = 0; i < ds.size(); ++i) {
    out << i;
    for (Index k = 0; k < nb; ++k) out << ',' << fmt9(ds.X(i, k));
    for (Index k = 0; k < nl; ++k) out << ',' << fmt9(ds.lmps(i, k));
    const RowMeta m = ds.meta.empty() ? RowMeta{} : ds.meta[static_cast<std::size_t>(i)];
    out << ',' << fmt9(m.xi) << ',' << m.scenario << '\n';
  }
}

inline void write_dataset_csv(const std::string& path, const LabeledDataset& ds) {
  auto out = open_out(path);
  write_dataset_csv(out, ds);
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) f.push_back(cell);
  if (!line.empty() && line.back() == ',') f.emplace_back();
  return f;
}

inline LabeledDataset read_dataset_csv(const std::string& path, double group_tol = 1e-6) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open dataset " + path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto head = split_csv(line);
  Index npd = 0, nlmp = 0;
  for (const auto& h : head) {
    if (h.rfind("PD_", 0) == 0) ++npd;
    if (h.rfind("LMP_", 0) == 0) ++nlmp;
  }
  const std::size_t ncol = static_cast<std::size_t>(1 + npd + nlmp + 2);
  if (npd == 0 || nlmp == 0 || head.size() != ncol || head[0] != "idx" || head[ncol - 2] != "xi" ||
      head[ncol - 1] != "scenario")
    throw ValidationError(path + ": header must be idx,PD_1..,LMP_1..,xi,scenario");
  std::vector<std::vector<double>> pd, lm;
  std::vector<RowMeta> meta;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != ncol) throw ValidationError(path + ":" + std::to_string(lineno) + ": wrong column count");
    try {
      std::vector<double> a, b;
      for (Index k = 0; k < npd; ++k) a.push_back(std::stod(f[static_cast<std::size_t>(1 + k)]));
      for (Index k = 0; k < nlmp; ++k) b.push_back(std::stod(f[static_cast<std::size_t>(1 + npd + k)]));
      RowMeta m;
      m.xi = std::stod(f[ncol - 2]);
      m.scenario = f[ncol - 1];
      m.step = static_cast<long>(pd.size());
      pd.push_back(std::move(a));
      lm.push_back(std::move(b));
      meta.push_back(m);
    } catch (const std::exception&) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  if (pd.empty()) throw ValidationError(path + ": no data rows");
  Mat X(static_cast<Index>(pd.size()), npd), L(static_cast<Index>(pd.size()), nlmp);
  for (std::size_t i = 0; i < pd.size(); ++i) {
    X.row(static_cast<Index>(i)) = to_vec(pd[i]).transpose();
    L.row(static_cast<Index>(i)) = to_vec(lm[i]).transpose();
  }
  LabeledDataset ds = group_labels(X, L, group_tol);
  ds.meta = std::move(meta);
  return ds;
}

// ---------------------------------------------------------------- regions

inline json region_json(const SPRRecord& r, Index idx) {
  json j;
  j["id"] = idx + 1;
  std::vector<Index> pat;
  for (Index b : r.pattern.binding) pat.push_back(b + 1);
  j["pattern"] = pat;
  json A = json::array();
  for (Index i = 0; i < r.region.rows(); ++i) A.push_back(vec_json(r.region.A.row(i).transpose()));
  j["A"] = A;
  j["b"] = vec_json(r.region.b);
  j["lmp"] = vec_json(r.lmp.lambda);
  j["interior_point"] = vec_json(r.interior_point);
  j["inradius"] = r.inradius;
  return j;
}

inline json regions_json(const std::vector<SPRRecord>& regions, const LoadBox& box,
                         const std::vector<int>& load_buses) {
  json j;
  j["box"] = {{"lower", vec_json(box.lower)}, {"upper", vec_json(box.upper)}};
  std::vector<int> lb;
  for (int b : load_buses) lb.push_back(b + 1);
  j["load_buses"] = lb;
  j["regions"] = json::array();
  for (std::size_t i = 0; i < regions.size(); ++i) {
    json r = region_json(regions[i], static_cast<Index>(i));
    if (box.dim() == 2) {
      // polygon clipped to the box, for plotting
      json v = json::array();
      for (const Vec& p : polygon_vertices(stack(regions[i].region, box.as_polyhedron())))
        v.push_back(vec_json(p));
      r["vertices"] = v;
    }
    j["regions"].push_back(r);
  }
  return j;
}

// Region i: {x : A x <= b}. Patterns are 1-based in the file.
inline std::vector<SPRRecord> parse_regions(const json& j) {
  std::vector<SPRRecord> out;
  for (const auto& r : j.at("regions")) {
    SPRRecord rec;
    for (Index b : r.at("pattern").get<std::vector<Index>>()) rec.pattern.binding.push_back(b - 1);
    const auto& A = r.at("A");
    const Vec b = json_vec(r.at("b"));
    const Index d = A.empty() ? 0 : static_cast<Index>(A[0].size());
    rec.region.A.resize(static_cast<Index>(A.size()), d);
    for (std::size_t i = 0; i < A.size(); ++i) rec.region.A.row(static_cast<Index>(i)) = json_vec(A[i]).transpose();
    rec.region.b = b;
    rec.lmp.lambda = json_vec(r.at("lmp"));
    rec.interior_point = json_vec(r.at("interior_point"));
    rec.inradius = r.value("inradius", 0.0);
    out.push_back(std::move(rec));
  }
  return out;
}

// N^d lattice over the box, one row per point: coordinates then the region
// id (1-based, 0 when outside every region).
inline void write_lattice_csv(std::ostream& out, const std::vector<SPRRecord>& regions, const LoadBox& box,
                              Index n) {
  if (n < 2) throw ValidationError("lattice: N must be >= 2");
  const Index d = box.dim();
  for (Index k = 0; k < d; ++k) out << "x" << k + 1 << ',';
  out << "region\n";
  Index total = 1;
  for (Index k = 0; k < d; ++k) total *= n;
  Vec p(d);
  for (Index idx = 0; idx < total; ++idx) {
    Index r = idx;
    for (Index k = 0; k < d; ++k) {
      const Index q = r % n;
      r /= n;
      p(k) = box.lower(k) + (box.upper(k) - box.lower(k)) * static_cast<double>(q) / static_cast<double>(n - 1);
    }
    for (Index k = 0; k < d; ++k) out << fmt9(p(k)) << ',';
    out << locate(regions, p) + 1 << '\n';
  }
}

// ---------------------------------------------------------------- models

inline json model_json(const OvOModel& m, const std::string& kind = "svm") {
  json j;
  j["kind"] = kind;
  j["C"] = m.C;
  j["classes"] = m.classes;
  json cl = json::array();
  for (Index a = 0; a < m.class_lmps.rows(); ++a) cl.push_back(vec_json(m.class_lmps.row(a).transpose()));
  j["class_lmps"] = cl;
  std::vector<int> buses;
  for (int b : m.schema.buses) buses.push_back(b + 1);
  j["features"] = {{"buses", buses}, {"total", m.schema.total},
                   {"label_bus", m.schema.label_bus >= 0 ? m.schema.label_bus + 1 : 0}};
  json pairs = json::array();
  for (const PairModel& p : m.pairs)
    pairs.push_back({{"i", p.svm.class_i}, {"j", p.svm.class_j}, {"w", vec_json(p.svm.w)}, {"b", p.svm.b},
                     {"platt_A", p.platt.A}, {"platt_B", p.platt.B}, {"n_ij", p.n_ij},
                     {"slack_sum", p.svm.slack_sum}});
  j["pairs"] = pairs;
  return j;
}

inline OvOModel parse_model(const json& j) {
  OvOModel m;
  try {
    m.C = j.value("C", 1.0);
    m.classes = j.at("classes").get<std::vector<int>>();
    const auto& cl = j.at("class_lmps");
    if (cl.size() != m.classes.size()) throw ValidationError("model: class table size mismatch");
    const Index k = cl.empty() ? 0 : static_cast<Index>(cl[0].size());
    m.class_lmps.resize(static_cast<Index>(cl.size()), k);
    for (std::size_t a = 0; a < cl.size(); ++a) m.class_lmps.row(static_cast<Index>(a)) = json_vec(cl[a]).transpose();
    const auto& f = j.at("features");
    for (int b : f.at("buses").get<std::vector<int>>()) m.schema.buses.push_back(b - 1);
    m.schema.total = f.at("total").get<bool>();
    m.schema.label_bus = f.value("label_bus", 0) - 1;
    for (const auto& p : j.at("pairs")) {
      PairModel pm;
      pm.svm.class_i = p.at("i").get<int>();
      pm.svm.class_j = p.at("j").get<int>();
      pm.svm.w = json_vec(p.at("w"));
      pm.svm.b = p.at("b").get<double>();
      pm.svm.C = m.C;
      pm.svm.slack_sum = p.value("slack_sum", 0.0);
      pm.platt.A = p.at("platt_A").get<double>();
      pm.platt.B = p.at("platt_B").get<double>();
      pm.n_ij = p.at("n_ij").get<int>();
      m.pairs.push_back(std::move(pm));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("model: ") + e.what());
  }
  const std::size_t n = m.classes.size();
  if (n < 2 || m.pairs.size() != n * (n - 1) / 2) throw ValidationError("model: pair count does not match classes");
  for (const PairModel& p : m.pairs)
    if (p.svm.w.size() != m.schema.dim()) throw ValidationError("model: weight dimension does not match schema");
  return m;
}

// ---------------------------------------------------------------- reports

inline void write_report_csv(std::ostream& out, const FoldReport& rep) {
  out << "fold,alpha,beta\n";
  for (const FoldResult& f : rep.folds) out << f.fold << ',' << fmt9(f.alpha) << ',' << fmt9(f.beta) << '\n';
  out << "avg," << fmt9(rep.alpha_mean) << ',' << fmt9(rep.beta_mean) << '\n';
}

inline json report_json(const FoldReport& rep) {
  json j;
  j["alpha_mean"] = rep.alpha_mean;
  j["beta_mean"] = rep.beta_mean;
  j["beta_bus_mean"] = vec_json(rep.beta_bus_mean);
  j["folds"] = json::array();
  for (const FoldResult& f : rep.folds)
    j["folds"].push_back({{"fold", f.fold}, {"n_train", f.n_train}, {"n_valid", f.n_valid}, {"alpha", f.alpha},
                          {"beta", f.beta}, {"beta_bus", vec_json(f.beta_bus)}, {"skipped_terms", f.skipped},
                          {"seconds", {{"training", f.t_train}, {"predicting", f.t_predict},
                                       {"post_processing", f.t_post}}}});
  return j;
}

}  // namespace sprlab
