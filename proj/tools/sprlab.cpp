// sprlab: dispatch, region enumeration, data generation and SPR learning from
// the command line.

#include "sprlab/sprlab.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifndef SPRLAB_DATA_DIR
#define SPRLAB_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace sprlab;

namespace {

constexpr const char* kVersion = "0.3.0";

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double lap() {
    auto t1 = std::chrono::steady_clock::now();
    double s = std::chrono::duration<double>(t1 - t0).count();
    t0 = t1;
    return s;
  }
};

struct Manifest {
  json j;
  explicit Manifest(const std::string& cmd, int argc, char** argv) {
    j["command"] = cmd;
    std::vector<std::string> a(argv, argv + argc);
    j["argv"] = a;
    j["version"] = kVersion;
    j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    j["config"] = json::object();
    j["inputs"] = json::array();
    j["outputs"] = json::array();
    j["timings"] = json::object();
  }
  void write_next_to(const std::string& out) const { write_json(out + ".manifest.json", j); }
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SPRLAB_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ValidationError("SPRLAB_SEED is not an unsigned integer");
    }
  }
  return 1;
}

std::string resolve_case(const std::string& c) {
  if (fs::exists(c)) return c;
  const std::string p = std::string(SPRLAB_DATA_DIR) + "/" + c + ".json";
  if (fs::exists(p)) return p;
  throw ValidationError("case not found: " + c);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      v.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw ValidationError("not a number: '" + cell + "'");
    }
  }
  return v;
}

// "lo,hi" for every load bus, or "lo1,..,lod;hi1,..,hid".
LoadBox parse_box(const std::string& s, Index d) {
  const auto semi = s.find(';');
  if (semi == std::string::npos) {
    auto v = parse_list(s);
    if (v.size() != 2) throw ValidationError("--box expects lo,hi");
    return make_box(Vec::Constant(d, v[0]), Vec::Constant(d, v[1]));
  }
  auto lo = parse_list(s.substr(0, semi)), hi = parse_list(s.substr(semi + 1));
  if (static_cast<Index>(lo.size()) != d || static_cast<Index>(hi.size()) != d)
    throw ValidationError("--box bounds need one entry per load bus");
  return make_box(to_vec(lo), to_vec(hi));
}

// "buses=2,3,total", "2,3", "total"; buses are 1-based.
std::pair<std::vector<int>, bool> parse_features(const std::string& s) {
  std::string body = s.rfind("buses=", 0) == 0 ? s.substr(6) : s;
  std::vector<int> buses;
  bool total = false;
  std::stringstream ss(body);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell == "total") {
      total = true;
      continue;
    }
    try {
      buses.push_back(std::stoi(cell) - 1);
    } catch (const std::exception&) {
      throw ValidationError("--features: bad entry '" + cell + "'");
    }
  }
  return {buses, total};
}

LabeledDataset apply_views(LabeledDataset ds, const std::string& features, int label_bus) {
  if (label_bus > 0) ds = relabel_by_bus(ds, label_bus - 1);
  if (!features.empty()) {
    auto [buses, total] = parse_features(features);
    ds = project_features(ds, buses, total);
  }
  if (ds.n_class() < 2) throw ValidationError("dataset has a single class; nothing to learn");
  return ds;
}

Mat view_for_model(const LabeledDataset& ds, const OvOModel& m) {
  if (m.schema.buses.empty() && !m.schema.total) return ds.X;
  return project_features(ds, m.schema.buses, m.schema.total).X;
}

OvOModel fit(const LabeledDataset& ds, const std::string& method, double C, bool platt) {
  if (method == "cll") return train_cll_ovo(ds, C);  // sums the columns it is given
  if (method != "svm") throw ValidationError("--method must be svm or cll");
  OvOOptions o;
  o.C = C;
  o.platt = platt;
  return train_ovo(ds, o);
}

double default_C(const LabeledDataset& ds) {
  for (const RowMeta& m : ds.meta)
    if (m.scenario != "slr") return 1.0;
  return 1000.0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SPR toolkit: SCED, system pattern regions and data-driven price forecasting"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string case_arg, out, mode = "slr", box_arg, sampling = "uniform", data, model_path, features, method = "svm",
                        json_out, grid_out, pd_arg;
  std::optional<std::uint64_t> seed;
  Index n = 1440, grid = 0;
  double sigma_frac = 0.1, xi_sigma = 0.1, ramp_scale = 1.0, profile_base = 50.0, C = -1.0;
  int k = 5, label_bus = 0, jobs = 1;
  bool posterior = false, no_platt = false;

  auto* gen = app.add_subcommand("gen", "generate a Monte-Carlo dataset");
  gen->add_option("--case", case_arg, "case file or fixture name")->required();
  gen->add_option("--mode", mode, "slr | dlr | ramp")->check(CLI::IsMember({"slr", "dlr", "ramp"}));
  gen->add_option("--n", n, "number of samples")->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "RNG seed (default: $SPRLAB_SEED, then 1)");
  gen->add_option("--sigma-frac", sigma_frac, "load std / mean (profile sampling)");
  gen->add_option("--xi-sigma", xi_sigma, "std of the DLR factor xi");
  gen->add_option("--ramp-scale", ramp_scale, "R / R0");
  gen->add_option("--sampling", sampling, "uniform | profile")->check(CLI::IsMember({"uniform", "profile"}));
  gen->add_option("--box", box_arg, "uniform box, lo,hi per load bus");
  gen->add_option("--profile-base", profile_base, "mean MW per load bus of the synthetic profile");
  gen->add_option("--out", out, "dataset CSV")->required();
  gen->add_option("--jobs", jobs, "worker bound");

  auto* solve = app.add_subcommand("solve", "solve one dispatch and print prices");
  solve->add_option("--case", case_arg)->required();
  solve->add_option("--pd", pd_arg, "loads at the load buses, comma separated")->required();

  auto* en = app.add_subcommand("enumerate", "enumerate system pattern regions in a box");
  en->add_option("--case", case_arg)->required();
  en->add_option("--box", box_arg, "lo,hi (all load buses) or lo1,..;hi1,..");
  en->add_option("--out", out, "regions JSON")->required();
  en->add_option("--grid", grid, "also write an N^d lattice of region ids");
  en->add_option("--grid-out", grid_out, "lattice CSV (default: <out>.grid.csv)");
  en->add_option("--seed", seed);

  auto* tr = app.add_subcommand("train", "train a one-vs-one model");
  tr->add_option("--data", data)->required();
  tr->add_option("--out", out, "model JSON")->required();
  tr->add_option("--C", C, "penalty (default 1000 for slr data, 1 otherwise)");
  tr->add_option("--features", features, "buses=2,3,total");
  tr->add_option("--label-bus", label_bus, "label by the price at one bus (1-based)");
  tr->add_option("--method", method, "svm | cll");
  tr->add_flag("--no-platt", no_platt, "skip probability calibration");
  tr->add_option("--jobs", jobs);

  auto* pr = app.add_subcommand("predict", "predict classes and prices");
  pr->add_option("--model", model_path)->required();
  pr->add_option("--data", data)->required();
  pr->add_option("--out", out, "predictions CSV")->required();
  pr->add_flag("--posterior", posterior, "append class probabilities");

  auto* ev = app.add_subcommand("eval", "k-fold cross validation");
  ev->add_option("--data", data)->required();
  ev->add_option("--k", k, "folds")->check(CLI::Range(2, 1000000));
  ev->add_option("--seed", seed);
  ev->add_option("--C", C);
  ev->add_option("--features", features);
  ev->add_option("--label-bus", label_bus);
  ev->add_option("--method", method, "svm | cll");
  ev->add_option("--out", out, "report CSV")->required();
  ev->add_option("--json", json_out, "report JSON (default: <out>.json)");
  ev->add_option("--jobs", jobs);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    Timer timer;
    if (*gen) {
      Manifest man("gen", argc, argv);
      const std::string cp = resolve_case(case_arg);
      const NetworkCase nc = load_case(cp);
      ScenarioConfig cfg;
      cfg.mode = parse_mode(mode);
      cfg.n_samples = n;
      cfg.seed = resolve_seed(seed);
      cfg.sigma_frac = sigma_frac;
      cfg.xi_sigma = xi_sigma;
      cfg.ramp_scale = ramp_scale;
      if (cfg.mode == Mode::RAMP || sampling == "profile") {
        cfg.sampling = Sampling::NormalProfile;
        cfg.profile = synthetic_profile(nc.n_load(), 288, profile_base);
      }
      if (!box_arg.empty()) cfg.box = parse_box(box_arg, nc.n_load());
      man.j["inputs"].push_back(cp);
      GenerationLog log;
      const LabeledDataset ds = generate_dataset(nc, cfg, &log);
      man.j["timings"]["generate"] = timer.lap();
      write_dataset_csv(out, ds);
      man.j["timings"]["write"] = timer.lap();
      man.j["seed"] = cfg.seed;
      man.j["config"] = {{"mode", mode}, {"n", n}, {"sigma_frac", sigma_frac}, {"xi_sigma", xi_sigma},
                         {"ramp_scale", ramp_scale}, {"dt_min", cfg.dt},
                         {"sampling", cfg.sampling == Sampling::UniformBox ? "uniform" : "profile"},
                         {"jobs", jobs}};
      if (cfg.box) man.j["config"]["box"] = {vec_json(cfg.box->lower), vec_json(cfg.box->upper)};
      man.j["rows"] = ds.size();
      man.j["classes"] = ds.n_class();
      man.j["redraws"] = log.redraws;
      man.j["degenerate_rows"] = log.degenerate;
      man.j["outputs"].push_back(out);
      if (log.truncated) {
        man.j["warning"] = log.warning;
        std::cerr << "warning: " << log.warning << "\n";
      }
      man.write_next_to(out);
      std::cout << ds.size() << " rows, " << ds.n_class() << " classes -> " << out << "\n";
    } else if (*solve) {
      const NetworkCase nc = load_case(resolve_case(case_arg));
      const auto sf = compute_shift_factors(nc);
      const auto lp = build_sced(nc, sf);
      const auto pd = parse_list(pd_arg);
      if (static_cast<Index>(pd.size()) != nc.n_load())
        throw ValidationError("--pd needs " + std::to_string(nc.n_load()) + " values");
      const DispatchSolution sol = solve_lp(lp, to_vec(pd));
      std::vector<Index> bind;
      for (Index b : sol.binding) bind.push_back(b + 1);
      json j = {{"pg", vec_json(sol.pg.array() + 0.0)}, {"objective", sol.objective}, {"lmp", vec_json(compute_lmp(sol, sf).lambda.array() + 0.0)},
                {"binding", bind}, {"degenerate", sol.degenerate}};
      if (sol.degenerate) j["degeneracy"] = sol.degeneracy_reason;
      std::cout << j.dump(2) << "\n";
    } else if (*en) {
      Manifest man("enumerate", argc, argv);
      const std::string cp = resolve_case(case_arg);
      const NetworkCase nc = load_case(cp);
      const LoadBox box = box_arg.empty() ? default_box(nc) : parse_box(box_arg, nc.n_load());
      EnumerateOptions opt;
      opt.seed = resolve_seed(seed);
      EnumerationLog log;
      const auto regions = enumerate_sprs(nc, box, opt, &log);
      man.j["timings"]["enumerate"] = timer.lap();
      write_json(out, regions_json(regions, box, nc.load_buses));
      man.j["inputs"].push_back(cp);
      man.j["outputs"].push_back(out);
      man.j["seed"] = opt.seed;
      man.j["config"] = {{"box", {vec_json(box.lower), vec_json(box.upper)}}, {"step_frac", opt.step_frac}};
      man.j["lp_solves"] = log.lp_solves;
      man.j["degenerate_skips"] = log.degenerate_skips;
      man.j["degenerate_samples"] = log.degenerate_samples;
      man.j["regions"] = regions.size();
      if (grid > 0) {
        const std::string gp = grid_out.empty() ? out + ".grid.csv" : grid_out;
        auto os = open_out(gp);
        write_lattice_csv(os, regions, box, grid);
        man.j["outputs"].push_back(gp);
        man.j["timings"]["lattice"] = timer.lap();
      }
      man.write_next_to(out);
      std::cout << regions.size() << " regions -> " << out << "\n";
      for (std::size_t i = 0; i < regions.size(); ++i) {
        std::cout << "  " << i + 1 << "  lmp";
        for (Index b = 0; b < regions[i].lmp.lambda.size(); ++b) std::cout << ' ' << fmt9(regions[i].lmp.lambda(b));
        std::cout << "\n";
      }
    } else if (*tr) {
      Manifest man("train", argc, argv);
      LabeledDataset ds = apply_views(read_dataset_csv(data), features, label_bus);
      const double c = C > 0 ? C : default_C(ds);
      man.j["timings"]["load"] = timer.lap();
      const OvOModel m = fit(ds, method, c, !no_platt);
      man.j["timings"]["training"] = timer.lap();
      write_json(out, model_json(m, method));
      man.j["inputs"].push_back(data);
      man.j["outputs"].push_back(out);
      man.j["config"] = {{"C", c}, {"method", method}, {"features", features}, {"label_bus", label_bus},
                         {"platt", !no_platt}, {"jobs", jobs}};
      man.j["classes"] = m.classes.size();
      man.j["classifiers"] = m.pairs.size();
      man.write_next_to(out);
      std::cout << m.pairs.size() << " classifiers over " << m.classes.size() << " classes -> " << out << "\n";
    } else if (*pr) {
      Manifest man("predict", argc, argv);
      const OvOModel m = parse_model(read_json(model_path));
      const LabeledDataset ds = read_dataset_csv(data);
      const Mat X = view_for_model(ds, m);
      if (X.cols() != m.schema.dim()) throw ValidationError("dataset does not match the model's feature schema");
      man.j["timings"]["load"] = timer.lap();
      auto os = open_out(out);
      os << "idx,class";
      for (Index b = 0; b < m.class_lmps.cols(); ++b) os << ",LMP_" << b + 1;
      if (posterior)
        for (int c : m.classes) os << ",p_" << c;
      os << "\n";
      for (Index i = 0; i < X.rows(); ++i) {
        const Vec x = X.row(i).transpose();
        const Prediction p = predict(m, x);
        os << i << ',' << p.label;
        for (Index b = 0; b < p.lmp.size(); ++b) os << ',' << fmt9(p.lmp(b));
        if (posterior) {
          const CouplingResult cr = posterior_multiclass(m, x);
          for (Index c = 0; c < cr.p.size(); ++c) os << ',' << fmt9(cr.p(c));
        }
        os << "\n";
      }
      man.j["timings"]["predicting"] = timer.lap();
      man.j["inputs"] = {model_path, data};
      man.j["outputs"].push_back(out);
      man.j["config"] = {{"posterior", posterior}};
      man.write_next_to(out);
      std::cout << X.rows() << " predictions -> " << out << "\n";
    } else if (*ev) {
      Manifest man("eval", argc, argv);
      LabeledDataset ds = apply_views(read_dataset_csv(data), features, label_bus);
      if (method == "cll") ds = project_features(ds, {}, true);
      const double c = C > 0 ? C : default_C(ds);
      const std::uint64_t s = resolve_seed(seed);
      const FoldReport rep = cross_validate(ds, k, s, [&](const LabeledDataset& t) { return fit(t, method, c, false); });
      auto os = open_out(out);
      write_report_csv(os, rep);
      const std::string jp = json_out.empty() ? out + ".json" : json_out;
      write_json(jp, report_json(rep));
      man.j["timings"]["total"] = timer.lap();
      double ttr = 0, tpr = 0, tpo = 0;
      for (const auto& f : rep.folds) {
        ttr += f.t_train;
        tpr += f.t_predict;
        tpo += f.t_post;
      }
      man.j["timings"]["training"] = ttr;
      man.j["timings"]["predicting"] = tpr;
      man.j["timings"]["post_processing"] = tpo;
      man.j["seed"] = s;
      man.j["inputs"].push_back(data);
      man.j["outputs"] = {out, jp};
      man.j["config"] = {{"k", k}, {"C", c}, {"method", method}, {"features", features}, {"label_bus", label_bus},
                         {"jobs", jobs}};
      man.write_next_to(out);
      std::cout << "fold  classification  lmp_forecast\n";
      for (const auto& f : rep.folds)
        std::cout << "  " << f.fold << "   " << fmt9(100 * f.alpha) << "%   " << fmt9(100 * f.beta) << "%\n";
      std::cout << "avg   " << fmt9(100 * rep.alpha_mean) << "%   " << fmt9(100 * rep.beta_mean) << "%\n";
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const DegenerateError& e) {
    std::cerr << "degenerate: " << e.what() << "\n";
    return 3;
  } catch (const SingularError& e) {
    std::cerr << "singular: " << e.what() << "\n";
    return 3;
  } catch (const UnboundedError& e) {
    std::cerr << "unbounded: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
