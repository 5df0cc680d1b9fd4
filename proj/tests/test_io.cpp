#include "common.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sprlab;
using namespace testing_util;

namespace {

std::string tmp(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "sprlab_io_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

void write_text(const std::string& path, const std::string& s) {
  std::ofstream out(path);
  out << s;
}

}  // namespace

TEST(Io, DatasetRoundTrip) {
  ScenarioConfig cfg;
  cfg.mode = Mode::DLR;
  cfg.n_samples = 120;
  const auto ds = generate_dataset(fig13(), cfg);
  const std::string path = tmp("ds.csv");
  write_dataset_csv(path, ds);
  const auto back = read_dataset_csv(path);
  EXPECT_LT((back.X - ds.X).cwiseAbs().maxCoeff(), 1e-6 * (1 + ds.X.cwiseAbs().maxCoeff()));
  EXPECT_LT((back.lmps - ds.lmps).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_EQ(back.labels, ds.labels);
  ASSERT_EQ(back.meta.size(), ds.meta.size());
  EXPECT_NEAR(back.meta[5].xi, ds.meta[5].xi, 1e-8);
  EXPECT_EQ(back.meta[5].scenario, "dlr");
}

TEST(Io, DatasetHeaderErrors) {
  const std::string p = tmp("bad.csv");
  write_text(p, "idx,PD_1,LMP_1,xi\n0,1,2,0\n");
  EXPECT_THROW(read_dataset_csv(p), ValidationError);
  write_text(p, "idx,PD_1,LMP_1,xi,scenario\n0,1,2,0\n");
  EXPECT_THROW(read_dataset_csv(p), ValidationError);
  write_text(p, "idx,PD_1,LMP_1,xi,scenario\n0,abc,2,0,slr\n");
  EXPECT_THROW(read_dataset_csv(p), ValidationError);
  write_text(p, "idx,PD_1,LMP_1,xi,scenario\n");
  EXPECT_THROW(read_dataset_csv(p), ValidationError);
  EXPECT_THROW(read_dataset_csv(tmp("missing.csv")), ValidationError);
}

TEST(Io, ModelRoundTrip) {
  ScenarioConfig cfg;
  cfg.n_samples = 300;
  cfg.box = make_box(v2(-100, -100), v2(200, 200));
  const auto ds = project_features(generate_dataset(fig13(), cfg), {1, 2}, false);
  const OvOModel m = train_ovo(ds);
  const OvOModel back = parse_model(json::parse(model_json(m).dump()));
  EXPECT_EQ(back.classes, m.classes);
  EXPECT_EQ(back.schema.buses, m.schema.buses);
  for (Index i = 0; i < ds.size(); ++i) {
    const Vec x = ds.X.row(i).transpose();
    EXPECT_EQ(predict(back, x).label, predict(m, x).label);
    EXPECT_LT((posterior_multiclass(back, x).p - posterior_multiclass(m, x).p).cwiseAbs().maxCoeff(), 1e-9);
  }
  json j = model_json(m);
  j["pairs"].erase(0);
  EXPECT_THROW(parse_model(j), ValidationError);
  j = model_json(m);
  j["pairs"][0]["w"] = {1.0, 2.0, 3.0};
  EXPECT_THROW(parse_model(j), ValidationError);
  j = model_json(m);
  j.erase("classes");
  EXPECT_THROW(parse_model(j), ValidationError);
}

TEST(Io, RegionsRoundTrip) {
  const NetworkCase nc = fig13();
  const LoadBox box = default_box(nc);
  const auto rs = enumerate_sprs(nc, box);
  const json j = regions_json(rs, box, nc.load_buses);
  EXPECT_EQ(j["regions"].size(), rs.size());
  EXPECT_EQ(j["load_buses"], json::array({2, 3}));
  for (const auto& r : j["regions"]) EXPECT_GE(r["vertices"].size(), 3u);
  const auto back = parse_regions(json::parse(j.dump()));
  ASSERT_EQ(back.size(), rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    EXPECT_EQ(back[i].pattern.binding, rs[i].pattern.binding);
    EXPECT_LT((back[i].lmp.lambda - rs[i].lmp.lambda).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_TRUE(back[i].region.contains(rs[i].interior_point));
  }
}

TEST(Io, LatticeMatchesMembership) {
  const NetworkCase nc = fig1();
  const LoadBox box = make_box(v2(-100, -100), v2(200, 200));
  const auto rs = enumerate_sprs(nc, box);
  std::stringstream ss;
  write_lattice_csv(ss, rs, box, 31);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "x1,x2,region");
  int rows = 0;
  while (std::getline(ss, line)) {
    const auto f = split_csv(line);
    ASSERT_EQ(f.size(), 3u);
    const Vec p = v2(std::stod(f[0]), std::stod(f[1]));
    EXPECT_EQ(std::stoi(f[2]), locate(rs, p) + 1);
    ++rows;
  }
  EXPECT_EQ(rows, 31 * 31);
  EXPECT_THROW(write_lattice_csv(ss, rs, box, 1), ValidationError);
}

TEST(Io, ReportCsv) {
  FoldReport rep;
  for (int f = 1; f <= 2; ++f) {
    FoldResult r;
    r.fold = f;
    r.alpha = 0.5 * f;
    r.beta = 0.5 * f;
    rep.folds.push_back(r);
  }
  rep.alpha_mean = rep.beta_mean = 0.75;
  std::stringstream ss;
  write_report_csv(ss, rep);
  EXPECT_EQ(ss.str(), "fold,alpha,beta\n1,0.5,0.5\n2,1,1\navg,0.75,0.75\n");
  EXPECT_EQ(report_json(rep)["folds"].size(), 2u);
}
