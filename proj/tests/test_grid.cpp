#include "common.hpp"

#include <gtest/gtest.h>

using namespace sprlab;
using namespace testing_util;

namespace {

// Independent DC power flow: solve B theta = p with theta_slack = 0 by
// replacing the slack equation, then read flows off the angle differences.
Vec dc_flows(const NetworkCase& nc, const Vec& inj) {
  const Index nb = nc.n_bus();
  Mat B = Mat::Zero(nb, nb);
  for (const Line& l : nc.lines) {
    B(l.from, l.from) += l.susceptance;
    B(l.to, l.to) += l.susceptance;
    B(l.from, l.to) -= l.susceptance;
    B(l.to, l.from) -= l.susceptance;
  }
  Vec rhs = inj;
  B.row(nc.slack).setZero();
  B(nc.slack, nc.slack) = 1.0;
  rhs(nc.slack) = 0.0;
  const Vec theta = B.colPivHouseholderQr().solve(rhs);
  Vec f(nc.n_line());
  for (Index k = 0; k < nc.n_line(); ++k) {
    const Line& l = nc.lines[static_cast<std::size_t>(k)];
    f(k) = l.susceptance * (theta(l.from) - theta(l.to));
  }
  return f;
}

}  // namespace

TEST(Grid, LoadsFixtures) {
  const NetworkCase a = fig1();
  EXPECT_EQ(a.n_bus(), 3);
  EXPECT_EQ(a.n_gen(), 2);
  EXPECT_EQ(a.ratings(), v3(60, 60, 80));
  EXPECT_EQ(a.costs(), v2(20, 50));
  const NetworkCase b = fig13();
  EXPECT_EQ(b.n_gen(), 3);
  EXPECT_DOUBLE_EQ(b.generators[2].cost, 100.0);
  // default ramp: full range in 15 minutes
  EXPECT_NEAR(a.generators[0].ramp_up, 100.0 / 15.0, 1e-12);
}

TEST(Grid, RejectsPminAbovePmax) {
  nlohmann::json j = case_to_json(fig1());
  j["generators"][1]["pmin"] = 200;
  try {
    parse_case(j);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("generator 2"), std::string::npos) << e.what();
  }
}

TEST(Grid, RejectsBadInput) {
  nlohmann::json j = case_to_json(fig1());
  j["lines"][0].erase("rating");
  EXPECT_THROW(parse_case(j), ValidationError);
  j = case_to_json(fig1());
  j["lines"] = nlohmann::json::array({{{"from", 1}, {"to", 2}, {"susceptance", 1.0}, {"rating", 60}}});
  EXPECT_THROW(parse_case(j), ValidationError);  // bus 3 disconnected
  j = case_to_json(fig1());
  j["lines"][2]["susceptance"] = -1.0;
  EXPECT_THROW(parse_case(j), ValidationError);
  j = case_to_json(fig1());
  j["slack"] = 7;
  EXPECT_THROW(parse_case(j), ValidationError);
  EXPECT_THROW(load_case(data("does_not_exist.json")), ValidationError);
}

TEST(Grid, JsonRoundTrip) {
  const NetworkCase a = fig13();
  const NetworkCase b = parse_case(case_to_json(a));
  EXPECT_EQ(case_to_json(a), case_to_json(b));
}

TEST(Grid, ShiftFactorsMatchPrintedConstraint) {
  const Mat H = compute_shift_factors(fig13()).H;
  // line 1-2 row: (0, -2/3, -1/3); line 1-3: (0, -1/3, -2/3); line 2-3: (0, 1/3, -1/3)
  Mat expect(3, 3);
  expect << 0, -2.0 / 3, -1.0 / 3, 0, -1.0 / 3, -2.0 / 3, 0, 1.0 / 3, -1.0 / 3;
  EXPECT_LT((H - expect).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(H.col(0).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Grid, ShiftFactorsMatchDcPowerFlow) {
  CounterRng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int nb = 3 + trial % 6;
    NetworkCase nc = random_case(rng, nb, 2);
    nc.slack = static_cast<int>(rng() % static_cast<std::uint64_t>(nb));
    const Mat H = compute_shift_factors(nc).H;
    EXPECT_LT(H.col(nc.slack).cwiseAbs().maxCoeff(), 1e-15);
    Vec inj(nb);
    for (Index i = 0; i < nb; ++i) inj(i) = rng.uniform(-100, 100);
    inj(nc.slack) -= inj.sum();  // balanced
    EXPECT_LT((H * inj - dc_flows(nc, inj)).cwiseAbs().maxCoeff(), 1e-9) << "trial " << trial;
  }
}

TEST(Grid, EveryLineSeesItsEndpoints) {
  CounterRng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    NetworkCase nc = random_case(rng, 3 + trial % 5, 2);
    const Mat H = compute_shift_factors(nc).H;
    for (Index l = 0; l < nc.n_line(); ++l) {
      const Line& ln = nc.lines[static_cast<std::size_t>(l)];
      EXPECT_GT(std::max(std::abs(H(l, ln.from)), std::abs(H(l, ln.to))), 1e-12);
    }
  }
}
