#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "drlaed/io.hpp"
#include "support/fixtures.hpp"

using namespace drlaed;

namespace {

const char *kTwoBus = R"({
  "buses": [1, 2],
  "slack": 1,
  "lines": [{"from": 1, "to": 2, "b": 10, "fmax": 50}],
  "generators": [
    {"bus": 1, "cost": 20, "pmin": 0, "pmax": 100, "rd": -40, "ru": 40, "p0": 30},
    {"bus": "2", "cost": [30, 31, 32], "pmin": 0, "pmax": 60, "rd": -20, "ru": 20, "p0": 10}
  ],
  "res": [{"bus": 2}],
  "loads": [{"bus": 2, "demand": [40, 50, 45]}],
  "horizon": 3
})";

template <class F> ParseError catch_parse(F &&f) {
  try {
    f();
  } catch (const ParseError &e) {
    return e;
  }
  ADD_FAILURE() << "no ParseError thrown";
  return ParseError("none", 0, 0);
}

} // namespace

TEST(NetworkJson, ScalarsBroadcastAndNumericIdsBecomeStrings) {
  const Network net = io::parse_network(kTwoBus);
  ASSERT_EQ(net.horizon, 3u);
  EXPECT_EQ(net.buses[0], "1");
  EXPECT_EQ(net.generators[1].bus, "2"); // "2" and 2 name the same bus
  EXPECT_EQ(net.generators[0].cost, (std::vector<double>{20, 20, 20}));
  EXPECT_EQ(net.generators[1].cost[2], 32);
  EXPECT_DOUBLE_EQ(*net.generators[0].p0, 30);
  EXPECT_EQ(*net.slack, "1");
}

TEST(NetworkJson, RoundTripsThroughWriter) {
  const Network a = io::parse_network(kTwoBus);
  const Network b = io::parse_network(io::network_to_json(a).dump());
  EXPECT_EQ(a.buses, b.buses);
  ASSERT_EQ(b.generators.size(), 2u);
  EXPECT_EQ(a.generators[1].cost, b.generators[1].cost);
  EXPECT_EQ(a.loads[0].demand, b.loads[0].demand);
  EXPECT_EQ(a.lines[0].flow_limit, b.lines[0].flow_limit);
}

TEST(NetworkJson, SyntaxErrorCarriesLineAndColumn) {
  const std::string text = "{\n  \"buses\": [1, 2],\n  \"horizon\": ,\n}";
  const auto e = catch_parse([&] { io::parse_network(text); });
  EXPECT_EQ(e.line(), 3u);
  EXPECT_EQ(e.column(), 14u); // the stray comma
}

TEST(NetworkJson, SchemaErrorsAreInputErrors) {
  EXPECT_THROW(io::parse_network(R"({"buses": [1]})"), InputError); // no horizon
  EXPECT_THROW(io::parse_network(R"({"buses": [1], "horizon": 2,
    "generators": [{"bus": 1, "cost": [1, 2, 3], "pmin": 0, "pmax": 1, "rd": -1, "ru": 1}]})"),
               DimensionMismatch);
  EXPECT_THROW(io::parse_network(R"({"buses": [1], "horizon": 0, "generators": []})"),
               InputError);
  EXPECT_THROW(io::parse_network("[1, 2]"), InputError);
}

TEST(SamplesCsv, SkipsCommentsAndBlankLines) {
  const auto s = io::parse_samples("# drlaed 0.1.0 config=0 seed=0\n"
                                   "res0_t0,res0_t1\n\n1.5, 2\n# mid-file comment\n0,3e1\n");
  ASSERT_EQ(s.size(), 2);
  ASSERT_EQ(s.dim(), 2);
  EXPECT_EQ(s.labels[1], "res0_t1");
  EXPECT_EQ(s.samples(0, 0), 1.5);
  EXPECT_EQ(s.samples(1, 1), 30.0);
}

TEST(SamplesCsv, BadNumberReportsLineAndColumn) {
  const auto e = catch_parse([] { io::parse_samples("a,b\n1,2\n3,x4\n"); });
  EXPECT_EQ(e.line(), 3u);
  EXPECT_EQ(e.column(), 3u);
  const auto short_row = catch_parse([] { io::parse_samples("a,b\n1\n"); });
  EXPECT_EQ(short_row.line(), 2u);
  EXPECT_THROW(io::parse_samples("a,b\n1,-2\n"), ParseError);
  EXPECT_THROW(io::parse_samples("a,b\n"), EmptyInput);
  EXPECT_THROW(io::parse_samples("# only a comment\n"), EmptyInput);
}

TEST(SamplesCsv, WriterRoundTrips) {
  SampleSet s;
  s.samples.resize(2, 2);
  s.samples << 0.1, 1.0 / 3.0, 12345.678901234, 0;
  s.labels = {"res0_t0", "res0_t1"};
  const auto back = io::parse_samples(io::samples_csv(s, {}));
  EXPECT_EQ(back.labels, s.labels);
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index j = 0; j < 2; ++j) // 12 significant digits
      EXPECT_NEAR(back.samples(i, j), s.samples(i, j), 1e-11 * std::max(1.0, s.samples(i, j)));
}

TEST(SamplesCsv, LabelsMustMatchProblem) {
  const auto cp = assemble(io::parse_network(kTwoBus));
  auto s = io::parse_samples("res0_t0,res0_t1,res0_t2\n1,2,3\n");
  EXPECT_NO_THROW(io::check_labels(s, cp));
  s.labels[2] = "res1_t2";
  EXPECT_THROW(io::check_labels(s, cp), InputError);
  EXPECT_THROW(io::check_labels(io::parse_samples("a\n1\n"), cp), DimensionMismatch);
}

TEST(Format, TwelveSignificantDigits) {
  EXPECT_EQ(io::format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(io::format_number(2.0), "2");
  EXPECT_EQ(io::format_number(-0.0), "0");
  EXPECT_EQ(io::format_number(1e-20), "1e-20");
  EXPECT_EQ(io::format_number(std::numeric_limits<double>::quiet_NaN()), "null");
  EXPECT_EQ(io::round12(2.0 / 3.0), 0.666666666667);
}

TEST(Format, HeaderLine) {
  io::Provenance p;
  p.config_hash = io::hex64(io::fnv1a("abc"));
  p.seed = 7;
  EXPECT_EQ(p.config_hash, "e71fa2190541574b"); // FNV-1a 64 of "abc"
  EXPECT_EQ(p.header(),
            std::string("# drlaed ") + DRLAED_VERSION + " config=e71fa2190541574b seed=7\n");
  EXPECT_EQ(io::hex64(io::fnv1a("")), "cbf29ce484222325");
}

TEST(SolutionJson, RoundTrip) {
  DispatchSolution sol;
  sol.method = Method::DrccpRobust;
  sol.theta = 0.25;
  sol.alpha = 0.1;
  sol.status = lp::Status::Optimal;
  sol.objective = 42.0;
  sol.x = Eigen::VectorXd::LinSpaced(4, 0.0, 1.0);
  const auto back = io::parse_solution(io::solution_to_json(sol, {}).dump());
  EXPECT_EQ(back.method, "drccp-robust");
  EXPECT_EQ(back.status, "optimal");
  EXPECT_EQ(back.theta, 0.25);
  EXPECT_EQ(back.alpha, 0.1);
  EXPECT_NEAR((back.x - sol.x).cwiseAbs().maxCoeff(), 0.0, 1e-12);

  sol.status = lp::Status::Infeasible;
  EXPECT_TRUE(io::solution_to_json(sol, {})["objective"].is_null());
  EXPECT_THROW(io::parse_solution(R"({"method": "drcvp"})"), InputError);
}
