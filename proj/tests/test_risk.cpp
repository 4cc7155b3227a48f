#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "drlaed/risk.hpp"
#include "oracles/drcvp_dual.hpp"
#include "support/fixtures.hpp"

using namespace drlaed;

namespace {

double solve_scalar(const CompactProblem &cp, const SampleSet &s, const AmbiguitySpec &amb) {
  auto prog = build_drcvp(cp, s, amb);
  auto sol = lp::solve_lp(prog.lp);
  EXPECT_EQ(sol.status, lp::Status::Optimal);
  return sol.x(0);
}

Support interval(double a, double b) {
  Support sp;
  sp.G.resize(2, 1);
  sp.G << 1.0, -1.0;
  sp.h.resize(2);
  sp.h << b, -a;
  return sp;
}

} // namespace

TEST(EmpiricalCvar, ConstantValues) {
  std::vector<double> v{2.5, 2.5, 2.5};
  EXPECT_DOUBLE_EQ(empirical_cvar(v, 0.1), 2.5);
  EXPECT_DOUBLE_EQ(empirical_cvar(v, 0.9), 2.5);
}

TEST(EmpiricalCvar, UpperHalfAverage) {
  std::vector<double> a{1, 2, 3, 4}, b{0, 1};
  EXPECT_DOUBLE_EQ(empirical_cvar(a, 0.5), 3.5);
  EXPECT_DOUBLE_EQ(empirical_cvar(b, 0.5), 1.0);
}

TEST(EmpiricalCvar, RejectsEmptyAndBadAlpha) {
  std::vector<double> none, one{1.0};
  EXPECT_THROW(empirical_cvar(none, 0.5), EmptyInput);
  EXPECT_THROW(empirical_cvar(one, 1.0), InputError);
}

TEST(Drcvp, ZeroRadiusIsSampleAverageCvar) {
  // min x  s.t. CVaR_0.5(w - x) <= 0 with samples {0, 1}.
  auto cp = fixtures::scalar_problem(-1.0, 1.0, 0.0);
  AmbiguitySpec amb;
  amb.alpha = 0.5;
  EXPECT_NEAR(solve_scalar(cp, fixtures::column({0.0, 1.0}), amb), 1.0, 1e-9);
}

TEST(Drcvp, RadiusShiftsByThetaOverAlpha) {
  auto cp = fixtures::scalar_problem(-1.0, 1.0, 0.0);
  AmbiguitySpec amb;
  amb.alpha = 0.5;
  amb.theta = 0.1;
  EXPECT_NEAR(solve_scalar(cp, fixtures::column({0.0, 1.0}), amb), 1.2, 1e-9);
}

TEST(Drcvp, SupportCapsTheWorstCase) {
  auto cp = fixtures::scalar_problem(-1.0, 1.0, 0.0);
  AmbiguitySpec amb;
  amb.alpha = 0.5;
  amb.theta = 10.0;
  amb.support = interval(0.0, 1.0);
  EXPECT_NEAR(solve_scalar(cp, fixtures::column({0.0, 1.0}), amb), 1.0, 1e-9);
  amb.ground_norm = GroundNorm::L1;
  EXPECT_NEAR(solve_scalar(cp, fixtures::column({0.0, 1.0}), amb), 1.0, 1e-9);
}

TEST(Drcvp, VariableCountMatchesLayout) {
  auto cp = fixtures::scalar_problem(-1.0, 1.0, 0.0);
  AmbiguitySpec amb;
  amb.alpha = 0.5;
  auto s = fixtures::column({0.0, 0.5, 1.0});
  EXPECT_EQ(build_drcvp(cp, s, amb).lp.num_variables(), 1 + 2 + 3);
  amb.support = interval(0.0, 2.0);
  amb.ground_norm = GroundNorm::L1;
  // eta has two entries per (sample, row) pair.
  EXPECT_EQ(build_drcvp(cp, s, amb).lp.num_variables(), 1 + 2 + 3 + 3 * 1 * 2);
}

TEST(Drcvp, RejectsSamplesOutsideSupport) {
  auto cp = fixtures::scalar_problem(-1.0, 1.0, 0.0);
  AmbiguitySpec amb;
  amb.support = interval(0.0, 1.0);
  EXPECT_THROW(build_drcvp(cp, fixtures::column({0.0, 1.5}), amb), InputError);
  EXPECT_NO_THROW(build_drcvp(cp, fixtures::column({0.0, 1.0 + 1e-10}), amb));
}

TEST(Drcvp, RejectsBadInputs) {
  auto cp = fixtures::scalar_problem(-1.0, 1.0, 0.0);
  AmbiguitySpec amb;
  EXPECT_THROW(build_drcvp(cp, fixtures::column({-0.1}), amb), InputError);
  EXPECT_THROW(build_drcvp(cp, SampleSet{}, amb), EmptyInput);
  amb.alpha = 0.0;
  EXPECT_THROW(build_drcvp(cp, fixtures::column({0.1}), amb), InputError);
  EXPECT_THROW(parse_ground_norm("l2"), UnsupportedNorm);
}

TEST(Drcvp, MatchesDualOracleOnScalarInstances) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 12; ++rep) {
    oracle::ScalarDrcvp p;
    p.e = (rep % 3 == 2 ? -1.0 : 1.0) * (0.5 + u(rng));
    p.f = u(rng);
    p.alpha = 0.1 + 0.8 * u(rng);
    p.theta = rep % 4 == 0 ? 0.0 : 0.3 * u(rng);
    const int n = 1 + rep % 5;
    for (int i = 0; i < n; ++i)
      p.samples.push_back(2.0 * u(rng));
    AmbiguitySpec amb;
    amb.alpha = p.alpha;
    amb.theta = p.theta;
    if (rep % 2) {
      p.support = {{0.0, 2.5}};
      amb.support = interval(0.0, 2.5);
    }
    auto cp = fixtures::scalar_problem(p.d, p.e, p.f);
    const double lp_x = solve_scalar(cp, fixtures::column(p.samples), amb);
    const double ref = oracle::minimal_x(p);
    EXPECT_NEAR(lp_x, ref, 1e-6 * (1.0 + std::abs(ref))) << "instance " << rep;
  }
}

TEST(DrcvpProperty, CostNondecreasingInTheta) {
  auto cp = fixtures::scalar_problem(-1.0, 1.0, 0.0);
  auto s = fixtures::column({0.1, 0.4, 0.45, 0.9, 1.3});
  double prev = -1e300;
  for (double theta : {0.0, 0.01, 0.05, 0.1, 0.3, 1.0}) {
    AmbiguitySpec amb;
    amb.alpha = 0.2;
    amb.theta = theta;
    const double x = solve_scalar(cp, s, amb);
    EXPECT_GE(x, prev - 1e-9);
    prev = x;
  }
}

TEST(DrcvpProperty, SupportNeverIncreasesCost) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto cp = fixtures::scalar_problem(-1.0, 1.0, 0.0);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> v;
    for (int i = 0; i < 4; ++i)
      v.push_back(u(rng));
    AmbiguitySpec amb;
    amb.alpha = 0.25;
    amb.theta = 0.5 * u(rng);
    const double plain = solve_scalar(cp, fixtures::column(v), amb);
    amb.support = interval(0.0, 1.0);
    EXPECT_LE(solve_scalar(cp, fixtures::column(v), amb), plain + 1e-9);
  }
}
