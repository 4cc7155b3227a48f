#pragma once

// Small hand-built cases shared by the unit tests.

#include <Eigen/Dense>

#include <vector>

#include "drlaed/grid.hpp"
#include "drlaed/problem.hpp"
#include "drlaed/risk.hpp"

namespace fixtures {

/// One decision x, one uncertain component w, one row: d x + e w <= f,
/// objective c x, no deterministic rows.
inline drlaed::CompactProblem scalar_problem(double d, double e, double f, double c = 1.0) {
  drlaed::CompactProblem cp;
  cp.horizon = 1;
  cp.num_generators = 1;
  cp.num_res = 1;
  cp.c = Eigen::VectorXd::Constant(1, c);
  cp.A.resize(0, 1);
  cp.b.resize(0);
  cp.D.resize(1, 1);
  cp.D.insert(0, 0) = d;
  cp.E.resize(1, 1);
  cp.E.insert(0, 0) = e;
  cp.f = Eigen::VectorXd::Constant(1, f);
  cp.rows.push_back({drlaed::RowKind::Balance, 0, drlaed::kNoLine, 0.0});
  return cp;
}

inline drlaed::SampleSet column(const std::vector<double> &v) {
  drlaed::SampleSet s;
  s.samples.resize(static_cast<Eigen::Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i)
    s.samples(static_cast<Eigen::Index>(i), 0) = v[i];
  return s;
}

/// 1 bus, one unit (cost 1, 0..2 MW), one RES site, 1.5 MW of load, T = 1.
inline drlaed::Network toy() {
  drlaed::Network net;
  net.buses = {"1"};
  net.slack = "1";
  net.generators.push_back({"1", {1.0}, {0.0}, {2.0}, {-10.0}, {10.0}, 1.0});
  net.res_sites.push_back({"1"});
  net.loads.push_back({"1", {1.5}});
  net.horizon = 1;
  return net;
}

/// Triangle 1-2-3 with unit susceptances, lines (1->2), (2->3), (1->3).
inline drlaed::Network triangle(std::size_t horizon = 1) {
  drlaed::Network net;
  net.buses = {"1", "2", "3"};
  net.slack = "1";
  net.lines = {{"1", "2", 1.0, 60.0}, {"2", "3", 1.0, 60.0}, {"1", "3", 1.0, 60.0}};
  auto series = [&](double v) { return std::vector<double>(horizon, v); };
  net.generators.push_back({"1", series(10.0), series(0.0), series(150.0), series(-50.0),
                            series(50.0), 60.0});
  net.generators.push_back({"2", series(30.0), series(0.0), series(100.0), series(-40.0),
                            series(40.0), 20.0});
  net.res_sites.push_back({"3"});
  net.loads.push_back({"2", series(50.0)});
  net.loads.push_back({"3", series(60.0)});
  net.horizon = horizon;
  return net;
}

} // namespace fixtures
