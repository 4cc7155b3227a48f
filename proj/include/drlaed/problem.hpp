#pragma once

// Look-ahead dispatch data in compact form:
//   min c'x  s.t.  A x <= b,  D x + E w <= f
// with x the generator schedule and w the renewable output.

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "drlaed/error.hpp"
#include "drlaed/grid.hpp"

namespace drlaed {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

enum class RowKind { Balance, LineUpper, LineLower };

inline constexpr std::size_t kNoLine = std::numeric_limits<std::size_t>::max();

/// Provenance of an uncertain row of (D, E, f).
struct UncertainRow {
  RowKind kind = RowKind::Balance;
  std::size_t period = 0;
  std::size_t line = kNoLine;
  double limit = 0.0; // flow limit for line rows
};

struct CompactProblem {
  Eigen::VectorXd c;
  SparseRowMatrix A;
  Eigen::VectorXd b;
  SparseRowMatrix D;
  SparseRowMatrix E;
  Eigen::VectorXd f;

  std::size_t horizon = 0;
  std::size_t num_generators = 0;
  std::size_t num_res = 0;
  std::size_t num_lines = 0;

  std::vector<UncertainRow> rows;       // one per row of D/E/f
  std::vector<std::string> det_row_names; // one per row of A/b

  Eigen::Index n_x() const { return static_cast<Eigen::Index>(horizon * num_generators); }
  Eigen::Index n_omega() const { return static_cast<Eigen::Index>(horizon * num_res); }
  Eigen::Index num_uncertain_rows() const { return f.size(); }
  Eigen::Index num_det_rows() const { return b.size(); }

  // Period-major layouts.
  Eigen::Index x_index(std::size_t gen, std::size_t t) const {
    return static_cast<Eigen::Index>(t * num_generators + gen);
  }
  Eigen::Index omega_index(std::size_t site, std::size_t t) const {
    return static_cast<Eigen::Index>(t * num_res + site);
  }
};

/// Column label of an uncertainty component, e.g. "res2_t5".
inline std::string omega_label(const CompactProblem &cp, Eigen::Index j) {
  const auto site = static_cast<std::size_t>(j) % cp.num_res;
  const auto t = static_cast<std::size_t>(j) / cp.num_res;
  return "res" + std::to_string(site) + "_t" + std::to_string(t);
}

/**
 * Builds the compact matrices from the network.
 *
 * Deterministic rows, per period and generator: ramp up, ramp down,
 * capacity max, capacity min (4 T N_g rows). Period 0 ramps are taken
 * against p0.
 *
 * Uncertain rows, per period: the balance row
 *   -sum p - sum w <= -sum load
 * followed by, for each line, the upper and lower flow-limit rows
 *   +/- PTDF (B_g p + B_r w - B_l load) <= Fmax
 * with the load term moved into f.
 */
inline CompactProblem assemble(const Network &net, const PtdfMatrix &ptdf) {
  validate(net);
  const std::size_t T = net.horizon;
  const std::size_t ng = net.num_generators();
  const std::size_t nr = net.num_res();
  const std::size_t ne = net.num_lines();
  if (ptdf.num_lines() != static_cast<Eigen::Index>(ne) ||
      ptdf.num_buses() != static_cast<Eigen::Index>(net.num_buses()))
    throw DimensionMismatch("PTDF shape does not match the network");
  for (std::size_t i = 0; i < ng; ++i)
    if (!net.generators[i].p0)
      throw MissingInitialSetpoint("generator " + std::to_string(i) +
                                   " has no initial setpoint p0");

  CompactProblem cp;
  cp.horizon = T;
  cp.num_generators = ng;
  cp.num_res = nr;
  cp.num_lines = ne;
  const Eigen::Index nx = cp.n_x();
  const Eigen::Index nw = cp.n_omega();

  cp.c.resize(nx);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t i = 0; i < ng; ++i)
      cp.c(cp.x_index(i, t)) = net.generators[i].cost[t];

  // Deterministic block.
  const Eigen::Index mdet = static_cast<Eigen::Index>(4 * T * ng);
  std::vector<Triplet> a;
  a.reserve(6 * T * ng);
  cp.b.resize(mdet);
  cp.det_row_names.reserve(mdet);
  Eigen::Index row = 0;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < ng; ++i) {
      const auto &g = net.generators[i];
      const Eigen::Index xi = cp.x_index(i, t);
      const std::string suffix = "_g" + std::to_string(i) + "_t" + std::to_string(t);
      // p[t] - p[t-1] <= RU
      a.emplace_back(row, xi, 1.0);
      if (t > 0) {
        a.emplace_back(row, cp.x_index(i, t - 1), -1.0);
        cp.b(row) = g.ramp_up[t];
      } else {
        cp.b(row) = g.ramp_up[t] + *g.p0;
      }
      cp.det_row_names.push_back("ramp_up" + suffix);
      ++row;
      // -(p[t] - p[t-1]) <= -RD
      a.emplace_back(row, xi, -1.0);
      if (t > 0) {
        a.emplace_back(row, cp.x_index(i, t - 1), 1.0);
        cp.b(row) = -g.ramp_down[t];
      } else {
        cp.b(row) = -g.ramp_down[t] - *g.p0;
      }
      cp.det_row_names.push_back("ramp_down" + suffix);
      ++row;
      a.emplace_back(row, xi, 1.0);
      cp.b(row) = g.pmax[t];
      cp.det_row_names.push_back("pmax" + suffix);
      ++row;
      a.emplace_back(row, xi, -1.0);
      cp.b(row) = -g.pmin[t];
      cp.det_row_names.push_back("pmin" + suffix);
      ++row;
    }
  }
  cp.A.resize(mdet, nx);
  cp.A.setFromTriplets(a.begin(), a.end());

  // Uncertain block.
  const Eigen::Index K = static_cast<Eigen::Index>(T * (1 + 2 * ne));
  std::vector<Triplet> d, e;
  d.reserve(static_cast<std::size_t>(K) * ng);
  e.reserve(static_cast<std::size_t>(K) * std::max<std::size_t>(nr, 1));
  cp.f.resize(K);
  cp.rows.reserve(K);

  std::vector<std::size_t> gen_bus(ng), res_bus(nr);
  for (std::size_t i = 0; i < ng; ++i)
    gen_bus[i] = net.bus_index(net.generators[i].bus);
  for (std::size_t j = 0; j < nr; ++j)
    res_bus[j] = net.bus_index(net.res_sites[j].bus);
  std::vector<std::size_t> load_bus(net.num_loads());
  for (std::size_t k = 0; k < net.num_loads(); ++k)
    load_bus[k] = net.bus_index(net.loads[k].bus);

  row = 0;
  for (std::size_t t = 0; t < T; ++t) {
    double total_load = 0.0;
    for (const auto &l : net.loads)
      total_load += l.demand[t];
    for (std::size_t i = 0; i < ng; ++i)
      d.emplace_back(row, cp.x_index(i, t), -1.0);
    for (std::size_t j = 0; j < nr; ++j)
      e.emplace_back(row, cp.omega_index(j, t), -1.0);
    cp.f(row) = -total_load;
    cp.rows.push_back({RowKind::Balance, t, kNoLine, 0.0});
    ++row;

    for (std::size_t l = 0; l < ne; ++l) {
      const auto lr = static_cast<Eigen::Index>(l);
      double load_flow = 0.0;
      for (std::size_t k = 0; k < net.num_loads(); ++k)
        load_flow += ptdf.entries(lr, load_bus[k]) * net.loads[k].demand[t];
      const double limit = net.lines[l].flow_limit;
      for (double sign : {1.0, -1.0}) {
        for (std::size_t i = 0; i < ng; ++i) {
          const double v = ptdf.entries(lr, gen_bus[i]);
          if (v != 0.0)
            d.emplace_back(row, cp.x_index(i, t), sign * v);
        }
        for (std::size_t j = 0; j < nr; ++j) {
          const double v = ptdf.entries(lr, res_bus[j]);
          if (v != 0.0)
            e.emplace_back(row, cp.omega_index(j, t), sign * v);
        }
        cp.f(row) = limit + sign * load_flow;
        cp.rows.push_back({sign > 0 ? RowKind::LineUpper : RowKind::LineLower, t, l, limit});
        ++row;
      }
    }
  }
  cp.D.resize(K, nx);
  cp.D.setFromTriplets(d.begin(), d.end());
  cp.E.resize(K, nw);
  cp.E.setFromTriplets(e.begin(), e.end());
  return cp;
}

inline CompactProblem assemble(const Network &net) {
  return assemble(net, build_ptdf(net));
}

namespace detail {

inline void check_point(const CompactProblem &cp, const Eigen::VectorXd &x,
                        const Eigen::VectorXd &omega) {
  if (x.size() != cp.n_x())
    throw DimensionMismatch("x has length " + std::to_string(x.size()) +
                            ", expected " + std::to_string(cp.n_x()));
  if (omega.size() != cp.n_omega())
    throw DimensionMismatch("omega has length " + std::to_string(omega.size()) +
                            ", expected " + std::to_string(cp.n_omega()));
}

} // namespace detail

/// Row values D x + E w - f.
inline Eigen::VectorXd uncertain_slacks(const CompactProblem &cp, const Eigen::VectorXd &x,
                                        const Eigen::VectorXd &omega) {
  detail::check_point(cp, x, omega);
  Eigen::VectorXd v = cp.D * x + cp.E * omega - cp.f;
  return v;
}

/// Scalar constraint function: max_k (d_k'x + e_k'w - f_k). Nonpositive iff
/// every uncertain row holds.
inline double constraint_value(const CompactProblem &cp, const Eigen::VectorXd &x,
                               const Eigen::VectorXd &omega) {
  const Eigen::VectorXd v = uncertain_slacks(cp, x, omega);
  if (v.size() == 0)
    return -std::numeric_limits<double>::infinity();
  return v.maxCoeff();
}

} // namespace drlaed
