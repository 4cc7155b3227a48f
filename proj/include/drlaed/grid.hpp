#pragma once

// Network model, PTDF sensitivities and node placement matrices.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "drlaed/error.hpp"

namespace drlaed {

struct Line {
  std::string from;
  std::string to;
  double susceptance = 0.0; // per-unit, > 0
  double flow_limit = 0.0;  // MW, > 0
};

/// Conventional unit. Every per-period vector has one entry per period.
struct Generator {
  std::string bus;
  std::vector<double> cost;      // $/MWh
  std::vector<double> pmin;      // MW
  std::vector<double> pmax;      // MW
  std::vector<double> ramp_down; // MW/period, <= 0
  std::vector<double> ramp_up;   // MW/period, >= 0
  std::optional<double> p0;      // setpoint before the first period
};

struct ResSite {
  std::string bus;
};

struct Load {
  std::string bus;
  std::vector<double> demand; // MW per period
};

struct Network {
  std::vector<std::string> buses;
  std::optional<std::string> slack;
  std::vector<Line> lines;
  std::vector<Generator> generators;
  std::vector<ResSite> res_sites;
  std::vector<Load> loads;
  std::size_t horizon = 1;

  std::size_t num_buses() const { return buses.size(); }
  std::size_t num_lines() const { return lines.size(); }
  std::size_t num_generators() const { return generators.size(); }
  std::size_t num_res() const { return res_sites.size(); }
  std::size_t num_loads() const { return loads.size(); }

  /// Position of `id` in `buses`; throws InvalidNetwork for unknown ids.
  std::size_t bus_index(const std::string &id) const {
    for (std::size_t i = 0; i < buses.size(); ++i)
      if (buses[i] == id)
        return i;
    throw InvalidNetwork("unknown bus id '" + id + "'");
  }
};

namespace detail {

inline void check_series(const std::vector<double> &v, std::size_t horizon,
                         const std::string &what) {
  if (v.size() != horizon)
    throw InvalidNetwork(what + ": expected " + std::to_string(horizon) +
                         " per-period values, got " + std::to_string(v.size()));
  for (double x : v)
    if (!std::isfinite(x))
      throw InvalidNetwork(what + ": non-finite value");
}

} // namespace detail

/// Checks the structural invariants of a network (ids, signs, series
/// lengths). Connectivity is checked by build_ptdf.
inline void validate(const Network &net) {
  if (net.buses.empty())
    throw InvalidNetwork("network has no buses");
  if (net.horizon == 0)
    throw InvalidNetwork("horizon must be at least one period");
  std::unordered_map<std::string, int> seen;
  for (const auto &b : net.buses)
    if (++seen[b] > 1)
      throw InvalidNetwork("duplicate bus id '" + b + "'");
  if (net.slack)
    net.bus_index(*net.slack);

  for (std::size_t e = 0; e < net.lines.size(); ++e) {
    const auto &l = net.lines[e];
    net.bus_index(l.from);
    net.bus_index(l.to);
    const std::string tag = "line " + std::to_string(e);
    if (l.from == l.to)
      throw InvalidNetwork(tag + ": self loop");
    if (!(l.susceptance > 0.0))
      throw InvalidNetwork(tag + ": susceptance must be positive");
    if (!(l.flow_limit > 0.0))
      throw InvalidNetwork(tag + ": flow limit must be positive");
  }
  for (std::size_t i = 0; i < net.generators.size(); ++i) {
    const auto &g = net.generators[i];
    const std::string tag = "generator " + std::to_string(i);
    net.bus_index(g.bus);
    detail::check_series(g.cost, net.horizon, tag + " cost");
    detail::check_series(g.pmin, net.horizon, tag + " pmin");
    detail::check_series(g.pmax, net.horizon, tag + " pmax");
    detail::check_series(g.ramp_down, net.horizon, tag + " rd");
    detail::check_series(g.ramp_up, net.horizon, tag + " ru");
    for (std::size_t t = 0; t < net.horizon; ++t) {
      if (g.pmin[t] > g.pmax[t])
        throw InvalidNetwork(tag + ": pmin > pmax at period " + std::to_string(t));
      if (g.ramp_down[t] > 0.0 || g.ramp_up[t] < 0.0)
        throw InvalidNetwork(tag + ": ramp limits must satisfy rd <= 0 <= ru");
    }
    if (g.p0 && !std::isfinite(*g.p0))
      throw InvalidNetwork(tag + ": non-finite p0");
  }
  for (const auto &r : net.res_sites)
    net.bus_index(r.bus);
  for (std::size_t k = 0; k < net.loads.size(); ++k) {
    net.bus_index(net.loads[k].bus);
    detail::check_series(net.loads[k].demand, net.horizon,
                         "load " + std::to_string(k) + " demand");
  }
}

/// Slack bus to use: the declared one, or the first bus with a warning.
inline std::string resolve_slack(const Network &net) {
  if (net.slack)
    return *net.slack;
  if (net.buses.empty())
    throw InvalidNetwork("network has no buses");
  std::clog << "warning: no slack bus given, using first bus '"
            << net.buses.front() << "'\n";
  return net.buses.front();
}

/// Line-flow sensitivities to nodal injections, one row per line and one
/// column per bus, in the network's declaration order.
struct PtdfMatrix {
  Eigen::MatrixXd entries;
  std::size_t slack = 0;
  std::vector<std::string> line_order; // "from->to"
  std::vector<std::string> bus_order;

  Eigen::Index num_lines() const { return entries.rows(); }
  Eigen::Index num_buses() const { return entries.cols(); }
};

/// Whether the line graph spans every bus.
inline bool is_connected(const Network &net) {
  const std::size_t n = net.num_buses();
  if (n == 0)
    return false;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v)
      v = parent[v] = parent[parent[v]];
    return v;
  };
  std::size_t components = n;
  for (const auto &l : net.lines) {
    auto a = find(net.bus_index(l.from));
    auto b = find(net.bus_index(l.to));
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

/// Node-arc incidence matrix (lines x buses): +1 at `from`, -1 at `to`.
inline Eigen::MatrixXd incidence_matrix(const Network &net) {
  Eigen::MatrixXd inc = Eigen::MatrixXd::Zero(net.num_lines(), net.num_buses());
  for (std::size_t e = 0; e < net.lines.size(); ++e) {
    inc(e, net.bus_index(net.lines[e].from)) += 1.0;
    inc(e, net.bus_index(net.lines[e].to)) -= 1.0;
  }
  return inc;
}

/**
 * DC power-flow PTDF: diag(b) * incidence * inverse of the nodal
 * susceptance Laplacian with the slack row/column removed. The slack column
 * of the result is zero, i.e. the slack absorbs any injection imbalance.
 */
inline PtdfMatrix build_ptdf(const Network &net, const std::string &slack) {
  validate(net);
  const std::size_t slack_idx = net.bus_index(slack);
  if (!is_connected(net))
    throw SingularNetwork("line graph is not connected");

  const Eigen::Index nb = static_cast<Eigen::Index>(net.num_buses());
  const Eigen::Index nl = static_cast<Eigen::Index>(net.num_lines());

  PtdfMatrix out;
  out.slack = slack_idx;
  out.bus_order = net.buses;
  for (const auto &l : net.lines)
    out.line_order.push_back(l.from + "->" + l.to);
  out.entries = Eigen::MatrixXd::Zero(nl, nb);
  if (nb == 1)
    return out;

  // Reduced index: bus index with the slack skipped.
  std::vector<Eigen::Index> reduced(nb, -1);
  for (Eigen::Index i = 0, r = 0; i < nb; ++i)
    if (static_cast<std::size_t>(i) != slack_idx)
      reduced[i] = r++;

  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(nb - 1, nb - 1);
  Eigen::MatrixXd branch = Eigen::MatrixXd::Zero(nl, nb - 1); // diag(b) * A_red
  for (Eigen::Index e = 0; e < nl; ++e) {
    const auto &l = net.lines[e];
    const Eigen::Index f = reduced[net.bus_index(l.from)];
    const Eigen::Index t = reduced[net.bus_index(l.to)];
    const double b = l.susceptance;
    if (f >= 0) {
      lap(f, f) += b;
      branch(e, f) += b;
    }
    if (t >= 0) {
      lap(t, t) += b;
      branch(e, t) -= b;
    }
    if (f >= 0 && t >= 0) {
      lap(f, t) -= b;
      lap(t, f) -= b;
    }
  }

  Eigen::LLT<Eigen::MatrixXd> chol(lap);
  if (chol.info() != Eigen::Success)
    throw SingularNetwork("reduced susceptance matrix is not positive definite");
  const Eigen::VectorXd diag = chol.matrixLLT().diagonal();
  if (diag.minCoeff() <= 1e-10 * diag.maxCoeff())
    throw SingularNetwork("reduced susceptance matrix is numerically singular");

  // PTDF_red = branch * lap^{-1}  <=>  lap * PTDF_red^T = branch^T (lap symmetric)
  const Eigen::MatrixXd reduced_ptdf = chol.solve(branch.transpose()).transpose();
  for (Eigen::Index i = 0; i < nb; ++i)
    if (reduced[i] >= 0)
      out.entries.col(i) = reduced_ptdf.col(reduced[i]);
  return out;
}

inline PtdfMatrix build_ptdf(const Network &net) {
  return build_ptdf(net, resolve_slack(net));
}

/// 0/1 placement matrices mapping generators, RES sites and loads to buses.
struct Placement {
  Eigen::MatrixXd generators; // buses x N_g
  Eigen::MatrixXd res;        // buses x N_r
  Eigen::MatrixXd loads;      // buses x N_l
};

inline Placement incidence_maps(const Network &net) {
  const auto nb = static_cast<Eigen::Index>(net.num_buses());
  Placement p;
  p.generators = Eigen::MatrixXd::Zero(nb, net.num_generators());
  p.res = Eigen::MatrixXd::Zero(nb, net.num_res());
  p.loads = Eigen::MatrixXd::Zero(nb, net.num_loads());
  for (std::size_t i = 0; i < net.generators.size(); ++i)
    p.generators(net.bus_index(net.generators[i].bus), i) = 1.0;
  for (std::size_t j = 0; j < net.res_sites.size(); ++j)
    p.res(net.bus_index(net.res_sites[j].bus), j) = 1.0;
  for (std::size_t k = 0; k < net.loads.size(); ++k)
    p.loads(net.bus_index(net.loads[k].bus), k) = 1.0;
  return p;
}

} // namespace drlaed
