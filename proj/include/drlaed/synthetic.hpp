#pragma once

// Seeded synthetic networks and renewable scenarios for tests, benchmarks
// and the gen-data subcommand. Everything is driven by one std::mt19937_64,
// so a seed reproduces the output exactly on a given standard library.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "drlaed/grid.hpp"
#include "drlaed/risk.hpp"

namespace drlaed::synthetic {

struct GridSpec {
  std::size_t buses = 10;
  std::size_t lines = 14; // at least buses - 1
  std::size_t generators = 4;
  std::size_t res = 2;
  std::size_t horizon = 4;
  double load_per_bus = 20.0;    // mean demand at a loaded bus, MW
  double res_capacity = 30.0;    // nameplate per RES site, MW
  double reserve_margin = 1.6;   // total pmax / peak load
  double flow_headroom = 1.15;   // line limit / reference flow
  double flow_floor = 0.25;      // minimum limit as a fraction of the mean load
};

/// Daily-looking multiplier in [0.6, 1.0] for loads.
inline double load_shape(std::size_t t, std::size_t horizon) {
  const double phase = 2.0 * std::numbers::pi * (static_cast<double>(t) + 0.5) /
                       static_cast<double>(std::max<std::size_t>(horizon, 1));
  return 0.8 - 0.2 * std::cos(phase);
}

/// Renewable availability multiplier in [0.1, 0.9].
inline double res_shape(std::size_t site, std::size_t t, std::size_t horizon) {
  const double phase = 2.0 * std::numbers::pi * (static_cast<double>(t) + 0.5) /
                           static_cast<double>(std::max<std::size_t>(horizon, 1)) +
                       0.7 * static_cast<double>(site);
  return 0.5 + 0.4 * std::sin(phase);
}

/**
 * Random connected network: a random spanning tree plus extra distinct
 * edges, generators and RES sites at random buses, a load at every bus.
 * Line limits come from a reference dispatch (each generator at the same
 * fraction of pmax, RES at its mean), scaled by flow_headroom, so the case
 * is feasible at the mean but congested under spread.
 */
inline Network random_network(std::mt19937_64 &rng, const GridSpec &spec) {
  if (spec.buses == 0)
    throw InputError("synthetic network needs at least one bus");
  const std::size_t nb = spec.buses;
  const std::size_t T = spec.horizon;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto pick = [&](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };

  Network net;
  net.horizon = T;
  for (std::size_t i = 0; i < nb; ++i)
    net.buses.push_back("b" + std::to_string(i + 1));
  net.slack = net.buses.front();

  std::set<std::pair<std::size_t, std::size_t>> used;
  auto add_line = [&](std::size_t a, std::size_t b) {
    used.insert({std::min(a, b), std::max(a, b)});
    net.lines.push_back({net.buses[a], net.buses[b], 5.0 + 15.0 * unit(rng), 0.0});
  };
  for (std::size_t i = 1; i < nb; ++i)
    add_line(pick(i), i);
  const std::size_t max_edges = nb * (nb - 1) / 2;
  const std::size_t target = std::min(std::max(spec.lines, nb - 1), max_edges);
  while (net.lines.size() < target) {
    std::size_t a = pick(nb), b = pick(nb);
    if (a == b || used.count({std::min(a, b), std::max(a, b)}))
      continue;
    add_line(a, b);
  }

  std::vector<double> base_load(nb);
  for (std::size_t i = 0; i < nb; ++i)
    base_load[i] = spec.load_per_bus * (0.5 + unit(rng));
  for (std::size_t i = 0; i < nb; ++i) {
    Load l{net.buses[i], {}};
    for (std::size_t t = 0; t < T; ++t)
      l.demand.push_back(base_load[i] * load_shape(t, T));
    net.loads.push_back(std::move(l));
  }
  double peak = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    double tot = 0.0;
    for (const auto &l : net.loads)
      tot += l.demand[t];
    peak = std::max(peak, tot);
  }

  const double per_gen = spec.generators ? spec.reserve_margin * peak / spec.generators : 0.0;
  for (std::size_t g = 0; g < spec.generators; ++g) {
    Generator gen;
    gen.bus = net.buses[pick(nb)];
    const double pmax = per_gen * (0.6 + 0.8 * unit(rng));
    const double cost = 10.0 + 40.0 * unit(rng);
    for (std::size_t t = 0; t < T; ++t) {
      gen.cost.push_back(cost * (0.95 + 0.1 * load_shape(t, T)));
      gen.pmin.push_back(0.0);
      gen.pmax.push_back(pmax);
      gen.ramp_down.push_back(-0.5 * pmax);
      gen.ramp_up.push_back(0.5 * pmax);
    }
    gen.p0 = 0.5 * pmax;
    net.generators.push_back(std::move(gen));
  }
  for (std::size_t j = 0; j < spec.res; ++j)
    net.res_sites.push_back({net.buses[pick(nb)]});

  // Line limits from a reference dispatch.
  for (auto &line : net.lines)
    line.flow_limit = 1.0;
  if (!net.lines.empty()) {
    const PtdfMatrix ptdf = build_ptdf(net, *net.slack);
    const Placement place = incidence_maps(net);
    std::vector<double> ref(net.lines.size(), 0.0);
    double total_pmax = 0.0;
    for (const auto &g : net.generators)
      total_pmax += g.pmax[0];
    for (std::size_t t = 0; t < T; ++t) {
      Eigen::VectorXd load(net.num_loads()), res(net.num_res()), gen(net.num_generators());
      double tot = 0.0;
      for (std::size_t k = 0; k < net.num_loads(); ++k)
        tot += load(k) = net.loads[k].demand[t];
      double res_tot = 0.0;
      for (std::size_t j = 0; j < net.num_res(); ++j)
        res_tot += res(j) = spec.res_capacity * res_shape(j, t, T);
      const double share = total_pmax > 0 ? std::max(0.0, tot - res_tot) / total_pmax : 0.0;
      for (std::size_t g = 0; g < net.num_generators(); ++g)
        gen(g) = share * net.generators[g].pmax[t];
      const Eigen::VectorXd inj =
          place.generators * gen + place.res * res - place.loads * load;
      const Eigen::VectorXd flow = ptdf.entries * inj;
      for (std::size_t l = 0; l < net.lines.size(); ++l)
        ref[l] = std::max(ref[l], std::abs(flow(static_cast<Eigen::Index>(l))));
    }
    const double floor = spec.flow_floor * spec.load_per_bus;
    for (std::size_t l = 0; l < net.lines.size(); ++l)
      net.lines[l].flow_limit = std::max(spec.flow_headroom * ref[l], floor);
  }
  return net;
}

struct SampleSpec {
  std::size_t samples = 20;
  double capacity = 30.0; // nameplate per site, MW
  double spread = 0.25;   // half-width of the idiosyncratic noise, fraction of capacity
  double common = 0.15;   // half-width of the per-scenario common factor
  double shift = 0.0;     // lowers the mean by shift*capacity and widens the noise by (1 + 2 shift)
};

/**
 * Scenario matrix in omega order (period-major, res<j>_t<t> labels). Each
 * entry is capacity * clamp(shape + common factor + noise, 0, 1), so every
 * component is bounded in [0, capacity]. The shift knob moves the
 * distribution towards lower output and more spread, which is how the
 * validation set is made to differ from training.
 */
inline SampleSet scenarios(std::mt19937_64 &rng, std::size_t num_res, std::size_t horizon,
                           const SampleSpec &spec) {
  SampleSet out;
  const auto n = static_cast<Eigen::Index>(num_res * horizon);
  out.samples.resize(static_cast<Eigen::Index>(spec.samples), n);
  for (std::size_t t = 0; t < horizon; ++t)
    for (std::size_t j = 0; j < num_res; ++j)
      out.labels.push_back("res" + std::to_string(j) + "_t" + std::to_string(t));
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  const double widen = 1.0 + 2.0 * spec.shift;
  for (std::size_t i = 0; i < spec.samples; ++i) {
    const double factor = spec.common * widen * sym(rng);
    for (std::size_t t = 0; t < horizon; ++t)
      for (std::size_t j = 0; j < num_res; ++j) {
        const double level = res_shape(j, t, horizon) - spec.shift + factor +
                             spec.spread * widen * sym(rng);
        out.samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t * num_res + j)) =
            spec.capacity * std::clamp(level, 0.0, 1.0);
      }
  }
  return out;
}

} // namespace drlaed::synthetic
