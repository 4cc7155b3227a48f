#pragma once

// Per-component distributionally robust interval bounds. Each component j of
// the uncertainty gets an interval [lo, hi] whose worst-case escape
// probability over the Wasserstein ball stays below alpha / n_omega.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <vector>

#include "drlaed/error.hpp"
#include "drlaed/parallel.hpp"
#include "drlaed/risk.hpp"

namespace drlaed {

/**
 * Worst-case probability that a component leaves [lo, hi] over all
 * distributions within Wasserstein distance theta of the samples:
 *
 *   inf_{lambda >= 0}  lambda theta + (1/N) sum_i max(0, 1 - lambda d_i)
 *
 * with d_i the distance from sample i to the violation set. For lo > 0 that
 * set is (-inf, lo] u [hi, inf); for lo = 0 it is [hi, inf) since the
 * component cannot go negative. The objective is convex piecewise linear with
 * kinks at 1/d_i, so scanning those (plus lambda = 0) is exact.
 */
inline double worst_case_violation(double lo, double hi, std::span<const double> samples,
                                   double theta) {
  if (!(lo >= 0.0) || !(hi >= lo) || std::isnan(hi))
    throw InvalidBounds("interval bounds must satisfy 0 <= lo <= hi");
  if (!(theta >= 0.0))
    throw InputError("theta must be nonnegative");
  if (samples.empty())
    throw EmptyInput("worst_case_violation needs at least one sample");

  const double n = static_cast<double>(samples.size());
  std::vector<double> d;
  d.reserve(samples.size());
  std::size_t outside = 0;
  for (double w : samples) {
    double dist = 0.0;
    if (lo == 0.0)
      dist = std::max(0.0, hi - w);
    else if (w > lo && w < hi)
      dist = std::min(hi - w, w - lo);
    if (dist > 0.0)
      d.push_back(dist);
    else
      ++outside;
  }
  std::sort(d.begin(), d.end());

  // At lambda = 1/d[j] the terms with d_i < d[j] are positive.
  double best = 1.0;
  double prefix = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (j > 0 && d[j] == d[j - 1]) {
      prefix += d[j];
      continue;
    }
    const double positive = static_cast<double>(j) - prefix / d[j];
    best = std::min(best, theta / d[j] + (static_cast<double>(outside) + positive) / n);
    prefix += d[j];
  }
  return std::clamp(best, 0.0, 1.0);
}

struct IntervalBound {
  double lo = 0.0;
  double hi = 0.0;
  double achieved = 0.0; // worst-case probability at [lo, hi]
};

struct BoundSolverOptions {
  int margins = 64;        // log-spaced offsets below each sample
  int scan_points = 512;   // uniform lo grid over [0, max sample]
  int refine_rounds = 12;  // local zoom around the best candidates
  int refine_points = 16;
  double open_gap = 1e-9;  // how far past a sample an open endpoint sits (theta = 0)
};

namespace detail {

inline constexpr double kBudgetSlack = 1e-12;

struct IntervalSearch {
  std::span<const double> samples;
  double theta;
  double budget;
  double smax;

  bool feasible(double lo, double hi) const {
    return worst_case_violation(lo, hi, samples, theta) <= budget + kBudgetSlack;
  }

  // Smallest feasible hi for this lo, or +inf if none exists.
  double min_hi(double lo) const {
    double up;
    if (lo == 0.0) {
      up = smax + theta / budget;
      up = up * (1.0 + 1e-12) + 1e-12;
    } else {
      // Past 2*smax - lo the distances stop depending on hi.
      up = std::max(lo, 2.0 * smax - lo);
    }
    if (!feasible(lo, up))
      return std::numeric_limits<double>::infinity();
    double down = lo;
    if (feasible(lo, down))
      return down;
    const double tol = 1e-10 * (1.0 + up);
    for (int it = 0; it < 200 && up - down > tol; ++it) {
      const double mid = 0.5 * (down + up);
      (feasible(lo, mid) ? up : down) = mid;
    }
    return up;
  }
};

} // namespace detail

/**
 * Minimum-width interval with worst-case escape probability <= budget.
 *
 * For a fixed lo the worst-case probability is nonincreasing in hi, so the
 * smallest feasible hi is found by bisection. The lo search combines the
 * candidate set {0} u samples u (samples - log-spaced margins), a uniform
 * grid, and a few rounds of local zoom around the best points. Candidates
 * that cannot beat the incumbent width are discarded with a single check.
 * theta = 0 is solved exactly by order statistics.
 */
inline IntervalBound solve_component_bounds(std::span<const double> samples, double theta,
                                            double budget,
                                            const BoundSolverOptions &opt = {}) {
  if (samples.empty())
    throw EmptyInput("bound solver needs at least one sample");
  if (!(budget > 0.0))
    throw InputError("budget must be positive");
  if (!(theta >= 0.0) || !std::isfinite(theta))
    throw InputError("theta must be a finite nonnegative number");
  for (double w : samples)
    if (!(w >= 0.0) || !std::isfinite(w))
      throw InputError("samples must be finite and nonnegative");

  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const std::size_t N = s.size();
  const double smin = s.front(), smax = s.back();

  auto finish = [&](double lo, double hi) {
    return IntervalBound{lo, hi, worst_case_violation(lo, hi, samples, theta)};
  };

  if (budget >= 1.0)
    return finish(smin, smin);

  if (theta == 0.0) {
    const auto allowed = static_cast<std::size_t>(std::floor(budget * N + 1e-9));
    const std::size_t keep = N - std::min(allowed, N);
    if (keep == 0)
      return finish(smin, smin);
    const double gap = opt.open_gap * std::max(1.0, smax);
    // lo = 0: a sample counts as covered when it sits strictly below hi.
    double best_lo = 0.0, best_hi = s[keep - 1] + gap;
    for (std::size_t a = 0; a + keep <= N; ++a) {
      if (s[a] <= 0.0)
        continue;
      const double lo = s[a] > gap ? s[a] - gap : 0.5 * s[a];
      const double hi = s[a + keep - 1] + gap;
      if (hi - lo < best_hi - best_lo) {
        best_lo = lo;
        best_hi = hi;
      }
    }
    return finish(best_lo, best_hi);
  }

  detail::IntervalSearch search{samples, theta, budget, smax};
  double best_lo = 0.0;
  double best_hi = search.min_hi(0.0);
  double best_w = best_hi;

  auto consider = [&](double lo) {
    if (!(lo > 0.0) || lo >= smax)
      return;
    // Only worth a bisection if it can beat the incumbent.
    if (!search.feasible(lo, lo + best_w))
      return;
    const double hi = search.min_hi(lo);
    if (hi - lo < best_w) {
      best_w = hi - lo;
      best_lo = lo;
      best_hi = hi;
    }
  };

  std::vector<double> cand(s.begin(), s.end());
  const double range = std::max(smax - smin, theta / budget);
  const double m0 = theta / budget * 1e-3;
  if (opt.margins > 1 && range > m0) {
    const double ratio = std::pow(range / m0, 1.0 / (opt.margins - 1));
    for (double w : s) {
      double m = m0;
      for (int k = 0; k < opt.margins; ++k, m *= ratio)
        cand.push_back(w - m);
    }
  }
  for (int k = 1; k < opt.scan_points; ++k)
    cand.push_back(smax * k / opt.scan_points);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  for (double lo : cand)
    consider(lo);

  // Local zoom around the incumbent.
  if (best_lo > 0.0) {
    double h = smax / opt.scan_points;
    for (int round = 0; round < opt.refine_rounds; ++round) {
      const double center = best_lo;
      for (int k = -opt.refine_points; k <= opt.refine_points; ++k)
        consider(center + h * k / opt.refine_points);
      h /= 4.0;
    }
  }
  return finish(best_lo, best_hi);
}

/// Per-component bounds forming the box fed to the robust master.
struct ComponentBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  Eigen::VectorXd achieved;
  double budget = 0.0; // per component
  std::size_t subproblems = 0;

  Eigen::Index size() const { return lower.size(); }
};

inline void validate(const ComponentBounds &box) {
  if (box.upper.size() != box.lower.size())
    throw DimensionMismatch("box lower and upper bounds differ in length");
  for (Eigen::Index j = 0; j < box.size(); ++j)
    if (!(box.lower(j) >= 0.0) || !(box.upper(j) >= box.lower(j)))
      throw InvalidBounds("box component " + std::to_string(j) + " violates 0 <= lo <= hi");
}

/// Bonferroni split: one interval problem per component with budget alpha / n_omega.
inline ComponentBounds build_box(const SampleSet &samples, const AmbiguitySpec &amb,
                                 const BoundSolverOptions &opt = {}) {
  validate(samples);
  validate(amb, samples);
  const Eigen::Index n = samples.dim();
  ComponentBounds box;
  box.lower.resize(n);
  box.upper.resize(n);
  box.achieved.resize(n);
  box.budget = n > 0 ? amb.alpha / static_cast<double>(n) : amb.alpha;
  box.subproblems = static_cast<std::size_t>(n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t j) {
    const auto col = static_cast<Eigen::Index>(j);
    std::vector<double> values(samples.size());
    for (Eigen::Index i = 0; i < samples.size(); ++i)
      values[i] = samples.samples(i, col);
    const auto b = solve_component_bounds(values, amb.theta, box.budget, opt);
    box.lower(col) = b.lo;
    box.upper(col) = b.hi;
    box.achieved(col) = b.achieved;
  });
  return box;
}

} // namespace drlaed
