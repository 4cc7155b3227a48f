#pragma once

// Master programs for each dispatch method and the solve_dispatch entry point.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "drlaed/bounds.hpp"
#include "drlaed/error.hpp"
#include "drlaed/lp.hpp"
#include "drlaed/problem.hpp"
#include "drlaed/risk.hpp"

namespace drlaed {

enum class Method { DeterministicOracle, Scenario, WorstCase, Drcvp, DrccpRobust };

inline const char *to_string(Method m) {
  switch (m) {
  case Method::DeterministicOracle:
    return "deterministic-oracle";
  case Method::Scenario:
    return "scenario";
  case Method::WorstCase:
    return "worst-case";
  case Method::Drcvp:
    return "drcvp";
  case Method::DrccpRobust:
    return "drccp-robust";
  }
  return "unknown";
}

inline Method parse_method(const std::string &s) {
  for (Method m : {Method::DeterministicOracle, Method::Scenario, Method::WorstCase,
                   Method::Drcvp, Method::DrccpRobust})
    if (s == to_string(m))
      return m;
  if (s == "deterministic" || s == "oracle")
    return Method::DeterministicOracle;
  throw InputError("unknown method '" + s +
                   "' (expected deterministic-oracle, scenario, worst-case, drcvp or drccp-robust)");
}

inline bool is_distributionally_robust(Method m) {
  return m == Method::Drcvp || m == Method::DrccpRobust;
}

struct MethodSpec {
  Method method = Method::Drcvp;
  AmbiguitySpec ambiguity;
  std::optional<Eigen::VectorXd> realized;     // deterministic oracle only
  std::optional<std::size_t> scenario_count;   // scenario: first n samples (default all)
  BoundSolverOptions bound_options;
};

/// Deterministic problem at a fixed renewable outcome: A x <= b, D x <= f - E w.
inline FormulatedProgram build_deterministic(const CompactProblem &cp, const Eigen::VectorXd &omega) {
  if (omega.size() != cp.n_omega())
    throw DimensionMismatch("realized omega has length " + std::to_string(omega.size()) +
                            ", expected " + std::to_string(cp.n_omega()));
  FormulatedProgram out;
  detail::add_schedule(out.lp, cp);
  out.num_x = cp.n_x();
  const Eigen::VectorXd rhs = cp.f - cp.E * omega;
  for (Eigen::Index k = 0; k < cp.num_uncertain_rows(); ++k)
    out.lp.add_row(detail::row_terms(cp.D, k), lp::Sense::LessEqual, rhs(k),
                   "det_k" + std::to_string(k));
  out.uncertain_rows = cp.num_uncertain_rows();
  return out;
}

/// Every uncertain row enforced at every sample (N K rows).
inline FormulatedProgram build_scenario(const CompactProblem &cp, const SampleSet &samples) {
  validate(samples);
  if (samples.dim() != cp.n_omega())
    throw DimensionMismatch("samples have " + std::to_string(samples.dim()) +
                            " components, problem expects " + std::to_string(cp.n_omega()));
  FormulatedProgram out;
  detail::add_schedule(out.lp, cp);
  out.num_x = cp.n_x();
  const Eigen::MatrixXd rhs =
      (-(cp.E * samples.samples.transpose())).colwise() + cp.f; // K x N
  for (Eigen::Index i = 0; i < samples.size(); ++i)
    for (Eigen::Index k = 0; k < cp.num_uncertain_rows(); ++k)
      out.lp.add_row(detail::row_terms(cp.D, k), lp::Sense::LessEqual, rhs(k, i),
                     "scen_i" + std::to_string(i) + "_k" + std::to_string(k));
  out.uncertain_rows = samples.size() * cp.num_uncertain_rows();
  return out;
}

/**
 * Robust counterpart over the box [lower, upper]: for each uncertain row the
 * adversary picks upper where e_kj > 0 and lower where e_kj < 0, so
 *   d_k'x + max(0, e_k)'upper + min(0, e_k)'lower <= f_k.
 * Size depends only on the compact problem, never on N.
 */
inline FormulatedProgram build_robust_master(const CompactProblem &cp, const ComponentBounds &box) {
  validate(box);
  if (box.size() != cp.n_omega())
    throw DimensionMismatch("box has " + std::to_string(box.size()) +
                            " components, problem expects " + std::to_string(cp.n_omega()));
  FormulatedProgram out;
  detail::add_schedule(out.lp, cp);
  out.num_x = cp.n_x();
  for (Eigen::Index k = 0; k < cp.num_uncertain_rows(); ++k) {
    double worst = 0.0;
    for (SparseRowMatrix::InnerIterator it(cp.E, k); it; ++it)
      worst += it.value() * (it.value() > 0 ? box.upper(it.col()) : box.lower(it.col()));
    out.lp.add_row(detail::row_terms(cp.D, k), lp::Sense::LessEqual, cp.f(k) - worst,
                   "robust_k" + std::to_string(k));
  }
  out.uncertain_rows = cp.num_uncertain_rows();
  return out;
}

struct Timings {
  double bounds = 0.0; // seconds
  double build = 0.0;
  double solve = 0.0;
};

struct DispatchSolution {
  Method method = Method::Drcvp;
  double theta = 0.0;
  double alpha = 0.0;
  lp::Status status = lp::Status::Infeasible;
  double objective = std::numeric_limits<double>::quiet_NaN(); // NaN unless optimal
  Eigen::VectorXd x;
  Timings timings;
  Eigen::Index num_variables = 0;
  Eigen::Index num_rows = 0;
  Eigen::Index uncertain_rows = 0;
  std::size_t iterations = 0;
  std::optional<ComponentBounds> box; // drccp-robust only

  bool optimal() const { return status == lp::Status::Optimal; }
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline SampleSet first_samples(const SampleSet &s, std::size_t n) {
  if (n == 0 || n > static_cast<std::size_t>(s.size()))
    throw InputError("scenario count must lie in [1, " + std::to_string(s.size()) + "]");
  SampleSet out;
  out.samples = s.samples.topRows(static_cast<Eigen::Index>(n));
  out.labels = s.labels;
  return out;
}

} // namespace detail

/**
 * Builds and solves the master program for one method. Infeasible and
 * unbounded masters come back as a status on the solution; only a solver
 * breakdown throws (as SolverFailure, tagged with the method).
 *
 * `box` lets a caller reuse precomputed bounds for drccp-robust; otherwise
 * they are computed from the samples.
 */
inline DispatchSolution solve_dispatch(const MethodSpec &spec, const CompactProblem &cp,
                                       const SampleSet &samples,
                                       const ComponentBounds *box = nullptr,
                                       const lp::Backend &backend = lp::SimplexBackend{}) {
  using clock = std::chrono::steady_clock;
  DispatchSolution sol;
  sol.method = spec.method;
  sol.theta = spec.ambiguity.theta;
  sol.alpha = spec.ambiguity.alpha;

  FormulatedProgram prog;
  auto t0 = clock::now();
  switch (spec.method) {
  case Method::DeterministicOracle:
    if (!spec.realized)
      throw InputError("deterministic-oracle needs a realized renewable vector");
    prog = build_deterministic(cp, *spec.realized);
    break;
  case Method::Scenario:
    prog = build_scenario(cp, spec.scenario_count
                                  ? detail::first_samples(samples, *spec.scenario_count)
                                  : samples);
    break;
  case Method::WorstCase:
    prog = build_scenario(cp, samples);
    break;
  case Method::Drcvp:
    prog = build_drcvp(cp, samples, spec.ambiguity);
    break;
  case Method::DrccpRobust: {
    if (box) {
      sol.box = *box;
    } else {
      sol.box = build_box(samples, spec.ambiguity, spec.bound_options);
      sol.timings.bounds = detail::seconds_since(t0);
    }
    t0 = clock::now();
    prog = build_robust_master(cp, *sol.box);
    break;
  }
  }
  sol.timings.build = detail::seconds_since(t0);
  sol.num_variables = prog.lp.num_variables();
  sol.num_rows = prog.lp.num_rows();
  sol.uncertain_rows = prog.uncertain_rows;

  t0 = clock::now();
  lp::LpSolution res;
  try {
    res = backend.solve(prog.lp);
  } catch (const NumericalBreakdown &e) {
    throw SolverFailure(std::string(to_string(spec.method)) + ": " + e.what());
  }
  sol.timings.solve = detail::seconds_since(t0);
  sol.status = res.status;
  sol.iterations = res.iterations;
  if (res.status == lp::Status::Optimal) {
    sol.objective = res.objective;
    sol.x = res.x.head(prog.num_x);
  }
  return sol;
}

/// Variable and row counts of each master program, without building it.
struct ProblemSize {
  long long variables = 0;
  long long rows = 0;
  long long uncertain_rows = 0;
  long long subproblems = 0; // interval problems (drccp-robust)
};

inline ProblemSize problem_size(Method m, long long n_x, long long n_omega, long long m_det,
                                long long K, long long N, long long support_rows = 0,
                                GroundNorm norm = GroundNorm::Linf) {
  ProblemSize s;
  s.variables = n_x;
  switch (m) {
  case Method::DeterministicOracle:
  case Method::DrccpRobust:
    s.uncertain_rows = K;
    s.subproblems = m == Method::DrccpRobust ? n_omega : 0;
    break;
  case Method::Scenario:
  case Method::WorstCase:
    s.uncertain_rows = N * K;
    break;
  case Method::Drcvp: {
    s.variables += 2 + N;
    s.uncertain_rows = 1 + N * K;
    if (support_rows > 0) {
      const long long pairs = N * K;
      s.variables += pairs * support_rows;
      s.uncertain_rows += pairs * 2 * n_omega;
      if (norm == GroundNorm::Linf) {
        s.variables += pairs * n_omega;
        s.uncertain_rows += pairs;
      }
    }
    break;
  }
  }
  s.rows = m_det + s.uncertain_rows;
  return s;
}

inline ProblemSize problem_size(Method m, const CompactProblem &cp, long long N,
                                const AmbiguitySpec &amb = {}) {
  return problem_size(m, cp.n_x(), cp.n_omega(), cp.num_det_rows(), cp.num_uncertain_rows(), N,
                      amb.support ? amb.support->G.rows() : 0, amb.ground_norm);
}

} // namespace drlaed
