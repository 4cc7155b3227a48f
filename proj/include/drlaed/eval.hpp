#pragma once

// Out-of-sample evaluation of a schedule and theta sweeps.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "drlaed/error.hpp"
#include "drlaed/formulations.hpp"
#include "drlaed/parallel.hpp"
#include "drlaed/problem.hpp"
#include "drlaed/risk.hpp"

namespace drlaed {

inline constexpr double kViolationTol = 1e-6;
inline constexpr int kHistogramBins = 50;

/// Flow histogram of one line: 50 uniform bins over [-limit, limit] plus
/// an underflow bin in front and an overflow bin at the back.
struct LineHistogram {
  std::size_t line = 0;
  double limit = 0.0;
  double min_flow = std::numeric_limits<double>::infinity();
  double max_flow = -std::numeric_limits<double>::infinity();
  std::vector<long long> counts = std::vector<long long>(kHistogramBins + 2, 0);

  double bin_lo(int b) const {
    if (b == 0)
      return -std::numeric_limits<double>::infinity();
    return -limit + 2.0 * limit * (b - 1) / kHistogramBins;
  }
  double bin_hi(int b) const {
    if (b == kHistogramBins + 1)
      return std::numeric_limits<double>::infinity();
    return -limit + 2.0 * limit * b / kHistogramBins;
  }
  void add(double flow) {
    int b;
    if (flow < -limit)
      b = 0;
    else if (flow > limit)
      b = kHistogramBins + 1;
    else
      b = 1 + std::min(kHistogramBins - 1,
                       static_cast<int>(std::floor((flow + limit) / (2.0 * limit) * kHistogramBins)));
    ++counts[b];
  }
};

struct EvaluationReport {
  double violation_frequency = 0.0;
  long long violations = 0;
  long long n_valid = 0;
  std::vector<long long> row_violations; // per uncertain row
  double cost = 0.0;
  std::vector<LineHistogram> lines;
};

/**
 * Joint violation frequency of x over the validation samples: a sample
 * counts once if any uncertain row exceeds tol. Each line's histogram gets
 * one entry per sample, the flow of largest magnitude over the horizon
 * (sign kept), so bin counts sum to the number of samples.
 */
inline EvaluationReport evaluate(const Eigen::VectorXd &x, const CompactProblem &cp,
                                 const SampleSet &validation, double tol = kViolationTol) {
  validate(validation);
  if (x.size() != cp.n_x())
    throw DimensionMismatch("x has length " + std::to_string(x.size()) + ", expected " +
                            std::to_string(cp.n_x()));
  if (validation.dim() != cp.n_omega())
    throw DimensionMismatch("validation samples have " + std::to_string(validation.dim()) +
                            " components, problem expects " + std::to_string(cp.n_omega()));
  EvaluationReport rep;
  rep.n_valid = validation.size();
  rep.cost = cp.c.dot(x);
  const Eigen::Index K = cp.num_uncertain_rows();
  rep.row_violations.assign(static_cast<std::size_t>(K), 0);
  rep.lines.resize(cp.num_lines);
  for (std::size_t l = 0; l < cp.num_lines; ++l)
    rep.lines[l].line = l;
  for (Eigen::Index k = 0; k < K; ++k)
    if (cp.rows[k].kind == RowKind::LineUpper)
      rep.lines[cp.rows[k].line].limit = cp.rows[k].limit;

  const Eigen::VectorXd dx = cp.D * x - cp.f;
  const Eigen::MatrixXd values = (cp.E * validation.samples.transpose()).colwise() + dx; // K x N
  std::vector<double> peak(cp.num_lines);
  for (Eigen::Index i = 0; i < validation.size(); ++i) {
    bool violated = false;
    for (Eigen::Index k = 0; k < K; ++k)
      if (values(k, i) > tol) {
        violated = true;
        ++rep.row_violations[k];
      }
    rep.violations += violated;

    std::fill(peak.begin(), peak.end(), 0.0);
    for (Eigen::Index k = 0; k < K; ++k) {
      const auto &row = cp.rows[k];
      if (row.kind != RowKind::LineUpper)
        continue;
      const double flow = values(k, i) + row.limit;
      auto &h = rep.lines[row.line];
      h.min_flow = std::min(h.min_flow, flow);
      h.max_flow = std::max(h.max_flow, flow);
      if (std::abs(flow) > std::abs(peak[row.line]))
        peak[row.line] = flow;
    }
    for (std::size_t l = 0; l < cp.num_lines; ++l)
      rep.lines[l].add(peak[l]);
  }
  rep.violation_frequency =
      static_cast<double>(rep.violations) / static_cast<double>(rep.n_valid);
  return rep;
}

struct SweepRow {
  double theta = 0.0;
  Method method = Method::Drcvp;
  lp::Status status = lp::Status::Infeasible;
  double cost = std::numeric_limits<double>::quiet_NaN();           // NaN unless optimal
  double violation_freq = std::numeric_limits<double>::quiet_NaN(); // NaN unless optimal
  long long n_valid = 0;
};

struct SweepOptions {
  double alpha = 0.05;
  GroundNorm ground_norm = GroundNorm::Linf;
  std::optional<Support> support;
  BoundSolverOptions bound_options;
  lp::SolverSettings solver;
  std::size_t threads = 0; // 0: DRLAED_THREADS / hardware
};

/// One solve + evaluate per theta; rows come back in input order.
inline std::vector<SweepRow> sweep(const std::vector<double> &thetas, Method method,
                                   const CompactProblem &cp, const SampleSet &train,
                                   const SampleSet &valid, const SweepOptions &opt = {}) {
  if (thetas.empty())
    throw EmptyInput("theta list is empty");
  if (!std::is_sorted(thetas.begin(), thetas.end()))
    throw InputError("theta list must be sorted ascending");
  validate(valid);
  std::vector<SweepRow> rows(thetas.size());
  const lp::SimplexBackend backend(opt.solver);
  parallel_for(
      thetas.size(),
      [&](std::size_t r) {
        MethodSpec spec;
        spec.method = method;
        spec.ambiguity.theta = thetas[r];
        spec.ambiguity.alpha = opt.alpha;
        spec.ambiguity.ground_norm = opt.ground_norm;
        spec.ambiguity.support = opt.support;
        spec.bound_options = opt.bound_options;
        const auto sol = solve_dispatch(spec, cp, train, nullptr, backend);
        SweepRow row;
        row.theta = thetas[r];
        row.method = method;
        row.status = sol.status;
        row.n_valid = valid.size();
        if (sol.optimal()) {
          row.cost = sol.objective;
          row.violation_freq = evaluate(sol.x, cp, valid).violation_frequency;
        }
        rows[r] = row;
      },
      opt.threads);
  return rows;
}

} // namespace drlaed
