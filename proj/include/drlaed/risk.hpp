#pragma once

// Empirical CVaR and the Wasserstein distributionally robust CVaR program.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drlaed/error.hpp"
#include "drlaed/lp.hpp"
#include "drlaed/problem.hpp"

namespace drlaed {

/// Scenario matrix: one row per sample, one column per uncertainty component.
struct SampleSet {
  Eigen::MatrixXd samples;
  std::vector<std::string> labels;

  Eigen::Index size() const { return samples.rows(); }
  Eigen::Index dim() const { return samples.cols(); }
  Eigen::VectorXd sample(Eigen::Index i) const { return samples.row(i).transpose(); }
};

inline void validate(const SampleSet &s) {
  if (s.size() == 0)
    throw EmptyInput("sample set is empty");
  if (!s.labels.empty() && static_cast<Eigen::Index>(s.labels.size()) != s.dim())
    throw DimensionMismatch("sample labels do not match the sample width");
  for (Eigen::Index i = 0; i < s.size(); ++i)
    for (Eigen::Index j = 0; j < s.dim(); ++j) {
      const double v = s.samples(i, j);
      if (!std::isfinite(v) || v < 0.0)
        throw InputError("sample " + std::to_string(i) + ", component " + std::to_string(j) +
                         " is negative or not finite");
    }
}

/// Wasserstein ground metric on the uncertainty space. The LP uses its dual.
enum class GroundNorm { Linf, L1 };

inline const char *to_string(GroundNorm n) { return n == GroundNorm::Linf ? "linf" : "l1"; }

inline GroundNorm parse_ground_norm(const std::string &s) {
  if (s == "linf" || s == "inf" || s == "Linf")
    return GroundNorm::Linf;
  if (s == "l1" || s == "L1")
    return GroundNorm::L1;
  throw UnsupportedNorm("unsupported ground norm '" + s + "' (expected linf or l1)");
}

/// Polyhedral support {w : G w <= h}.
struct Support {
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
};

struct AmbiguitySpec {
  double theta = 0.0;
  double alpha = 0.05;
  GroundNorm ground_norm = GroundNorm::Linf;
  std::optional<Support> support;
};

inline constexpr double kSupportTolerance = 1e-9;

inline void validate(const AmbiguitySpec &amb, const SampleSet &samples) {
  if (!(amb.alpha > 0.0 && amb.alpha < 1.0))
    throw InputError("alpha must lie in (0, 1)");
  if (!(amb.theta >= 0.0) || !std::isfinite(amb.theta))
    throw InputError("theta must be a finite nonnegative number");
  if (!amb.support)
    return;
  const auto &sp = *amb.support;
  if (sp.G.rows() != sp.h.size() || sp.G.cols() != samples.dim())
    throw DimensionMismatch("support polytope G/h does not match the sample width");
  for (Eigen::Index i = 0; i < samples.size(); ++i) {
    const Eigen::VectorXd slack = sp.G * samples.sample(i) - sp.h;
    if (slack.size() > 0 && slack.maxCoeff() > kSupportTolerance)
      throw InputError("sample " + std::to_string(i) + " lies outside the declared support");
  }
}

/// inf_t [ mean((v - t)_+) / alpha + t ], evaluated at every breakpoint.
inline double empirical_cvar(std::span<const double> values, double alpha) {
  if (values.empty())
    throw EmptyInput("empirical_cvar needs at least one value");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InputError("alpha must lie in (0, 1)");
  const double n = static_cast<double>(values.size());
  double best = std::numeric_limits<double>::infinity();
  for (double t : values) {
    double excess = 0.0;
    for (double v : values)
      excess += std::max(v - t, 0.0);
    best = std::min(best, excess / (n * alpha) + t);
  }
  return best;
}

inline double dual_norm(const Eigen::VectorXd &v, GroundNorm ground) {
  if (v.size() == 0)
    return 0.0;
  return ground == GroundNorm::Linf ? v.lpNorm<1>() : v.lpNorm<Eigen::Infinity>();
}

/// An LP whose first n_x variables are the dispatch schedule.
struct FormulatedProgram {
  lp::LinearProgram lp;
  Eigen::Index num_x = 0;
  Eigen::Index uncertain_rows = 0; // rows that depend on the samples or the box
};

namespace detail {

inline void add_schedule(lp::LinearProgram &lp, const CompactProblem &cp) {
  for (Eigen::Index j = 0; j < cp.n_x(); ++j)
    lp.add_variable("x" + std::to_string(j), cp.c(j));
  for (Eigen::Index i = 0; i < cp.A.rows(); ++i) {
    std::vector<lp::Term> terms;
    for (SparseRowMatrix::InnerIterator it(cp.A, i); it; ++it)
      terms.push_back({it.col(), it.value()});
    lp.add_row(terms, lp::Sense::LessEqual, cp.b(i),
               i < static_cast<Eigen::Index>(cp.det_row_names.size()) ? cp.det_row_names[i]
                                                                       : std::string{});
  }
}

inline std::vector<lp::Term> row_terms(const SparseRowMatrix &M, Eigen::Index k) {
  std::vector<lp::Term> terms;
  for (SparseRowMatrix::InnerIterator it(M, k); it; ++it)
    terms.push_back({it.col(), it.value()});
  return terms;
}

inline Eigen::VectorXd dense_row(const SparseRowMatrix &M, Eigen::Index k) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(M.cols());
  for (SparseRowMatrix::InnerIterator it(M, k); it; ++it)
    v(it.col()) = it.value();
  return v;
}

} // namespace detail

/**
 * Tractable distributionally robust CVaR program.
 *
 * Variables: x (n_x), lambda >= 0, t free, s_i >= 0 (one per sample) and,
 * with a support polytope, eta_ik >= 0 (one r-vector per sample and row).
 * Rows:
 *   A x <= b
 *   lambda theta + (1/N) sum_i s_i - alpha t <= 0
 *   d_k'x - f_k + t + (e_k - G'eta_ik)'w_i + eta_ik'h <= s_i     for all i, k
 *   ||e_k - G'eta_ik||_* <= lambda
 *
 * Without support the last constraint does not involve eta and collapses to
 * the bound lambda >= max_k ||e_k||_*. With support and an l-inf ground
 * metric the l1 dual norm uses one auxiliary vector per (i, k); with an l1
 * ground metric the l-inf dual norm is written as +/- bounds against lambda.
 */
inline FormulatedProgram build_drcvp(const CompactProblem &cp, const SampleSet &samples,
                                     const AmbiguitySpec &amb) {
  validate(samples);
  validate(amb, samples);
  if (samples.dim() != cp.n_omega())
    throw DimensionMismatch("samples have " + std::to_string(samples.dim()) +
                            " components, problem expects " + std::to_string(cp.n_omega()));

  const Eigen::Index N = samples.size();
  const Eigen::Index K = cp.num_uncertain_rows();
  FormulatedProgram out;
  auto &lp = out.lp;
  detail::add_schedule(lp, cp);
  out.num_x = cp.n_x();

  double lambda_min = 0.0;
  if (!amb.support)
    for (Eigen::Index k = 0; k < K; ++k)
      lambda_min = std::max(lambda_min, dual_norm(detail::dense_row(cp.E, k), amb.ground_norm));
  const auto lambda = lp.add_variable("lambda", 0.0, lambda_min, lp::kInf);
  const auto t = lp.add_variable("t", 0.0);
  std::vector<lp::Index> s(N);
  for (Eigen::Index i = 0; i < N; ++i)
    s[i] = lp.add_variable("s" + std::to_string(i), 0.0, 0.0, lp::kInf);

  {
    std::vector<lp::Term> terms{{lambda, amb.theta}, {t, -amb.alpha}};
    for (Eigen::Index i = 0; i < N; ++i)
      terms.push_back({s[i], 1.0 / static_cast<double>(N)});
    lp.add_row(terms, lp::Sense::LessEqual, 0.0, "cvar_budget");
  }

  const Eigen::Index r = amb.support ? amb.support->G.rows() : 0;
  const Eigen::Index nw = cp.n_omega();
  for (Eigen::Index i = 0; i < N; ++i) {
    const Eigen::VectorXd w = samples.sample(i);
    const Eigen::VectorXd ew = cp.E * w;
    Eigen::VectorXd eta_coef;
    if (amb.support)
      eta_coef = amb.support->h - amb.support->G * w;
    for (Eigen::Index k = 0; k < K; ++k) {
      auto terms = detail::row_terms(cp.D, k);
      terms.push_back({t, 1.0});
      terms.push_back({s[i], -1.0});
      const std::string tag = "_i" + std::to_string(i) + "_k" + std::to_string(k);
      if (!amb.support) {
        lp.add_row(terms, lp::Sense::LessEqual, cp.f(k) - ew(k), "cvar" + tag);
        continue;
      }
      const auto &G = amb.support->G;
      std::vector<lp::Index> eta(r);
      for (Eigen::Index l = 0; l < r; ++l) {
        eta[l] = lp.add_variable("eta" + tag + "_" + std::to_string(l), 0.0, 0.0, lp::kInf);
        terms.push_back({eta[l], eta_coef(l)});
      }
      lp.add_row(terms, lp::Sense::LessEqual, cp.f(k) - ew(k), "cvar" + tag);

      // Dual-norm ball on z = e_k - G' eta.
      const Eigen::VectorXd ek = detail::dense_row(cp.E, k);
      std::vector<lp::Index> aux;
      if (amb.ground_norm == GroundNorm::Linf)
        for (Eigen::Index j = 0; j < nw; ++j)
          aux.push_back(lp.add_variable("u" + tag + "_" + std::to_string(j), 0.0, 0.0, lp::kInf));
      for (Eigen::Index j = 0; j < nw; ++j) {
        const lp::Index cap = amb.ground_norm == GroundNorm::Linf ? aux[j] : lambda;
        std::vector<lp::Term> up, dn;
        for (Eigen::Index l = 0; l < r; ++l) {
          if (G(l, j) == 0.0)
            continue;
          up.push_back({eta[l], -G(l, j)});
          dn.push_back({eta[l], G(l, j)});
        }
        up.push_back({cap, -1.0});
        dn.push_back({cap, -1.0});
        lp.add_row(up, lp::Sense::LessEqual, -ek(j), "norm_pos" + tag + "_" + std::to_string(j));
        lp.add_row(dn, lp::Sense::LessEqual, ek(j), "norm_neg" + tag + "_" + std::to_string(j));
      }
      if (amb.ground_norm == GroundNorm::Linf) {
        std::vector<lp::Term> sum;
        for (auto u : aux)
          sum.push_back({u, 1.0});
        sum.push_back({lambda, -1.0});
        lp.add_row(sum, lp::Sense::LessEqual, 0.0, "norm_sum" + tag);
      }
    }
  }
  out.uncertain_rows = lp.num_rows() - cp.num_det_rows();
  return out;
}

} // namespace drlaed
