#pragma once

// Dense bounded-variable primal simplex.
//
// Problem form:  min c'x  s.t.  a_i'x <= b_i  or  a_i'x = b_i,  l <= x <= u.
//
// Every row gets a logical variable r_i = a_i'x with bounds (-inf, b_i] or
// [b_i, b_i]. The basis therefore mixes structural columns and negated unit
// columns. Only the "kernel" of the basis matters for solves: the rows R
// whose logical is nonbasic, restricted to the basic structurals S, with
// |R| == |S| <= number of structurals. LPs with many more rows than columns
// (scenario and CVaR programs) thus factor a small dense matrix per pivot.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <initializer_list>
#include <limits>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "drlaed/error.hpp"

namespace drlaed::lp {

using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { LessEqual, Equal };

struct Term {
  Index col;
  double coef;
};

class LinearProgram {
public:
  Index add_variable(std::string name, double cost, double lower = -kInf,
                     double upper = kInf) {
    objective_.push_back(cost);
    lower_.push_back(lower);
    upper_.push_back(upper);
    var_names_.push_back(std::move(name));
    return static_cast<Index>(objective_.size()) - 1;
  }

  Index add_row(std::span<const Term> terms, Sense sense, double rhs, std::string name = {}) {
    for (const auto &t : terms) {
      if (t.col < 0 || t.col >= num_variables())
        throw DimensionMismatch("row term references unknown column " + std::to_string(t.col));
      if (t.coef == 0.0)
        continue;
      cols_.push_back(t.col);
      vals_.push_back(t.coef);
    }
    row_start_.push_back(static_cast<Index>(cols_.size()));
    sense_.push_back(sense);
    rhs_.push_back(rhs);
    row_names_.push_back(std::move(name));
    return num_rows() - 1;
  }

  Index add_row(std::initializer_list<Term> terms, Sense sense, double rhs,
                std::string name = {}) {
    return add_row(std::span<const Term>(terms.begin(), terms.size()), sense, rhs,
                   std::move(name));
  }

  /// a'x >= rhs, stored negated.
  Index add_row_ge(std::vector<Term> terms, double rhs, std::string name = {}) {
    for (auto &t : terms)
      t.coef = -t.coef;
    return add_row(terms, Sense::LessEqual, -rhs, std::move(name));
  }

  void set_objective(Index j, double cost) { objective_.at(j) = cost; }
  void set_bounds(Index j, double lower, double upper) {
    lower_.at(j) = lower;
    upper_.at(j) = upper;
  }

  Index num_variables() const { return static_cast<Index>(objective_.size()); }
  Index num_rows() const { return static_cast<Index>(rhs_.size()); }
  Index num_nonzeros() const { return static_cast<Index>(vals_.size()); }
  Index num_equalities() const {
    return static_cast<Index>(std::count(sense_.begin(), sense_.end(), Sense::Equal));
  }
  Index num_inequalities() const { return num_rows() - num_equalities(); }

  const std::vector<double> &objective() const { return objective_; }
  const std::vector<double> &lower() const { return lower_; }
  const std::vector<double> &upper() const { return upper_; }
  const std::vector<double> &rhs() const { return rhs_; }
  const std::vector<Sense> &sense() const { return sense_; }
  const std::vector<std::string> &var_names() const { return var_names_; }
  const std::vector<std::string> &row_names() const { return row_names_; }

  std::span<const Index> row_cols(Index i) const {
    return {cols_.data() + row_start_[i], static_cast<std::size_t>(row_start_[i + 1] - row_start_[i])};
  }
  std::span<const double> row_vals(Index i) const {
    return {vals_.data() + row_start_[i], static_cast<std::size_t>(row_start_[i + 1] - row_start_[i])};
  }

  double row_activity(Index i, std::span<const double> x) const {
    double s = 0.0;
    auto c = row_cols(i);
    auto v = row_vals(i);
    for (std::size_t k = 0; k < c.size(); ++k)
      s += v[k] * x[c[k]];
    return s;
  }

  /// Throws if a coefficient is NaN/infinite or bounds are inconsistent.
  void validate() const {
    for (double c : objective_)
      if (!std::isfinite(c))
        throw InputError("LP objective has a non-finite coefficient");
    for (Index j = 0; j < num_variables(); ++j) {
      if (std::isnan(lower_[j]) || std::isnan(upper_[j]) || lower_[j] == kInf ||
          upper_[j] == -kInf)
        throw InputError("LP variable " + std::to_string(j) + " has invalid bounds");
    }
    for (double v : vals_)
      if (!std::isfinite(v))
        throw InputError("LP matrix has a non-finite coefficient");
    for (double r : rhs_)
      if (!std::isfinite(r))
        throw InputError("LP right-hand side has a non-finite entry");
  }

private:
  std::vector<double> objective_, lower_, upper_;
  std::vector<std::string> var_names_;
  std::vector<Index> row_start_{0};
  std::vector<Index> cols_;
  std::vector<double> vals_;
  std::vector<double> rhs_;
  std::vector<Sense> sense_;
  std::vector<std::string> row_names_;
};

enum class Status { Optimal, Infeasible, Unbounded };

inline const char *to_string(Status s) {
  switch (s) {
  case Status::Optimal:
    return "optimal";
  case Status::Infeasible:
    return "infeasible";
  case Status::Unbounded:
    return "unbounded";
  }
  return "unknown";
}

struct LpSolution {
  Status status = Status::Infeasible;
  Eigen::VectorXd x;              // structural values
  double objective = 0.0;
  Eigen::VectorXd row_duals;      // d(objective)/d(rhs_i)
  Eigen::VectorXd reduced_costs;  // c - A'y, structurals
  double primal_residual = 0.0;   // relative bound/row violation
  double dual_residual = 0.0;     // relative reduced-cost sign violation
  double duality_gap = 0.0;       // relative
  std::size_t iterations = 0;
};

struct SolverSettings {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  double certify_tol = 1e-7;
  std::size_t stall_threshold = 50;    // degenerate pivots before Bland's rule
  std::size_t refresh_interval = 50;   // recompute basic values from scratch
  std::size_t max_iterations = 0;      // 0: 10000 + 50 (m + n)
  std::size_t certify_retries = 3;
};

namespace detail {

enum class VarState : unsigned char { Basic, AtLower, AtUpper, Free, Fixed };

class BoundedSimplex {
public:
  BoundedSimplex(const LinearProgram &lp, const SolverSettings &settings)
      : lp_(lp), s_(settings), m_(lp.num_rows()), n_(lp.num_variables()) {
    lp.validate();
    A_.setZero(m_, n_);
    for (Index i = 0; i < m_; ++i) {
      auto c = lp.row_cols(i);
      auto v = lp.row_vals(i);
      for (std::size_t k = 0; k < c.size(); ++k)
        A_(i, c[k]) += v[k];
    }
    const Index total = n_ + m_;
    lo_.resize(total);
    up_.resize(total);
    cost_.assign(total, 0.0);
    x_.assign(total, 0.0);
    state_.assign(total, VarState::Basic);
    for (Index j = 0; j < n_; ++j) {
      lo_[j] = lp.lower()[j];
      up_[j] = lp.upper()[j];
      cost_[j] = lp.objective()[j];
    }
    for (Index i = 0; i < m_; ++i) {
      lo_[n_ + i] = lp.sense()[i] == Sense::Equal ? lp.rhs()[i] : -kInf;
      up_[n_ + i] = lp.rhs()[i];
    }
    cost_scale_ = 1.0;
    for (Index j = 0; j < n_; ++j)
      cost_scale_ = std::max(cost_scale_, std::abs(cost_[j]));
    row_pos_.assign(m_, -1);
    basic_pos_.assign(n_, -1);
    cap_ = s_.max_iterations ? s_.max_iterations
                             : 10000 + 50 * static_cast<std::size_t>(m_ + n_);
  }

  LpSolution run() {
    for (Index j = 0; j < n_; ++j) {
      if (lo_[j] > up_[j]) {
        LpSolution sol;
        sol.status = Status::Infeasible;
        return sol;
      }
      if (std::isfinite(lo_[j]) && lo_[j] == up_[j]) {
        state_[j] = VarState::Fixed;
        x_[j] = lo_[j];
      } else if (std::isfinite(lo_[j])) {
        state_[j] = VarState::AtLower;
        x_[j] = lo_[j];
      } else if (std::isfinite(up_[j])) {
        state_[j] = VarState::AtUpper;
        x_[j] = up_[j];
      } else {
        state_[j] = VarState::Free;
        x_[j] = 0.0;
      }
    }
    refactor();
    refresh();

    std::size_t retries = 0;
    for (;;) {
      const Status st = iterate();
      if (st != Status::Optimal)
        return finish(st);
      LpSolution sol = finish(st);
      if (sol.primal_residual <= s_.certify_tol && sol.dual_residual <= s_.certify_tol &&
          sol.duality_gap <= s_.certify_tol)
        return sol;
      if (++retries > s_.certify_retries)
        throw NumericalBreakdown("simplex optimum failed certification (primal " +
                                 std::to_string(sol.primal_residual) + ", dual " +
                                 std::to_string(sol.dual_residual) + ", gap " +
                                 std::to_string(sol.duality_gap) + ")");
      refactor();
      refresh();
    }
  }

private:
  bool is_logical(Index v) const { return v >= n_; }

  double tol_for(double bound) const { return s_.feasibility_tol * (1.0 + std::abs(bound)); }

  // Kernel: rows kernel_rows_ (logical nonbasic), columns kernel_cols_ (basic structurals).
  void refactor() {
    const Index k = static_cast<Index>(kernel_cols_.size());
    if (k == 0)
      return;
    Eigen::MatrixXd M(k, k);
    for (Index r = 0; r < k; ++r)
      for (Index c = 0; c < k; ++c)
        M(r, c) = A_(kernel_rows_[r], kernel_cols_[c]);
    lu_.compute(M);
    if (!(lu_.rcond() > 1e-14))
      throw NumericalBreakdown("basis kernel is numerically singular");
  }

  // Recompute basic values from the nonbasic ones.
  void refresh() {
    const Index k = static_cast<Index>(kernel_cols_.size());
    Eigen::VectorXd xs = Eigen::VectorXd::Zero(n_);
    for (Index j = 0; j < n_; ++j)
      if (state_[j] != VarState::Basic)
        xs(j) = x_[j];
    if (k > 0) {
      Eigen::VectorXd rhs(k);
      for (Index r = 0; r < k; ++r) {
        const Index i = kernel_rows_[r];
        rhs(r) = x_[n_ + i] - A_.row(i).dot(xs);
      }
      const Eigen::VectorXd sol = lu_.solve(rhs);
      for (Index c = 0; c < k; ++c) {
        x_[kernel_cols_[c]] = sol(c);
        xs(kernel_cols_[c]) = sol(c);
      }
    }
    const Eigen::VectorXd act = A_ * xs;
    for (Index i = 0; i < m_; ++i)
      if (state_[n_ + i] == VarState::Basic)
        x_[n_ + i] = act(i);
  }

  double phase_one_cost(Index v) const {
    if (x_[v] < lo_[v] - tol_for(lo_[v]))
      return -1.0;
    if (x_[v] > up_[v] + tol_for(up_[v]))
      return 1.0;
    return 0.0;
  }

  double infeasibility() const {
    double sum = 0.0;
    for (Index v = 0; v < n_ + m_; ++v) {
      if (state_[v] != VarState::Basic)
        continue;
      if (x_[v] < lo_[v] - tol_for(lo_[v]))
        sum += lo_[v] - x_[v];
      else if (x_[v] > up_[v] + tol_for(up_[v]))
        sum += x_[v] - up_[v];
    }
    return sum;
  }

  // y' B = c_B'
  Eigen::VectorXd btran(bool phase_one) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m_);
    for (Index i = 0; i < m_; ++i) {
      const Index v = n_ + i;
      if (state_[v] == VarState::Basic)
        y(i) = -(phase_one ? phase_one_cost(v) : cost_[v]);
    }
    const Index k = static_cast<Index>(kernel_cols_.size());
    if (k == 0)
      return y;
    Eigen::VectorXd rhs(k);
    for (Index c = 0; c < k; ++c) {
      const Index j = kernel_cols_[c];
      rhs(c) = phase_one ? phase_one_cost(j) : cost_[j];
    }
    for (Index i = 0; i < m_; ++i) {
      if (y(i) == 0.0)
        continue;
      for (Index c = 0; c < k; ++c)
        rhs(c) -= A_(i, kernel_cols_[c]) * y(i);
    }
    const Eigen::VectorXd yr = lu_.transpose().solve(rhs);
    for (Index r = 0; r < k; ++r)
      y(kernel_rows_[r]) = yr(r);
    return y;
  }

  // B z = a_q. Returns z indexed by row position for basic logicals and by
  // kernel position for basic structurals (stored in zs_).
  void ftran(Index q) {
    const Index k = static_cast<Index>(kernel_cols_.size());
    Eigen::VectorXd aq;
    if (is_logical(q)) {
      aq = Eigen::VectorXd::Zero(m_);
      aq(q - n_) = -1.0;
    } else {
      aq = A_.col(q);
    }
    zs_.setZero(k);
    if (k > 0) {
      Eigen::VectorXd rhs(k);
      for (Index r = 0; r < k; ++r)
        rhs(r) = aq(kernel_rows_[r]);
      zs_ = lu_.solve(rhs);
    }
    zl_.resize(m_);
    for (Index i = 0; i < m_; ++i) {
      if (state_[n_ + i] != VarState::Basic) {
        zl_(i) = 0.0;
        continue;
      }
      double s = -aq(i);
      for (Index c = 0; c < k; ++c)
        s += A_(i, kernel_cols_[c]) * zs_(c);
      zl_(i) = s;
    }
  }

  struct Candidate {
    Index var = -1;
    int dir = 0;
    double score = 0.0;
  };

  Candidate price(const Eigen::VectorXd &y, bool phase_one) const {
    Candidate best;
    const double tol = s_.optimality_tol * (phase_one ? 1.0 : cost_scale_);
    Eigen::VectorXd aty = Eigen::VectorXd::Zero(n_);
    for (Index i = 0; i < m_; ++i)
      if (y(i) != 0.0)
        aty.noalias() += y(i) * A_.row(i).transpose();
    auto consider = [&](Index v, double d) {
      int dir = 0;
      switch (state_[v]) {
      case VarState::AtLower:
        if (d < -tol)
          dir = 1;
        break;
      case VarState::AtUpper:
        if (d > tol)
          dir = -1;
        break;
      case VarState::Free:
        if (std::abs(d) > tol)
          dir = d < 0 ? 1 : -1;
        break;
      default:
        break;
      }
      if (dir == 0)
        return;
      if (bland_) {
        if (best.var < 0)
          best = {v, dir, std::abs(d)};
        return;
      }
      if (std::abs(d) > best.score)
        best = {v, dir, std::abs(d)};
    };
    for (Index j = 0; j < n_; ++j) {
      if (state_[j] == VarState::Basic || state_[j] == VarState::Fixed)
        continue;
      consider(j, (phase_one ? 0.0 : cost_[j]) - aty(j));
    }
    for (Index i = 0; i < m_; ++i) {
      const Index v = n_ + i;
      if (state_[v] == VarState::Basic || state_[v] == VarState::Fixed)
        continue;
      consider(v, (phase_one ? 0.0 : cost_[v]) + y(i));
    }
    return best;
  }

  // Target bound for a basic variable moving at `rate`, or NaN if it never blocks.
  double target(Index v, double rate, bool phase_one) const {
    const double x = x_[v];
    if (rate > 0.0) {
      if (phase_one && x < lo_[v] - tol_for(lo_[v]))
        return lo_[v];
      if (x > up_[v] + tol_for(up_[v]))
        return std::numeric_limits<double>::quiet_NaN();
      return std::isfinite(up_[v]) ? up_[v] : std::numeric_limits<double>::quiet_NaN();
    }
    if (phase_one && x > up_[v] + tol_for(up_[v]))
      return up_[v];
    if (x < lo_[v] - tol_for(lo_[v]))
      return std::numeric_limits<double>::quiet_NaN();
    return std::isfinite(lo_[v]) ? lo_[v] : std::numeric_limits<double>::quiet_NaN();
  }

  double basic_rate(Index v, int dir) const {
    if (is_logical(v))
      return -dir * zl_(v - n_);
    return -dir * zs_(basic_pos_[v]);
  }

  void for_each_basic(auto &&fn) const {
    for (Index c = 0; c < static_cast<Index>(kernel_cols_.size()); ++c)
      fn(kernel_cols_[c]);
    for (Index i = 0; i < m_; ++i)
      if (state_[n_ + i] == VarState::Basic)
        fn(n_ + i);
  }

  Status iterate() {
    bool just_refreshed = true;
    for (;;) {
      if (++iterations_ > cap_)
        throw NumericalBreakdown("simplex iteration cap exceeded (" + std::to_string(cap_) +
                                 ")");
      if (iterations_ % s_.refresh_interval == 0) {
        refactor();
        refresh();
        just_refreshed = true;
      }
      const bool phase_one = infeasibility() > 0.0;
      const Eigen::VectorXd y = btran(phase_one);
      const Candidate enter = price(y, phase_one);
      if (enter.var < 0) {
        if (!just_refreshed) {
          refactor();
          refresh();
          just_refreshed = true;
          continue;
        }
        return phase_one ? Status::Infeasible : Status::Optimal;
      }
      just_refreshed = false;

      const Index q = enter.var;
      const int dir = enter.dir;
      ftran(q);

      // Ratio test.
      double flip = kInf;
      if (std::isfinite(lo_[q]) && std::isfinite(up_[q]))
        flip = up_[q] - lo_[q];

      Index leave = -1;
      double step = kInf;
      double leave_bound = 0.0;
      if (bland_) {
        for_each_basic([&](Index v) {
          const double rate = basic_rate(v, dir);
          if (std::abs(rate) <= s_.pivot_tol)
            return;
          const double tb = target(v, rate, phase_one);
          if (std::isnan(tb))
            return;
          const double ratio = std::max(0.0, (tb - x_[v]) / rate);
          if (ratio < step - 1e-12 || (ratio <= step + 1e-12 && leave >= 0 && v < leave)) {
            step = ratio;
            leave = v;
            leave_bound = tb;
          }
        });
      } else {
        // Harris: relaxed bound pass, then the largest pivot within it.
        double relaxed = kInf;
        for_each_basic([&](Index v) {
          const double rate = basic_rate(v, dir);
          if (std::abs(rate) <= s_.pivot_tol)
            return;
          const double tb = target(v, rate, phase_one);
          if (std::isnan(tb))
            return;
          const double slack = rate > 0 ? tb + tol_for(tb) - x_[v] : tb - tol_for(tb) - x_[v];
          relaxed = std::min(relaxed, std::max(0.0, slack / rate));
        });
        double best_rate = 0.0;
        for_each_basic([&](Index v) {
          const double rate = basic_rate(v, dir);
          if (std::abs(rate) <= s_.pivot_tol)
            return;
          const double tb = target(v, rate, phase_one);
          if (std::isnan(tb))
            return;
          const double ratio = std::max(0.0, (tb - x_[v]) / rate);
          if (ratio <= relaxed && std::abs(rate) > best_rate) {
            best_rate = std::abs(rate);
            step = ratio;
            leave = v;
            leave_bound = tb;
          }
        });
      }

      const bool do_flip = flip <= step;
      if (do_flip)
        step = flip;
      if (!std::isfinite(step)) {
        if (phase_one)
          throw NumericalBreakdown("phase-one ray without a blocking variable");
        return Status::Unbounded;
      }

      // Update values.
      x_[q] += dir * step;
      for_each_basic([&](Index v) { x_[v] += basic_rate(v, dir) * step; });

      // Round-off sized progress counts as a degenerate pivot.
      if (step * enter.score <= 1e-10) {
        if (++stalled_ > s_.stall_threshold)
          bland_ = true;
      } else {
        stalled_ = 0;
        bland_ = false;
      }

      if (do_flip) {
        if (dir > 0) {
          x_[q] = up_[q];
          state_[q] = VarState::AtUpper;
        } else {
          x_[q] = lo_[q];
          state_[q] = VarState::AtLower;
        }
        continue;
      }

      // Pivot: q enters, leave exits at leave_bound.
      x_[leave] = leave_bound;
      if (std::isfinite(lo_[leave]) && lo_[leave] == up_[leave])
        state_[leave] = VarState::Fixed;
      else
        state_[leave] = (leave_bound == lo_[leave]) ? VarState::AtLower : VarState::AtUpper;
      change_basis(q, leave);
      refactor();
    }
  }

  void change_basis(Index enter, Index leave) {
    const bool ein = is_logical(enter);
    const bool lin = is_logical(leave);
    state_[enter] = VarState::Basic;
    if (!ein && lin) {
      kernel_cols_.push_back(enter);
      basic_pos_[enter] = static_cast<Index>(kernel_cols_.size()) - 1;
      kernel_rows_.push_back(leave - n_);
      row_pos_[leave - n_] = static_cast<Index>(kernel_rows_.size()) - 1;
    } else if (!ein && !lin) {
      const Index p = basic_pos_[leave];
      kernel_cols_[p] = enter;
      basic_pos_[enter] = p;
      basic_pos_[leave] = -1;
    } else if (ein && lin) {
      const Index p = row_pos_[enter - n_];
      kernel_rows_[p] = leave - n_;
      row_pos_[leave - n_] = p;
      row_pos_[enter - n_] = -1;
    } else {
      // Structural leaves, logical enters: drop one column and one row,
      // filling the holes with the last entries.
      const Index pc = basic_pos_[leave];
      const Index last_c = kernel_cols_.back();
      kernel_cols_[pc] = last_c;
      basic_pos_[last_c] = pc;
      kernel_cols_.pop_back();
      basic_pos_[leave] = -1;

      const Index pr = row_pos_[enter - n_];
      const Index last_r = kernel_rows_.back();
      kernel_rows_[pr] = last_r;
      row_pos_[last_r] = pr;
      kernel_rows_.pop_back();
      row_pos_[enter - n_] = -1;
    }
  }

  LpSolution finish(Status st) {
    LpSolution sol;
    sol.status = st;
    sol.iterations = iterations_;
    sol.x.resize(n_);
    for (Index j = 0; j < n_; ++j)
      sol.x(j) = x_[j];
    if (st != Status::Optimal)
      return sol;

    const Eigen::VectorXd y = btran(false);
    sol.row_duals = y;
    sol.reduced_costs.resize(n_);
    Eigen::VectorXd aty = A_.transpose() * y;
    for (Index j = 0; j < n_; ++j)
      sol.reduced_costs(j) = cost_[j] - aty(j);

    double primal_obj = 0.0;
    for (Index j = 0; j < n_; ++j)
      primal_obj += cost_[j] * x_[j];
    sol.objective = primal_obj;

    // Primal residual from the original data.
    double pres = 0.0;
    const Eigen::VectorXd xs = sol.x;
    const Eigen::VectorXd act = A_ * xs;
    for (Index j = 0; j < n_; ++j) {
      if (std::isfinite(lo_[j]))
        pres = std::max(pres, (lo_[j] - xs(j)) / (1.0 + std::abs(lo_[j])));
      if (std::isfinite(up_[j]))
        pres = std::max(pres, (xs(j) - up_[j]) / (1.0 + std::abs(up_[j])));
    }
    for (Index i = 0; i < m_; ++i) {
      const double b = lp_.rhs()[i];
      double viol = act(i) - b;
      if (lp_.sense()[i] == Sense::Equal)
        viol = std::abs(viol);
      pres = std::max(pres, viol / (1.0 + std::abs(b)));
    }
    sol.primal_residual = pres;

    // Dual feasibility and dual objective over structurals and logicals.
    double dres = 0.0;
    double dual_obj = 0.0;
    auto account = [&](Index v, double d) {
      const double x = x_[v];
      const bool at_lo = std::isfinite(lo_[v]) && std::abs(x - lo_[v]) <= tol_for(lo_[v]);
      const bool at_up = std::isfinite(up_[v]) && std::abs(x - up_[v]) <= tol_for(up_[v]);
      double viol = 0.0;
      if (at_lo && at_up)
        viol = 0.0;
      else if (at_lo)
        viol = std::max(0.0, -d);
      else if (at_up)
        viol = std::max(0.0, d);
      else
        viol = std::abs(d);
      dres = std::max(dres, viol / cost_scale_);
      if (d > 0.0 && std::isfinite(lo_[v]))
        dual_obj += d * lo_[v];
      else if (d < 0.0 && std::isfinite(up_[v]))
        dual_obj += d * up_[v];
      else
        dual_obj += d * x;
    };
    for (Index j = 0; j < n_; ++j)
      account(j, sol.reduced_costs(j));
    for (Index i = 0; i < m_; ++i)
      account(n_ + i, y(i));
    sol.dual_residual = dres;
    sol.duality_gap = std::abs(primal_obj - dual_obj) / (1.0 + std::abs(primal_obj));
    return sol;
  }

  const LinearProgram &lp_;
  SolverSettings s_;
  Index m_, n_;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> A_;
  std::vector<double> lo_, up_, cost_, x_;
  std::vector<VarState> state_;
  double cost_scale_ = 1.0;

  std::vector<Index> kernel_cols_; // basic structurals
  std::vector<Index> kernel_rows_; // rows with nonbasic logical
  std::vector<Index> basic_pos_;   // structural -> position in kernel_cols_
  std::vector<Index> row_pos_;     // row -> position in kernel_rows_
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::VectorXd zs_, zl_;

  std::size_t iterations_ = 0;
  std::size_t cap_ = 0;
  std::size_t stalled_ = 0;
  bool bland_ = false;
};

} // namespace detail

/// Solves `lp` with the internal simplex. Throws NumericalBreakdown when the
/// basis becomes singular, the iteration cap is hit, or an optimum fails
/// certification.
inline LpSolution solve_lp(const LinearProgram &lp, const SolverSettings &settings = {}) {
  detail::BoundedSimplex simplex(lp, settings);
  return simplex.run();
}

/// Solver interface used by the formulations; lets an external solver stand
/// in for the internal one.
class Backend {
public:
  virtual ~Backend() = default;
  virtual LpSolution solve(const LinearProgram &lp) const = 0;
  virtual std::string name() const = 0;
};

class SimplexBackend final : public Backend {
public:
  explicit SimplexBackend(SolverSettings settings = {}) : settings_(settings) {}
  LpSolution solve(const LinearProgram &lp) const override { return solve_lp(lp, settings_); }
  std::string name() const override { return "simplex"; }
  const SolverSettings &settings() const { return settings_; }

private:
  SolverSettings settings_;
};

/// Fixed-format MPS. Names are generated (R0000001, C0000001) so they fit
/// the 8-character fields; the LP's own names are not used.
inline void write_mps(std::ostream &os, const LinearProgram &lp, const std::string &name = "DRLAED") {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  auto rname = [](Index i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "R%07lld", static_cast<long long>(i + 1));
    return std::string(buf);
  };
  auto cname = [](Index j) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "C%07lld", static_cast<long long>(j + 1));
    return std::string(buf);
  };
  auto field = [](std::string s, std::size_t w) {
    if (s.size() < w)
      s.append(w - s.size(), ' ');
    return s;
  };

  // Column-wise view of the rows.
  const Index n = lp.num_variables();
  std::vector<std::vector<std::pair<Index, double>>> cols(n);
  for (Index i = 0; i < lp.num_rows(); ++i) {
    auto c = lp.row_cols(i);
    auto v = lp.row_vals(i);
    for (std::size_t k = 0; k < c.size(); ++k)
      cols[c[k]].emplace_back(i, v[k]);
  }

  os << "NAME          " << name << "\n";
  os << "ROWS\n";
  os << " N  COST\n";
  for (Index i = 0; i < lp.num_rows(); ++i)
    os << (lp.sense()[i] == Sense::Equal ? " E  " : " L  ") << rname(i) << "\n";
  os << "COLUMNS\n";
  for (Index j = 0; j < n; ++j) {
    if (lp.objective()[j] != 0.0)
      os << "    " << field(cname(j), 10) << field("COST", 10) << num(lp.objective()[j]) << "\n";
    for (const auto &[i, v] : cols[j])
      os << "    " << field(cname(j), 10) << field(rname(i), 10) << num(v) << "\n";
  }
  os << "RHS\n";
  for (Index i = 0; i < lp.num_rows(); ++i)
    if (lp.rhs()[i] != 0.0)
      os << "    " << field("RHS", 10) << field(rname(i), 10) << num(lp.rhs()[i]) << "\n";
  os << "BOUNDS\n";
  for (Index j = 0; j < n; ++j) {
    const double lo = lp.lower()[j];
    const double up = lp.upper()[j];
    const std::string c = field(cname(j), 10);
    if (!std::isfinite(lo) && !std::isfinite(up)) {
      os << " FR BND       " << c << "\n";
      continue;
    }
    if (std::isfinite(lo) && std::isfinite(up) && lo == up) {
      os << " FX BND       " << c << num(lo) << "\n";
      continue;
    }
    if (!std::isfinite(lo))
      os << " MI BND       " << c << "\n";
    else if (lo != 0.0)
      os << " LO BND       " << c << num(lo) << "\n";
    if (std::isfinite(up))
      os << " UP BND       " << c << num(up) << "\n";
  }
  os << "ENDATA\n";
}

} // namespace drlaed::lp
