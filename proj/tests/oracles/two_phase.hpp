#pragma once

// Textbook two-phase tableau simplex with Bland's rule, used only as an
// independent reference for the bounded revised simplex in drlaed/lp.hpp.
// It works on a standard-form copy of the LP (x >= 0, slacks, one
// artificial per row) and shares no code with the production solver.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "drlaed/lp.hpp"

namespace oracle {

struct TwoPhaseResult {
  drlaed::lp::Status status = drlaed::lp::Status::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

inline TwoPhaseResult two_phase(const drlaed::lp::LinearProgram &lp) {
  using drlaed::lp::Status;
  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t n = static_cast<std::size_t>(lp.num_variables());

  // x_j = offset_j + sum_k sign_k * y_k over the standard variables of j.
  struct Map {
    double offset = 0.0;
    std::vector<std::pair<std::size_t, double>> parts;
  };
  std::vector<Map> map(n);
  std::size_t ny = 0;
  std::vector<std::vector<double>> rows; // dense over y, filled later
  std::vector<double> rhs;
  std::vector<bool> is_eq;
  std::vector<std::pair<std::size_t, double>> bound_rows; // y_k <= ub

  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lp.lower()[j], up = lp.upper()[j];
    if (lo > up) {
      return {Status::Infeasible, 0.0, {}};
    }
    if (std::isfinite(lo)) {
      map[j].offset = lo;
      map[j].parts.push_back({ny, 1.0});
      if (std::isfinite(up))
        bound_rows.push_back({ny, up - lo});
      ++ny;
    } else if (std::isfinite(up)) {
      map[j].offset = up;
      map[j].parts.push_back({ny++, -1.0});
    } else {
      map[j].parts.push_back({ny++, 1.0});
      map[j].parts.push_back({ny++, -1.0});
    }
  }

  double obj_const = 0.0;
  std::vector<double> cost(ny, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    obj_const += lp.objective()[j] * map[j].offset;
    for (auto [k, s] : map[j].parts)
      cost[k] += lp.objective()[j] * s;
  }

  for (drlaed::lp::Index i = 0; i < lp.num_rows(); ++i) {
    std::vector<double> r(ny, 0.0);
    double b = lp.rhs()[i];
    auto cols = lp.row_cols(i);
    auto vals = lp.row_vals(i);
    for (std::size_t t = 0; t < cols.size(); ++t) {
      const auto &m = map[cols[t]];
      b -= vals[t] * m.offset;
      for (auto [k, s] : m.parts)
        r[k] += vals[t] * s;
    }
    rows.push_back(std::move(r));
    rhs.push_back(b);
    is_eq.push_back(lp.sense()[i] == drlaed::lp::Sense::Equal);
  }
  for (auto [k, ub] : bound_rows) {
    std::vector<double> r(ny, 0.0);
    r[k] = 1.0;
    rows.push_back(std::move(r));
    rhs.push_back(ub);
    is_eq.push_back(false);
  }

  const std::size_t m = rows.size();
  // Columns: y (ny) | slacks (m, zero column for equalities) | artificials (m)
  const std::size_t ncol = ny + 2 * m;
  std::vector<std::vector<long double>> T(m, std::vector<long double>(ncol + 1, 0.0L));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < ny; ++k)
      T[i][k] = rows[i][k];
    if (!is_eq[i])
      T[i][ny + i] = 1.0;
    T[i][ncol] = rhs[i];
    if (rhs[i] < 0)
      for (auto &v : T[i])
        v = -v;
    T[i][ny + m + i] = 1.0;
    basis[i] = ny + m + i;
  }

  const long double eps = 1e-9L;
  auto pivot = [&](std::size_t r, std::size_t c) {
    const long double p = T[r][c];
    for (auto &v : T[r])
      v /= p;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || T[i][c] == 0.0)
        continue;
      const long double f = T[i][c];
      for (std::size_t k = 0; k <= ncol; ++k)
        T[i][k] -= f * T[r][k];
    }
    basis[r] = c;
  };

  // Returns false if unbounded.
  auto run = [&](const std::vector<double> &c, const std::vector<bool> &allowed) {
    for (std::size_t guard = 0; guard < 1000000; ++guard) {
      // reduced costs
      std::size_t enter = ncol;
      for (std::size_t k = 0; k < ncol && enter == ncol; ++k) {
        if (!allowed[k])
          continue;
        long double d = c[k];
        for (std::size_t i = 0; i < m; ++i)
          d -= c[basis[i]] * T[i][k];
        if (d < -1e-10)
          enter = k;
      }
      if (enter == ncol)
        return true;
      std::size_t leave = m;
      long double best = inf;
      for (std::size_t i = 0; i < m; ++i) {
        if (T[i][enter] > eps) {
          const long double ratio = T[i][ncol] / T[i][enter];
          if (ratio < best - 1e-13 ||
              (ratio <= best + 1e-13 && leave < m && basis[i] < basis[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave == m)
        return false;
      pivot(leave, enter);
    }
    return true;
  };

  std::vector<double> c1(ncol, 0.0);
  std::vector<bool> allowed(ncol, true);
  for (std::size_t i = 0; i < m; ++i) {
    c1[ny + m + i] = 1.0;
    if (is_eq[i])
      allowed[ny + i] = false;
  }
  run(c1, allowed);
  long double infeas = 0.0L;
  double scale = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    scale = std::max(scale, std::abs(rhs[i]));
    if (basis[i] >= ny + m)
      infeas += T[i][ncol];
  }
  if (infeas > 1e-8 * scale)
    return {Status::Infeasible, 0.0, {}};

  // Drive artificials out where possible.
  std::vector<bool> dead(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < ny + m)
      continue;
    std::size_t col = ncol;
    for (std::size_t k = 0; k < ny + m && col == ncol; ++k)
      if (allowed[k] && std::abs(T[i][k]) > 1e-7L)
        col = k;
    if (col == ncol)
      dead[i] = true;
    else
      pivot(i, col);
  }
  for (std::size_t i = 0; i < m; ++i)
    allowed[ny + m + i] = false;
  // Rows that are redundant keep their artificial at zero; zero them out.
  for (std::size_t i = 0; i < m; ++i)
    if (dead[i])
      for (std::size_t k = 0; k <= ncol; ++k)
        if (k != basis[i])
          T[i][k] = 0.0;

  std::vector<double> c2(ncol, 0.0);
  for (std::size_t k = 0; k < ny; ++k)
    c2[k] = cost[k];
  if (!run(c2, allowed))
    return {Status::Unbounded, 0.0, {}};

  std::vector<double> y(ncol, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    y[basis[i]] = static_cast<double>(T[i][ncol]);
  TwoPhaseResult res;
  res.status = Status::Optimal;
  res.x.assign(n, 0.0);
  double obj = obj_const;
  for (std::size_t j = 0; j < n; ++j) {
    double v = map[j].offset;
    for (auto [k, s] : map[j].parts)
      v += s * y[k];
    res.x[j] = v;
  }
  for (std::size_t k = 0; k < ny; ++k)
    obj += cost[k] * y[k];
  res.objective = obj;
  return res;
}

} // namespace oracle
