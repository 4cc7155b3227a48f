#pragma once

// File formats: network JSON, samples CSV, solution JSON and the CSV reports.
// Numbers are written as decimal text with 12 significant digits.

#include <Eigen/Dense>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "drlaed/bounds.hpp"
#include "drlaed/error.hpp"
#include "drlaed/eval.hpp"
#include "drlaed/formulations.hpp"
#include "drlaed/grid.hpp"
#include "drlaed/problem.hpp"
#include "drlaed/risk.hpp"

#ifndef DRLAED_VERSION
#define DRLAED_VERSION "0.0.0"
#endif

namespace drlaed::io {

using json = nlohmann::json;

inline std::string format_number(double v) {
  if (std::isnan(v))
    return "null";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  if (v == 0.0)
    v = 0.0; // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// The value that format_number would print, as a double (for JSON output).
inline double round12(double v) {
  if (!std::isfinite(v))
    return v;
  return std::strtod(format_number(v).c_str(), nullptr);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Provenance stamped on every output file.
struct Provenance {
  std::string config_hash = hex64(0);
  std::uint64_t seed = 0;

  std::string header() const {
    return std::string("# drlaed ") + DRLAED_VERSION + " config=" + config_hash +
           " seed=" + std::to_string(seed) + "\n";
  }
  json meta() const {
    return {{"tool", "drlaed"}, {"version", DRLAED_VERSION}, {"config", config_hash},
            {"seed", seed}};
  }
};

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw InputError("cannot write '" + path + "'");
  out << text;
}

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline json parse_json(const std::string &text, const std::string &what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    // e.byte points one past the offending character.
    auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    if (auto p = msg.find("syntax error"); p != std::string::npos)
      msg = msg.substr(p);
    throw ParseError(what + ": " + msg, line, col);
  }
}

inline std::string bus_id(const json &v, const std::string &where) {
  if (v.is_string())
    return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned())
    return std::to_string(v.get<long long>());
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == std::floor(d) && std::abs(d) < 1e15)
      return std::to_string(static_cast<long long>(d));
    return format_number(d);
  }
  throw InputError(where + ": bus id must be a number or a string");
}

inline double number(const json &v, const std::string &where) {
  if (!v.is_number())
    throw InputError(where + ": expected a number");
  return v.get<double>();
}

inline const json &require(const json &obj, const char *key, const std::string &where) {
  if (!obj.is_object())
    throw InputError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end())
    throw InputError(where + ": missing key '" + key + "'");
  return *it;
}

inline std::vector<double> series(const json &v, std::size_t horizon, const std::string &where) {
  if (v.is_number())
    return std::vector<double>(horizon, v.get<double>());
  if (!v.is_array())
    throw InputError(where + ": expected a number or an array of " + std::to_string(horizon) +
                     " numbers");
  if (v.size() != horizon)
    throw DimensionMismatch(where + ": has " + std::to_string(v.size()) + " entries, horizon is " +
                            std::to_string(horizon));
  std::vector<double> out;
  for (std::size_t t = 0; t < v.size(); ++t)
    out.push_back(number(v[t], where + "[" + std::to_string(t) + "]"));
  return out;
}

inline const json &array_at(const json &obj, const char *key, bool required) {
  static const json empty = json::array();
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required)
      throw InputError(std::string("network: missing key '") + key + "'");
    return empty;
  }
  if (!it->is_array())
    throw InputError(std::string("network.") + key + ": expected an array");
  return *it;
}

} // namespace detail

/// Parses the network JSON schema. Per-period fields accept a scalar.
inline Network parse_network(const std::string &text) {
  const json doc = detail::parse_json(text, "network JSON");
  if (!doc.is_object())
    throw InputError("network: top level must be an object");
  Network net;
  const json &h = detail::require(doc, "horizon", "network");
  if (!h.is_number_integer() || h.get<long long>() < 1)
    throw InputError("network.horizon: expected a positive integer");
  net.horizon = h.get<std::size_t>();
  const std::size_t T = net.horizon;

  for (const auto &b : detail::array_at(doc, "buses", true))
    net.buses.push_back(detail::bus_id(b, "network.buses"));
  if (auto it = doc.find("slack"); it != doc.end() && !it->is_null())
    net.slack = detail::bus_id(*it, "network.slack");

  const auto &lines = detail::array_at(doc, "lines", false);
  for (std::size_t e = 0; e < lines.size(); ++e) {
    const std::string w = "network.lines[" + std::to_string(e) + "]";
    const auto &l = lines[e];
    net.lines.push_back({detail::bus_id(detail::require(l, "from", w), w + ".from"),
                         detail::bus_id(detail::require(l, "to", w), w + ".to"),
                         detail::number(detail::require(l, "b", w), w + ".b"),
                         detail::number(detail::require(l, "fmax", w), w + ".fmax")});
  }
  const auto &gens = detail::array_at(doc, "generators", true);
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const std::string w = "network.generators[" + std::to_string(i) + "]";
    const auto &g = gens[i];
    Generator gen;
    gen.bus = detail::bus_id(detail::require(g, "bus", w), w + ".bus");
    gen.cost = detail::series(detail::require(g, "cost", w), T, w + ".cost");
    gen.pmin = detail::series(detail::require(g, "pmin", w), T, w + ".pmin");
    gen.pmax = detail::series(detail::require(g, "pmax", w), T, w + ".pmax");
    gen.ramp_down = detail::series(detail::require(g, "rd", w), T, w + ".rd");
    gen.ramp_up = detail::series(detail::require(g, "ru", w), T, w + ".ru");
    if (auto it = g.find("p0"); it != g.end() && !it->is_null())
      gen.p0 = detail::number(*it, w + ".p0");
    net.generators.push_back(std::move(gen));
  }
  const auto &res = detail::array_at(doc, "res", false);
  for (std::size_t j = 0; j < res.size(); ++j) {
    const std::string w = "network.res[" + std::to_string(j) + "]";
    net.res_sites.push_back({detail::bus_id(detail::require(res[j], "bus", w), w + ".bus")});
  }
  const auto &loads = detail::array_at(doc, "loads", false);
  for (std::size_t k = 0; k < loads.size(); ++k) {
    const std::string w = "network.loads[" + std::to_string(k) + "]";
    net.loads.push_back({detail::bus_id(detail::require(loads[k], "bus", w), w + ".bus"),
                         detail::series(detail::require(loads[k], "demand", w), T, w + ".demand")});
  }
  validate(net);
  return net;
}

inline Network load_network(const std::string &path) { return parse_network(read_file(path)); }

inline json network_to_json(const Network &net) {
  auto arr = [](const std::vector<double> &v) {
    json a = json::array();
    for (double x : v)
      a.push_back(round12(x));
    return a;
  };
  json doc;
  doc["buses"] = net.buses;
  if (net.slack)
    doc["slack"] = *net.slack;
  doc["lines"] = json::array();
  for (const auto &l : net.lines)
    doc["lines"].push_back(
        {{"from", l.from}, {"to", l.to}, {"b", round12(l.susceptance)}, {"fmax", round12(l.flow_limit)}});
  doc["generators"] = json::array();
  for (const auto &g : net.generators) {
    json j = {{"bus", g.bus},          {"cost", arr(g.cost)}, {"pmin", arr(g.pmin)},
              {"pmax", arr(g.pmax)},   {"rd", arr(g.ramp_down)}, {"ru", arr(g.ramp_up)}};
    if (g.p0)
      j["p0"] = round12(*g.p0);
    doc["generators"].push_back(j);
  }
  doc["res"] = json::array();
  for (const auto &r : net.res_sites)
    doc["res"].push_back({{"bus", r.bus}});
  doc["loads"] = json::array();
  for (const auto &l : net.loads)
    doc["loads"].push_back({{"bus", l.bus}, {"demand", arr(l.demand)}});
  doc["horizon"] = net.horizon;
  return doc;
}

/**
 * Samples CSV: a header of component labels, then one scenario per row.
 * Blank lines and lines starting with '#' are skipped anywhere.
 */
inline SampleSet parse_samples(const std::string &text) {
  SampleSet out;
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
      s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
      s.remove_suffix(1);
    return s;
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#')
      continue;
    std::vector<std::pair<std::string_view, std::size_t>> fields; // text, 1-based column
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      const std::size_t end = comma == std::string::npos ? line.size() : comma;
      fields.emplace_back(trim(std::string_view(line).substr(start, end - start)), start + 1);
      if (comma == std::string::npos)
        break;
      start = comma + 1;
    }
    if (!have_header) {
      for (auto &[f, col] : fields) {
        if (f.empty())
          throw ParseError("samples CSV: empty column label", lineno, col);
        out.labels.emplace_back(f);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != out.labels.size())
      throw ParseError("samples CSV: expected " + std::to_string(out.labels.size()) +
                           " fields, found " + std::to_string(fields.size()),
                       lineno, 1);
    std::vector<double> row;
    for (auto &[f, col] : fields) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || f.empty())
        throw ParseError("samples CSV: '" + std::string(f) + "' is not a number", lineno, col);
      if (!std::isfinite(v) || v < 0.0)
        throw ParseError("samples CSV: value must be finite and nonnegative", lineno, col);
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (!have_header)
    throw EmptyInput("samples CSV has no header");
  if (rows.empty())
    throw EmptyInput("samples CSV has no data rows");
  out.samples.resize(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(out.labels.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      out.samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return out;
}

inline SampleSet load_samples(const std::string &path) { return parse_samples(read_file(path)); }

/// Checks that the sample columns are the problem's omega components in order.
inline void check_labels(const SampleSet &s, const CompactProblem &cp) {
  if (s.dim() != cp.n_omega())
    throw DimensionMismatch("samples have " + std::to_string(s.dim()) +
                            " columns, the network needs " + std::to_string(cp.n_omega()));
  for (Eigen::Index j = 0; j < s.dim(); ++j)
    if (static_cast<std::size_t>(j) < s.labels.size() && s.labels[j] != omega_label(cp, j))
      throw InputError("samples column " + std::to_string(j + 1) + " is '" + s.labels[j] +
                       "', expected '" + omega_label(cp, j) + "'");
}

inline std::string samples_csv(const SampleSet &s, const Provenance &p) {
  std::string out = p.header();
  for (Eigen::Index j = 0; j < s.dim(); ++j) {
    if (j)
      out += ',';
    out += static_cast<std::size_t>(j) < s.labels.size() ? s.labels[j]
                                                         : "w" + std::to_string(j);
  }
  out += '\n';
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    for (Eigen::Index j = 0; j < s.dim(); ++j) {
      if (j)
        out += ',';
      out += format_number(s.samples(i, j));
    }
    out += '\n';
  }
  return out;
}

inline json solution_to_json(const DispatchSolution &sol, const Provenance &p) {
  json x = json::array();
  for (Eigen::Index j = 0; j < sol.x.size(); ++j)
    x.push_back(round12(sol.x(j)));
  json doc;
  doc["meta"] = p.meta();
  doc["method"] = to_string(sol.method);
  doc["theta"] = round12(sol.theta);
  doc["alpha"] = round12(sol.alpha);
  doc["objective"] = sol.optimal() ? json(round12(sol.objective)) : json(nullptr);
  doc["x"] = x;
  doc["status"] = lp::to_string(sol.status);
  doc["timings"] = {{"bounds_s", sol.timings.bounds},
                    {"build_s", sol.timings.build},
                    {"solve_s", sol.timings.solve}};
  doc["size"] = {{"variables", sol.num_variables},
                 {"rows", sol.num_rows},
                 {"uncertain_rows", sol.uncertain_rows},
                 {"iterations", sol.iterations}};
  return doc;
}

/// Schedule and metadata read back from a solution JSON.
struct StoredSolution {
  std::string method;
  std::string status;
  double theta = 0.0;
  double alpha = 0.0;
  Eigen::VectorXd x;
};

inline StoredSolution parse_solution(const std::string &text) {
  const json doc = detail::parse_json(text, "solution JSON");
  StoredSolution s;
  const auto &x = detail::require(doc, "x", "solution");
  if (!x.is_array())
    throw InputError("solution.x: expected an array");
  s.x.resize(static_cast<Eigen::Index>(x.size()));
  for (std::size_t j = 0; j < x.size(); ++j)
    s.x(static_cast<Eigen::Index>(j)) = detail::number(x[j], "solution.x");
  if (auto it = doc.find("method"); it != doc.end() && it->is_string())
    s.method = it->get<std::string>();
  if (auto it = doc.find("status"); it != doc.end() && it->is_string())
    s.status = it->get<std::string>();
  if (auto it = doc.find("theta"); it != doc.end() && it->is_number())
    s.theta = it->get<double>();
  if (auto it = doc.find("alpha"); it != doc.end() && it->is_number())
    s.alpha = it->get<double>();
  return s;
}

inline std::string sweep_csv(const std::vector<SweepRow> &rows, const Provenance &p) {
  std::string out = p.header() + "theta,method,status,cost,violation_freq,n_valid\n";
  for (const auto &r : rows)
    out += format_number(r.theta) + "," + to_string(r.method) + "," + lp::to_string(r.status) +
           "," + format_number(r.cost) + "," + format_number(r.violation_freq) + "," +
           std::to_string(r.n_valid) + "\n";
  return out;
}

inline std::string bounds_csv(const ComponentBounds &box, const std::vector<std::string> &labels,
                              const Provenance &p) {
  std::string out = p.header() + "component,lo,hi,achieved_wc_prob,budget\n";
  for (Eigen::Index j = 0; j < box.size(); ++j)
    out += (static_cast<std::size_t>(j) < labels.size() ? labels[j] : std::to_string(j)) + "," +
           format_number(box.lower(j)) + "," + format_number(box.upper(j)) + "," +
           format_number(box.achieved(j)) + "," + format_number(box.budget) + "\n";
  return out;
}

inline std::string histogram_csv(const EvaluationReport &rep, const PtdfMatrix &ptdf,
                                 const Provenance &p) {
  std::string out = p.header() + "line,bin_lo,bin_hi,count\n";
  for (const auto &h : rep.lines) {
    const std::string name = h.line < ptdf.line_order.size() ? ptdf.line_order[h.line]
                                                             : std::to_string(h.line);
    for (int b = 0; b < kHistogramBins + 2; ++b)
      out += name + "," + format_number(h.bin_lo(b)) + "," + format_number(h.bin_hi(b)) + "," +
             std::to_string(h.counts[b]) + "\n";
  }
  return out;
}

/// Report rows for `eval`: one line per solution with the sweep columns.
inline std::string report_csv(const StoredSolution &sol, const EvaluationReport &rep,
                              const Provenance &p) {
  return p.header() + "theta,method,status,cost,violation_freq,n_valid\n" +
         format_number(sol.theta) + "," + sol.method + "," + sol.status + "," +
         format_number(rep.cost) + "," + format_number(rep.violation_frequency) + "," +
         std::to_string(rep.n_valid) + "\n";
}

inline std::string ptdf_csv(const PtdfMatrix &ptdf, const Provenance &p) {
  std::string out = p.header() + "line";
  for (const auto &b : ptdf.bus_order)
    out += "," + b;
  out += '\n';
  for (Eigen::Index e = 0; e < ptdf.num_lines(); ++e) {
    out += ptdf.line_order[e];
    for (Eigen::Index b = 0; b < ptdf.num_buses(); ++b)
      out += "," + format_number(ptdf.entries(e, b));
    out += '\n';
  }
  return out;
}

/// Sparse matrix as (row,col,value) triplets; vectors use col = 0.
inline std::string triplets_csv(const SparseRowMatrix &m, const Provenance &p) {
  std::string out = p.header() + "row,col,value\n";
  for (Eigen::Index i = 0; i < m.outerSize(); ++i)
    for (SparseRowMatrix::InnerIterator it(m, i); it; ++it)
      out += std::to_string(it.row()) + "," + std::to_string(it.col()) + "," +
             format_number(it.value()) + "\n";
  return out;
}

inline std::string vector_csv(const Eigen::VectorXd &v, const std::vector<std::string> &names,
                              const Provenance &p) {
  std::string out = p.header() + "index,name,value\n";
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out += std::to_string(i) + "," +
           (static_cast<std::size_t>(i) < names.size() ? names[i] : std::string{}) + "," +
           format_number(v(i)) + "\n";
  return out;
}

} // namespace drlaed::io
