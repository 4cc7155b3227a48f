// drlaed: command-line front end for the distributionally robust
// look-ahead dispatch toolkit.
//
//   drlaed solve   --network case.json --train train.csv --method drcvp --theta 0.05
//   drlaed eval    --network case.json --solution sol.json --valid valid.csv
//   drlaed sweep   --network case.json --train train.csv --valid valid.csv --thetas 0,0.01,0.1
//   drlaed bounds  --train train.csv --theta 0.05 --alpha 0.05
//   drlaed ptdf    --network case.json
//   drlaed export  --network case.json --out dir/
//   drlaed gen-data --res 4 --horizon 6 --samples 17 --capacity 50 --seed 1
//   drlaed gen-network --buses 39 --lines 46 --generators 10 --res 4 --horizon 6 --seed 1
//
// Every setting can come from --config file.json (same key names as the
// flags, without the dashes); flags win over the file, the file wins over
// built-in defaults. Exit status: 0 ok (an infeasible master is still ok),
// 1 numerical/domain failure, 2 bad input.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "drlaed/drlaed.hpp"

using json = nlohmann::json;
using namespace drlaed;

namespace {

// Flags are captured as text and only typed after merging with the config
// file, so both sources go through the same conversion.
struct FlagSet {
  std::map<std::string, std::pair<CLI::Option *, std::string>> flags;
  std::string config_path;

  void add(CLI::App *app, const std::string &key, const std::string &help) {
    auto &slot = flags[key];
    slot.first = app->add_option("--" + key, slot.second, help);
  }

  json given() const {
    json out = json::object();
    for (const auto &[key, slot] : flags)
      if (slot.first->count() > 0)
        out[key] = slot.second;
    return out;
  }
};

json read_config(const std::string &path) {
  if (path.empty())
    return json::object();
  const std::string text = io::read_file(path);
  json doc = io::detail::parse_json(text, "config " + path);
  if (!doc.is_object())
    throw InputError("config " + path + ": top level must be an object");
  return doc;
}

double as_double(const json &v, const std::string &key) {
  if (v.is_number())
    return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    try {
      std::size_t used = 0;
      const double d = std::stod(s, &used);
      if (used == s.size())
        return d;
    } catch (const std::exception &) {
    }
  }
  throw InputError("--" + key + ": expected a number, got " + v.dump());
}

long long as_integer(const json &v, const std::string &key) {
  const double d = as_double(v, key);
  if (d != std::floor(d) || d < 0)
    throw InputError("--" + key + ": expected a nonnegative integer, got " + v.dump());
  return static_cast<long long>(d);
}

std::vector<double> as_list(const json &v, const std::string &key) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto &x : v)
      out.push_back(as_double(x, key));
    return out;
  }
  if (v.is_number())
    return {v.get<double>()};
  if (!v.is_string())
    throw InputError("--" + key + ": expected a comma-separated list of numbers");
  std::string s = v.get<std::string>();
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::string item = s.substr(start, comma == std::string::npos ? std::string::npos
                                                                        : comma - start);
    out.push_back(as_double(item, key));
    if (comma == std::string::npos)
      break;
    start = comma + 1;
  }
  return out;
}

std::string as_string(const json &v, const std::string &key) {
  if (v.is_string())
    return v.get<std::string>();
  if (v.is_number())
    return v.dump();
  throw InputError("--" + key + ": expected a string");
}

// Resolved settings for one subcommand: typed, canonical, hashable.
class Settings {
public:
  Settings(const FlagSet &flags, json defaults) : doc_(std::move(defaults)) {
    const json file = read_config(flags.config_path);
    const json cli = flags.given();
    for (auto it = file.begin(); it != file.end(); ++it)
      if (flags.flags.count(it.key()))
        doc_[it.key()] = *it;
    for (auto it = cli.begin(); it != cli.end(); ++it)
      doc_[it.key()] = *it;
  }

  bool has(const std::string &key) const {
    return doc_.contains(key) && !doc_[key].is_null() &&
           !(doc_[key].is_string() && doc_[key].get<std::string>().empty());
  }
  const json &raw(const std::string &key) const {
    if (!has(key))
      throw InputError("missing required setting --" + key);
    return doc_.at(key);
  }
  double number(const std::string &key) { return canon(key, as_double(raw(key), key)); }
  long long integer(const std::string &key) { return canon(key, as_integer(raw(key), key)); }
  std::string text(const std::string &key) { return canon(key, as_string(raw(key), key)); }
  std::vector<double> list(const std::string &key) { return canon(key, as_list(raw(key), key)); }
  std::string path(const std::string &key) {
    const std::string p = as_string(raw(key), key);
    if (!std::filesystem::exists(p))
      throw InputError("--" + key + ": file '" + p + "' does not exist");
    return canon(key, p);
  }
  std::string optional_text(const std::string &key) { return has(key) ? text(key) : ""; }

  io::Provenance provenance(std::uint64_t seed) {
    return {io::hex64(io::fnv1a(canonical_.dump())), seed};
  }
  json &canonical() { return canonical_; }

private:
  template <class T> T canon(const std::string &key, T v) {
    canonical_[key] = v;
    return v;
  }
  json doc_;
  json canonical_ = json::object();
};

void emit(const std::string &out, const std::string &text) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    io::write_file(out, text);
}

std::optional<Support> read_support(Settings &s, std::size_t dim) {
  if (!s.has("support"))
    return std::nullopt;
  json spec = s.raw("support");
  if (spec.is_string())
    spec = read_config(s.path("support"));
  else
    s.canonical()["support"] = spec;
  if (!spec.is_object() || !spec.contains("G") || !spec.contains("h"))
    throw InputError("support: expected an object with 'G' and 'h'");
  const json &G = spec["G"], &h = spec["h"];
  if (!h.is_array())
    throw InputError("support.h: expected an array");
  Support sp;
  const auto r = static_cast<Eigen::Index>(h.size());
  sp.h.resize(r);
  for (Eigen::Index i = 0; i < r; ++i)
    sp.h(i) = as_double(h[i], "support.h");
  sp.G.resize(r, static_cast<Eigen::Index>(dim));
  std::vector<double> flat;
  if (G.is_array())
    for (const auto &row : G) {
      if (row.is_array())
        for (const auto &v : row)
          flat.push_back(as_double(v, "support.G"));
      else
        flat.push_back(as_double(row, "support.G"));
    }
  if (flat.size() != static_cast<std::size_t>(r) * dim)
    throw DimensionMismatch("support.G has " + std::to_string(flat.size()) + " entries, expected " +
                            std::to_string(r) + " x " + std::to_string(dim));
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(dim); ++j)
      sp.G(i, j) = flat[static_cast<std::size_t>(i) * dim + static_cast<std::size_t>(j)];
  return sp;
}

AmbiguitySpec read_ambiguity(Settings &s, std::size_t dim, bool with_theta) {
  AmbiguitySpec amb;
  if (with_theta)
    amb.theta = s.number("theta");
  amb.alpha = s.number("alpha");
  amb.ground_norm = parse_ground_norm(s.text("norm"));
  amb.support = read_support(s, dim);
  return amb;
}

lp::SolverSettings read_solver(Settings &s) {
  lp::SolverSettings st;
  st.feasibility_tol = s.number("feas-tol");
  st.optimality_tol = s.number("opt-tol");
  return st;
}

struct Loaded {
  Network net;
  CompactProblem cp;
};

Loaded load_case(Settings &s) {
  Loaded c;
  c.net = io::load_network(s.path("network"));
  c.cp = assemble(c.net);
  return c;
}

SampleSet load_checked(Settings &s, const std::string &key, const CompactProblem &cp) {
  SampleSet samples = io::load_samples(s.path(key));
  io::check_labels(samples, cp);
  return samples;
}

const json kDefaults = {{"method", "drcvp"},      {"theta", 0.0},  {"alpha", 0.05},
                        {"norm", "linf"},         {"seed", 0},     {"feas-tol", 1e-9},
                        {"opt-tol", 1e-9},        {"tol", 1e-6},   {"samples", 20},
                        {"capacity", 30.0},       {"spread", 0.25}, {"common", 0.15},
                        {"shift", 0.0},           {"buses", 10},   {"lines", 14},
                        {"generators", 4},        {"res", 2},      {"horizon", 4},
                        {"load", 20.0},           {"headroom", 1.15}};

int run_solve(const FlagSet &f) {
  Settings s(f, kDefaults);
  auto c = load_case(s);
  MethodSpec spec;
  spec.method = parse_method(s.text("method"));
  const SampleSet train = load_checked(s, "train", c.cp);
  if (spec.method == Method::DeterministicOracle) {
    // The oracle sees one realization: --realized <row of train>, or the
    // train mean when no row is given.
    if (s.has("realized")) {
      const long long row = s.integer("realized");
      if (row >= train.size())
        throw InputError("--realized: row " + std::to_string(row) + " is out of range");
      spec.realized = train.sample(static_cast<Eigen::Index>(row));
    } else {
      spec.realized = train.samples.colwise().mean().transpose();
    }
  }
  spec.ambiguity = read_ambiguity(s, static_cast<std::size_t>(c.cp.n_omega()), true);
  if (s.has("scenarios"))
    spec.scenario_count = static_cast<std::size_t>(s.integer("scenarios"));
  const lp::SimplexBackend backend(read_solver(s));
  const auto sol = solve_dispatch(spec, c.cp, train, nullptr, backend);
  auto prov = s.provenance(static_cast<std::uint64_t>(s.integer("seed")));
  json doc = io::solution_to_json(sol, prov);
  if (sol.box) {
    std::vector<double> lo(sol.box->lower.data(), sol.box->lower.data() + sol.box->size());
    std::vector<double> hi(sol.box->upper.data(), sol.box->upper.data() + sol.box->size());
    for (auto &v : lo)
      v = io::round12(v);
    for (auto &v : hi)
      v = io::round12(v);
    doc["box"] = {{"lower", lo}, {"upper", hi}};
  }
  emit(s.optional_text("out"), doc.dump(2) + "\n");
  std::cerr << "drlaed: " << to_string(sol.method) << " status " << lp::to_string(sol.status);
  if (sol.optimal())
    std::cerr << ", objective " << io::format_number(sol.objective);
  std::cerr << "\n";
  return 0;
}

int run_eval(const FlagSet &f) {
  Settings s(f, kDefaults);
  auto c = load_case(s);
  const auto stored = io::parse_solution(io::read_file(s.path("solution")));
  if (stored.x.size() == 0)
    throw InputError("solution has no schedule (status " + stored.status + ")");
  const SampleSet valid = load_checked(s, "valid", c.cp);
  const auto rep = evaluate(stored.x, c.cp, valid, s.number("tol"));
  auto prov = s.provenance(static_cast<std::uint64_t>(s.integer("seed")));
  emit(s.optional_text("out"), io::report_csv(stored, rep, prov));
  if (s.has("histogram"))
    io::write_file(s.text("histogram"), io::histogram_csv(rep, build_ptdf(c.net), prov));
  return 0;
}

int run_sweep(const FlagSet &f) {
  Settings s(f, kDefaults);
  auto c = load_case(s);
  const SampleSet train = load_checked(s, "train", c.cp);
  const SampleSet valid = load_checked(s, "valid", c.cp);
  const Method method = parse_method(s.text("method"));
  SweepOptions opt;
  const auto amb = read_ambiguity(s, static_cast<std::size_t>(c.cp.n_omega()), false);
  opt.alpha = amb.alpha;
  opt.ground_norm = amb.ground_norm;
  opt.support = amb.support;
  opt.solver = read_solver(s);
  const auto rows = sweep(s.list("thetas"), method, c.cp, train, valid, opt);
  emit(s.optional_text("out"),
       io::sweep_csv(rows, s.provenance(static_cast<std::uint64_t>(s.integer("seed")))));
  return 0;
}

int run_bounds(const FlagSet &f) {
  Settings s(f, kDefaults);
  SampleSet train = io::load_samples(s.path("train"));
  if (s.has("network")) {
    auto c = load_case(s);
    io::check_labels(train, c.cp);
  }
  const auto amb = read_ambiguity(s, static_cast<std::size_t>(train.dim()), true);
  const auto box = build_box(train, amb);
  emit(s.optional_text("out"),
       io::bounds_csv(box, train.labels, s.provenance(static_cast<std::uint64_t>(s.integer("seed")))));
  return 0;
}

int run_ptdf(const FlagSet &f) {
  Settings s(f, kDefaults);
  const Network net = io::load_network(s.path("network"));
  const auto ptdf = s.has("slack") ? build_ptdf(net, s.text("slack")) : build_ptdf(net);
  emit(s.optional_text("out"),
       io::ptdf_csv(ptdf, s.provenance(static_cast<std::uint64_t>(s.integer("seed")))));
  return 0;
}

int run_export(const FlagSet &f) {
  Settings s(f, kDefaults);
  auto c = load_case(s);
  const std::string dir = s.text("out");
  std::filesystem::create_directories(dir);
  auto prov = s.provenance(static_cast<std::uint64_t>(s.integer("seed")));
  const auto &cp = c.cp;
  std::vector<std::string> xnames, unames;
  for (std::size_t t = 0; t < cp.horizon; ++t)
    for (std::size_t i = 0; i < cp.num_generators; ++i)
      xnames.push_back("p_g" + std::to_string(i) + "_t" + std::to_string(t));
  for (const auto &r : cp.rows)
    unames.push_back(
        (r.kind == RowKind::Balance ? std::string("balance")
                                    : std::string(r.kind == RowKind::LineUpper ? "line_up_"
                                                                               : "line_dn_") +
                                          std::to_string(r.line)) +
        "_t" + std::to_string(r.period));
  const std::filesystem::path d(dir);
  io::write_file((d / "c.csv").string(), io::vector_csv(cp.c, xnames, prov));
  io::write_file((d / "A.csv").string(), io::triplets_csv(cp.A, prov));
  io::write_file((d / "b.csv").string(), io::vector_csv(cp.b, cp.det_row_names, prov));
  io::write_file((d / "D.csv").string(), io::triplets_csv(cp.D, prov));
  io::write_file((d / "E.csv").string(), io::triplets_csv(cp.E, prov));
  io::write_file((d / "f.csv").string(), io::vector_csv(cp.f, unames, prov));
  if (s.has("train")) {
    // Also dump the master LP of the chosen method for external cross-checks.
    const SampleSet train = load_checked(s, "train", cp);
    MethodSpec spec;
    spec.method = parse_method(s.text("method"));
    spec.ambiguity = read_ambiguity(s, static_cast<std::size_t>(cp.n_omega()), true);
    FormulatedProgram prog;
    switch (spec.method) {
    case Method::Drcvp:
      prog = build_drcvp(cp, train, spec.ambiguity);
      break;
    case Method::DrccpRobust:
      prog = build_robust_master(cp, build_box(train, spec.ambiguity));
      break;
    case Method::DeterministicOracle:
      prog = build_deterministic(cp, train.samples.colwise().mean().transpose());
      break;
    default:
      prog = build_scenario(cp, train);
    }
    std::ostringstream mps;
    lp::write_mps(mps, prog.lp);
    io::write_file((d / "master.mps").string(), mps.str());
  }
  std::cerr << "drlaed: wrote compact matrices to " << dir << "\n";
  return 0;
}

int run_gen_data(const FlagSet &f) {
  Settings s(f, kDefaults);
  std::size_t res, horizon;
  if (s.has("network")) {
    const Network net = io::load_network(s.path("network"));
    res = net.num_res();
    horizon = net.horizon;
  } else {
    res = static_cast<std::size_t>(s.integer("res"));
    horizon = static_cast<std::size_t>(s.integer("horizon"));
  }
  synthetic::SampleSpec spec;
  spec.samples = static_cast<std::size_t>(s.integer("samples"));
  spec.capacity = s.number("capacity");
  spec.spread = s.number("spread");
  spec.common = s.number("common");
  spec.shift = s.number("shift");
  if (spec.samples == 0)
    throw InputError("--samples must be positive");
  const auto seed = static_cast<std::uint64_t>(s.integer("seed"));
  std::mt19937_64 rng(seed);
  const SampleSet out = synthetic::scenarios(rng, res, horizon, spec);
  emit(s.optional_text("out"), io::samples_csv(out, s.provenance(seed)));
  return 0;
}

int run_gen_network(const FlagSet &f) {
  Settings s(f, kDefaults);
  synthetic::GridSpec spec;
  spec.buses = static_cast<std::size_t>(s.integer("buses"));
  spec.lines = static_cast<std::size_t>(s.integer("lines"));
  spec.generators = static_cast<std::size_t>(s.integer("generators"));
  spec.res = static_cast<std::size_t>(s.integer("res"));
  spec.horizon = static_cast<std::size_t>(s.integer("horizon"));
  spec.load_per_bus = s.number("load");
  spec.res_capacity = s.number("capacity");
  spec.flow_headroom = s.number("headroom");
  if (spec.horizon == 0)
    throw InputError("--horizon must be positive");
  const auto seed = static_cast<std::uint64_t>(s.integer("seed"));
  std::mt19937_64 rng(seed);
  const Network net = synthetic::random_network(rng, spec);
  json doc = io::network_to_json(net);
  doc["meta"] = s.provenance(seed).meta();
  emit(s.optional_text("out"), doc.dump(1) + "\n");
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Distributionally robust look-ahead economic dispatch"};
  app.set_version_flag("--version", std::string("drlaed ") + DRLAED_VERSION);
  app.require_subcommand(1);

  struct Command {
    const char *name;
    const char *help;
    std::vector<std::pair<const char *, const char *>> flags;
    int (*run)(const FlagSet &);
  };
  const std::pair<const char *, const char *> amb_flags[] = {
      {"alpha", "violation level in (0,1)"},
      {"norm", "Wasserstein ground metric: linf or l1"},
      {"support", "support polytope {G, h} as JSON file"}};
  std::vector<Command> commands = {
      {"solve", "solve one dispatch problem and write a solution JSON",
       {{"network", "network JSON"},
        {"train", "training samples CSV"},
        {"method", "deterministic-oracle, scenario, worst-case, drcvp or drccp-robust"},
        {"theta", "Wasserstein radius"},
        {"scenarios", "scenario method: use the first n samples"},
        {"realized", "deterministic-oracle: sample index to dispatch against"},
        {"feas-tol", "simplex feasibility tolerance"},
        {"opt-tol", "simplex optimality tolerance"},
        {"out", "output file (default stdout)"}},
       run_solve},
      {"eval", "evaluate a solution on validation samples",
       {{"network", "network JSON"},
        {"solution", "solution JSON from solve"},
        {"valid", "validation samples CSV"},
        {"tol", "violation tolerance"},
        {"histogram", "write per-line flow histograms here"},
        {"out", "report CSV (default stdout)"}},
       run_eval},
      {"sweep", "solve and evaluate over a list of radii",
       {{"network", "network JSON"},
        {"train", "training samples CSV"},
        {"valid", "validation samples CSV"},
        {"method", "drcvp or drccp-robust (any method is accepted)"},
        {"thetas", "comma-separated radii, ascending"},
        {"feas-tol", "simplex feasibility tolerance"},
        {"opt-tol", "simplex optimality tolerance"},
        {"out", "tradeoff CSV (default stdout)"}},
       run_sweep},
      {"bounds", "per-component distributionally robust bounds",
       {{"train", "training samples CSV"},
        {"network", "optional network JSON to check column labels"},
        {"theta", "Wasserstein radius"},
        {"out", "bounds CSV (default stdout)"}},
       run_bounds},
      {"ptdf", "write the PTDF matrix",
       {{"network", "network JSON"}, {"slack", "slack bus id"}, {"out", "CSV (default stdout)"}},
       run_ptdf},
      {"export", "write the compact matrices (and optionally the master LP as MPS)",
       {{"network", "network JSON"},
        {"train", "training samples CSV (enables master.mps)"},
        {"method", "method for master.mps"},
        {"theta", "Wasserstein radius for master.mps"},
        {"out", "output directory"}},
       run_export},
      {"gen-data", "synthetic renewable scenarios",
       {{"network", "take site count and horizon from this network"},
        {"res", "number of RES sites"},
        {"horizon", "number of periods"},
        {"samples", "number of scenarios"},
        {"capacity", "nameplate per site (MW)"},
        {"spread", "idiosyncratic noise half-width (fraction of capacity)"},
        {"common", "common factor half-width (fraction of capacity)"},
        {"shift", "distribution shift knob (0 = none)"},
        {"out", "samples CSV (default stdout)"}},
       run_gen_data},
      {"gen-network", "synthetic connected network",
       {{"buses", "bus count"},
        {"lines", "line count"},
        {"generators", "generator count"},
        {"res", "RES site count"},
        {"horizon", "number of periods"},
        {"load", "mean load per bus (MW)"},
        {"capacity", "RES nameplate used to size line limits (MW)"},
        {"headroom", "line limit over reference flow"},
        {"out", "network JSON (default stdout)"}},
       run_gen_network},
  };

  std::vector<FlagSet> flagsets(commands.size());
  std::vector<CLI::App *> subs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    auto *sub = app.add_subcommand(commands[i].name, commands[i].help);
    auto &fs = flagsets[i];
    sub->add_option("--config", fs.config_path, "JSON config; flags override its keys");
    for (auto [key, help] : commands[i].flags)
      fs.add(sub, key, help);
    const std::string name = commands[i].name;
    if (name == "solve" || name == "sweep" || name == "bounds" || name == "export")
      for (auto [key, help] : amb_flags)
        fs.add(sub, key, help);
    fs.add(sub, "seed", "seed recorded in output headers (and used by generators)");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  try {
    for (std::size_t i = 0; i < commands.size(); ++i)
      if (subs[i]->parsed())
        return commands[i].run(flagsets[i]);
  } catch (const InputError &e) {
    std::cerr << "drlaed: input error: " << e.what() << "\n";
    return 2;
  } catch (const Error &e) {
    std::cerr << "drlaed: error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error &e) {
    std::cerr << "drlaed: input error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
