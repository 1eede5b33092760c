#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "../cavspin.hpp"
#include "config.hpp"

namespace cavspin::cli {

enum ExitCode : int { kOk = 0, kValidationFailure = 1, kNonConvergence = 2, kConfigError = 3 };

using Cell = std::variant<double, long long, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct CommandResult {
  json report = json::object();
  Table table;
  /// Scalar outcome used as one row of a sweep.
  std::vector<std::pair<std::string, Cell>> summary;
  int exit_code = kOk;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"validate", "map_params", "ground_state", "evolve", "compare", "adiabatic", "sweep"};
  return names;
}

// ---------------------------------------------------------------------------
// Formatting

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return format_double(v);
        else if constexpr (std::is_same_v<T, long long>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else return v;
      },
      c);
}

inline json cell_json(const Cell& c) {
  return std::visit([](const auto& v) { return json(v); }, c);
}

/// RFC-4180 field quoting.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

inline std::string to_csv(const Table& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& f) {
    for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + csv_field(f[i]);
    out += "\r\n";
  };
  line(t.columns);
  for (const auto& r : t.rows) {
    std::vector<std::string> f;
    for (const auto& c : r) f.push_back(cell_text(c));
    line(f);
  }
  return out;
}

inline json table_json(const Table& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row = json::array();
    for (const auto& c : r) row.push_back(cell_json(c));
    rows.push_back(std::move(row));
  }
  return json{{"columns", t.columns}, {"rows", rows}};
}

// ---------------------------------------------------------------------------
// Shared resolution

inline const std::vector<const char*>& top_level_keys() {
  static const std::vector<const char*> k{"command", "physical", "graph",    "model",    "spin_model",   "thresholds", "solver",
                                          "seed",    "output",   "units",    "validate", "map_params",   "ground_state",
                                          "evolve",  "compare",  "adiabatic", "sweep"};
  return k;
}

inline std::uint64_t config_seed(const json& cfg) {
  const json* s = find(cfg, "seed");
  if (!s) return 0;
  if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0))
    throw ConfigError("seed", "expected a non-negative integer");
  return s->get<std::uint64_t>();
}

/// Checks the top level and returns the task block for `command` (null when
/// the command needs none and none is given).
inline const json* task_block(const json& cfg, const std::string& command) {
  if (!cfg.is_object()) throw ConfigError("<root>", "expected an object");
  for (const auto& [k, v] : cfg.items())
    if (std::none_of(top_level_keys().begin(), top_level_keys().end(), [&](const char* a) { return k == a; }))
      throw ConfigError(k, "unknown key");
  if (const json* c = find(cfg, "command"); c && as_string(*c, "command") != command)
    throw ConfigError("command", "config is for \"" + c->get<std::string>() + "\", not \"" + command + "\"");
  const json* block = nullptr;
  for (const auto& name : command_names()) {
    if (const json* b = find(cfg, name.c_str())) {
      if (name != command) throw ConfigError(name, "task block does not match command \"" + command + "\"");
      block = b;
    }
  }
  if (block && !block->is_object()) throw ConfigError(command, "expected an object");
  if (!block && command != "validate" && command != "map_params")
    throw ConfigError(command, "task block required for command \"" + command + "\"");
  return block;
}

inline std::string model_kind(const json& cfg) {
  const std::string m = string_or(cfg, "model", "", "effective");
  if (m != "full" && m != "intermediate" && m != "effective")
    throw ConfigError("model", "expected full, intermediate or effective");
  return m;
}

/// Spin model from "spin_model" if present, otherwise mapped from "physical".
inline SpinModelParams resolve_spin_model(const json& cfg, const CavityGraph& graph) {
  if (const json* s = find(cfg, "spin_model")) return parse_spin_model(*s, "spin_model", graph);
  const PhysicalParams p = parse_physical(cfg);
  return at_path("physical", [&] { return map_to_spin_params(derive_couplings(p), p.M, graph); });
}

inline json regime_json(const RegimeReport& r) {
  json ratios = json::array();
  for (const auto& x : r.ratios)
    ratios.push_back(json{{"name", x.name}, {"numerator", x.numerator}, {"denominator", x.denominator},
                          {"ratio", std::isfinite(x.ratio) ? json(x.ratio) : json("inf")}, {"threshold", x.threshold}, {"ok", x.ok}});
  return json{{"all_ok", r.all_ok()},
              {"condition1_ok", r.condition1_ok},
              {"condition2_ok", r.condition2_ok},
              {"condition3_ok", r.condition3_ok},
              {"budget_ok", r.budget_ok},
              {"ratios", ratios},
              {"messages", r.messages}};
}

inline Cell finite_or_text(double x) { return std::isfinite(x) ? Cell(x) : Cell(format_double(x)); }

// ---------------------------------------------------------------------------
// Commands

inline CommandResult cmd_validate(const json& cfg) {
  task_block(cfg, "validate");
  const PhysicalParams p = parse_physical(cfg);
  const CavityGraph g = parse_graph(cfg);
  const RegimeReport r = check_conditions(p, parse_thresholds(cfg), g.n_cavities());
  CommandResult out;
  out.report = regime_json(r);
  out.table.columns = {"inequality", "numerator", "denominator", "ratio", "threshold", "ok"};
  for (const auto& x : r.ratios) out.table.rows.push_back({x.name, x.numerator, x.denominator, finite_or_text(x.ratio), x.threshold, x.ok});
  out.summary = {{"all_ok", r.all_ok()},
                 {"condition1_ok", r.condition1_ok},
                 {"condition2_ok", r.condition2_ok},
                 {"condition3_ok", r.condition3_ok},
                 {"budget_ok", r.budget_ok}};
  out.exit_code = r.all_ok() ? kOk : kValidationFailure;
  return out;
}

inline CommandResult cmd_map_params(const json& cfg) {
  task_block(cfg, "map_params");
  const PhysicalParams p = parse_physical(cfg);
  const CavityGraph g = parse_graph(cfg);
  const DerivedCouplings c = derive_couplings(p);
  const SpinModelParams s = at_path("physical", [&] { return map_to_spin_params(c, p.M, g); });
  const DecayRates d = effective_decay_rates(p);
  CommandResult out;
  out.report = json{{"couplings",
                     {{"lambda", c.lambda},
                      {"omega", c.omega},
                      {"mu1", complex_json(c.mu1)},
                      {"mu2", complex_json(c.mu2)},
                      {"mu3", complex_json(c.mu3)},
                      {"mu4", complex_json(c.mu4)},
                      {"mu12_plus", complex_json(c.mu12_plus)},
                      {"mu12_minus", complex_json(c.mu12_minus)},
                      {"mu34_plus", complex_json(c.mu34_plus)},
                      {"mu34_minus", complex_json(c.mu34_minus)},
                      {"mu_z", complex_json(c.mu_z)},
                      {"j", c.J},
                      {"lambda_minus_delta", c.lambda_minus_delta},
                      {"extended", c.extended}}},
                    {"spin_model", spin_model_json(s)},
                    {"decay_rates", {{"gamma_a", d.gamma_a}, {"gamma_b", d.gamma_b}}}};
  out.table.columns = {"coefficient", "value"};
  for (const auto& [k, v] : std::vector<std::pair<std::string, double>>{
           {"A", s.A}, {"B", s.B}, {"C", s.C}, {"D", s.D}, {"E", s.E}, {"gamma_a", d.gamma_a}, {"gamma_b", d.gamma_b}})
    out.table.rows.push_back({k, v});
  out.summary = {{"A", s.A}, {"B", s.B}, {"C", s.C}, {"D", s.D}, {"E", s.E}};
  return out;
}

inline Axis parse_axis(const json& v, const std::string& path) {
  const std::string a = as_string(v, path);
  if (a == "x") return Axis::X;
  if (a == "y") return Axis::Y;
  if (a == "z") return Axis::Z;
  throw ConfigError(path, "expected \"x\", \"y\" or \"z\"");
}

/// Lowest levels of the target Hamiltonian (the negated operator when the
/// realized model is inverted), gap, correlations and magnetization.
inline CommandResult cmd_ground_state(const json& cfg) {
  const json& b = *task_block(cfg, "ground_state");
  const std::string path = "ground_state";
  check_keys(b, path, {"levels", "correlations"});
  if (model_kind(cfg) != "effective") throw ConfigError("model", "ground_state needs the effective model");
  const std::uint64_t seed = config_seed(cfg);
  const SolverSettings solver = parse_solver(cfg, seed);
  const CavityGraph g = parse_graph(cfg);
  const SpinModelParams s = resolve_spin_model(cfg, g);
  const SparseOperator H = build_spin_hamiltonian(s);
  const SparseOperator target = s.inverted ? -H : H;
  const int levels = static_cast<int>(integer_or(b, "levels", path, 4));
  if (levels < 1 || levels > target.dim()) throw ConfigError(join_path(path, "levels"), "must be in 1..dim");

  const SpectrumSlice sl = extremal_eigenpairs(target, levels, Which::lowest, solver.eigen);
  const GapResult gap = excitation_gap(target, -1.0, solver.eigen);
  const QuantumState& gs = sl.eigenvectors.front();

  std::vector<std::tuple<int, int, Axis, std::string>> pairs;
  if (const json* c = find(b, "correlations")) {
    if (!c->is_array()) throw ConfigError(join_path(path, "correlations"), "expected an array of [i, j, axis]");
    for (std::size_t k = 0; k < c->size(); ++k) {
      const std::string ep = join_path(path, "correlations[" + std::to_string(k) + "]");
      const json& e = (*c)[k];
      if (!e.is_array() || e.size() != 3) throw ConfigError(ep, "expected [i, j, axis]");
      const int i = static_cast<int>(as_integer(e[0], ep)), j = static_cast<int>(as_integer(e[1], ep));
      if (i < 0 || j < 0 || i >= g.n_cavities() || j >= g.n_cavities()) throw ConfigError(ep, "site index out of range");
      pairs.emplace_back(i, j, parse_axis(e[2], ep), e[2].get<std::string>());
    }
  } else {
    for (int j = 1; j < g.n_cavities(); ++j) pairs.emplace_back(0, j, Axis::Z, "z");
  }

  CommandResult out;
  json corr = json::array();
  for (const auto& [i, j, ax, name] : pairs) {
    const Correlation c = correlation(gs, i, j, ax);
    corr.push_back(json{{"i", i}, {"j", j}, {"axis", name}, {"raw", c.raw}, {"connected", c.connected}});
  }
  out.report = json{{"spin_model", spin_model_json(s)},
                    {"target_sign", s.inverted ? -1 : 1},
                    {"energies", sl.eigenvalues},
                    {"residuals", sl.residuals},
                    {"gap", gap.gap},
                    {"ground_energy", gap.ground_energy},
                    {"ground_degeneracy", gap.ground_degeneracy},
                    {"degeneracy_tol", gap.degeneracy_tol},
                    {"correlations", corr},
                    {"magnetization", magnetization_profile(gs)},
                    {"seed", seed}};
  out.table.columns = {"level", "energy", "residual"};
  for (std::size_t k = 0; k < sl.eigenvalues.size(); ++k)
    out.table.rows.push_back({static_cast<long long>(k), sl.eigenvalues[k], sl.residuals[k]});
  out.summary = {{"ground_energy", gap.ground_energy}, {"gap", gap.gap}, {"ground_degeneracy", static_cast<long long>(gap.ground_degeneracy)}};
  return out;
}

inline std::vector<double> uniform_grid(double t_final, long long points, const std::string& path) {
  if (!(t_final >= 0.0)) throw ConfigError(join_path(path, "t_final"), "must be >= 0");
  if (points < 2) throw ConfigError(join_path(path, "points"), "must be >= 2");
  std::vector<double> g;
  for (long long k = 0; k < points; ++k) g.push_back(t_final * static_cast<double>(k) / static_cast<double>(points - 1));
  return g;
}

/// Observable time series. Effective model: static Krylov evolution, or the
/// conditional (no-decay) evolution when "conditional" is true. Full and
/// intermediate models: midpoint propagation of the embedded spin state.
inline CommandResult cmd_evolve(const json& cfg) {
  const json& b = *task_block(cfg, "evolve");
  const std::string path = "evolve";
  check_keys(b, path, {"t_final", "points", "observables", "initial", "conditional", "n_max"});
  const std::uint64_t seed = config_seed(cfg);
  const SolverSettings solver = parse_solver(cfg, seed);
  const CavityGraph g = parse_graph(cfg);
  const std::string model = model_kind(cfg);
  const std::vector<double> grid =
      uniform_grid(as_number(require(b, "t_final", path), join_path(path, "t_final")), integer_or(b, "points", path, 101), path);
  const bool conditional = bool_or(b, "conditional", path, false);

  CommandResult out;
  std::vector<std::string> names;
  std::vector<SparseOperator> ops;
  std::vector<std::vector<double>> series;
  std::vector<double> norms, photons, excited;

  if (model == "effective") {
    if (find(b, "n_max")) throw ConfigError(join_path(path, "n_max"), "only for the full or intermediate model");
    const SpinModelParams s = resolve_spin_model(cfg, g);
    const SpinLayout sl = s.layout();
    const auto obs = parse_observables(find(b, "observables"), join_path(path, "observables"), sl.n_sites);
    for (const auto& o : obs) {
      names.push_back(o.name());
      ops.push_back(observable_operator(o, sl));
    }
    QuantumState psi = parse_initial(find(b, "initial"), join_path(path, "initial"), sl, seed);
    SparseOperator H = build_spin_hamiltonian(s);
    if (conditional) H = build_conditional_hamiltonian(H, sl, effective_decay_rates(parse_physical(cfg)));
    double now = 0.0;
    for (double t : grid) {
      psi = conditional ? evolve_conditional(H, psi, t - now, solver.evolution) : evolve_static(H, psi, t - now, solver.evolution);
      now = t;
      std::vector<double> row;
      for (const auto& op : ops) row.push_back(expectation(op, psi).real() / psi.norm_squared());
      series.push_back(std::move(row));
      norms.push_back(psi.norm_squared());
    }
    out.report["spin_model"] = spin_model_json(s);
  } else {
    if (conditional) throw ConfigError(join_path(path, "conditional"), "only for the effective model");
    const PhysicalParams p = parse_physical(cfg);
    const int n_max = static_cast<int>(integer_or(b, "n_max", path, kDefaultPhotonCutoff));
    const bool full = model == "full";
    const TimeDependentOperator H = at_path("physical", [&] {
      return full ? build_full_hamiltonian(p, g, n_max) : build_intermediate_hamiltonian(p, g, n_max);
    });
    const CavityLayout cl = full ? full_layout(p, g, n_max) : intermediate_layout(p, g, n_max);
    const SpinLayout sl{g.n_cavities(), p.M};
    const auto obs = parse_observables(find(b, "observables"), join_path(path, "observables"), sl.n_sites);
    for (const auto& o : obs) {
      names.push_back(o.name());
      ops.push_back(observable_operator(o, cl));
    }
    const HilbertSpace sp = cl.space();
    SparseOperator nph = SparseOperator::zero(sp), nexc = SparseOperator::zero(sp);
    const SparseOperator a = annihilation(n_max);
    for (int j = 0; j < cl.n_cavities; ++j) {
      nph = nph + cl.on_photon(detail::as_hermitian(a.adjoint() * a), j, sp);
      if (full) nexc = nexc + cl.on_atoms(collective_transition(Level::e, Level::e, p.M), j, sp);
    }
    QuantumState psi = embed_spin_state(parse_initial(find(b, "initial"), join_path(path, "initial"), sl, seed), cl);
    double now = 0.0;
    for (double t : grid) {
      if (t > now) psi = evolve_time_dependent(H, psi, t - now, solver.evolution, now);
      now = t;
      std::vector<double> row;
      for (const auto& op : ops) row.push_back(expectation(op, psi).real() / psi.norm_squared());
      series.push_back(std::move(row));
      norms.push_back(psi.norm_squared());
      photons.push_back(expectation(nph, psi).real());
      if (full) excited.push_back(expectation(nexc, psi).real());
    }
  }

  out.table.columns = {"t"};
  for (const auto& n : names) out.table.columns.push_back(n);
  out.table.columns.push_back("norm2");
  if (!photons.empty()) out.table.columns.push_back("photons");
  if (!excited.empty()) out.table.columns.push_back("excited");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::vector<Cell> row{grid[k]};
    for (double v : series[k]) row.push_back(v);
    row.push_back(norms[k]);
    if (!photons.empty()) row.push_back(photons[k]);
    if (!excited.empty()) row.push_back(excited[k]);
    out.table.rows.push_back(std::move(row));
  }
  out.report["model"] = model;
  out.report["seed"] = seed;
  out.report["series"] = table_json(out.table);
  for (std::size_t o = 0; o < names.size(); ++o) out.summary.emplace_back("final:" + names[o], series.back()[o]);
  out.summary.emplace_back("final:norm2", norms.back());
  return out;
}

inline CommandResult cmd_compare(const json& cfg) {
  const json& b = *task_block(cfg, "compare");
  const std::string path = "compare";
  check_keys(b, path, {"t_final", "exchange_periods", "points", "observables", "initial", "reference", "n_max", "periodic_max_dim"});
  const std::uint64_t seed = config_seed(cfg);
  const SolverSettings solver = parse_solver(cfg, seed);
  const PhysicalParams p = parse_physical(cfg);
  const CavityGraph g = parse_graph(cfg);
  CompareOptions opt;
  opt.thresholds = parse_thresholds(cfg);
  opt.settings = solver.evolution;
  opt.n_max = static_cast<int>(integer_or(b, "n_max", path, opt.n_max));
  opt.periodic_max_dim = integer_or(b, "periodic_max_dim", path, opt.periodic_max_dim);
  const std::string ref = string_or(b, "reference", path, "full");
  if (ref != "full" && ref != "intermediate") throw ConfigError(join_path(path, "reference"), "expected full or intermediate");
  opt.reference = ref == "full" ? ReferenceModel::full : ReferenceModel::intermediate;

  CommandResult out;
  const RegimeReport regime = check_conditions(p, opt.thresholds, g.n_cavities());
  if (!regime.all_ok()) {
    out.report = json{{"refused", true}, {"regime", regime_json(regime)}};
    out.table.columns = {"message"};
    for (const auto& m : regime.messages) out.table.rows.push_back({m});
    out.summary = {{"refused", true}};
    out.exit_code = kValidationFailure;
    return out;
  }
  const SpinModelParams s = at_path("physical", [&] { return map_to_spin_params(derive_couplings(p), p.M, g); });
  const SpinLayout sl = s.layout();
  double t_final;
  if (find(b, "t_final")) {
    if (find(b, "exchange_periods")) throw ConfigError(join_path(path, "t_final"), "give t_final or exchange_periods, not both");
    t_final = as_number(*find(b, "t_final"), join_path(path, "t_final"));
  } else {
    const double rate = std::max(std::abs(s.D), std::abs(s.E));
    if (rate == 0.0) throw ConfigError(join_path(path, "exchange_periods"), "D = E = 0: no exchange period; give t_final");
    t_final = number_or(b, "exchange_periods", path, 1.0) * 2.0 * std::numbers::pi / rate;
  }
  const auto grid = uniform_grid(t_final, integer_or(b, "points", path, 41), path);
  const auto obs = parse_observables(find(b, "observables"), join_path(path, "observables"), sl.n_sites);
  const QuantumState psi = parse_initial(find(b, "initial"), join_path(path, "initial"), sl, seed);

  const ComparisonReport r = compare_full_vs_effective(p, g, grid, obs, psi, opt);
  out.table.columns = {"t"};
  for (const auto& n : r.observables) {
    out.table.columns.push_back("reference:" + n);
    out.table.columns.push_back("effective:" + n);
  }
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    std::vector<Cell> row{r.times[k]};
    for (std::size_t o = 0; o < r.observables.size(); ++o) {
      row.push_back(r.reference_values[o][k]);
      row.push_back(r.effective_values[o][k]);
    }
    out.table.rows.push_back(std::move(row));
  }
  json dev = json::object();
  for (std::size_t o = 0; o < r.observables.size(); ++o) dev[r.observables[o]] = r.max_deviation[o];
  out.report = json{{"refused", false},
                    {"reference", ref},
                    {"method", r.method},
                    {"period", r.period},
                    {"propagator_error_estimate", r.propagator_error_estimate},
                    {"spin_model", spin_model_json(s)},
                    {"max_deviation", dev},
                    {"max_photon_population", r.max_photon_population},
                    {"max_excited_population", r.max_excited_population ? json(*r.max_excited_population) : json(nullptr)},
                    {"regime", regime_json(r.regime)},
                    {"series", table_json(out.table)}};
  for (std::size_t o = 0; o < r.observables.size(); ++o) out.summary.emplace_back("max_deviation:" + r.observables[o], r.max_deviation[o]);
  out.summary.emplace_back("max_photon_population", r.max_photon_population);
  if (r.max_excited_population) out.summary.emplace_back("max_excited_population", *r.max_excited_population);
  return out;
}

/// "adiabatic": {"points": [{"s": 0, "spin_model": {...}}, ...],
///   "durations": [...] | "duration_multiples": [...] (of T0 = gap_time / min gap),
///   "gap_time": 10, "initial": {...}, "steps": n}
inline CommandResult cmd_adiabatic(const json& cfg) {
  const json& b = *task_block(cfg, "adiabatic");
  const std::string path = "adiabatic";
  check_keys(b, path, {"points", "durations", "duration_multiples", "gap_time", "initial", "steps"});
  const std::uint64_t seed = config_seed(cfg);
  const SolverSettings solver = parse_solver(cfg, seed);
  const CavityGraph g = parse_graph(cfg);

  AdiabaticSchedule sched;
  const json& pts = require(b, "points", path);
  if (!pts.is_array()) throw ConfigError(join_path(path, "points"), "expected an array");
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const std::string pp = join_path(path, "points[" + std::to_string(k) + "]");
    check_keys(pts[k], pp, {"s", "spin_model"});
    sched.points.push_back({as_number(require(pts[k], "s", pp), join_path(pp, "s")),
                            parse_spin_model(require(pts[k], "spin_model", pp), join_path(pp, "spin_model"), g)});
  }
  at_path(join_path(path, "points"), [&] { sched.validate(); });

  const bool explicit_t = find(b, "durations") != nullptr;
  if (explicit_t == (find(b, "duration_multiples") != nullptr))
    throw ConfigError(path, "exactly one of durations, duration_multiples is required");
  std::vector<double> durations;
  double min_gap = minimum_schedule_gap(sched), t0 = 0.0;
  const json& dl = explicit_t ? b["durations"] : b["duration_multiples"];
  const std::string dp = join_path(path, explicit_t ? "durations" : "duration_multiples");
  if (!dl.is_array() || dl.empty()) throw ConfigError(dp, "expected a non-empty array");
  if (!explicit_t) {
    if (min_gap <= 0.0) throw ConfigError(join_path(path, "points"), "target level closes its gap along the schedule");
    t0 = number_or(b, "gap_time", path, 10.0) / min_gap;
  }
  for (std::size_t k = 0; k < dl.size(); ++k) {
    const double v = as_number(dl[k], dp + "[" + std::to_string(k) + "]");
    if (!(v > 0.0)) throw ConfigError(dp + "[" + std::to_string(k) + "]", "must be > 0");
    durations.push_back(explicit_t ? v : v * t0);
  }

  const SpinLayout sl = sched.points.front().params.layout();
  QuantumState psi0;
  if (const json* init = find(b, "initial")) {
    psi0 = parse_initial(init, join_path(path, "initial"), sl, seed);
  } else {
    const SpectrumSlice m = detail::extremal_multiplet(build_spin_hamiltonian(sched.points.front().params),
                                                       sched.points.front().params.inverted ? Which::highest : Which::lowest);
    if (m.eigenvalues.size() != 1) throw ConfigError(join_path(path, "initial"), "s = 0 target level is degenerate; give an initial state");
    psi0 = m.eigenvectors.front();
  }
  const long long steps = integer_or(b, "steps", path, 0);

  CommandResult out;
  out.table.columns = {"duration", "fidelity", "deficit", "steps"};
  json rows = json::array();
  for (double T : durations) {
    sched.duration = T;
    const AdiabaticResult r = at_path(join_path(path, "initial"), [&] { return adiabatic_prepare(sched, psi0, solver.evolution, steps); });
    out.table.rows.push_back({T, r.fidelity, 1.0 - r.fidelity, r.steps});
    rows.push_back(json{{"duration", T}, {"fidelity", r.fidelity}, {"target_energy", r.target_energy},
                        {"target_is_highest", r.target_is_highest}, {"target_degeneracy", r.target_degeneracy}, {"steps", r.steps}});
    out.summary.emplace_back("fidelity:" + format_double(T), r.fidelity);
  }
  out.report = json{{"minimum_gap", min_gap}, {"t0", explicit_t ? json(nullptr) : json(t0)}, {"results", rows}};
  return out;
}

inline CommandResult run_command(const std::string& command, const json& cfg, unsigned threads);

/// "sweep": {"parameter": "physical.omega", "values": [...], "task": name,
///           "block": {...}}. Each value replaces the field and runs the task;
/// one output row per value, in input order.
inline CommandResult cmd_sweep(const json& cfg, unsigned threads) {
  const json& b = *task_block(cfg, "sweep");
  const std::string path = "sweep";
  check_keys(b, path, {"parameter", "values", "task", "block"});
  const std::string param = as_string(require(b, "parameter", path), join_path(path, "parameter"));
  const std::string task = as_string(require(b, "task", path), join_path(path, "task"));
  if (task == "sweep" || std::find(command_names().begin(), command_names().end(), task) == command_names().end())
    throw ConfigError(join_path(path, "task"), "unknown or nested task \"" + task + "\"");
  const json& values = require(b, "values", path);
  if (!values.is_array() || values.empty()) throw ConfigError(join_path(path, "values"), "expected a non-empty array");

  std::string pointer = "/" + param;
  std::replace(pointer.begin(), pointer.end(), '.', '/');
  const json::json_pointer ptr(pointer);
  json base = cfg;
  base.erase("sweep");
  if (base.contains("command")) base.erase("command");
  if (const json* blk = find(b, "block")) base[task] = *blk;
  if (ptr.empty() || !base.contains(ptr.parent_pointer()) || !base[ptr.parent_pointer()].is_object())
    throw ConfigError(join_path(path, "parameter"), "no config object holds \"" + param + "\"");

  std::vector<CommandResult> results(values.size());
  std::vector<std::string> errors(values.size());
  std::vector<int> codes(values.size(), kOk);
  std::size_t next = 0;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= values.size()) return;
        i = next++;
      }
      json point = base;
      point[ptr] = values[i];
      try {
        results[i] = run_command(task, point, 1);
      } catch (const ConfigError& e) {
        errors[i] = e.what();
        codes[i] = kConfigError;
      } catch (const ConvergenceError& e) {
        errors[i] = e.what();
        codes[i] = kNonConvergence;
      } catch (const RegimeError& e) {
        errors[i] = e.what();
        codes[i] = kValidationFailure;
      } catch (const std::exception& e) {
        errors[i] = e.what();
        codes[i] = kConfigError;
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(values.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // A configuration error at any point is an error of the sweep itself.
  for (std::size_t i = 0; i < values.size(); ++i)
    if (codes[i] == kConfigError) throw ConfigError(join_path(path, "values[" + std::to_string(i) + "]"), errors[i]);

  CommandResult out;
  out.table.columns = {param, "exit_code", "error"};
  for (std::size_t i = 0; i < values.size(); ++i)
    for (const auto& [k, v] : results[i].summary)
      if (std::find(out.table.columns.begin(), out.table.columns.end(), k) == out.table.columns.end()) out.table.columns.push_back(k);
  json points = json::array();
  int worst = kOk;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const int code = codes[i] != kOk ? codes[i] : results[i].exit_code;
    worst = std::max(worst, code);
    std::vector<Cell> row(out.table.columns.size(), std::string());
    row[0] = values[i].is_number() ? Cell(values[i].get<double>()) : Cell(values[i].dump());
    row[1] = static_cast<long long>(code);
    row[2] = errors[i];
    for (const auto& [k, v] : results[i].summary) {
      const auto pos = std::find(out.table.columns.begin(), out.table.columns.end(), k) - out.table.columns.begin();
      row[static_cast<std::size_t>(pos)] = v;
    }
    out.table.rows.push_back(row);
    points.push_back(json{{"value", values[i]}, {"exit_code", code}, {"error", errors[i]}, {"result", results[i].report}});
  }
  out.report = json{{"parameter", param}, {"task", task}, {"points", points}};
  out.exit_code = worst == kNonConvergence ? kNonConvergence : worst;
  return out;
}

inline CommandResult run_command(const std::string& command, const json& cfg, unsigned threads) {
  if (command == "validate") return cmd_validate(cfg);
  if (command == "map_params") return cmd_map_params(cfg);
  if (command == "ground_state") return cmd_ground_state(cfg);
  if (command == "evolve") return cmd_evolve(cfg);
  if (command == "compare") return cmd_compare(cfg);
  if (command == "adiabatic") return cmd_adiabatic(cfg);
  if (command == "sweep") return cmd_sweep(cfg, threads);
  throw ConfigError("command", "unknown command \"" + command + "\"");
}

// ---------------------------------------------------------------------------
// Config files and result emission

/// Parses a config file. Accepts a plain config, a JSON result file (its
/// "config" member) or a CSV result file (its "# config: " line).
inline json load_config_text(const std::string& text) {
  const std::string tag = "# config: ";
  if (text.rfind(tag, 0) == 0) {
    const auto end = text.find_first_of("\r\n");
    return load_config_text(text.substr(tag.size(), end == std::string::npos ? std::string::npos : end - tag.size()));
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("invalid JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("config") && j.contains("result") && j["config"].is_object()) return j["config"];
  return j;
}

inline json load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("--config", "cannot open \"" + path + "\"");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config_text(ss.str());
}

/// The config as it was run: command and seed filled in.
inline json resolve_config(json cfg, const std::string& command, std::optional<std::uint64_t> seed_override) {
  if (!cfg.is_object()) throw ConfigError("<root>", "expected an object");
  cfg["command"] = command;
  if (seed_override) cfg["seed"] = *seed_override;
  else if (!cfg.contains("seed")) cfg["seed"] = 0;
  return cfg;
}

inline std::string default_format(const std::string& command) {
  return command == "evolve" || command == "adiabatic" || command == "sweep" ? "csv" : "json";
}

inline std::string render(const CommandResult& r, const json& resolved, const std::string& format) {
  if (format == "csv") return "# config: " + resolved.dump() + "\r\n" + to_csv(r.table);
  json doc{{"command", resolved.value("command", "")}, {"exit_code", r.exit_code}, {"config", resolved}, {"result", r.report}};
  doc["table"] = table_json(r.table);
  return doc.dump(2) + "\n";
}

}  // namespace cavspin::cli
