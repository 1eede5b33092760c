#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "../analysis.hpp"
#include "../cavity_graph.hpp"
#include "../dynamics.hpp"
#include "../effective_model.hpp"
#include "../krylov.hpp"
#include "../physical_params.hpp"
#include "../regime.hpp"

namespace cavspin::cli {

using json = nlohmann::ordered_json;

/// Malformed or inconsistent configuration; `path` names the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& msg) : std::runtime_error(path + ": " + msg), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

inline std::string join_path(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

inline void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items())
    if (!ok.count(k)) throw ConfigError(join_path(path, k), "unknown key");
}

inline double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

inline long long as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
  return v.get<long long>();
}

inline bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError(path, "expected true or false");
  return v.get<bool>();
}

inline std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected a string");
  return v.get<std::string>();
}

/// A real number or an [re, im] pair.
inline Complex as_complex(const json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(path, "expected a number or an [re, im] pair");
}

inline json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

inline double number_or(const json& obj, const char* key, const std::string& path, double fallback) {
  const json* v = find(obj, key);
  return v ? as_number(*v, join_path(path, key)) : fallback;
}

inline long long integer_or(const json& obj, const char* key, const std::string& path, long long fallback) {
  const json* v = find(obj, key);
  return v ? as_integer(*v, join_path(path, key)) : fallback;
}

inline bool bool_or(const json& obj, const char* key, const std::string& path, bool fallback) {
  const json* v = find(obj, key);
  return v ? as_bool(*v, join_path(path, key)) : fallback;
}

inline std::string string_or(const json& obj, const char* key, const std::string& path, std::string fallback) {
  const json* v = find(obj, key);
  return v ? as_string(*v, join_path(path, key)) : std::move(fallback);
}

inline const json& require(const json& obj, const char* key, const std::string& path) {
  const json* v = find(obj, key);
  if (!v) throw ConfigError(join_path(path, key), "required field missing");
  return *v;
}

/// Runs `f`, turning library argument errors into ConfigError at `path`.
template <class F>
auto at_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(path, e.what());
  }
}

// ---------------------------------------------------------------------------

/// "physical": {"preset": "working_point", "g1", "g2", "delta1", "delta2",
/// "omega1".."omega4", "omega", "delta", "mu_z", "j", "gamma", "m"}. Entries
/// override the preset. A top-level "units": {"frequency_scale": s} multiplies
/// every frequency-valued entry.
inline PhysicalParams parse_physical(const json& root) {
  const std::string path = "physical";
  const json& o = require(root, "physical", "");
  check_keys(o, path,
             {"preset", "g1", "g2", "delta1", "delta2", "omega1", "omega2", "omega3", "omega4", "omega", "delta", "mu_z", "j",
              "gamma", "m"});
  PhysicalParams p;
  if (const json* pr = find(o, "preset")) {
    const std::string name = as_string(*pr, join_path(path, "preset"));
    if (name != "working_point") throw ConfigError(join_path(path, "preset"), "unknown preset \"" + name + "\"");
    p = working_point();
  }
  p.g1 = number_or(o, "g1", path, p.g1);
  p.g2 = number_or(o, "g2", path, p.g2);
  p.Delta1 = number_or(o, "delta1", path, p.Delta1);
  p.Delta2 = number_or(o, "delta2", path, p.Delta2);
  auto cx = [&](const char* key, Complex fallback) {
    const json* v = find(o, key);
    return v ? as_complex(*v, join_path(path, key)) : fallback;
  };
  p.Omega1 = cx("omega1", p.Omega1);
  p.Omega2 = cx("omega2", p.Omega2);
  p.Omega3 = cx("omega3", p.Omega3);
  p.Omega4 = cx("omega4", p.Omega4);
  p.omega = number_or(o, "omega", path, p.omega);
  p.delta = number_or(o, "delta", path, p.delta);
  p.mu_z = cx("mu_z", p.mu_z);
  p.J = number_or(o, "j", path, p.J);
  p.gamma = number_or(o, "gamma", path, p.gamma);
  p.M = static_cast<int>(integer_or(o, "m", path, p.M));

  if (const json* u = find(root, "units")) {
    check_keys(*u, "units", {"frequency_scale"});
    const double s = number_or(*u, "frequency_scale", "units", 1.0);
    if (!(s > 0.0)) throw ConfigError("units.frequency_scale", "must be > 0");
    for (double* x : {&p.g1, &p.g2, &p.Delta1, &p.Delta2, &p.omega, &p.delta, &p.J, &p.gamma}) *x *= s;
    for (Complex* z : {&p.Omega1, &p.Omega2, &p.Omega3, &p.Omega4, &p.mu_z}) *z *= s;
  }
  at_path(path, [&] { p.validate(); });
  return p;
}

inline json physical_json(const PhysicalParams& p) {
  return json{{"g1", p.g1},
              {"g2", p.g2},
              {"delta1", p.Delta1},
              {"delta2", p.Delta2},
              {"omega1", complex_json(p.Omega1)},
              {"omega2", complex_json(p.Omega2)},
              {"omega3", complex_json(p.Omega3)},
              {"omega4", complex_json(p.Omega4)},
              {"omega", p.omega},
              {"delta", p.delta},
              {"mu_z", complex_json(p.mu_z)},
              {"j", p.J},
              {"gamma", p.gamma},
              {"m", p.M}};
}

/// "graph": {"generator": "chain", "n": N, "periodic": bool} |
///          {"generator": "single"} | {"n": N, "edges": [[i, j], ...]}
inline CavityGraph parse_graph(const json& root) {
  const std::string path = "graph";
  const json& o = require(root, "graph", "");
  check_keys(o, path, {"generator", "n", "periodic", "edges"});
  if (const json* g = find(o, "generator")) {
    const std::string name = as_string(*g, join_path(path, "generator"));
    if (find(o, "edges")) throw ConfigError(join_path(path, "edges"), "not allowed together with a generator");
    if (name == "single") return single_cavity();
    if (name == "chain") {
      const int n = static_cast<int>(as_integer(require(o, "n", path), join_path(path, "n")));
      const bool periodic = bool_or(o, "periodic", path, false);
      return at_path(path, [&] { return chain(n, periodic); });
    }
    throw ConfigError(join_path(path, "generator"), "unknown generator \"" + name + "\" (expected chain or single)");
  }
  const int n = static_cast<int>(as_integer(require(o, "n", path), join_path(path, "n")));
  const json& e = require(o, "edges", path);
  if (!e.is_array()) throw ConfigError(join_path(path, "edges"), "expected an array of [i, j] pairs");
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < e.size(); ++k) {
    const std::string ep = join_path(path, "edges[" + std::to_string(k) + "]");
    if (!e[k].is_array() || e[k].size() != 2) throw ConfigError(ep, "expected an [i, j] pair");
    edges.emplace_back(static_cast<int>(as_integer(e[k][0], ep)), static_cast<int>(as_integer(e[k][1], ep)));
  }
  return at_path(join_path(path, "edges"), [&] { return CavityGraph::from_edge_list(n, std::move(edges)); });
}

inline json graph_json(const CavityGraph& g) {
  json e = json::array();
  for (const auto& [i, j] : g.edges()) e.push_back(json::array({i, j}));
  return json{{"n", g.n_cavities()}, {"edges", e}};
}

/// Spin-model block: {"a", "b", "c", "d", "e", "two_s", "site_c", "inverted",
/// "afm_target"}. With "afm_target": true the coefficients describe the
/// target antiferromagnet and are replaced by afm_equivalent_params.
inline SpinModelParams parse_spin_model(const json& o, const std::string& path, const CavityGraph& graph) {
  check_keys(o, path, {"a", "b", "c", "d", "e", "two_s", "site_c", "inverted", "afm_target"});
  SpinModelParams s;
  s.A = number_or(o, "a", path, 0.0);
  s.B = number_or(o, "b", path, 0.0);
  s.C = number_or(o, "c", path, 0.0);
  s.D = number_or(o, "d", path, 0.0);
  s.E = number_or(o, "e", path, 0.0);
  s.two_s = static_cast<int>(integer_or(o, "two_s", path, 1));
  s.graph = graph;
  s.inverted = bool_or(o, "inverted", path, false);
  if (const json* c = find(o, "site_c")) {
    if (!c->is_array()) throw ConfigError(join_path(path, "site_c"), "expected an array of numbers");
    std::vector<double> v;
    for (std::size_t k = 0; k < c->size(); ++k) v.push_back(as_number((*c)[k], join_path(path, "site_c[" + std::to_string(k) + "]")));
    s.site_c = std::move(v);
  }
  if (bool_or(o, "afm_target", path, false)) s = afm_equivalent_params(s);
  at_path(path, [&] { s.validate(); });
  return s;
}

inline json spin_model_json(const SpinModelParams& s) {
  json j{{"a", s.A}, {"b", s.B}, {"c", s.C}, {"d", s.D}, {"e", s.E}, {"two_s", s.two_s}, {"inverted", s.inverted}};
  if (s.site_c) j["site_c"] = *s.site_c;
  return j;
}

inline RegimeThresholds parse_thresholds(const json& root) {
  RegimeThresholds t;
  const json* o = find(root, "thresholds");
  if (!o) return t;
  check_keys(*o, "thresholds", {"much_greater", "similar", "condition1_tolerance", "budget_margin"});
  t.much_greater = number_or(*o, "much_greater", "thresholds", t.much_greater);
  t.similar = number_or(*o, "similar", "thresholds", t.similar);
  t.condition1_tolerance = number_or(*o, "condition1_tolerance", "thresholds", t.condition1_tolerance);
  t.budget_margin = number_or(*o, "budget_margin", "thresholds", t.budget_margin);
  return t;
}

struct SolverSettings {
  EvolutionSettings evolution;
  EigenSettings eigen;
};

/// "solver": {"krylov_dim", "step_tolerance", "max_step", "eigen_tol",
/// "eigen_krylov_dim", "eigen_max_restarts"}; the eigen seed is the run seed.
inline SolverSettings parse_solver(const json& root, std::uint64_t seed) {
  SolverSettings s;
  s.eigen.seed = seed;
  const json* o = find(root, "solver");
  if (!o) return s;
  const std::string path = "solver";
  check_keys(*o, path, {"krylov_dim", "step_tolerance", "max_step", "eigen_tol", "eigen_krylov_dim", "eigen_max_restarts"});
  s.evolution.krylov_dim = static_cast<int>(integer_or(*o, "krylov_dim", path, s.evolution.krylov_dim));
  s.evolution.step_tolerance = number_or(*o, "step_tolerance", path, s.evolution.step_tolerance);
  s.evolution.max_step = number_or(*o, "max_step", path, s.evolution.max_step);
  s.eigen.tol = number_or(*o, "eigen_tol", path, s.eigen.tol);
  s.eigen.krylov_dim = static_cast<int>(integer_or(*o, "eigen_krylov_dim", path, s.eigen.krylov_dim));
  s.eigen.max_restarts = static_cast<int>(integer_or(*o, "eigen_max_restarts", path, s.eigen.max_restarts));
  at_path(path, [&] { s.evolution.validate(); });
  if (!(s.eigen.tol > 0.0) || s.eigen.krylov_dim < 2 || s.eigen.max_restarts < 0)
    throw ConfigError(path, "eigen_tol must be > 0, eigen_krylov_dim >= 2, eigen_max_restarts >= 0");
  return s;
}

/// Initial spin state on the effective space:
///   {"spins": ["up", "down", ...]}   per-site extremal states
///   {"m_index": [i, ...]}            per-site basis index (m = S - i)
///   {"random": true}                 normalized random state from the run seed
/// Missing block: alternating up/down.
inline QuantumState parse_initial(const json* o, const std::string& path, const SpinLayout& layout, std::uint64_t seed) {
  const HilbertSpace sp = layout.space();
  std::vector<int> digits(static_cast<std::size_t>(layout.n_sites));
  if (!o) {
    for (int j = 0; j < layout.n_sites; ++j) digits[static_cast<std::size_t>(j)] = j % 2 == 0 ? 0 : layout.two_s;
    return QuantumState::product(sp, digits);
  }
  check_keys(*o, path, {"spins", "m_index", "random"});
  if (o->size() != 1) throw ConfigError(path, "exactly one of spins, m_index, random is required");
  if (const json* r = find(*o, "random")) {
    if (!as_bool(*r, join_path(path, "random"))) throw ConfigError(join_path(path, "random"), "must be true when present");
    return QuantumState::random(sp, seed);
  }
  const bool named = find(*o, "spins") != nullptr;
  const std::string key = named ? "spins" : "m_index";
  const json& arr = *find(*o, key.c_str());
  if (!arr.is_array() || static_cast<int>(arr.size()) != layout.n_sites)
    throw ConfigError(join_path(path, key), "expected one entry per site (" + std::to_string(layout.n_sites) + ")");
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string ep = join_path(path, key + "[" + std::to_string(k) + "]");
    int d;
    if (named) {
      const std::string s = as_string(arr[k], ep);
      if (s == "up") d = 0;
      else if (s == "down") d = layout.two_s;
      else throw ConfigError(ep, "expected \"up\" or \"down\"");
    } else {
      d = static_cast<int>(as_integer(arr[k], ep));
      if (d < 0 || d > layout.two_s) throw ConfigError(ep, "index out of range 0.." + std::to_string(layout.two_s));
    }
    digits[k] = d;
  }
  return QuantumState::product(sp, digits);
}

inline std::vector<ObservableSpec> parse_observables(const json* o, const std::string& path, int n_sites) {
  std::vector<ObservableSpec> out;
  if (!o) {
    for (int j = 0; j < n_sites; ++j) out.push_back({ObservableSpec::Kind::sz, j, 0});
    return out;
  }
  if (!o->is_array()) throw ConfigError(path, "expected an array of observable names");
  for (std::size_t k = 0; k < o->size(); ++k) {
    const std::string ep = path + "[" + std::to_string(k) + "]";
    const std::string s = as_string((*o)[k], ep);
    ObservableSpec spec = at_path(ep, [&] { return ObservableSpec::parse(s); });
    at_path(ep, [&] { spec.check(n_sites); });
    out.push_back(spec);
  }
  return out;
}

}  // namespace cavspin::cli
