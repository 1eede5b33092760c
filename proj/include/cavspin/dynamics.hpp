#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "analysis.hpp"
#include "effective_model.hpp"
#include "full_model.hpp"
#include "krylov.hpp"
#include "quantum_state.hpp"
#include "regime.hpp"
#include "time_dependent_operator.hpp"

namespace cavspin {

namespace detail {

inline void require_normalized(const QuantumState& psi, const std::string& what, double tol = 1e-8) {
  if (std::abs(psi.norm_squared() - 1.0) > tol)
    throw std::invalid_argument(what + ": initial state must be normalized (norm^2 = " + std::to_string(psi.norm_squared()) + ")");
}

}  // namespace detail

/// exp(-i H t) psi0 for Hermitian H.
inline QuantumState evolve_static(const SparseOperator& H, const QuantumState& psi0, double t, const EvolutionSettings& settings = {}) {
  if (!H.hermitian()) throw std::invalid_argument("evolve_static: H must be Hermitian (use evolve_conditional)");
  require_same_space(H.space(), psi0.space(), "evolve_static");
  detail::require_normalized(psi0, "evolve_static");
  Vector v = psi0.amplitudes();
  krylov_evolve([&](const Vector& in, Vector& out) { out.noalias() = H.matrix() * in; }, v, t, settings, true);
  return QuantumState(psi0.space(), std::move(v));
}

/// Largest midpoint step allowed by default: (2 pi / max nu) / 20.
inline double max_time_step(const TimeDependentOperator& H) {
  const double nu = H.max_frequency();
  return nu == 0.0 ? std::numeric_limits<double>::infinity() : 2.0 * std::numbers::pi / nu / 20.0;
}

/// Piecewise-constant propagation from t0 to t0 + duration: H frozen at each
/// interval midpoint, each interval advanced by the Krylov propagator.
/// settings.max_step (if set) must not exceed max_time_step(H).
inline QuantumState evolve_time_dependent(const TimeDependentOperator& H, const QuantumState& psi0, double duration,
                                          const EvolutionSettings& settings = {}, double t0 = 0.0) {
  require_same_space(H.space(), psi0.space(), "evolve_time_dependent");
  if (H.is_static()) return evolve_static(H.static_part(), psi0, duration, settings);
  detail::require_normalized(psi0, "evolve_time_dependent");
  const double bound = max_time_step(H);
  if (settings.max_step > bound * (1.0 + 1e-12))
    throw std::invalid_argument("evolve_time_dependent: max_step " + std::to_string(settings.max_step) +
                                " does not resolve the fastest rotating term (max |nu| = " + std::to_string(H.max_frequency()) +
                                ", step must be <= " + std::to_string(bound) + ")");
  const double h_max = settings.max_step > 0 ? settings.max_step : bound;
  const auto n = static_cast<long long>(std::ceil(std::abs(duration) / h_max - 1e-9));
  if (n == 0) return psi0;
  const double h = duration / static_cast<double>(n);
  EvolutionSettings step_settings = settings;
  step_settings.max_step = 0.0;
  Vector v = psi0.amplitudes();
  for (long long k = 0; k < n; ++k) {
    const double tm = t0 + (static_cast<double>(k) + 0.5) * h;
    krylov_evolve([&](const Vector& in, Vector& out) { H.apply(tm, in, out); }, v, h, step_settings, true);
  }
  return QuantumState(psi0.space(), std::move(v));
}

/// exp(-i H_C t) psi0 for a non-Hermitian H_C, not renormalized: the squared
/// norm of the result is the no-decay probability.
inline QuantumState evolve_conditional(const SparseOperator& HC, const QuantumState& psi0, double t,
                                       const EvolutionSettings& settings = {}) {
  if (settings.renormalize) throw std::invalid_argument("evolve_conditional: renormalize must be false");
  require_same_space(HC.space(), psi0.space(), "evolve_conditional");
  Vector v = psi0.amplitudes();
  krylov_evolve([&](const Vector& in, Vector& out) { out.noalias() = HC.matrix() * in; }, v, t, settings, HC.hermitian());
  return QuantumState(psi0.space(), std::move(v));
}

/// One-period propagator U(T) of a periodic H(t), t in [t0, t0 + T].
///
/// Products of midpoint-frozen exponentials with 256, 512 and 1024 steps are
/// combined by two Richardson levels (h^2 then h^4), so the residual error is
/// O(h^6). Dense; meant for dimensions up to a few thousand.
struct PeriodicPropagator {
  double period = 0.0;
  DenseMatrix U;
  double richardson_gap = 0.0;  ///< max |R2 - R1|, an error estimate for the h^4 level
  std::vector<DenseMatrix> powers;  ///< U^(2^k), filled on demand

  /// psi <- U^n psi
  void advance(Vector& psi, long long n) {
    if (n < 0) throw std::invalid_argument("PeriodicPropagator::advance: n must be >= 0");
    if (powers.empty()) powers.push_back(U);
    for (std::size_t k = 0; n > 0; ++k, n >>= 1) {
      if (k == powers.size()) powers.push_back(powers.back() * powers.back());
      if (n & 1) psi = powers[k] * psi;
    }
  }
};

namespace detail {
inline DenseMatrix midpoint_product(const TimeDependentOperator& H, double t0, double period, int steps) {
  const Index n = H.dim();
  const double h = period / steps;
  DenseMatrix U = DenseMatrix::Identity(n, n);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es;
  for (int k = 0; k < steps; ++k) {
    es.compute(H.at(t0 + (k + 0.5) * h).to_dense());
    Vector ph(n);
    for (Index i = 0; i < n; ++i) ph(i) = std::exp(Complex(0.0, -h * es.eigenvalues()(i)));
    U = (es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint() * U).eval();
  }
  return U;
}
}  // namespace detail

inline PeriodicPropagator build_period_propagator(const TimeDependentOperator& H, double period, int base_steps = 256,
                                                  double t0 = 0.0) {
  if (!(period > 0.0)) throw std::invalid_argument("build_period_propagator: period must be > 0");
  if (base_steps < 1) throw std::invalid_argument("build_period_propagator: base_steps must be >= 1");
  const DenseMatrix a = detail::midpoint_product(H, t0, period, base_steps);
  const DenseMatrix b = detail::midpoint_product(H, t0, period, 2 * base_steps);
  const DenseMatrix c = detail::midpoint_product(H, t0, period, 4 * base_steps);
  const DenseMatrix r1 = (4.0 * b - a) / 3.0;
  const DenseMatrix r2 = (4.0 * c - b) / 3.0;
  PeriodicPropagator P;
  P.period = period;
  P.U = (16.0 * r2 - r1) / 15.0;
  P.richardson_gap = (r2 - r1).cwiseAbs().maxCoeff();
  return P;
}

// ---------------------------------------------------------------------------
// Adiabatic preparation

struct AdiabaticPoint {
  double s = 0.0;
  SpinModelParams params;
};

/// Piecewise-linear interpolation of the spin-model coefficients over s = t/T.
struct AdiabaticSchedule {
  double duration = 1.0;
  std::vector<AdiabaticPoint> points;

  void validate() const {
    if (!(duration > 0.0)) throw std::invalid_argument("AdiabaticSchedule: duration must be > 0");
    if (points.size() < 2) throw std::invalid_argument("AdiabaticSchedule: need at least the s = 0 and s = 1 points");
    if (points.front().s != 0.0 || points.back().s != 1.0)
      throw std::invalid_argument("AdiabaticSchedule: control points must start at s = 0 and end at s = 1");
    for (std::size_t i = 1; i < points.size(); ++i)
      if (!(points[i].s > points[i - 1].s)) throw std::invalid_argument("AdiabaticSchedule: s must be strictly increasing");
    const SpinModelParams& p0 = points.front().params;
    for (const auto& pt : points) {
      pt.params.validate();
      if (pt.params.two_s != p0.two_s || !(pt.params.graph == p0.graph))
        throw std::invalid_argument("AdiabaticSchedule: all control points need the same spin and graph");
      if (pt.params.inverted != p0.inverted)
        throw std::invalid_argument("AdiabaticSchedule: all control points need the same inversion flag");
    }
  }

  SpinModelParams at(double s) const {
    s = std::clamp(s, 0.0, 1.0);
    std::size_t i = 1;
    while (i + 1 < points.size() && points[i].s < s) ++i;
    const SpinModelParams& x = points[i - 1].params;
    const SpinModelParams& y = points[i].params;
    const double w = (s - points[i - 1].s) / (points[i].s - points[i - 1].s);
    auto mix = [w](double a, double b) { return (1.0 - w) * a + w * b; };
    SpinModelParams r = x;
    r.A = mix(x.A, y.A);
    r.B = mix(x.B, y.B);
    r.C = mix(x.C, y.C);
    r.D = mix(x.D, y.D);
    r.E = mix(x.E, y.E);
    if (x.site_c || y.site_c) {
      std::vector<double> c;
      for (int j = 0; j < x.graph.n_cavities(); ++j) c.push_back(mix(x.c_at(j), y.c_at(j)));
      r.site_c = std::move(c);
    }
    return r;
  }
};

struct AdiabaticResult {
  QuantumState state;
  double fidelity = 0.0;        ///< weight on the target eigenspace
  double target_energy = 0.0;   ///< of the s = 1 Hamiltonian
  bool target_is_highest = false;
  int target_degeneracy = 1;
  double initial_residual = 0.0;
  long long steps = 0;
};

namespace detail {

/// Extremal eigenspace (lowest or highest) of a Hermitian operator.
inline SpectrumSlice extremal_multiplet(const SparseOperator& H, Which which, const EigenSettings& es = {}) {
  SpectrumSlice all;
  if (H.dim() <= 512) {
    all = dense_spectrum(H);
    if (which == Which::highest) {
      std::reverse(all.eigenvalues.begin(), all.eigenvalues.end());
      std::reverse(all.eigenvectors.begin(), all.eigenvectors.end());
      std::reverse(all.residuals.begin(), all.residuals.end());
    }
  } else {
    all = extremal_eigenpairs(H, static_cast<int>(std::min<Index>(8, H.dim())), which, es);
  }
  const double width = std::abs(all.eigenvalues.back() - all.eigenvalues.front());
  const double tol = 1e-8 * std::max(width, 1e-300);
  SpectrumSlice m;
  for (std::size_t i = 0; i < all.eigenvalues.size(); ++i) {
    if (std::abs(all.eigenvalues[i] - all.eigenvalues[0]) > tol) break;
    m.eigenvalues.push_back(all.eigenvalues[i]);
    m.eigenvectors.push_back(all.eigenvectors[i]);
    m.residuals.push_back(all.residuals[i]);
  }
  return m;
}

/// Gap between the extremal level and the next one (dense; small systems).
inline double extremal_gap(const SparseOperator& H, Which which) {
  SpectrumSlice s = dense_spectrum(H, false);
  const auto& e = s.eigenvalues;
  const double width = e.back() - e.front();
  const double tol = 1e-8 * std::max(width, 1e-300);
  if (which == Which::lowest) {
    for (std::size_t i = 1; i < e.size(); ++i)
      if (e[i] - e[0] > tol) return e[i] - e[0];
  } else {
    for (std::size_t i = e.size() - 1; i-- > 0;)
      if (e.back() - e[i] > tol) return e.back() - e[i];
  }
  return 0.0;
}

}  // namespace detail

/// Minimum over a uniform s-grid of the gap between the target level
/// (highest if inverted, lowest otherwise) and its neighbour. Dense.
inline double minimum_schedule_gap(const AdiabaticSchedule& sched, int samples = 201) {
  sched.validate();
  if (samples < 2) throw std::invalid_argument("minimum_schedule_gap: samples must be >= 2");
  const Which which = sched.points.front().params.inverted ? Which::highest : Which::lowest;
  double g = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const double s = static_cast<double>(k) / (samples - 1);
    g = std::min(g, detail::extremal_gap(build_spin_hamiltonian(sched.at(s)), which));
  }
  return g;
}

/// Evolves psi0 (an eigenstate of the s = 0 Hamiltonian) under the
/// interpolated spin Hamiltonian with midpoint-frozen steps and reports its
/// weight on the target eigenspace of the s = 1 Hamiltonian. n_steps = 0
/// picks the step from settings.max_step or from 0.05 / ||H||.
inline AdiabaticResult adiabatic_prepare(const AdiabaticSchedule& sched, const QuantumState& psi0,
                                         const EvolutionSettings& settings = {}, long long n_steps = 0) {
  sched.validate();
  const SpinModelParams& first = sched.points.front().params;
  const SparseOperator H0 = build_spin_hamiltonian(first);
  require_same_space(H0.space(), psi0.space(), "adiabatic_prepare");
  detail::require_normalized(psi0, "adiabatic_prepare");

  AdiabaticResult r;
  const Vector h_psi = H0 * psi0.amplitudes();
  const Complex e0 = psi0.amplitudes().dot(h_psi);
  r.initial_residual = (h_psi - e0 * psi0.amplitudes()).norm();
  if (r.initial_residual >= 1e-8)
    throw std::invalid_argument("adiabatic_prepare: initial state is not an eigenstate of the s = 0 Hamiltonian (residual " +
                                std::to_string(r.initial_residual) + ")");

  if (n_steps <= 0) {
    double h = settings.max_step;
    if (h <= 0.0) {
      double norm = 0.0;
      for (const auto& pt : sched.points) norm = std::max(norm, build_spin_hamiltonian(pt.params).row_sum_bound());
      h = 0.05 / std::max(norm, 1e-300);
    }
    n_steps = std::max<long long>(1, static_cast<long long>(std::ceil(sched.duration / h)));
  }
  const double h = sched.duration / static_cast<double>(n_steps);
  EvolutionSettings step_settings = settings;
  step_settings.max_step = 0.0;
  Vector v = psi0.amplitudes();
  for (long long k = 0; k < n_steps; ++k) {
    const double s = (static_cast<double>(k) + 0.5) / static_cast<double>(n_steps);
    const SparseOperator Hs = build_spin_hamiltonian(sched.at(s));
    krylov_evolve([&](const Vector& in, Vector& out) { out.noalias() = Hs.matrix() * in; }, v, h, step_settings, true);
  }
  r.steps = n_steps;
  r.state = QuantumState(psi0.space(), std::move(v));

  r.target_is_highest = sched.points.back().params.inverted;
  const SpectrumSlice target =
      detail::extremal_multiplet(build_spin_hamiltonian(sched.points.back().params), r.target_is_highest ? Which::highest : Which::lowest);
  r.target_energy = target.eigenvalues.front();
  r.target_degeneracy = static_cast<int>(target.eigenvalues.size());
  for (const auto& vec : target.eigenvectors) r.fidelity += std::norm(inner(vec, r.state));
  r.fidelity /= r.state.norm_squared();
  return r;
}

// ---------------------------------------------------------------------------
// Full / intermediate model vs effective spin model

namespace detail {

/// Applies an isometry (or any d_out x d_in map) to each tensor factor in turn.
inline Vector apply_factorwise(const Vector& in, const std::vector<Index>& in_dims, const std::vector<DenseMatrix>& maps) {
  Vector cur = in;
  std::vector<Index> dims = in_dims;
  for (std::size_t f = 0; f < maps.size(); ++f) {
    const DenseMatrix& W = maps[f];
    if (W.cols() != dims[f]) throw std::invalid_argument("apply_factorwise: factor dimension mismatch");
    Index left = 1, right = 1;
    for (std::size_t k = 0; k < f; ++k) left *= dims[k];
    for (std::size_t k = f + 1; k < dims.size(); ++k) right *= dims[k];
    const Index din = W.cols(), dout = W.rows();
    Vector next = Vector::Zero(left * dout * right);
    for (Index l = 0; l < left; ++l)
      for (Index r = 0; r < right; ++r) {
        Vector x(din);
        for (Index i = 0; i < din; ++i) x(i) = cur((l * din + i) * right + r);
        const Vector y = W * x;
        for (Index o = 0; o < dout; ++o) next((l * dout + o) * right + r) = y(o);
      }
    cur = std::move(next);
    dims[f] = dout;
  }
  return cur;
}

/// Map of one cavity's spin-S state into its M atoms (Dicke state in the
/// atom basis) times the photon vacuum.
inline DenseMatrix cavity_isometry(const CavityLayout& layout) {
  const int M = layout.atoms_per_cavity;
  const DenseMatrix f = atom_frame(layout.basis);
  DenseMatrix atoms = DenseMatrix::Identity(1, 1);
  for (int k = 0; k < M; ++k) atoms = DenseMatrix(Eigen::kroneckerProduct(atoms, f));
  const DenseMatrix dicke = atoms * DenseMatrix(symmetric_embedding(M));
  if (!layout.has_photons()) return dicke;
  DenseMatrix out = DenseMatrix::Zero(dicke.rows() * (layout.n_max + 1), dicke.cols());
  for (Index r = 0; r < dicke.rows(); ++r) out.row(r * (layout.n_max + 1)) = dicke.row(r);
  return out;
}

}  // namespace detail

/// Embeds an effective-spin state ((M+1)^N) into an atomic cavity layout: each
/// site goes to the symmetric Dicke state of its atoms, photons in vacuum.
inline QuantumState embed_spin_state(const QuantumState& spin, const CavityLayout& layout) {
  const SpinLayout sl{layout.n_cavities, layout.atoms_per_cavity};
  require_same_space(sl.space(), spin.space(), "embed_spin_state");
  const DenseMatrix W = detail::cavity_isometry(layout);
  std::vector<Index> dims(static_cast<std::size_t>(layout.n_cavities), layout.atoms_per_cavity + 1);
  std::vector<DenseMatrix> maps(static_cast<std::size_t>(layout.n_cavities), W);
  return QuantumState(layout.space(), detail::apply_factorwise(spin.amplitudes(), dims, maps));
}

/// Observable on the spin sites: "sz:i", "spsm:i" (S^+ S^-) or "szsz:i:j".
struct ObservableSpec {
  enum class Kind { sz, spsm, szsz };
  Kind kind = Kind::sz;
  int i = 0;
  int j = 0;

  std::string name() const {
    switch (kind) {
      case Kind::sz: return "sz:" + std::to_string(i);
      case Kind::spsm: return "spsm:" + std::to_string(i);
      default: return "szsz:" + std::to_string(i) + ":" + std::to_string(j);
    }
  }

  static ObservableSpec parse(const std::string& text) {
    auto fail = [&] { return std::invalid_argument("malformed observable \"" + text + "\" (expected sz:i, spsm:i or szsz:i:j)"); };
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t p; (p = text.find(':', start)) != std::string::npos; start = p + 1) parts.push_back(text.substr(start, p - start));
    parts.push_back(text.substr(start));
    auto num = [&](const std::string& s) {
      if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) throw fail();
      return std::stoi(s);
    };
    ObservableSpec o;
    if (parts[0] == "sz" && parts.size() == 2) {
      o.kind = Kind::sz;
      o.i = num(parts[1]);
    } else if (parts[0] == "spsm" && parts.size() == 2) {
      o.kind = Kind::spsm;
      o.i = num(parts[1]);
    } else if (parts[0] == "szsz" && parts.size() == 3) {
      o.kind = Kind::szsz;
      o.i = num(parts[1]);
      o.j = num(parts[2]);
    } else {
      throw fail();
    }
    return o;
  }

  void check(int n_sites) const {
    if (i < 0 || i >= n_sites || (kind == Kind::szsz && (j < 0 || j >= n_sites)))
      throw std::out_of_range("observable " + name() + ": site index out of range for " + std::to_string(n_sites) + " sites");
  }
};

/// Builds the operator for `o` given a per-site spin accessor.
template <class SiteSpin>
SparseOperator observable_operator(const ObservableSpec& o, SiteSpin&& site) {
  switch (o.kind) {
    case ObservableSpec::Kind::sz: return site(o.i).sz;
    case ObservableSpec::Kind::spsm: {
      const CollectiveSpin s = site(o.i);
      return detail::as_hermitian(s.splus * s.sminus);
    }
    default: return detail::as_hermitian(site(o.i).sz * site(o.j).sz);
  }
}

inline SparseOperator observable_operator(const ObservableSpec& o, const SpinLayout& layout) {
  o.check(layout.n_sites);
  return observable_operator(o, [&](int j) { return site_spin(layout, j); });
}

inline SparseOperator observable_operator(const ObservableSpec& o, const CavityLayout& layout) {
  o.check(layout.n_cavities);
  return observable_operator(o, [&](int j) { return site_spin(layout, j); });
}

enum class ReferenceModel { full, intermediate };

struct CompareOptions {
  int n_max = kDefaultPhotonCutoff;
  ReferenceModel reference = ReferenceModel::full;
  RegimeThresholds thresholds{};
  EvolutionSettings settings{};
  /// Use the one-period propagator when the rotating frequencies are
  /// commensurate and the dimension is at most this; 0 disables it.
  Index periodic_max_dim = 2048;
  int periodic_base_steps = 256;
};

struct ComparisonReport {
  RegimeReport regime;
  SpinModelParams spin;
  std::string method;      ///< "periodic" or "midpoint"
  double period = 0.0;     ///< propagation period when method == "periodic"
  double propagator_error_estimate = 0.0;
  std::vector<double> times;  ///< evaluation times (snapped to period multiples for "periodic")
  std::vector<std::string> observables;
  std::vector<std::vector<double>> reference_values;  ///< [observable][time]
  std::vector<std::vector<double>> effective_values;
  std::vector<double> max_deviation;  ///< per observable
  double max_photon_population = 0.0;
  std::optional<double> max_excited_population;  ///< full model only
};

/// Evolves the embedded initial state under the full (or intermediate) model
/// and the spin state under the effective spin Hamiltonian, and reports the
/// observable deviations over t_grid. Refuses (RegimeError) outside the regime.
inline ComparisonReport compare_full_vs_effective(const PhysicalParams& p, const CavityGraph& graph, const std::vector<double>& t_grid,
                                                  const std::vector<ObservableSpec>& observables, const QuantumState& spin_initial,
                                                  const CompareOptions& opt = {}) {
  ComparisonReport rep;
  rep.regime = check_conditions(p, opt.thresholds, graph.n_cavities());
  if (!rep.regime.all_ok()) {
    std::string msg = "compare_full_vs_effective: parameters outside the elimination regime";
    for (const auto& m : rep.regime.messages) msg += "; " + m;
    throw RegimeError(msg);
  }
  if (t_grid.empty()) throw std::invalid_argument("compare_full_vs_effective: empty time grid");
  for (std::size_t k = 0; k < t_grid.size(); ++k)
    if (t_grid[k] < 0.0 || (k > 0 && t_grid[k] < t_grid[k - 1]))
      throw std::invalid_argument("compare_full_vs_effective: time grid must be non-negative and ascending");
  detail::require_normalized(spin_initial, "compare_full_vs_effective");

  rep.spin = map_to_spin_params(derive_couplings(p), p.M, graph);
  const SparseOperator H_eff = build_spin_hamiltonian(rep.spin);
  const SpinLayout sl = rep.spin.layout();
  require_same_space(sl.space(), spin_initial.space(), "compare_full_vs_effective");

  const bool full = opt.reference == ReferenceModel::full;
  const TimeDependentOperator H_ref =
      full ? build_full_hamiltonian(p, graph, opt.n_max) : build_intermediate_hamiltonian(p, graph, opt.n_max);
  const CavityLayout cl = full ? full_layout(p, graph, opt.n_max) : intermediate_layout(p, graph, opt.n_max);
  const QuantumState ref0 = embed_spin_state(spin_initial, cl);

  std::vector<SparseOperator> ops_ref, ops_eff;
  for (const auto& o : observables) {
    ops_ref.push_back(observable_operator(o, cl));
    ops_eff.push_back(observable_operator(o, sl));
    rep.observables.push_back(o.name());
  }
  const HilbertSpace sp = cl.space();
  SparseOperator photons = SparseOperator::zero(sp), excited = SparseOperator::zero(sp);
  const SparseOperator a = annihilation(opt.n_max);
  const SparseOperator n_op = detail::as_hermitian(a.adjoint() * a);
  for (int j = 0; j < cl.n_cavities; ++j) {
    photons = photons + cl.on_photon(n_op, j, sp);
    if (full) excited = excited + cl.on_atoms(collective_transition(Level::e, Level::e, p.M), j, sp);
  }

  // Reference propagation: one-period propagator when possible.
  std::optional<double> base;
  if (!H_ref.is_static()) base = common_base_frequency(H_ref.frequencies());
  const bool periodic = base && opt.periodic_max_dim > 0 && H_ref.dim() <= opt.periodic_max_dim;
  std::vector<Vector> ref_states;
  if (periodic) {
    rep.method = "periodic";
    rep.period = 2.0 * std::numbers::pi / *base;
    PeriodicPropagator P = build_period_propagator(H_ref, rep.period, opt.periodic_base_steps);
    rep.propagator_error_estimate = P.richardson_gap;
    Vector v = ref0.amplitudes();
    long long done = 0;
    for (double t : t_grid) {
      const auto n = static_cast<long long>(std::llround(t / rep.period));
      P.advance(v, n - done);
      done = n;
      rep.times.push_back(static_cast<double>(n) * rep.period);
      ref_states.push_back(v);
    }
  } else {
    rep.method = "midpoint";
    QuantumState s = ref0;
    double now = 0.0;
    for (double t : t_grid) {
      if (t > now) s = evolve_time_dependent(H_ref, s, t - now, opt.settings, now);
      now = t;
      rep.times.push_back(t);
      ref_states.push_back(s.amplitudes());
    }
  }

  rep.reference_values.assign(observables.size(), {});
  rep.effective_values.assign(observables.size(), {});
  rep.max_deviation.assign(observables.size(), 0.0);
  if (full) rep.max_excited_population = 0.0;
  QuantumState eff = spin_initial;
  double now = 0.0;
  for (std::size_t k = 0; k < rep.times.size(); ++k) {
    const double t = rep.times[k];
    eff = evolve_static(H_eff, eff, t - now, opt.settings);
    now = t;
    const QuantumState ref(sp, ref_states[k]);
    for (std::size_t o = 0; o < observables.size(); ++o) {
      const double x = expectation(ops_ref[o], ref).real() / ref.norm_squared();
      const double y = expectation(ops_eff[o], eff).real();
      rep.reference_values[o].push_back(x);
      rep.effective_values[o].push_back(y);
      rep.max_deviation[o] = std::max(rep.max_deviation[o], std::abs(x - y));
    }
    rep.max_photon_population = std::max(rep.max_photon_population, expectation(photons, ref).real() / ref.norm_squared());
    if (full) rep.max_excited_population = std::max(*rep.max_excited_population, expectation(excited, ref).real() / ref.norm_squared());
  }
  return rep;
}

}  // namespace cavspin
