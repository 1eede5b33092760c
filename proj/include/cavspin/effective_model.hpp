#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cavity_graph.hpp"
#include "couplings.hpp"
#include "layout.hpp"
#include "quantum_state.hpp"
#include "spin_operators.hpp"

namespace cavspin {

/// Coefficients of
///   H = sum_j [A S_j^2 + B (S_j^Z)^2 + C S_j^Z] - sum_<j,k> [D (S^X S^X + S^Y S^Y) + E S^Z S^Z].
struct SpinModelParams {
  double A = 0.0, B = 0.0, C = 0.0, D = 0.0, E = 0.0;
  int two_s = 1;
  CavityGraph graph;
  /// Per-site replacement for C (staggered fields for adiabatic schedules).
  std::optional<std::vector<double>> site_c;
  /// Set when this Hamiltonian is -1 times a target whose ground state is
  /// sought; the target ground state is then the highest state here.
  bool inverted = false;

  double c_at(int site) const { return site_c ? site_c->at(static_cast<std::size_t>(site)) : C; }
  SpinLayout layout() const { return {graph.n_cavities(), two_s}; }

  void validate() const {
    if (two_s < 1) throw std::invalid_argument("SpinModelParams: two_s must be >= 1");
    for (double v : {A, B, C, D, E})
      if (!std::isfinite(v)) throw std::invalid_argument("SpinModelParams: non-finite coefficient");
    if (site_c && static_cast<int>(site_c->size()) != graph.n_cavities())
      throw std::invalid_argument("SpinModelParams: site_c needs one entry per site");
  }
};

/// Coefficients for the Omega1/Omega2 configuration:
///   A = lambda/(lambda^2-omega^2) |mu12-|^2/2,  B = |mu12+|^2/lambda - A,
///   C = -omega/(lambda^2-omega^2) |mu12-|^2/2,
///   D = (J/2)(|mu12-/(lambda+omega)|^2 + |mu12-/(lambda-omega)|^2),
///   E = 2J |mu12+/lambda|^2.
inline SpinModelParams couplings_to_spin_params_simple(const DerivedCouplings& c, int M, const CavityGraph& graph) {
  if (c.mu34_plus != Complex{} || c.mu34_minus != Complex{} || c.mu_z != Complex{})
    throw std::invalid_argument("couplings_to_spin_params_simple: extended couplings present; use the full map");
  if (M < 1) throw std::invalid_argument("couplings_to_spin_params_simple: M must be >= 1");
  const double l = c.lambda, w = c.omega;
  if (l == 0.0 || l == w || l == -w) throw RegimeError("couplings_to_spin_params_simple: lambda must differ from 0 and +-omega");
  const double m2 = std::norm(c.mu12_minus), p2 = std::norm(c.mu12_plus);
  const double den = l * l - w * w;
  SpinModelParams s;
  s.A = l / den * m2 / 2.0;
  s.B = p2 / l - s.A;
  s.C = -w / den * m2 / 2.0;
  s.D = c.J / 2.0 * (m2 / ((l + w) * (l + w)) + m2 / ((l - w) * (l - w)));
  s.E = 2.0 * c.J * p2 / (l * l);
  s.two_s = M;
  s.graph = graph;
  return s;
}

/// True when lambda = 3 omega and lambda - delta = -6 omega within `rel_tol`.
inline bool is_special_detuning(const DerivedCouplings& c, double rel_tol = 1e-9) {
  const double scale = std::max(std::abs(c.lambda), 1e-300);
  return c.omega > 0.0 && std::abs(c.lambda - 3.0 * c.omega) <= rel_tol * scale &&
         std::abs(c.lambda_minus_delta + 6.0 * c.omega) <= rel_tol * scale;
}

/// Coefficients with the extended lasers, for omega > 0, lambda = 3 omega,
/// lambda - delta = -6 omega:
///   A = (9/16 |mu12-|^2 - 9/35 |mu34-|^2) / lambda
///   B = (|mu12+|^2 - 9/16 |mu12-|^2 - 1/2 |mu34+|^2 + 9/35 |mu34-|^2) / lambda
///   C = (3/2 |mu_z|^2 - 3/16 |mu12-|^2 - 3/70 |mu34-|^2) / lambda
///   D = J (45/32 |mu12-|^2 + 333/1225 |mu34-|^2) / lambda^2
///   E = J (2 |mu12+|^2 + 1/2 |mu34+|^2) / lambda^2
inline SpinModelParams couplings_to_spin_params_full(const DerivedCouplings& c, int M, const CavityGraph& graph) {
  if (!is_special_detuning(c))
    throw std::invalid_argument(
        "couplings_to_spin_params_full: coefficients are only available for omega > 0, lambda = 3 omega, "
        "lambda - delta = -6 omega (got lambda = " +
        std::to_string(c.lambda) + ", omega = " + std::to_string(c.omega) +
        ", lambda - delta = " + std::to_string(c.lambda_minus_delta) + ")");
  if (M < 1) throw std::invalid_argument("couplings_to_spin_params_full: M must be >= 1");
  const double l = c.lambda;
  const double m12 = std::norm(c.mu12_minus), p12 = std::norm(c.mu12_plus);
  const double m34 = std::norm(c.mu34_minus), p34 = std::norm(c.mu34_plus);
  const double mz = std::norm(c.mu_z);
  SpinModelParams s;
  s.A = (9.0 / 16.0 * m12 - 9.0 / 35.0 * m34) / l;
  s.B = (p12 - 9.0 / 16.0 * m12 - 0.5 * p34 + 9.0 / 35.0 * m34) / l;
  s.C = (1.5 * mz - 3.0 / 16.0 * m12 - 3.0 / 70.0 * m34) / l;
  s.D = c.J / (l * l) * (45.0 / 32.0 * m12 + 333.0 / 1225.0 * m34);
  s.E = c.J / (l * l) * (2.0 * p12 + 0.5 * p34);
  s.two_s = M;
  s.graph = graph;
  return s;
}

/// Simple map when no extended lasers are on, full map otherwise.
inline SpinModelParams map_to_spin_params(const DerivedCouplings& c, int M, const CavityGraph& graph) {
  return c.extended ? couplings_to_spin_params_full(c, M, graph) : couplings_to_spin_params_simple(c, M, graph);
}

/// Spin Hamiltonian on (two_s+1)^N. The A term is the constant A S(S+1) per
/// site, since every site carries a fixed spin S = two_s/2.
inline SparseOperator build_spin_hamiltonian(const SpinModelParams& sp) {
  sp.validate();
  const SpinLayout layout = sp.layout();
  const HilbertSpace space = layout.space();
  const SpinMatrices s = spin_matrices(sp.two_s);
  const double S = 0.5 * sp.two_s;
  const int n = layout.n_sites;

  std::vector<SparseOperator> sz, spl, smi;
  for (int j = 0; j < n; ++j) {
    sz.push_back(embed(s.sz, j, space));
    spl.push_back(embed(s.splus, j, space));
    smi.push_back(embed(s.sminus, j, space));
  }
  SparseMatrix h(space.total_dim(), space.total_dim());
  if (sp.A != 0.0) {
    SparseMatrix id(space.total_dim(), space.total_dim());
    id.setIdentity();
    h += Complex(sp.A * S * (S + 1) * n) * id;
  }
  for (int j = 0; j < n; ++j) {
    const SparseMatrix& z = sz[static_cast<std::size_t>(j)].matrix();
    if (sp.B != 0.0) h += Complex(sp.B) * SparseMatrix(z * z);
    if (const double cj = sp.c_at(j); cj != 0.0) h += Complex(cj) * z;
  }
  for (const auto& [j, k] : sp.graph.edges()) {
    const auto uj = static_cast<std::size_t>(j), uk = static_cast<std::size_t>(k);
    if (sp.D != 0.0) {
      // S^X S^X + S^Y S^Y = (S^+ S^- + S^- S^+)/2
      SparseMatrix xy = spl[uj].matrix() * smi[uk].matrix();
      xy += SparseMatrix(smi[uj].matrix() * spl[uk].matrix());
      h += Complex(-0.5 * sp.D) * xy;
    }
    if (sp.E != 0.0) h += Complex(-sp.E) * SparseMatrix(sz[uj].matrix() * sz[uk].matrix());
  }
  return SparseOperator(space, std::move(h), true);
}

/// Realizable parameters whose Hamiltonian is -1 times the target: every
/// coefficient (and per-site field) negated and the `inverted` flag toggled,
/// so the target ground state is the highest state of the returned model.
/// Applying the map twice returns the input.
inline SpinModelParams afm_equivalent_params(const SpinModelParams& target) {
  SpinModelParams r = target;
  r.A = -target.A;
  r.B = -target.B;
  r.C = -target.C;
  r.D = -target.D;
  r.E = -target.E;
  if (r.site_c)
    for (double& c : *r.site_c) c = -c;
  r.inverted = !target.inverted;
  return r;
}

/// e^{-N M gamma' t} <psi|O|psi> + (1 - e^{-N M gamma' t}) Tr(O)/dim: the
/// observable in the depolarizing mixture of the coherent state and the fully
/// mixed state.
inline double depolarized_expectation(const SparseOperator& obs, const QuantumState& psi, double t, int N, int M,
                                      double gamma_prime) {
  if (!(gamma_prime >= 0.0)) throw std::invalid_argument("depolarized_expectation: gamma' must be >= 0");
  if (!obs.hermitian()) throw std::invalid_argument("depolarized_expectation: observable must be Hermitian");
  const double w = std::exp(-static_cast<double>(N) * M * gamma_prime * t);
  const double coherent = expectation(obs, psi).real();
  const double mixed = obs.matrix().diagonal().sum().real() / static_cast<double>(obs.dim());
  return w * coherent + (1.0 - w) * mixed;
}

}  // namespace cavspin
