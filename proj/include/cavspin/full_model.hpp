#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "cavity_graph.hpp"
#include "couplings.hpp"
#include "layout.hpp"
#include "physical_params.hpp"
#include "spin_operators.hpp"
#include "time_dependent_operator.hpp"

namespace cavspin {

inline constexpr int kDefaultPhotonCutoff = 2;

namespace detail {

inline void check_model_inputs(const PhysicalParams& p, const CavityGraph& graph, int n_max) {
  p.validate();
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1 (got " + std::to_string(n_max) + ")");
  if (graph.n_cavities() < 1) throw std::invalid_argument("graph has no cavities");
}

/// -J sum_<j,k> (a_j^dag a_k + a_j a_k^dag)
inline SparseOperator hopping(const CavityLayout& layout, const CavityGraph& graph, double J, const HilbertSpace& sp) {
  SparseOperator h = SparseOperator::zero(sp);
  if (J == 0.0) return h;
  const SparseOperator a = annihilation(layout.n_max);
  for (const auto& [j, k] : graph.edges()) {
    const SparseOperator aj = layout.on_photon(a, j, sp), ak = layout.on_photon(a, k, sp);
    const SparseOperator hop = aj.adjoint() * ak + aj * ak.adjoint();
    h = h + (-J) * SparseOperator(sp, hop.matrix(), true);
  }
  return h;
}

inline SparseOperator as_hermitian(const SparseOperator& x) { return SparseOperator(x.space(), x.matrix(), true); }

}  // namespace detail

inline CavityLayout full_layout(const PhysicalParams& p, const CavityGraph& g, int n_max) {
  return {g.n_cavities(), p.M, AtomBasis::three_level, n_max};
}
inline CavityLayout eliminated_layout(const PhysicalParams& p, const CavityGraph& g, int n_max) {
  return {g.n_cavities(), p.M, AtomBasis::ground_ab, n_max};
}
inline CavityLayout intermediate_layout(const PhysicalParams& p, const CavityGraph& g, int n_max) {
  return {g.n_cavities(), p.M, AtomBasis::spin_updown, n_max};
}

/// Rotating-frame Hamiltonian of three-level atoms coupled to the cavity
/// array:
///   e^{i Delta1 t} (Omega1 L^{eb} + g1 L^{ea} a) + e^{i Delta2 t} (Omega2 L^{ea} + g2 L^{eb} a) + h.c.
///   + (omega/2)(L^{ab} + L^{ba}) - J sum_<j,k> (a_j^dag a_k + h.c.)
/// per cavity. Omega3 / Omega4 add rotating terms at Delta1 + delta / Delta2 + delta
/// on the same transitions as Omega1 / Omega2, and mu_z adds the static Stark
/// term -mu_z L^{bb} (mu_z must be real here). Terms with zero coefficient are
/// not added.
inline TimeDependentOperator build_full_hamiltonian(const PhysicalParams& p, const CavityGraph& graph,
                                                    int n_max = kDefaultPhotonCutoff) {
  detail::check_model_inputs(p, graph, n_max);
  if (p.mu_z.imag() != 0.0) throw std::invalid_argument("build_full_hamiltonian: mu_z must be real for the Stark term");
  const CavityLayout layout = full_layout(p, graph, n_max);
  const HilbertSpace sp = layout.space();
  const int M = p.M;
  const SparseOperator a = annihilation(n_max);
  const SparseOperator Lab = collective_transition(Level::a, Level::b, M);
  const SparseOperator Lba = collective_transition(Level::b, Level::a, M);
  const SparseOperator Lea = collective_transition(Level::e, Level::a, M);
  const SparseOperator Leb = collective_transition(Level::e, Level::b, M);
  const SparseOperator Lbb = collective_transition(Level::b, Level::b, M);

  SparseOperator stat = detail::hopping(layout, graph, p.J, sp);
  SparseOperator r1 = SparseOperator::zero(sp), r2 = r1, r3 = r1, r4 = r1;
  for (int j = 0; j < layout.n_cavities; ++j) {
    const SparseOperator aj = layout.on_photon(a, j, sp);
    const SparseOperator ea = layout.on_atoms(Lea, j, sp), eb = layout.on_atoms(Leb, j, sp);
    if (p.omega != 0.0)
      stat = stat + (0.5 * p.omega) * layout.on_atoms(detail::as_hermitian(Lab + Lba), j, sp);
    if (p.mu_z.real() != 0.0) stat = stat + (-p.mu_z.real()) * layout.on_atoms(Lbb, j, sp);
    if (p.Omega1 != Complex{}) r1 = r1 + p.Omega1 * eb;
    if (p.g1 != 0.0) r1 = r1 + p.g1 * (ea * aj);
    if (p.Omega2 != Complex{}) r2 = r2 + p.Omega2 * ea;
    if (p.g2 != 0.0) r2 = r2 + p.g2 * (eb * aj);
    if (p.Omega3 != Complex{}) r3 = r3 + p.Omega3 * eb;
    if (p.Omega4 != Complex{}) r4 = r4 + p.Omega4 * ea;
  }
  TimeDependentOperator H(stat);
  H.add_rotating(r1, p.Delta1);
  H.add_rotating(r2, p.Delta2);
  if (r3.nnz() > 0) H.add_rotating(r3, p.Delta1 + p.delta);
  if (r4.nnz() > 0) H.add_rotating(r4, p.Delta2 + p.delta);
  return H;
}

/// Relative mismatch |g1^2/Delta1 - g2^2/Delta2| / max(|g1^2/Delta1|, |g2^2/Delta2|).
inline double stark_mismatch(const PhysicalParams& p) {
  const double s1 = p.g1 * p.g1 / p.Delta1, s2 = p.g2 * p.g2 / p.Delta2;
  const double scale = std::max(std::abs(s1), std::abs(s2));
  return scale == 0.0 ? 0.0 : std::abs(s1 - s2) / scale;
}

/// Hamiltonian after removing the excited level (ground levels {a, b} per atom):
///   -(g1^2/Delta1)(L^{aa} + L^{bb}) a^dag a - [(mu1 L^{ba} + mu2 L^{ab}) a + h.c.]
///   + (omega/2)(L^{ab} + L^{ba}) - J sum_<j,k> (a_j^dag a_k + h.c.)
/// Static. Warns when g1^2/Delta1 and g2^2/Delta2 differ by more than 1e-6
/// relative, since a single Stark coefficient is used.
inline TimeDependentOperator build_eliminated_hamiltonian(const PhysicalParams& p, const CavityGraph& graph,
                                                          int n_max = kDefaultPhotonCutoff) {
  detail::check_model_inputs(p, graph, n_max);
  if (p.has_extended_lasers())
    throw std::invalid_argument("build_eliminated_hamiltonian: only the Omega1/Omega2 laser configuration is supported");
  if (const double mis = stark_mismatch(p); mis > 1e-6)
    warn("eliminated Hamiltonian: g1^2/Delta1 and g2^2/Delta2 differ by " + std::to_string(mis) +
         " (relative); using g1^2/Delta1 for both levels");
  const CavityLayout layout = eliminated_layout(p, graph, n_max);
  const HilbertSpace sp = layout.space();
  const int M = p.M;
  const double stark = p.g1 * p.g1 / p.Delta1;
  const Complex mu1 = p.g1 * std::conj(p.Omega1) / p.Delta1;
  const Complex mu2 = p.g2 * std::conj(p.Omega2) / p.Delta2;

  auto single = [](int r, int c) {
    return SparseOperator(HilbertSpace::single(2), std::vector<Triplet>{{r, c, 1.0}}, r == c);
  };
  const SparseOperator Lab = collective_sum(single(0, 1), M), Lba = collective_sum(single(1, 0), M);
  const SparseOperator Lground = collective_sum(SparseOperator::identity(HilbertSpace::single(2)), M);
  const SparseOperator a = annihilation(n_max);
  const SparseOperator n_op = detail::as_hermitian(a.adjoint() * a);

  SparseOperator h = detail::hopping(layout, graph, p.J, sp);
  for (int j = 0; j < layout.n_cavities; ++j) {
    const SparseOperator aj = layout.on_photon(a, j, sp);
    if (stark != 0.0)
      h = h + (-stark) * detail::as_hermitian(layout.on_atoms(Lground, j, sp) * layout.on_photon(n_op, j, sp));
    const SparseOperator drive = (mu1 * layout.on_atoms(Lba, j, sp) + mu2 * layout.on_atoms(Lab, j, sp)) * aj;
    if (drive.nnz() > 0) h = h - detail::as_hermitian(drive + drive.adjoint());
    if (p.omega != 0.0) h = h + (0.5 * p.omega) * layout.on_atoms(detail::as_hermitian(Lab + Lba), j, sp);
  }
  return TimeDependentOperator(h);
}

/// Intermediate Hamiltonian on collective spins (rotated {up, down} basis) and
/// photons, in the frame rotating with the Stark shift and the Raman splitting:
///   -sum_j [{e^{i lambda t} mu12+ S^Z + e^{i(lambda+omega)t} (mu12-/2) S^+
///            - e^{i(lambda-omega)t} (mu12-/2) S^-} a_j + h.c.] - J hopping.
/// The extended lasers add the same terms with lambda -> lambda - delta and
/// mu12 -> mu34, plus sum_j (mu_z/2)(e^{i omega t} S^+ + h.c.).
inline TimeDependentOperator build_intermediate_hamiltonian(const PhysicalParams& p, const CavityGraph& graph,
                                                            int n_max = kDefaultPhotonCutoff) {
  detail::check_model_inputs(p, graph, n_max);
  if (p.omega == 0.0) throw RegimeError("build_intermediate_hamiltonian: omega = 0");
  const DerivedCouplings c = derive_couplings(p);
  const CavityLayout layout = intermediate_layout(p, graph, n_max);
  const HilbertSpace sp = layout.space();
  const SparseOperator a = annihilation(n_max);
  const CollectiveSpin S = collective_spin_ops(p.M);

  TimeDependentOperator H(detail::hopping(layout, graph, p.J, sp));
  auto add_group = [&](double lam, Complex mu_plus, Complex mu_minus) {
    SparseOperator rz = SparseOperator::zero(sp), rp = rz, rm = rz;
    for (int j = 0; j < layout.n_cavities; ++j) {
      const SparseOperator aj = layout.on_photon(a, j, sp);
      if (mu_plus != Complex{}) rz = rz + (-mu_plus) * (layout.on_atoms(S.sz, j, sp) * aj);
      if (mu_minus != Complex{}) {
        rp = rp + (-0.5 * mu_minus) * (layout.on_atoms(S.splus, j, sp) * aj);
        rm = rm + (0.5 * mu_minus) * (layout.on_atoms(S.sminus, j, sp) * aj);
      }
    }
    H.add_rotating(rz, lam);
    H.add_rotating(rp, lam + c.omega);
    H.add_rotating(rm, lam - c.omega);
  };
  add_group(c.lambda, c.mu12_plus, c.mu12_minus);
  if (c.extended) {
    add_group(c.lambda_minus_delta, c.mu34_plus, c.mu34_minus);
    if (c.mu_z != Complex{}) {
      SparseOperator rz = SparseOperator::zero(sp);
      for (int j = 0; j < layout.n_cavities; ++j) rz = rz + (0.5 * c.mu_z) * layout.on_atoms(S.splus, j, sp);
      H.add_rotating(rz, c.omega);
    }
  }
  return H;
}

struct DecayRates {
  double gamma_a = 0.0;
  double gamma_b = 0.0;
};

/// gamma_A' = gamma (|Omega1|^2/Delta1^2 + |Omega3|^2/(Delta1+delta)^2),
/// gamma_B' = gamma (|Omega2|^2/Delta2^2 + |Omega4|^2/(Delta2+delta)^2).
inline DecayRates effective_decay_rates(const PhysicalParams& p) {
  p.validate();
  if (p.Delta1 + p.delta == 0.0 || p.Delta2 + p.delta == 0.0)
    throw std::invalid_argument("effective_decay_rates: Delta_j + delta must be nonzero");
  auto sq = [](double x) { return x * x; };
  DecayRates r;
  r.gamma_a = p.gamma * (std::norm(p.Omega1) / sq(p.Delta1) + std::norm(p.Omega3) / sq(p.Delta1 + p.delta));
  r.gamma_b = p.gamma * (std::norm(p.Omega2) / sq(p.Delta2) + std::norm(p.Omega4) / sq(p.Delta2 + p.delta));
  return r;
}

namespace detail {
template <class Layout>
SparseOperator conditional(const SparseOperator& H, const Layout& layout, int n_groups, DecayRates rates) {
  if (!(rates.gamma_a >= 0.0) || !(rates.gamma_b >= 0.0))
    throw std::invalid_argument("build_conditional_hamiltonian: decay rates must be >= 0");
  require_same_space(H.space(), layout.space(), "build_conditional_hamiltonian");
  SparseOperator damping = SparseOperator::zero(H.space());
  for (int j = 0; j < n_groups; ++j) {
    if (rates.gamma_a != 0.0) damping = damping + rates.gamma_a * level_population(layout, Level::a, j);
    if (rates.gamma_b != 0.0) damping = damping + rates.gamma_b * level_population(layout, Level::b, j);
  }
  return H + Complex(0.0, -0.5) * damping;
}
}  // namespace detail

/// H_C = H - (i/2) sum_j (gamma_A' L_j^{aa} + gamma_B' L_j^{bb}) for H on a
/// ground-level atomic space ({a,b} or rotated {up,down} atoms).
inline SparseOperator build_conditional_hamiltonian(const SparseOperator& H, const CavityLayout& layout, DecayRates rates) {
  if (layout.basis == AtomBasis::three_level)
    throw std::invalid_argument("build_conditional_hamiltonian: expects ground-level atoms, not three-level atoms");
  return detail::conditional(H, layout, layout.n_cavities, rates);
}

/// Same on the effective spin space, with L^{aa} = M/2 + S^x, L^{bb} = M/2 - S^x.
inline SparseOperator build_conditional_hamiltonian(const SparseOperator& H, const SpinLayout& layout, DecayRates rates) {
  return detail::conditional(H, layout, layout.n_sites, rates);
}

}  // namespace cavspin
