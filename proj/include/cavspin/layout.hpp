#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hilbert_space.hpp"
#include "sparse_operator.hpp"
#include "spin_operators.hpp"

namespace cavspin {

/// Site layout of an atomic cavity array: for each cavity, its M atoms
/// followed by its photon mode (omitted when n_max == 0), cavities ascending.
struct CavityLayout {
  int n_cavities = 1;
  int atoms_per_cavity = 1;
  AtomBasis basis = AtomBasis::three_level;
  int n_max = 2;

  bool has_photons() const { return n_max > 0; }
  int sites_per_cavity() const { return atoms_per_cavity + (has_photons() ? 1 : 0); }
  int first_atom_site(int cavity) const { return check(cavity) * sites_per_cavity(); }
  int atom_site(int cavity, int k) const { return first_atom_site(cavity) + k; }
  int photon_site(int cavity) const {
    if (!has_photons()) throw std::logic_error("CavityLayout: no photon mode");
    return first_atom_site(cavity) + atoms_per_cavity;
  }

  HilbertSpace space() const {
    if (n_cavities < 1 || atoms_per_cavity < 1 || n_max < 0) throw std::invalid_argument("CavityLayout: invalid sizes");
    std::vector<int> d;
    for (int j = 0; j < n_cavities; ++j) {
      for (int k = 0; k < atoms_per_cavity; ++k) d.push_back(atom_levels(basis));
      if (has_photons()) d.push_back(n_max + 1);
    }
    return HilbertSpace(std::move(d));
  }

  /// Operator on the M-atom block of `cavity` (dimension levels^M) embedded.
  SparseOperator on_atoms(const SparseOperator& block_op, int cavity, const HilbertSpace& sp) const {
    return embed_block(block_op, first_atom_site(cavity), atoms_per_cavity, sp);
  }
  SparseOperator on_photon(const SparseOperator& op, int cavity, const HilbertSpace& sp) const {
    return embed(op, photon_site(cavity), sp);
  }

 private:
  int check(int cavity) const {
    if (cavity < 0 || cavity >= n_cavities) throw std::out_of_range("CavityLayout: cavity index " + std::to_string(cavity));
    return cavity;
  }
};

/// One spin-S site per cavity (effective model space).
struct SpinLayout {
  int n_sites = 1;
  int two_s = 1;

  HilbertSpace space() const {
    if (n_sites < 1 || two_s < 1) throw std::invalid_argument("SpinLayout: invalid sizes");
    return HilbertSpace(std::vector<int>(static_cast<std::size_t>(n_sites), two_s + 1));
  }
};

/// Per-site spin operators (Sz, S+, S-, S^2) embedded into the full space.
inline CollectiveSpin site_spin(const CavityLayout& layout, int cavity) {
  const HilbertSpace sp = layout.space();
  const CollectiveSpin c = atomic_collective_spin(layout.atoms_per_cavity, layout.basis);
  return {layout.on_atoms(c.sz, cavity, sp), layout.on_atoms(c.splus, cavity, sp), layout.on_atoms(c.sminus, cavity, sp),
          layout.on_atoms(c.s2, cavity, sp)};
}

inline CollectiveSpin site_spin(const SpinLayout& layout, int site) {
  if (site < 0 || site >= layout.n_sites) throw std::out_of_range("SpinLayout: site index " + std::to_string(site));
  const HilbertSpace sp = layout.space();
  const SpinMatrices s = spin_matrices(layout.two_s);
  SparseOperator sz = embed(s.sz, site, sp), spl = embed(s.splus, site, sp), smi = embed(s.sminus, site, sp);
  SparseOperator s2 = detail::total_spin_squared(sz, spl, smi);
  return {std::move(sz), std::move(spl), std::move(smi), std::move(s2)};
}

/// Single-atom projector |x><x| for a ground level x in {a, b}, in `basis`.
inline SparseOperator level_projector(Level x, AtomBasis basis) {
  if (x == Level::e && basis != AtomBasis::three_level) throw std::invalid_argument("level_projector: |e> not in basis");
  const int n = atom_levels(basis);
  DenseMatrix p = DenseMatrix::Zero(n, n);
  if (basis == AtomBasis::spin_updown) {
    // |a> = (|up> + |down>)/sqrt2, |b> = (|up> - |down>)/sqrt2
    const double sgn = x == Level::a ? 1.0 : -1.0;
    p << 0.5, 0.5 * sgn, 0.5 * sgn, 0.5;
  } else {
    p(static_cast<int>(x), static_cast<int>(x)) = 1.0;
  }
  return SparseOperator::from_dense(HilbertSpace::single(n), p, true);
}

/// Lambda^{xx} of one cavity (x in {a, b}), embedded.
inline SparseOperator level_population(const CavityLayout& layout, Level x, int cavity) {
  const HilbertSpace sp = layout.space();
  return layout.on_atoms(collective_sum(level_projector(x, layout.basis), layout.atoms_per_cavity), cavity, sp);
}

/// Lambda^{aa} = M/2 + S^x and Lambda^{bb} = M/2 - S^x on a spin-S = M/2 site.
inline SparseOperator level_population(const SpinLayout& layout, Level x, int site) {
  if (x == Level::e) throw std::invalid_argument("level_population: |e> not represented in the spin layout");
  const CollectiveSpin s = site_spin(layout, site);
  const SparseOperator sx = 0.5 * (s.splus + s.sminus);
  const SparseOperator half_m = (0.5 * layout.two_s) * SparseOperator::identity(s.sz.space());
  return x == Level::a ? half_m + sx : half_m - sx;
}

}  // namespace cavspin
