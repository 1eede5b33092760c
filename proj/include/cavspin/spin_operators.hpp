#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hilbert_space.hpp"
#include "sparse_operator.hpp"
#include "types.hpp"

namespace cavspin {

/// Atomic levels; the numeric value is the local basis index.
enum class Level : int { a = 0, b = 1, e = 2 };

/// Local basis of a single atom.
///  spin_updown: {|up>, |down>} (rotated basis, up = 0)
///  ground_ab:   {|a>, |b>}
///  three_level: {|a>, |b>, |e>}
enum class AtomBasis { spin_updown, ground_ab, three_level };

inline int atom_levels(AtomBasis basis) { return basis == AtomBasis::three_level ? 3 : 2; }

struct SpinMatrices {
  SparseOperator sz;
  SparseOperator splus;
  SparseOperator sminus;

  SparseOperator sx() const { return 0.5 * (splus + sminus); }
  SparseOperator sy() const { return Complex(0.0, -0.5) * (splus - sminus); }
};

/// Spin-s matrices (s = two_s / 2) in the Sz eigenbasis ordered m = s, s-1, ..., -s.
inline SpinMatrices spin_matrices(int two_s) {
  if (two_s < 1) throw std::invalid_argument("spin_matrices: two_s must be >= 1 (got " + std::to_string(two_s) + ")");
  const int d = two_s + 1;
  const double s = 0.5 * two_s;
  const auto space = HilbertSpace::single(d);
  std::vector<Triplet> z, p;
  for (int i = 0; i < d; ++i) {
    const double m = s - i;
    if (m != 0.0) z.push_back({i, i, m});
    if (i > 0) p.push_back({i - 1, i, std::sqrt(s * (s + 1) - m * (m + 1))});
  }
  SparseOperator sp(space, p);
  return {SparseOperator(space, z, true), sp, sp.adjoint()};
}

/// Truncated bosonic lowering operator on {|0>, ..., |n_max>}.
inline SparseOperator annihilation(int n_max) {
  if (n_max < 1) throw std::invalid_argument("annihilation: n_max must be >= 1");
  std::vector<Triplet> t;
  for (int n = 1; n <= n_max; ++n) t.push_back({n - 1, n, std::sqrt(static_cast<double>(n))});
  return SparseOperator(HilbertSpace::single(n_max + 1), t);
}

/// Sum over M atoms of a single-atom operator, on the space of M atoms with the
/// single-atom dimension.
inline SparseOperator collective_sum(const SparseOperator& single_atom, int M) {
  if (M < 1) throw std::invalid_argument("collective_sum: M must be >= 1");
  const HilbertSpace space(std::vector<int>(static_cast<std::size_t>(M), static_cast<int>(single_atom.dim())));
  SparseOperator total = SparseOperator::zero(space);
  for (int k = 0; k < M; ++k) total += embed(single_atom, k, space);
  return total;
}

/// Lambda^{xy} = sum_k (|x><y|)_k on M three-level atoms (dimension 3^M).
inline SparseOperator collective_transition(Level x, Level y, int M) {
  if (M < 1) throw std::invalid_argument("collective_transition: M must be >= 1");
  const std::vector<Triplet> t{{static_cast<Index>(x), static_cast<Index>(y), 1.0}};
  return collective_sum(SparseOperator(HilbertSpace::single(3), t, x == y), M);
}

struct CollectiveSpin {
  SparseOperator sz;
  SparseOperator splus;
  SparseOperator sminus;
  /// S^2 = Sz^2 + (S+S- + S-S+)/2
  SparseOperator s2;
};

namespace detail {
inline SparseOperator total_spin_squared(const SparseOperator& sz, const SparseOperator& sp, const SparseOperator& sm) {
  SparseOperator s2 = sz * sz + 0.5 * (sp * sm + sm * sp);
  return SparseOperator(s2.space(), s2.matrix(), true);
}
}  // namespace detail

/// Columns are the images of |up>, |down> in the given atom basis.
inline DenseMatrix atom_frame(AtomBasis basis) {
  const double r = 1.0 / std::sqrt(2.0);
  DenseMatrix f = DenseMatrix::Zero(atom_levels(basis), 2);
  if (basis == AtomBasis::spin_updown) {
    f(0, 0) = 1.0;
    f(1, 1) = 1.0;
  } else {
    // |up> = (|a> + |b>)/sqrt2, |down> = (|a> - |b>)/sqrt2
    f(0, 0) = r;
    f(1, 0) = r;
    f(0, 1) = r;
    f(1, 1) = -r;
  }
  return f;
}

/// Single-atom operator given in the {up, down} basis, expressed in `basis`.
inline SparseOperator atom_operator(const DenseMatrix& op_updown, AtomBasis basis) {
  const DenseMatrix f = atom_frame(basis);
  const DenseMatrix m = f * op_updown * f.adjoint();
  const bool herm = (op_updown - op_updown.adjoint()).cwiseAbs().maxCoeff() == 0.0;
  return SparseOperator::from_dense(HilbertSpace::single(atom_levels(basis)), m, herm);
}

/// Collective spin operators of M atoms represented in `basis`.
inline CollectiveSpin atomic_collective_spin(int M, AtomBasis basis) {
  if (M < 1) throw std::invalid_argument("collective spin: M must be >= 1");
  DenseMatrix sz(2, 2), sp(2, 2);
  sz << 0.5, 0.0, 0.0, -0.5;
  sp << 0.0, 1.0, 0.0, 0.0;
  SparseOperator Sz = collective_sum(atom_operator(sz, basis), M);
  SparseOperator Sp = collective_sum(atom_operator(sp, basis), M);
  SparseOperator Sm = Sp.adjoint();
  SparseOperator S2 = detail::total_spin_squared(Sz, Sp, Sm);
  return {std::move(Sz), std::move(Sp), std::move(Sm), std::move(S2)};
}

/// S^Z = sum_k s^z_k and S^± = sum_k s^±_k on M two-level atoms in the
/// {up = 0, down = 1} basis (dimension 2^M).
inline CollectiveSpin collective_spin_ops(int M) { return atomic_collective_spin(M, AtomBasis::spin_updown); }

/// V with columns the normalized Dicke states |S = M/2, m = M/2 - i>, i = 0..M,
/// expressed in the {up, down}^M product basis. Shape 2^M x (M+1).
inline SparseMatrix symmetric_embedding(int M) {
  if (M < 1) throw std::invalid_argument("symmetric_embedding: M must be >= 1");
  if (M > 30) throw std::invalid_argument("symmetric_embedding: M too large");
  const Index rows = Index{1} << M;
  std::vector<double> binom(static_cast<std::size_t>(M) + 1, 1.0);
  for (int i = 1; i <= M; ++i) binom[static_cast<std::size_t>(i)] = binom[static_cast<std::size_t>(i) - 1] * (M - i + 1) / i;
  std::vector<Eigen::Triplet<Complex>> t;
  for (Index r = 0; r < rows; ++r) {
    const int downs = __builtin_popcountll(static_cast<unsigned long long>(r));
    t.emplace_back(static_cast<int>(r), downs, 1.0 / std::sqrt(binom[static_cast<std::size_t>(downs)]));
  }
  SparseMatrix v(rows, M + 1);
  v.setFromTriplets(t.begin(), t.end());
  v.makeCompressed();
  return v;
}

/// Checks Lambda^{dd} = M/2 - S^Z, Lambda^{uu} = M/2 + S^Z, Lambda^{ud} = S^+,
/// Lambda^{du} = S^- to 1e-12, with the Lambda built as sums of level
/// projectors/transitions of the rotated states written in the {a, b} basis
/// and the spin operators built from the per-atom s^z, s^± (also via
/// sum_k s^- s^+ and sum_k s^+ s^-).
inline bool rotated_identities_check(int M) {
  if (M < 1) throw std::invalid_argument("rotated_identities_check: M must be >= 1");
  constexpr double tol = 1e-12;
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::Vector2cd up(r, r), dn(r, -r);  // in the {a, b} basis
  auto lambda = [&](const Eigen::Vector2cd& x, const Eigen::Vector2cd& y) {
    DenseMatrix m = x * y.adjoint();
    return collective_sum(SparseOperator::from_dense(HilbertSpace::single(2), m, x == y), M);
  };
  const CollectiveSpin S = atomic_collective_spin(M, AtomBasis::ground_ab);
  const HilbertSpace space = S.sz.space();
  const SparseOperator id = SparseOperator::identity(space);

  // sum_k s^-_k s^+_k and sum_k s^+_k s^-_k
  DenseMatrix sp(2, 2);
  sp << 0.0, 1.0, 0.0, 0.0;
  const SparseOperator sp1 = atom_operator(sp, AtomBasis::ground_ab);
  const SparseOperator sm1 = sp1.adjoint();
  const SparseOperator dd_from_ladders = collective_sum(sm1 * sp1, M);
  const SparseOperator uu_from_ladders = collective_sum(sp1 * sm1, M);

  const SparseOperator l_dd = lambda(dn, dn), l_uu = lambda(up, up), l_ud = lambda(up, dn), l_du = lambda(dn, up);
  const double half_m = 0.5 * M;
  return l_dd.approx_equal(half_m * id - S.sz, tol) && l_uu.approx_equal(half_m * id + S.sz, tol) &&
         l_ud.approx_equal(S.splus, tol) && l_du.approx_equal(S.sminus, tol) && l_dd.approx_equal(dd_from_ladders, tol) &&
         l_uu.approx_equal(uu_from_ladders, tol);
}

}  // namespace cavspin
