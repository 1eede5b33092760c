#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "layout.hpp"
#include "quantum_state.hpp"
#include "sparse_operator.hpp"
#include "spin_operators.hpp"

namespace cavspin {

enum class Which { lowest, highest };

struct SpectrumSlice {
  std::vector<double> eigenvalues;  ///< ascending for lowest, descending for highest
  std::vector<QuantumState> eigenvectors;
  std::vector<double> residuals;  ///< ||H v - lambda v||
};

struct EigenSettings {
  double tol = 1e-10;  ///< residual bound per eigenpair (absolute)
  int krylov_dim = 80;
  int max_restarts = 500;
  std::uint64_t seed = 0x5eed;
};

/// Full spectrum by dense diagonalization (ascending). Reference path for
/// small operators.
inline SpectrumSlice dense_spectrum(const SparseOperator& H, bool with_vectors = true) {
  if (!H.hermitian()) throw std::invalid_argument("dense_spectrum: operator must be Hermitian");
  if (H.dim() > 8192) throw std::invalid_argument("dense_spectrum: dimension too large for dense diagonalization");
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(H.to_dense(), with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  SpectrumSlice s;
  for (Index i = 0; i < H.dim(); ++i) {
    s.eigenvalues.push_back(es.eigenvalues()(i));
    if (with_vectors) {
      QuantumState v(H.space(), es.eigenvectors().col(i));
      s.residuals.push_back((H * v.amplitudes() - es.eigenvalues()(i) * v.amplitudes()).norm());
      s.eigenvectors.push_back(std::move(v));
    }
  }
  return s;
}

namespace detail {

inline void project_out(Vector& v, const std::vector<Vector>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) v.noalias() -= b.dot(v) * b;
}

/// Lowest eigenpair of sign*H in the orthogonal complement of `locked`, by
/// restarted Lanczos with full reorthogonalization.
inline std::pair<double, Vector> lanczos_lowest(const SparseOperator& H, double sign, const std::vector<Vector>& locked,
                                                Vector start, const EigenSettings& s) {
  const Index n = H.dim();
  const Index free_dim = n - static_cast<Index>(locked.size());
  const int m_max = static_cast<int>(std::min<Index>(s.krylov_dim, free_dim));
  DenseMatrix V(n, m_max);
  Vector w(n);
  Vector x = std::move(start);
  double best_res = 0.0;
  for (int restart = 0; restart <= s.max_restarts; ++restart) {
    project_out(x, locked);
    x.normalize();
    V.col(0) = x;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m_max, m_max);
    int m = m_max;
    for (int j = 0; j < m_max; ++j) {
      w.noalias() = sign * (H.matrix() * V.col(j));
      const double alpha = V.col(j).dot(w).real();
      T(j, j) = alpha;
      // full reorthogonalization against the basis and the locked vectors
      for (int pass = 0; pass < 2; ++pass) {
        w.noalias() -= V.leftCols(j + 1) * (V.leftCols(j + 1).adjoint() * w);
        project_out(w, locked);
      }
      if (j + 1 == m_max) break;
      const double b = w.norm();
      if (b <= 1e-14 * std::max(1.0, std::abs(alpha))) {
        m = j + 1;
        break;
      }
      T(j, j + 1) = T(j + 1, j) = b;
      V.col(j + 1) = w / b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(m, m));
    const double theta = es.eigenvalues()(0);
    Vector y = V.leftCols(m) * es.eigenvectors().col(0).cast<Complex>();
    project_out(y, locked);
    y.normalize();
    w.noalias() = sign * (H.matrix() * y);
    const double rq = y.dot(w).real();
    best_res = (w - rq * y).norm();
    if (best_res <= s.tol || (m == free_dim && best_res <= 1e3 * s.tol)) return {sign * rq, y};
    (void)theta;
    x = std::move(y);
  }
  throw ConvergenceError("extremal_eigenpairs: no convergence after " + std::to_string(s.max_restarts) +
                         " restarts (residual " + std::to_string(best_res) + ")");
}

}  // namespace detail

/// k lowest (or highest) eigenpairs by Lanczos with explicit deflation: each
/// converged vector is locked and the next search runs in its orthogonal
/// complement, so degenerate levels come out with their multiplicity.
inline SpectrumSlice extremal_eigenpairs(const SparseOperator& H, int k, Which which = Which::lowest,
                                         const EigenSettings& settings = {}) {
  if (!H.hermitian()) throw std::invalid_argument("extremal_eigenpairs: operator must be Hermitian");
  if (k < 1 || k > H.dim()) throw std::invalid_argument("extremal_eigenpairs: need 1 <= k <= dim");
  const double sign = which == Which::lowest ? 1.0 : -1.0;
  std::mt19937_64 rng(settings.seed);
  std::normal_distribution<double> nd;
  std::vector<Vector> locked;
  SpectrumSlice out;
  for (int i = 0; i < k; ++i) {
    Vector start(H.dim());
    for (Index r = 0; r < start.size(); ++r) start(r) = Complex(nd(rng), nd(rng));
    auto [ev, vec] = detail::lanczos_lowest(H, sign, locked, std::move(start), settings);
    out.eigenvalues.push_back(ev);
    out.residuals.push_back((H * vec - ev * vec).norm());
    locked.push_back(vec);
    out.eigenvectors.emplace_back(H.space(), std::move(vec));
  }
  // Deflation order can differ from spectral order by round-off within clusters.
  std::vector<std::size_t> idx(out.eigenvalues.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) {
    return which == Which::lowest ? out.eigenvalues[a] < out.eigenvalues[b] : out.eigenvalues[a] > out.eigenvalues[b];
  });
  SpectrumSlice sorted;
  for (auto i : idx) {
    sorted.eigenvalues.push_back(out.eigenvalues[i]);
    sorted.eigenvectors.push_back(out.eigenvectors[i]);
    sorted.residuals.push_back(out.residuals[i]);
  }
  return sorted;
}

struct GapResult {
  double gap = 0.0;
  double ground_energy = 0.0;
  double first_excited_energy = 0.0;
  int ground_degeneracy = 1;
  double degeneracy_tol = 0.0;
};

/// E1 - E0 with E1 the lowest eigenvalue above E0 + degeneracy_tol. A
/// negative degeneracy_tol selects the default 1e-8 * (E_max - E0).
inline GapResult excitation_gap(const SparseOperator& H, double degeneracy_tol = -1.0, const EigenSettings& settings = {},
                                int max_levels = 64) {
  if (H.dim() < 2) throw std::invalid_argument("excitation_gap: dimension must be >= 2");
  GapResult g;
  const SpectrumSlice top = extremal_eigenpairs(H, 1, Which::highest, settings);
  // Build the lowest levels one at a time, reusing locked vectors.
  const double sign = 1.0;
  std::mt19937_64 rng(settings.seed);
  std::normal_distribution<double> nd;
  std::vector<Vector> locked;
  std::vector<double> levels;
  double tol = degeneracy_tol;
  const int cap = static_cast<int>(std::min<Index>(max_levels, H.dim()));
  for (int i = 0; i < cap; ++i) {
    Vector start(H.dim());
    for (Index r = 0; r < start.size(); ++r) start(r) = Complex(nd(rng), nd(rng));
    auto [ev, vec] = detail::lanczos_lowest(H, sign, locked, std::move(start), settings);
    if (i == 0) {
      g.ground_energy = ev;
      if (tol < 0.0) tol = 1e-8 * std::max(top.eigenvalues[0] - ev, 1e-300);
      g.degeneracy_tol = tol;
    } else {
      const double e0 = *std::min_element(levels.begin(), levels.end());
      g.ground_energy = std::min(e0, ev);
      if (ev > g.ground_energy + tol) {
        g.first_excited_energy = ev;
        g.gap = ev - g.ground_energy;
        g.ground_degeneracy = static_cast<int>(
            std::count_if(levels.begin(), levels.end(), [&](double e) { return e <= g.ground_energy + tol; }));
        return g;
      }
    }
    levels.push_back(ev);
    locked.push_back(std::move(vec));
  }
  throw ConvergenceError("excitation_gap: no level above the ground multiplet within " + std::to_string(cap) + " levels");
}

enum class Axis { X, Y, Z };

struct Correlation {
  double raw = 0.0;        ///< <S_i^a S_j^a>
  double connected = 0.0;  ///< <S_i^a S_j^a> - <S_i^a><S_j^a>
};

namespace detail {
inline SparseOperator spin_component(const QuantumState& psi, int site, Axis axis) {
  const HilbertSpace& sp = psi.space();
  if (site < 0 || site >= sp.n_sites()) throw std::out_of_range("spin site index " + std::to_string(site) + " out of range");
  const SpinMatrices s = spin_matrices(sp.local_dim(site) - 1);
  switch (axis) {
    case Axis::X: return embed(s.sx(), site, sp);
    case Axis::Y: return embed(s.sy(), site, sp);
    default: return embed(s.sz, site, sp);
  }
}
}  // namespace detail

/// Spin-spin correlation on a space whose factors are spins (local dim 2S+1).
inline Correlation correlation(const QuantumState& psi, int site_i, int site_j, Axis axis) {
  const SparseOperator a = detail::spin_component(psi, site_i, axis);
  const SparseOperator b = detail::spin_component(psi, site_j, axis);
  const double n2 = psi.norm_squared();
  Correlation c;
  c.raw = expectation(a * b, psi).real() / n2;
  c.connected = c.raw - expectation(a, psi).real() * expectation(b, psi).real() / (n2 * n2);
  return c;
}

/// <S_j^Z> for every site.
inline std::vector<double> magnetization_profile(const QuantumState& psi) {
  std::vector<double> m;
  for (int j = 0; j < psi.space().n_sites(); ++j)
    m.push_back(expectation(detail::spin_component(psi, j, Axis::Z), psi).real() / psi.norm_squared());
  return m;
}

/// <S_j^2> on the effective spin space.
inline double total_spin_per_site(const QuantumState& psi, int site) {
  const SpinLayout layout{psi.space().n_sites(), psi.space().local_dim(0) - 1};
  require_same_space(layout.space(), psi.space(), "total_spin_per_site");
  return expectation(site_spin(layout, site).s2, psi).real() / psi.norm_squared();
}

/// <S_j^2> of the M atoms in cavity j of an atomic layout.
inline double total_spin_per_site(const QuantumState& psi, const CavityLayout& layout, int cavity) {
  require_same_space(layout.space(), psi.space(), "total_spin_per_site");
  return expectation(site_spin(layout, cavity).s2, psi).real() / psi.norm_squared();
}

/// |<psi|phi>|^2 / (<psi|psi><phi|phi>).
inline double fidelity(const QuantumState& psi, const QuantumState& phi) {
  require_same_space(psi.space(), phi.space(), "fidelity");
  return std::norm(inner(psi, phi)) / (psi.norm_squared() * phi.norm_squared());
}

}  // namespace cavspin
