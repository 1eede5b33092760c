#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "types.hpp"

namespace cavspin {

struct EvolutionSettings {
  int krylov_dim = 30;
  double step_tolerance = 1e-10;  ///< local error bound per accepted step
  double max_step = 0.0;          ///< 0 = no explicit cap
  bool renormalize = false;
  /// Steps shorter than this fraction of the requested time count as a failure.
  double min_step_fraction = 1e-12;

  void validate() const {
    if (krylov_dim < 2) throw std::invalid_argument("EvolutionSettings: krylov_dim must be >= 2");
    if (!(step_tolerance > 0.0)) throw std::invalid_argument("EvolutionSettings: step_tolerance must be > 0");
    if (max_step < 0.0) throw std::invalid_argument("EvolutionSettings: max_step must be >= 0");
  }
};

struct KrylovStats {
  int accepted_steps = 0;
  int rejected_steps = 0;
  int matvecs = 0;
};

/// psi <- exp(-i t H) psi for an operator given as a matvec `apply(in, out)`.
///
/// Hermitian operators use Lanczos with full reorthogonalization, others use
/// Arnoldi. Each step builds one Krylov basis and halves the step until the
/// a-posteriori error estimate beta * h_{m+1,m} * |[exp(-i tau H_m) e_1]_m|
/// drops below the tolerance.
template <class ApplyFn>
KrylovStats krylov_evolve(ApplyFn&& apply, Vector& psi, double t, const EvolutionSettings& settings, bool hermitian) {
  settings.validate();
  KrylovStats stats;
  const Index n = psi.size();
  if (t == 0.0 || n == 0) return stats;
  const double sign = t > 0 ? 1.0 : -1.0;
  double remaining = std::abs(t);
  double tau = settings.max_step > 0 ? std::min(settings.max_step, remaining) : remaining;
  const double floor = std::abs(t) * settings.min_step_fraction;
  const int m_max = static_cast<int>(std::min<Index>(settings.krylov_dim, n));

  DenseMatrix V(n, m_max + 1);
  DenseMatrix Hm = DenseMatrix::Zero(m_max + 1, m_max);
  Vector v(n), w(n);

  while (remaining > 0.0) {
    const double beta = psi.norm();
    if (beta == 0.0) return stats;
    V.col(0) = psi / beta;
    Hm.setZero();
    int m = m_max;
    bool exact = false;
    for (int j = 0; j < m_max; ++j) {
      v = V.col(j);
      apply(v, w);
      ++stats.matvecs;
      // Modified Gram-Schmidt, applied twice.
      for (int pass = 0; pass < 2; ++pass) {
        const int lo = hermitian && pass == 0 ? std::max(0, j - 1) : 0;
        for (int i = lo; i <= j; ++i) {
          const Complex hij = V.col(i).dot(w);
          Hm(i, j) += hij;
          w.noalias() -= hij * V.col(i);
        }
      }
      const double hn = w.norm();
      Hm(j + 1, j) = hn;
      if (hn <= 1e-13 * std::max(1.0, Hm.col(j).head(j + 1).norm())) {
        m = j + 1;
        exact = true;
        break;
      }
      V.col(j + 1) = w / hn;
    }
    if (hermitian) {
      DenseMatrix T = Hm.topLeftCorner(m, m);
      Hm.topLeftCorner(m, m) = 0.5 * (T + T.adjoint());
    }

    Eigen::SelfAdjointEigenSolver<DenseMatrix> es;
    if (hermitian) es.compute(Hm.topLeftCorner(m, m));
    auto small_exp = [&](double step) -> Vector {
      if (hermitian) {
        const Eigen::VectorXd& ev = es.eigenvalues();
        Vector ph(m);
        for (int k = 0; k < m; ++k) ph(k) = std::exp(Complex(0.0, -sign * step * ev(k)));
        return es.eigenvectors() * ph.cwiseProduct(es.eigenvectors().row(0).adjoint());
      }
      DenseMatrix A = Complex(0.0, -sign * step) * Hm.topLeftCorner(m, m);
      DenseMatrix E = A.exp();
      return E.col(0);
    };

    tau = exact ? remaining : std::min(tau, remaining);
    if (settings.max_step > 0) tau = std::min(tau, settings.max_step);
    while (true) {
      const Vector c = small_exp(tau);
      const double err = exact ? 0.0 : beta * std::abs(Hm(m, m - 1)) * std::abs(c(m - 1));
      if (err <= settings.step_tolerance || exact) {
        psi.noalias() = beta * (V.leftCols(m) * c);
        if (settings.renormalize) psi *= beta / psi.norm();
        remaining -= tau;
        ++stats.accepted_steps;
        // Grow the next step when the estimate leaves ample room.
        if (err < 1e-3 * settings.step_tolerance) tau *= 2.0;
        if (settings.max_step > 0) tau = std::min(tau, settings.max_step);
        if (remaining < 1e-15 * std::abs(t)) remaining = 0.0;
        break;
      }
      ++stats.rejected_steps;
      tau *= 0.5;
      if (tau < floor)
        throw ConvergenceError("krylov_evolve: step size fell below " + std::to_string(floor) +
                               " without meeting tolerance " + std::to_string(settings.step_tolerance));
    }
  }
  return stats;
}

}  // namespace cavspin
