#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "types.hpp"

namespace cavspin {

/// Cavity, laser and atom constants. All frequencies are angular and share
/// one unit (conventionally the hopping rate J).
struct PhysicalParams {
  double g1 = 0.0;      ///< |a>-|e> cavity coupling
  double g2 = 0.0;      ///< |b>-|e> cavity coupling
  double Delta1 = 1.0;  ///< detuning of the g1 / Omega1 transitions
  double Delta2 = 1.0;  ///< detuning of the g2 / Omega2 transitions
  Complex Omega1{};     ///< drives |b>-|e> at detuning Delta1
  Complex Omega2{};     ///< drives |a>-|e> at detuning Delta2
  Complex Omega3{};     ///< like Omega1, extra detuning delta
  Complex Omega4{};     ///< like Omega2, extra detuning delta
  double omega = 0.0;   ///< Raman splitting; drive amplitude is omega/2
  double delta = 0.0;   ///< extra detuning of Omega3, Omega4
  Complex mu_z{};       ///< Stark shift amplitude on |b>
  double J = 0.0;       ///< inter-cavity photon hopping
  double gamma = 0.0;   ///< atomic spontaneous decay rate
  int M = 1;            ///< atoms per cavity

  bool has_extended_lasers() const { return Omega3 != Complex{} || Omega4 != Complex{} || mu_z != Complex{}; }

  void validate() const {
    if (M < 1) throw std::invalid_argument("PhysicalParams: M must be >= 1");
    if (!(J >= 0.0)) throw std::invalid_argument("PhysicalParams: J must be >= 0");
    if (!(gamma >= 0.0)) throw std::invalid_argument("PhysicalParams: gamma must be >= 0");
    if (Delta1 == 0.0 || Delta2 == 0.0) throw std::invalid_argument("PhysicalParams: Delta1 and Delta2 must be nonzero");
    for (double v : {g1, g2, Delta1, Delta2, omega, delta, J, gamma})
      if (!std::isfinite(v)) throw std::invalid_argument("PhysicalParams: non-finite value");
  }
};

/// Reference parameter set deep in the elimination regime, one atom per
/// cavity. Frequencies in units of J: Delta_j in the thousands, sqrt(M/2) g_j
/// in the hundreds, J = 1 >= |Omega_j|, lambda = M g1^2/Delta1 = 60,
/// omega = 35. Delta2 = 3 Delta1 keeps the drive periodic.
inline PhysicalParams working_point() {
  PhysicalParams p;
  p.M = 1;
  p.J = 1.0;
  p.Delta1 = 6400.0;
  p.Delta2 = 19200.0;
  const double lambda = 60.0;
  p.g1 = std::sqrt(lambda * p.Delta1 / p.M);
  p.g2 = std::sqrt(lambda * p.Delta2 / p.M);
  p.Omega1 = 1.0;
  p.Omega2 = -1.0;
  p.omega = 35.0;
  p.gamma = 0.1;
  return p;
}

}  // namespace cavspin
