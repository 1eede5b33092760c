#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "physical_params.hpp"
#include "types.hpp"

namespace cavspin {

/// Quantities entering the intermediate (photon-mediated) Hamiltonian.
struct DerivedCouplings {
  int M = 1;
  double lambda = 0.0;  ///< M g1^2 / Delta1
  double omega = 0.0;
  Complex mu1{}, mu2{}, mu3{}, mu4{};
  Complex mu12_plus{}, mu12_minus{};
  Complex mu34_plus{}, mu34_minus{};
  Complex mu_z{};
  double J = 0.0;
  double lambda_minus_delta = 0.0;
  bool extended = false;  ///< Omega3, Omega4 or mu_z nonzero
};

namespace detail {
/// Throws naming the first pair of labelled frequencies closer than tol.
inline void require_distinct(const std::vector<std::pair<std::string, double>>& f, double tol) {
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = i + 1; j < f.size(); ++j)
      if (std::abs(f[i].second - f[j].second) <= tol)
        throw RegimeError("frequency collision: " + f[i].first + " = " + f[j].first + " (" + std::to_string(f[i].second) +
                          ")");
}
}  // namespace detail

/// mu_j = g_j Omega_j^* / Delta_j,
/// mu_3 = (g1 Omega3^*/2)(1/Delta1 + 1/(Delta1 + delta)),
/// mu_4 = (g2 Omega4^*/2)(1/Delta2 + 1/(Delta2 + delta)),
/// lambda = M g1^2 / Delta1.
inline DerivedCouplings derive_couplings(const PhysicalParams& p) {
  p.validate();
  DerivedCouplings c;
  c.M = p.M;
  c.lambda = p.M * p.g1 * p.g1 / p.Delta1;
  c.omega = p.omega;
  c.J = p.J;
  c.mu_z = p.mu_z;
  c.extended = p.has_extended_lasers();
  c.mu1 = p.g1 * std::conj(p.Omega1) / p.Delta1;
  c.mu2 = p.g2 * std::conj(p.Omega2) / p.Delta2;
  if (p.Omega3 != Complex{}) {
    if (p.Delta1 + p.delta == 0.0) throw std::invalid_argument("derive_couplings: Delta1 + delta = 0");
    c.mu3 = 0.5 * p.g1 * std::conj(p.Omega3) * (1.0 / p.Delta1 + 1.0 / (p.Delta1 + p.delta));
  }
  if (p.Omega4 != Complex{}) {
    if (p.Delta2 + p.delta == 0.0) throw std::invalid_argument("derive_couplings: Delta2 + delta = 0");
    c.mu4 = 0.5 * p.g2 * std::conj(p.Omega4) * (1.0 / p.Delta2 + 1.0 / (p.Delta2 + p.delta));
  }
  c.mu12_plus = c.mu1 + c.mu2;
  c.mu12_minus = c.mu1 - c.mu2;
  c.mu34_plus = c.mu3 + c.mu4;
  c.mu34_minus = c.mu3 - c.mu4;
  c.lambda_minus_delta = c.lambda - p.delta;

  const double l = c.lambda, w = c.omega, ld = c.lambda_minus_delta;
  const double tol = 1e-9 * std::max({1.0, std::abs(l), std::abs(w), std::abs(ld)});
  if (c.extended) {
    detail::require_distinct({{"0", 0.0},
                              {"omega", w},
                              {"-omega", -w},
                              {"lambda", l},
                              {"lambda+omega", l + w},
                              {"lambda-omega", l - w},
                              {"lambda-delta", ld},
                              {"lambda-delta+omega", ld + w},
                              {"lambda-delta-omega", ld - w}},
                             tol);
  } else {
    detail::require_distinct({{"0", 0.0}, {"omega", w}, {"lambda", l}, {"-omega", -w}}, tol);
  }
  return c;
}

}  // namespace cavspin
