// Two cavities, one atom each, at the reference working point: compares
// <S^z> under the full atom-cavity model with the effective spin model over
// one spin-exchange period.
#include <cstdio>
#include <numbers>

#include <cavspin/cavspin.hpp>

int main() {
  using namespace cavspin;
  const PhysicalParams p = working_point();
  const CavityGraph g = chain(2, false);
  const SpinModelParams s = map_to_spin_params(derive_couplings(p), p.M, g);
  std::printf("A = %.6e  B = %.6e  C = %.6e  D = %.6e  E = %.6e\n", s.A, s.B, s.C, s.D, s.E);

  const int up_down[2] = {0, 1};
  const QuantumState psi = QuantumState::product(s.layout().space(), up_down);
  std::vector<double> grid;
  const double t_end = 2.0 * std::numbers::pi / s.D;
  for (int k = 0; k <= 20; ++k) grid.push_back(t_end * k / 20.0);

  const ComparisonReport r = compare_full_vs_effective(p, g, grid, {ObservableSpec::parse("sz:0")}, psi);
  std::printf("%14s %12s %12s\n", "t", "full", "effective");
  for (std::size_t k = 0; k < r.times.size(); ++k)
    std::printf("%14.1f %12.6f %12.6f\n", r.times[k], r.reference_values[0][k], r.effective_values[0][k]);
  std::printf("max |deviation| = %.4f, max photons = %.2e, max excited = %.2e\n", r.max_deviation[0], r.max_photon_population,
              r.max_excited_population.value_or(0.0));
}
