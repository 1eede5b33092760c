// Excitation gaps of antiferromagnetic Heisenberg rings, spin 1/2 vs spin 1.
//
// The antiferromagnet is realized as -1 times a ferromagnetic spin model, so
// its ground state is the highest state of the realized Hamiltonian. The gap is
// computed on the negated (target) operator.
#include <cstdio>

#include <cavspin/cavspin.hpp>

int main() {
  using namespace cavspin;
  std::printf("%6s %4s %12s %12s\n", "spin", "L", "E0", "gap");
  for (int two_s : {1, 2}) {
    for (int L : {4, 6, 8}) {
      SpinModelParams target;
      target.D = target.E = -1.0;  // -D(SxSx+SySy) - E SzSz = +S.S
      target.two_s = two_s;
      target.graph = chain(L, true);
      const SpinModelParams realized = afm_equivalent_params(target);
      const SparseOperator H = build_spin_hamiltonian(realized);
      const GapResult g = excitation_gap(-H);
      std::printf("%6.1f %4d %12.6f %12.6f\n", 0.5 * two_s, L, g.ground_energy, g.gap);
    }
  }
}
