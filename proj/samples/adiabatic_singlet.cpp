// Adiabatic preparation of the two-site singlet, starting from the
// antiparallel product state of a staggered field and ending in the highest
// state of a ferromagnetic XXX model.
#include <cstdio>

#include <cavspin/cavspin.hpp>

int main() {
  using namespace cavspin;
  SpinModelParams start;
  start.graph = chain(2, false);
  start.site_c = std::vector<double>{1.0, -1.0};
  start.inverted = true;
  SpinModelParams end = start;
  end.site_c = std::vector<double>{0.0, 0.0};
  end.D = end.E = 1.0;

  AdiabaticSchedule sched{1.0, {{0.0, start}, {1.0, end}}};
  const double t0 = 10.0 / minimum_schedule_gap(sched);
  const int up_down[2] = {0, 1};
  const QuantumState psi0 = QuantumState::product(start.layout().space(), up_down);
  for (double k : {1.0, 2.0, 4.0}) {
    sched.duration = k * t0;
    const AdiabaticResult r = adiabatic_prepare(sched, psi0);
    std::printf("T = %8.3f  fidelity = %.10f\n", sched.duration, r.fidelity);
  }
}
