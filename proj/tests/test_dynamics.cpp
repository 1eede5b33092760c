#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <cavspin/cavspin.hpp>

using namespace cavspin;

namespace {

const HilbertSpace kQubit = HilbertSpace::single(2);

QuantumState up() { return QuantumState::basis(kQubit, 0); }

EvolutionSettings tight() {
  EvolutionSettings s;
  s.step_tolerance = 1e-13;
  return s;
}

SpinModelParams xxx(double K, const CavityGraph& g, int two_s = 1) {
  SpinModelParams s;
  s.D = s.E = K;
  s.two_s = two_s;
  s.graph = g;
  return s;
}

// Single spin-1/2 driven at two commensurate frequencies.
TimeDependentOperator driven_qubit() {
  const SpinMatrices s = spin_matrices(1);
  TimeDependentOperator H(detail::as_hermitian(0.8 * s.sz + 0.3 * s.sx()));
  H.add_rotating(0.4 * s.splus, 2.0);
  H.add_rotating(Complex(0.1, 0.2) * s.sz, 4.0);
  return H;
}

QuantumState singlet() {
  const HilbertSpace sp({2, 2});
  Vector v = Vector::Zero(4);
  v(1) = 1 / std::sqrt(2.0);
  v(2) = -1 / std::sqrt(2.0);
  return QuantumState(sp, v);
}

}  // namespace

TEST(EvolveStatic, ZeroHamiltonianIsIdentity) {
  const QuantumState psi = QuantumState::random(HilbertSpace({3, 2}), 1);
  const QuantumState out = evolve_static(SparseOperator(psi.space(), SparseMatrix(6, 6), true), psi, 3.0);
  EXPECT_LT((out.amplitudes() - psi.amplitudes()).norm(), 1e-15);
}

TEST(EvolveStatic, ZeemanPhases) {
  const double w = 1.7, t = 2.3;
  const SparseOperator H = w * spin_matrices(1).sz;
  Vector v(2);
  v << 0.6, 0.8;
  const QuantumState out = evolve_static(H, QuantumState(kQubit, v), t, tight());
  EXPECT_LT(std::abs(out.amplitudes()(0) - 0.6 * std::exp(Complex(0, -w * t / 2))), 1e-12);
  EXPECT_LT(std::abs(out.amplitudes()(1) - 0.8 * std::exp(Complex(0, w * t / 2))), 1e-12);
}

TEST(EvolveStatic, RabiOscillation) {
  const double W = 0.9;
  const SparseOperator H = detail::as_hermitian(W * spin_matrices(1).sx());
  const SparseOperator sz = spin_matrices(1).sz;
  for (double t : {0.0, 0.5, 1.7, 4.0, 11.0}) {
    const QuantumState out = evolve_static(H, up(), t, tight());
    EXPECT_NEAR(expectation(sz, out).real(), 0.5 * std::cos(W * t), 1e-11) << t;
    EXPECT_NEAR(out.norm_squared(), 1.0, 1e-10);
  }
}

TEST(EvolveStatic, ConservesNormAndEnergy) {
  SpinModelParams s = xxx(1.0, chain(6, true));
  s.C = 0.3;
  s.E = 0.4;
  const SparseOperator H = build_spin_hamiltonian(s);
  const QuantumState psi = QuantumState::random(H.space(), 17);
  const double e0 = expectation(H, psi).real();
  const QuantumState out = evolve_static(H, psi, 25.0);
  EXPECT_NEAR(out.norm_squared(), 1.0, 1e-10);
  EXPECT_NEAR(expectation(H, out).real(), e0, 1e-8 * std::abs(e0));
}

TEST(EvolveStatic, RejectsBadInputs) {
  const SparseOperator nh(kQubit, std::vector<Triplet>{{0, 1, 1.0}});
  EXPECT_THROW(evolve_static(nh, up(), 1.0), std::invalid_argument);
  EXPECT_THROW(evolve_static(spin_matrices(1).sz, QuantumState(kQubit, Vector::Ones(2)), 1.0), std::invalid_argument);
}

TEST(EvolveTimeDependent, StaticOperatorAgreesWithStaticEvolution) {
  const SparseOperator H0 = build_spin_hamiltonian(xxx(0.7, chain(3, false)));
  const QuantumState psi = QuantumState::random(H0.space(), 4);
  const QuantumState a = evolve_time_dependent(TimeDependentOperator(H0), psi, 3.3);
  const QuantumState b = evolve_static(H0, psi, 3.3);
  EXPECT_LT((a.amplitudes() - b.amplitudes()).norm(), 1e-10);
}

TEST(EvolveTimeDependent, MidpointIsSecondOrder) {
  const TimeDependentOperator H = driven_qubit();
  const double T = 2.0, h0 = max_time_step(H);
  auto run = [&](double h) {
    EvolutionSettings s = tight();
    s.max_step = h;
    return evolve_time_dependent(H, up(), T, s).amplitudes();
  };
  const Vector ref = run(h0 / 256);
  const double e1 = (run(h0) - ref).norm(), e2 = (run(h0 / 2) - ref).norm(), e3 = (run(h0 / 4) - ref).norm();
  const double p1 = std::log2(e1 / e2), p2 = std::log2(e2 / e3);
  EXPECT_GE(p1, 1.8);
  EXPECT_LE(p1, 2.2);
  EXPECT_GE(p2, 1.8);
  EXPECT_LE(p2, 2.2);
  EXPECT_NEAR(run(h0).squaredNorm(), 1.0, 1e-8);
}

TEST(EvolveTimeDependent, RejectsUnresolvedStep) {
  const TimeDependentOperator H = driven_qubit();
  EvolutionSettings s;
  s.max_step = 2 * max_time_step(H);
  try {
    evolve_time_dependent(H, up(), 1.0, s);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("max |nu| = 4"), std::string::npos) << e.what();
  }
}

TEST(PeriodicPropagator, MatchesFineMidpointEvolution) {
  const TimeDependentOperator H = driven_qubit();
  const double period = std::numbers::pi;  // base frequency 2
  PeriodicPropagator P = build_period_propagator(H, period, 64);
  EXPECT_LT(P.richardson_gap, 1e-6);
  Vector v = up().amplitudes();
  P.advance(v, 5);
  EvolutionSettings s = tight();
  s.max_step = max_time_step(H) / 64;
  const Vector w = evolve_time_dependent(H, up(), 5 * period, s).amplitudes();
  EXPECT_LT((v - w).norm(), 1e-6);
  EXPECT_NEAR(v.squaredNorm(), 1.0, 1e-10);
}

TEST(EvolveConditional, EqualRatesGiveStateIndependentDecay) {
  const int N = 2, M = 2;
  SpinModelParams s = xxx(0.6, chain(N, false), M);
  s.B = 0.2;
  s.C = -0.1;
  const SparseOperator H = build_spin_hamiltonian(s);
  const double gp = 0.05, t = 3.7;
  const SparseOperator HC = build_conditional_hamiltonian(H, s.layout(), {gp, gp});
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const QuantumState out = evolve_conditional(HC, QuantumState::random(H.space(), seed), t);
    const double want = std::exp(-N * M * gp * t);
    EXPECT_NEAR(out.norm_squared() / want, 1.0, 1e-8);
  }
}

TEST(EvolveConditional, ZeroRatesAreUnitary) {
  const SparseOperator H = build_spin_hamiltonian(xxx(0.6, chain(2, false)));
  const QuantumState out = evolve_conditional(build_conditional_hamiltonian(H, SpinLayout{2, 1}, {0, 0}), QuantumState::random(H.space(), 8), 5.0);
  EXPECT_NEAR(out.norm_squared(), 1.0, 1e-10);
}

TEST(EvolveConditional, SingleAtomAmplitudeDecay) {
  const CavityLayout layout{1, 1, AtomBasis::ground_ab, 0};
  const double ga = 0.3, t = 2.0;
  const SparseOperator HC = build_conditional_hamiltonian(SparseOperator::zero(layout.space()), layout, {ga, 0.0});
  Vector v(2);
  v << 0.6, 0.8;
  const QuantumState out = evolve_conditional(HC, QuantumState(layout.space(), v), t);
  EXPECT_NEAR(std::abs(out.amplitudes()(0)), 0.6 * std::exp(-ga * t / 2), 1e-12);
  EXPECT_NEAR(std::abs(out.amplitudes()(1)), 0.8, 1e-12);
}

TEST(EvolveConditional, RefusesRenormalization) {
  EvolutionSettings s;
  s.renormalize = true;
  EXPECT_THROW(evolve_conditional(spin_matrices(1).sz, up(), 1.0, s), std::invalid_argument);
}

TEST(Adiabatic, ConstantScheduleKeepsEigenstate) {
  SpinModelParams s = xxx(1.0, chain(2, false));
  const SpectrumSlice g = dense_spectrum(build_spin_hamiltonian(s));
  // For D = E > 0 the top level is the nondegenerate singlet.
  const QuantumState top = g.eigenvectors.back();
  AdiabaticSchedule sched{5.0, {{0.0, s}, {1.0, s}}};
  sched.points[0].params.inverted = sched.points[1].params.inverted = true;
  const AdiabaticResult r = adiabatic_prepare(sched, top);
  EXPECT_NEAR(r.fidelity, 1.0, 1e-10);
  EXPECT_TRUE(r.target_is_highest);
}

TEST(Adiabatic, ScheduleValidation) {
  const SpinModelParams s = xxx(1.0, chain(2, false));
  EXPECT_THROW((AdiabaticSchedule{1.0, {{0.0, s}, {0.5, s}}}.validate()), std::invalid_argument);
  EXPECT_THROW((AdiabaticSchedule{1.0, {{0.0, s}, {0.6, s}, {0.6, s}, {1.0, s}}}.validate()), std::invalid_argument);
  EXPECT_THROW((AdiabaticSchedule{0.0, {{0.0, s}, {1.0, s}}}.validate()), std::invalid_argument);
  const QuantumState random = QuantumState::random(HilbertSpace({2, 2}), 3);
  EXPECT_THROW(adiabatic_prepare(AdiabaticSchedule{1.0, {{0.0, s}, {1.0, s}}}, random), std::invalid_argument);
}

TEST(Adiabatic, InterpolatesSiteFields) {
  SpinModelParams a = xxx(0.0, chain(2, false));
  a.site_c = std::vector<double>{1.0, -1.0};
  SpinModelParams b = xxx(2.0, chain(2, false));
  b.C = 0.5;
  const AdiabaticSchedule sched{1.0, {{0.0, a}, {1.0, b}}};
  const SpinModelParams m = sched.at(0.25);
  EXPECT_DOUBLE_EQ(m.D, 0.5);
  EXPECT_DOUBLE_EQ(m.c_at(0), 0.875);
  EXPECT_DOUBLE_EQ(m.c_at(1), -0.625);
}

TEST(Adiabatic, SingletFidelityImprovesWithDuration) {
  // Inverted model: start from the top state of the inverted staggered field,
  // end at the inverted XXX antiferromagnet whose top state is the singlet.
  SpinModelParams start;
  start.graph = chain(2, false);
  start.site_c = std::vector<double>{1.0, -1.0};
  start = afm_equivalent_params(start);
  SpinModelParams end = afm_equivalent_params(xxx(-1.0, chain(2, false)));
  AdiabaticSchedule sched{1.0, {{0.0, start}, {1.0, end}}};
  const double gmin = minimum_schedule_gap(sched);
  EXPECT_NEAR(gmin, 0.8, 1e-9);
  const double T0 = 10.0 / gmin;
  // -(S1z - S2z) is highest on |down up>.
  const int du[2] = {1, 0};
  const QuantumState psi0 = QuantumState::product(HilbertSpace({2, 2}), du);
  std::vector<double> f;
  for (double m : {1.0, 2.0, 4.0}) {
    sched.duration = m * T0;
    const AdiabaticResult r = adiabatic_prepare(sched, psi0);
    EXPECT_EQ(r.target_degeneracy, 1);
    EXPECT_NEAR(r.target_energy, 0.75, 1e-12);
    f.push_back(r.fidelity);
    EXPECT_NEAR(fidelity(r.state, singlet()), r.fidelity, 1e-12);
  }
  EXPECT_LT(f[0], f[1]);
  EXPECT_LT(f[1], f[2]);
  EXPECT_GT(f[2], 0.99);
}

TEST(EmbedSpinState, IsIsometricAndPreservesSpinObservables) {
  const SpinLayout sl{2, 2};
  const CavityLayout cl{2, 2, AtomBasis::three_level, 1};
  const QuantumState spin = QuantumState::random(sl.space(), 12);
  const QuantumState atoms = embed_spin_state(spin, cl);
  EXPECT_NEAR(atoms.norm_squared(), 1.0, 1e-12);
  for (const char* o : {"sz:0", "spsm:1", "szsz:0:1"}) {
    const ObservableSpec spec = ObservableSpec::parse(o);
    EXPECT_NEAR(expectation(observable_operator(spec, cl), atoms).real(), expectation(observable_operator(spec, sl), spin).real(), 1e-12) << o;
  }
  EXPECT_NEAR(total_spin_per_site(atoms, cl, 0), 2.0, 1e-12);
}

TEST(ObservableSpec, ParseAndCheck) {
  EXPECT_EQ(ObservableSpec::parse("szsz:0:3").name(), "szsz:0:3");
  EXPECT_EQ(ObservableSpec::parse("spsm:2").kind, ObservableSpec::Kind::spsm);
  for (const char* bad : {"sz", "sz:", "sz:a", "sx:0", "szsz:1", "sz:1:2", "sz:-1"})
    EXPECT_THROW(ObservableSpec::parse(bad), std::invalid_argument) << bad;
  EXPECT_THROW(ObservableSpec::parse("sz:3").check(3), std::out_of_range);
}

TEST(Compare, ZeroCouplingsGiveNoDeviation) {
  PhysicalParams p = working_point();
  p.Omega1 = p.Omega2 = 0.0;
  const CavityGraph g = chain(2, false);
  const int ud[2] = {0, 1};
  const QuantumState spin = QuantumState::product(SpinLayout{2, 1}.space(), ud);
  std::vector<ObservableSpec> obs{ObservableSpec::parse("sz:0"), ObservableSpec::parse("sz:1"), ObservableSpec::parse("szsz:0:1")};
  for (ReferenceModel ref : {ReferenceModel::full, ReferenceModel::intermediate}) {
    CompareOptions opt;
    opt.reference = ref;
    const ComparisonReport r = compare_full_vs_effective(p, g, {0.0, 0.5, 1.0}, obs, spin, opt);
    for (double d : r.max_deviation) EXPECT_LT(d, 1e-9);
    EXPECT_LT(r.max_photon_population, 1e-12);
    EXPECT_EQ(r.max_excited_population.has_value(), ref == ReferenceModel::full);
  }
}

TEST(Compare, RefusesOutsideTheRegime) {
  PhysicalParams p = working_point();
  p.Omega1 *= 100;
  const int ud[2] = {0, 1};
  const QuantumState spin = QuantumState::product(SpinLayout{2, 1}.space(), ud);
  try {
    compare_full_vs_effective(p, chain(2, false), {0.0, 1.0}, {ObservableSpec::parse("sz:0")}, spin);
    FAIL();
  } catch (const RegimeError& e) {
    EXPECT_NE(std::string(e.what()).find("J >~ |Omega1|"), std::string::npos);
  }
}
