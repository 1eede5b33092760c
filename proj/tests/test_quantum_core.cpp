#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <cavspin/cavspin.hpp>

using namespace cavspin;

namespace {

double max_diff(const DenseMatrix& a, const DenseMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

DenseMatrix dense(const SparseOperator& op) { return op.to_dense(); }

void expect_su2(const SparseOperator& sz, const SparseOperator& sp, const SparseOperator& sm) {
  EXPECT_TRUE(commutator(sp, sm).approx_equal(2.0 * sz, 1e-12));
  EXPECT_TRUE(commutator(sz, sp).approx_equal(sp, 1e-12));
  EXPECT_TRUE(commutator(sz, sm).approx_equal(-sm, 1e-12));
}

Vector random_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = Complex(nd(rng), nd(rng));
  return v;
}

}  // namespace

TEST(HilbertSpace, TotalDimIsProductAndRejectsTrivialFactors) {
  const HilbertSpace s({3, 2, 4});
  EXPECT_EQ(s.total_dim(), 24);
  EXPECT_EQ(s.stride(0), 8);
  EXPECT_EQ(s.stride(2), 1);
  EXPECT_THROW(HilbertSpace({2, 1}), std::invalid_argument);
  EXPECT_THROW(HilbertSpace(std::vector<int>{}), std::invalid_argument);
}

TEST(HilbertSpace, DigitsRoundTrip) {
  const HilbertSpace s({3, 2, 4});
  for (Index i = 0; i < s.total_dim(); ++i) {
    std::vector<int> d;
    for (int k = 0; k < s.n_sites(); ++k) d.push_back(s.digit(i, k));
    EXPECT_EQ(s.index_of(d), i);
  }
}

TEST(SparseOperator, CoalescesDuplicatesAndDropsTinyEntries) {
  const HilbertSpace s = HilbertSpace::single(3);
  const std::vector<Triplet> t{{0, 1, 1.0}, {0, 1, 2.0}, {2, 2, 1e-17}, {1, 0, 0.5}};
  const SparseOperator op(s, t);
  EXPECT_EQ(op.nnz(), 2);
  EXPECT_EQ(op.coeff(0, 1), Complex(3.0));
  EXPECT_EQ(op.coeff(2, 2), Complex(0.0));
}

TEST(SparseOperator, RejectsOutOfRangeAndNonHermitianWhenFlagged) {
  const HilbertSpace s = HilbertSpace::single(2);
  const std::vector<Triplet> bad{{2, 0, 1.0}};
  EXPECT_THROW(SparseOperator(s, bad), std::out_of_range);
  const std::vector<Triplet> upper{{0, 1, 1.0}};
  EXPECT_THROW(SparseOperator(s, upper, true), std::invalid_argument);
  const std::vector<Triplet> herm{{0, 1, Complex(1.0, 2.0)}, {1, 0, Complex(1.0, -2.0)}};
  const SparseOperator h(s, herm, true);
  EXPECT_EQ(h.hermiticity_defect(), 0.0);
}

TEST(SparseOperator, AdjointConsistencyOnRandomVectors) {
  const HilbertSpace s({3, 3});
  const DenseMatrix m = DenseMatrix::Random(9, 9);
  const SparseOperator op = SparseOperator::from_dense(s, m);
  const Vector phi = random_vector(9, 1), psi = random_vector(9, 2);
  const Complex lhs = phi.dot(op * psi);
  const Complex rhs = (op.adjoint() * phi).dot(psi);
  EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::abs(lhs));
  // linearity
  const Vector lin = op * (2.0 * phi + Complex(0, 1) * psi);
  const Vector sep = 2.0 * (op * phi) + Complex(0, 1) * (op * psi);
  EXPECT_LT((lin - sep).norm(), 1e-12 * sep.norm());
}

TEST(SparseOperator, SpanMatvecMatchesVectorMatvec) {
  const HilbertSpace s({2, 3});
  const SparseOperator op = SparseOperator::from_dense(s, DenseMatrix::Random(6, 6));
  const Vector x = random_vector(6, 3);
  Vector y(6);
  op.apply(std::span<const Complex>(x.data(), 6), std::span<Complex>(y.data(), 6));
  EXPECT_LT((y - op * x).norm(), 1e-14);
}

TEST(SpinMatrices, SpinHalf) {
  const SpinMatrices s = spin_matrices(1);
  DenseMatrix sz(2, 2);
  sz << 0.5, 0, 0, -0.5;
  EXPECT_EQ(max_diff(dense(s.sz), sz), 0.0);
  EXPECT_EQ(s.splus.nnz(), 1);
  EXPECT_EQ(s.splus.coeff(0, 1), Complex(1.0));
}

TEST(SpinMatrices, SpinOneLadder) {
  const SpinMatrices s = spin_matrices(2);
  EXPECT_NEAR(s.splus.coeff(0, 1).real(), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.splus.coeff(1, 2).real(), std::sqrt(2.0), 1e-15);
  EXPECT_TRUE(s.sminus.approx_equal(s.splus.adjoint(), 0.0));
}

TEST(SpinMatrices, Su2AlgebraForManySpins) {
  for (int two_s = 1; two_s <= 7; ++two_s) {
    const SpinMatrices s = spin_matrices(two_s);
    expect_su2(s.sz, s.splus, s.sminus);
  }
  EXPECT_THROW(spin_matrices(0), std::invalid_argument);
}

TEST(CollectiveTransition, SingleAtomIsProjector) {
  const SparseOperator l = collective_transition(Level::a, Level::e, 1);
  EXPECT_EQ(l.nnz(), 1);
  EXPECT_EQ(l.coeff(0, 2), Complex(1.0));
}

TEST(CollectiveTransition, LevelsAreComplete) {
  for (int M = 1; M <= 3; ++M) {
    const SparseOperator sum = collective_transition(Level::a, Level::a, M) + collective_transition(Level::b, Level::b, M) +
                               collective_transition(Level::e, Level::e, M);
    EXPECT_TRUE(sum.approx_equal(static_cast<double>(M) * SparseOperator::identity(sum.space()), 1e-14));
  }
}

TEST(CollectiveTransition, TwoAtomsRaiseBB) {
  const SparseOperator lab = collective_transition(Level::a, Level::b, 2);
  const HilbertSpace s = lab.space();
  const int bb[2] = {1, 1}, ab[2] = {0, 1}, ba[2] = {1, 0};
  const Vector out = lab * QuantumState::product(s, bb).amplitudes();
  Vector expect = Vector::Zero(9);
  expect(s.index_of(ab)) = 1.0;
  expect(s.index_of(ba)) = 1.0;
  EXPECT_LT((out - expect).norm(), 1e-15);
}

TEST(CollectiveSpin, SpinHalfAndTotalSpinSpectra) {
  const CollectiveSpin c1 = collective_spin_ops(1);
  DenseMatrix sz(2, 2);
  sz << 0.5, 0, 0, -0.5;
  EXPECT_EQ(max_diff(dense(c1.sz), sz), 0.0);

  auto s2_eigs = [](int M) {
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(collective_spin_ops(M).s2.to_dense());
    return Eigen::VectorXd(es.eigenvalues());
  };
  const Eigen::VectorXd e2 = s2_eigs(2);
  EXPECT_NEAR(e2(0), 0.0, 1e-12);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(e2(i), 2.0, 1e-12);
  // M = 3: 4 x 3/4 (two doublets) and 4 x 15/4 (quartet), from an 8x8 brute-force diagonalization
  const Eigen::VectorXd e3 = s2_eigs(3);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(e3(i), 0.75, 1e-12);
  for (int i = 4; i < 8; ++i) EXPECT_NEAR(e3(i), 3.75, 1e-12);
}

TEST(CollectiveSpin, Su2AlgebraForEveryConstructionRoute) {
  for (int M = 1; M <= 3; ++M)
    for (AtomBasis b : {AtomBasis::spin_updown, AtomBasis::ground_ab, AtomBasis::three_level}) {
      const CollectiveSpin c = atomic_collective_spin(M, b);
      expect_su2(c.sz, c.splus, c.sminus);
    }
  // embedded route
  const SpinLayout layout{3, 2};
  for (int j = 0; j < 3; ++j) {
    const CollectiveSpin c = site_spin(layout, j);
    expect_su2(c.sz, c.splus, c.sminus);
  }
}

TEST(RotatedIdentities, HoldForSmallM) {
  for (int M = 1; M <= 4; ++M) EXPECT_TRUE(rotated_identities_check(M)) << "M = " << M;
}

TEST(SymmetricEmbedding, IsIsometryAndReproducesSpinMatrices) {
  for (int M = 1; M <= 4; ++M) {
    const DenseMatrix V = DenseMatrix(symmetric_embedding(M));
    EXPECT_LT(max_diff(V.adjoint() * V, DenseMatrix::Identity(M + 1, M + 1)), 1e-14);
    const CollectiveSpin c = collective_spin_ops(M);
    const SpinMatrices s = spin_matrices(M);
    EXPECT_LE(max_diff(V.adjoint() * dense(c.sz) * V, dense(s.sz)), 1e-12);
    EXPECT_LE(max_diff(V.adjoint() * dense(c.splus) * V, dense(s.splus)), 1e-12);
    EXPECT_LE(max_diff(V.adjoint() * dense(c.sminus) * V, dense(s.sminus)), 1e-12);
  }
}

TEST(SymmetricEmbedding, SmallCases) {
  EXPECT_EQ(max_diff(DenseMatrix(symmetric_embedding(1)), DenseMatrix::Identity(2, 2)), 0.0);
  const DenseMatrix V2 = DenseMatrix(symmetric_embedding(2));
  const double r = 1.0 / std::sqrt(2.0);
  DenseMatrix expect = DenseMatrix::Zero(4, 3);
  expect(0, 0) = 1.0;            // |up up>
  expect(1, 1) = expect(2, 1) = r;  // (|up down> + |down up>)/sqrt2
  expect(3, 2) = 1.0;            // |down down>
  EXPECT_LT(max_diff(V2, expect), 1e-15);
  const DenseMatrix V3 = DenseMatrix(symmetric_embedding(3));
  const DenseMatrix sz = V3.adjoint() * dense(collective_spin_ops(3).sz) * V3;
  Eigen::VectorXcd diag(4);
  diag << 1.5, 0.5, -0.5, -1.5;
  EXPECT_LT(max_diff(sz, DenseMatrix(diag.asDiagonal())), 1e-12);
}

TEST(Annihilation, TruncatedLowering) {
  const SparseOperator a1 = annihilation(1);
  EXPECT_EQ(a1.nnz(), 1);
  EXPECT_EQ(a1.coeff(0, 1), Complex(1.0));
  const SparseOperator a2 = annihilation(2);
  EXPECT_NEAR(a2.coeff(0, 1).real(), 1.0, 1e-15);
  EXPECT_NEAR(a2.coeff(1, 2).real(), std::sqrt(2.0), 1e-15);
  const SparseOperator n = annihilation(4).adjoint() * annihilation(4);
  for (int k = 0; k <= 4; ++k) EXPECT_NEAR(n.coeff(k, k).real(), k, 1e-14);
}

TEST(Embed, IdentityCommutationAndSpectrum) {
  const HilbertSpace s({2, 2});
  EXPECT_TRUE(embed(SparseOperator::identity(HilbertSpace::single(2)), 0, s).approx_equal(SparseOperator::identity(s), 0.0));
  const SpinMatrices m = spin_matrices(1);
  const SparseOperator x0 = embed(m.sx(), 0, s), z1 = embed(m.sz, 1, s);
  EXPECT_EQ(commutator(x0, z1).nnz(), 0);
  const SparseOperator tot = embed(m.sz, 0, s) + embed(m.sz, 1, s);
  EXPECT_TRUE(tot.hermitian());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(tot.to_dense());
  EXPECT_NEAR(es.eigenvalues()(0), -1.0, 1e-15);
  EXPECT_NEAR(es.eigenvalues()(1), 0.0, 1e-15);
  EXPECT_NEAR(es.eigenvalues()(2), 0.0, 1e-15);
  EXPECT_NEAR(es.eigenvalues()(3), 1.0, 1e-15);
  EXPECT_THROW(embed(spin_matrices(2).sz, 0, s), std::invalid_argument);
}

TEST(Embed, BlockEmbeddingMatchesKron) {
  const HilbertSpace s({2, 3, 2});
  const SparseOperator block = SparseOperator::from_dense(HilbertSpace({3, 2}), DenseMatrix::Random(6, 6));
  const SparseOperator viaKron = kron(SparseOperator::identity(HilbertSpace::single(2)), block);
  EXPECT_TRUE(embed_block(block, 1, 2, s).approx_equal(viaKron.with_space(s), 1e-15));
}

TEST(QuantumState, NormCacheAndExpectation) {
  const HilbertSpace s({2, 2});
  QuantumState psi = QuantumState::random(s, 7);
  EXPECT_NEAR(psi.norm_squared(), 1.0, 1e-12);
  EXPECT_NEAR(psi.norm_squared(), psi.amplitudes().squaredNorm(), 1e-12);
  const int up_up[2] = {0, 0};
  const QuantumState uu = QuantumState::product(s, up_up);
  const SparseOperator z0 = embed(spin_matrices(1).sz, 0, s);
  EXPECT_NEAR(expectation(z0, uu).real(), 0.5, 1e-15);
  EXPECT_THROW(QuantumState(s, Vector::Zero(3)), std::invalid_argument);
}
