#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Sparse>

#include "hilbert_space.hpp"
#include "types.hpp"

namespace cavspin {

using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

struct Triplet {
  Index row = 0;
  Index col = 0;
  Complex value;
  friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// Sparse complex operator on a HilbertSpace.
///
/// Storage is canonical: row-major compressed, column indices sorted,
/// duplicates coalesced and entries with |v| < drop tolerance removed, so two
/// operators built from the same terms compare equal entry for entry.
/// When the hermitian flag is set the stored matrix is exactly Hermitian.
class SparseOperator {
 public:
  static constexpr double kDefaultDropTolerance = 1e-15;
  /// Relative tolerance used when validating a Hermitian flag on construction.
  static constexpr double kHermitianCheckTolerance = 1e-10;

  SparseOperator() = default;

  SparseOperator(HilbertSpace space, std::span<const Triplet> entries, bool hermitian = false,
                 double drop_tolerance = kDefaultDropTolerance)
      : space_(std::move(space)), hermitian_(hermitian) {
    const Index n = space_.total_dim();
    std::vector<Eigen::Triplet<Complex>> trips;
    trips.reserve(entries.size());
    for (const auto& t : entries) {
      if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
        throw std::out_of_range("SparseOperator: entry index out of range");
      trips.emplace_back(static_cast<int>(t.row), static_cast<int>(t.col), t.value);
    }
    mat_.resize(n, n);
    mat_.setFromTriplets(trips.begin(), trips.end());
    finalize(drop_tolerance);
  }

  SparseOperator(HilbertSpace space, SparseMatrix matrix, bool hermitian = false,
                 double drop_tolerance = kDefaultDropTolerance)
      : space_(std::move(space)), mat_(std::move(matrix)), hermitian_(hermitian) {
    if (mat_.rows() != space_.total_dim() || mat_.cols() != space_.total_dim())
      throw std::invalid_argument("SparseOperator: matrix shape does not match space");
    finalize(drop_tolerance);
  }

  static SparseOperator identity(const HilbertSpace& space) {
    SparseMatrix m(space.total_dim(), space.total_dim());
    m.setIdentity();
    return SparseOperator(space, std::move(m), true);
  }

  static SparseOperator zero(const HilbertSpace& space) {
    return SparseOperator(space, SparseMatrix(space.total_dim(), space.total_dim()), true);
  }

  /// Dense matrix to operator; entries below the drop tolerance are discarded.
  static SparseOperator from_dense(const HilbertSpace& space, const DenseMatrix& dense, bool hermitian = false) {
    if (dense.rows() != space.total_dim() || dense.cols() != space.total_dim())
      throw std::invalid_argument("SparseOperator::from_dense: shape mismatch");
    std::vector<Triplet> t;
    for (Index r = 0; r < dense.rows(); ++r)
      for (Index c = 0; c < dense.cols(); ++c)
        if (dense(r, c) != Complex{}) t.push_back({r, c, dense(r, c)});
    return SparseOperator(space, t, hermitian);
  }

  const HilbertSpace& space() const { return space_; }
  Index dim() const { return space_.total_dim(); }
  bool hermitian() const { return hermitian_; }
  Index nnz() const { return mat_.nonZeros(); }
  const SparseMatrix& matrix() const { return mat_; }

  /// Canonical entry list in row-major order.
  std::vector<Triplet> entries() const {
    std::vector<Triplet> out;
    out.reserve(static_cast<std::size_t>(mat_.nonZeros()));
    for (Index r = 0; r < mat_.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(mat_, r); it; ++it) out.push_back({r, it.col(), it.value()});
    return out;
  }

  Complex coeff(Index row, Index col) const { return mat_.coeff(row, col); }

  DenseMatrix to_dense() const { return DenseMatrix(mat_); }

  /// out = A * in. No allocation; `in` and `out` must not alias.
  void apply(std::span<const Complex> in, std::span<Complex> out) const {
    if (static_cast<Index>(in.size()) != dim() || static_cast<Index>(out.size()) != dim())
      throw std::invalid_argument("SparseOperator::apply: vector length mismatch");
    Eigen::Map<const Vector> x(in.data(), dim());
    Eigen::Map<Vector> y(out.data(), dim());
    y.noalias() = mat_ * x;
  }

  void apply(const Vector& in, Vector& out) const {
    if (in.size() != dim()) throw std::invalid_argument("SparseOperator::apply: vector length mismatch");
    out.resize(dim());
    out.noalias() = mat_ * in;
  }

  Vector operator*(const Vector& v) const {
    Vector out;
    apply(v, out);
    return out;
  }

  SparseOperator adjoint() const {
    SparseMatrix a = mat_.adjoint();
    return SparseOperator(space_, std::move(a), hermitian_, 0.0);
  }

  /// Largest |entry|.
  double max_abs() const {
    double m = 0.0;
    for (Index k = 0; k < mat_.nonZeros(); ++k) m = std::max(m, std::abs(mat_.valuePtr()[k]));
    return m;
  }

  /// max_ij |A_ij - conj(A_ji)|.
  double hermiticity_defect() const {
    SparseMatrix d = mat_ - SparseMatrix(mat_.adjoint());
    double m = 0.0;
    for (Index k = 0; k < d.nonZeros(); ++k) m = std::max(m, std::abs(d.valuePtr()[k]));
    return m;
  }

  /// Infinity-norm bound on the spectral radius (max absolute row sum).
  double row_sum_bound() const {
    double m = 0.0;
    for (Index r = 0; r < mat_.outerSize(); ++r) {
      double s = 0.0;
      for (SparseMatrix::InnerIterator it(mat_, r); it; ++it) s += std::abs(it.value());
      m = std::max(m, s);
    }
    return m;
  }

  SparseOperator& operator+=(const SparseOperator& o) { return *this = *this + o; }
  SparseOperator& operator-=(const SparseOperator& o) { return *this = *this - o; }

  friend SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
    require_same_space(a.space_, b.space_, "operator+");
    return SparseOperator(a.space_, SparseMatrix(a.mat_ + b.mat_), a.hermitian_ && b.hermitian_);
  }
  friend SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) {
    require_same_space(a.space_, b.space_, "operator-");
    return SparseOperator(a.space_, SparseMatrix(a.mat_ - b.mat_), a.hermitian_ && b.hermitian_);
  }
  friend SparseOperator operator-(const SparseOperator& a) { return SparseOperator(a.space_, SparseMatrix(-a.mat_), a.hermitian_); }
  friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
    require_same_space(a.space_, b.space_, "operator*");
    return SparseOperator(a.space_, SparseMatrix(a.mat_ * b.mat_), false);
  }
  friend SparseOperator operator*(Complex s, const SparseOperator& a) {
    return SparseOperator(a.space_, SparseMatrix(s * a.mat_), a.hermitian_ && s.imag() == 0.0);
  }
  friend SparseOperator operator*(double s, const SparseOperator& a) {
    return SparseOperator(a.space_, SparseMatrix(Complex(s) * a.mat_), a.hermitian_);
  }
  friend SparseOperator operator*(const SparseOperator& a, double s) { return s * a; }

  /// Structural equality within an absolute tolerance.
  bool approx_equal(const SparseOperator& o, double tol) const {
    if (!(space_ == o.space_)) return false;
    SparseMatrix d = mat_ - o.mat_;
    for (Index k = 0; k < d.nonZeros(); ++k)
      if (std::abs(d.valuePtr()[k]) > tol) return false;
    return true;
  }

  /// Same operator reinterpreted on another space of equal total dimension.
  SparseOperator with_space(HilbertSpace space) const {
    if (space.total_dim() != dim()) throw std::invalid_argument("with_space: dimension mismatch");
    return SparseOperator(std::move(space), mat_, hermitian_, 0.0);
  }

 private:
  void finalize(double drop_tolerance) {
    mat_.makeCompressed();
    if (hermitian_) {
      const double scale = std::max(1.0, max_abs());
      if (hermiticity_defect() > kHermitianCheckTolerance * scale)
        throw std::invalid_argument("SparseOperator: hermitian flag set on a non-Hermitian matrix");
      SparseMatrix sym = (mat_ + SparseMatrix(mat_.adjoint())) * Complex(0.5);
      mat_ = std::move(sym);
    }
    if (drop_tolerance > 0.0) mat_.prune([drop_tolerance](Index, Index, const Complex& v) { return std::abs(v) >= drop_tolerance; });
    else mat_.prune(Complex{}, 0.0);
    mat_.makeCompressed();
  }

  HilbertSpace space_;
  SparseMatrix mat_;
  bool hermitian_ = false;
};

inline SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) { return a * b - b * a; }

/// Kronecker product on the concatenated space a.space() ⊗ b.space().
inline SparseOperator kron(const SparseOperator& a, const SparseOperator& b) {
  const Index nb = b.dim();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nnz() * b.nnz()));
  const auto ea = a.entries();
  const auto eb = b.entries();
  for (const auto& x : ea)
    for (const auto& y : eb) t.push_back({x.row * nb + y.row, x.col * nb + y.col, x.value * y.value});
  return SparseOperator(tensor(a.space(), b.space()), t, a.hermitian() && b.hermitian());
}

/// Embed `op` acting on the contiguous factors [first, first + count) of `space`.
inline SparseOperator embed_block(const SparseOperator& op, int first, int count, const HilbertSpace& space) {
  space.check_block(first, count);
  if (op.dim() != space.block_dim(first, count))
    throw std::invalid_argument("embed: operator dimension " + std::to_string(op.dim()) +
                                " does not match site block dimension " + std::to_string(space.block_dim(first, count)));
  const Index right = space.stride(first + count - 1);
  const Index left = space.total_dim() / (right * op.dim());
  const Index d = op.dim();
  const auto e = op.entries();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(left * right) * e.size());
  for (Index l = 0; l < left; ++l)
    for (const auto& x : e)
      for (Index r = 0; r < right; ++r)
        t.push_back({(l * d + x.row) * right + r, (l * d + x.col) * right + r, x.value});
  return SparseOperator(space, t, op.hermitian());
}

/// Embed a single-site operator: op on factor `site`, identity elsewhere.
inline SparseOperator embed(const SparseOperator& op, int site, const HilbertSpace& space) {
  return embed_block(op, site, 1, space);
}

inline Complex inner(const Vector& a, const Vector& b) { return a.dot(b); }

}  // namespace cavspin
