#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "hilbert_space.hpp"
#include "sparse_operator.hpp"
#include "types.hpp"

namespace cavspin {

/// Dense state vector with a cached squared norm.
class QuantumState {
 public:
  QuantumState() = default;

  QuantumState(HilbertSpace space, Vector amplitudes) : space_(std::move(space)), amps_(std::move(amplitudes)) {
    if (amps_.size() != space_.total_dim())
      throw std::invalid_argument("QuantumState: amplitude length does not match space");
    norm2_ = amps_.squaredNorm();
  }

  static QuantumState basis(const HilbertSpace& space, Index index) {
    if (index < 0 || index >= space.total_dim()) throw std::out_of_range("QuantumState::basis: index out of range");
    Vector v = Vector::Zero(space.total_dim());
    v(index) = 1.0;
    return QuantumState(space, std::move(v));
  }

  /// Product of local basis states, one digit per factor.
  static QuantumState product(const HilbertSpace& space, std::span<const int> digits) {
    return basis(space, space.index_of(digits));
  }

  /// Product of arbitrary local vectors (not normalized automatically).
  static QuantumState product(const HilbertSpace& space, const std::vector<Vector>& locals) {
    if (static_cast<int>(locals.size()) != space.n_sites())
      throw std::invalid_argument("QuantumState::product: one local vector per site required");
    Vector v = Vector::Ones(1);
    for (int s = 0; s < space.n_sites(); ++s) {
      const Vector& l = locals[static_cast<std::size_t>(s)];
      if (l.size() != space.local_dim(s)) throw std::invalid_argument("QuantumState::product: local dimension mismatch");
      Vector next(v.size() * l.size());
      for (Index i = 0; i < v.size(); ++i) next.segment(i * l.size(), l.size()) = v(i) * l;
      v = std::move(next);
    }
    return QuantumState(space, std::move(v));
  }

  /// Normalized state with i.i.d. complex Gaussian amplitudes.
  static QuantumState random(const HilbertSpace& space, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    Vector v(space.total_dim());
    for (Index i = 0; i < v.size(); ++i) v(i) = Complex(n(rng), n(rng));
    QuantumState s(space, std::move(v));
    s.normalize();
    return s;
  }

  const HilbertSpace& space() const { return space_; }
  Index dim() const { return space_.total_dim(); }
  const Vector& amplitudes() const { return amps_; }
  double norm_squared() const { return norm2_; }
  double norm() const { return std::sqrt(norm2_); }

  void set_amplitudes(Vector v) {
    if (v.size() != dim()) throw std::invalid_argument("QuantumState: amplitude length does not match space");
    amps_ = std::move(v);
    norm2_ = amps_.squaredNorm();
  }

  QuantumState& normalize() {
    if (norm2_ <= 0.0) throw std::domain_error("QuantumState::normalize: zero vector");
    amps_ /= std::sqrt(norm2_);
    norm2_ = amps_.squaredNorm();
    return *this;
  }

  QuantumState normalized() const {
    QuantumState s = *this;
    return s.normalize();
  }

 private:
  HilbertSpace space_;
  Vector amps_;
  double norm2_ = 0.0;
};

/// <a|b>.
inline Complex inner(const QuantumState& a, const QuantumState& b) {
  require_same_space(a.space(), b.space(), "inner");
  return a.amplitudes().dot(b.amplitudes());
}

/// <psi|O|psi> (not divided by the norm).
inline Complex expectation(const SparseOperator& op, const QuantumState& psi) {
  require_same_space(op.space(), psi.space(), "expectation");
  return psi.amplitudes().dot(op * psi.amplitudes());
}

inline QuantumState apply(const SparseOperator& op, const QuantumState& psi) {
  require_same_space(op.space(), psi.space(), "apply");
  return QuantumState(psi.space(), op * psi.amplitudes());
}

}  // namespace cavspin
