#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sparse_operator.hpp"
#include "types.hpp"

namespace cavspin {

struct RotatingTerm {
  SparseOperator op;  ///< H_k (need not be Hermitian)
  double frequency;   ///< nu_k > 0
};

/// H(t) = H_0 + sum_k (e^{i nu_k t} H_k + e^{-i nu_k t} H_k^dagger).
///
/// Frequencies are stored positive (a term at -nu is rewritten as H^dagger at
/// +nu) and terms whose frequencies agree within kFrequencyTolerance are
/// merged, so the frequency list has distinct entries.
class TimeDependentOperator {
 public:
  static constexpr double kFrequencyTolerance = 1e-9;

  explicit TimeDependentOperator(SparseOperator static_part) : static_(std::move(static_part)) {
    if (!static_.hermitian()) throw std::invalid_argument("TimeDependentOperator: static part must be Hermitian");
  }

  void add_rotating(const SparseOperator& op, double frequency) {
    require_same_space(op.space(), static_.space(), "TimeDependentOperator::add_rotating");
    if (frequency == 0.0 || !std::isfinite(frequency))
      throw std::invalid_argument("TimeDependentOperator: rotating term frequency must be nonzero and finite");
    if (op.nnz() == 0) return;
    SparseOperator h = frequency > 0 ? op : op.adjoint();
    const double nu = std::abs(frequency);
    for (auto it = terms_.begin(); it != terms_.end(); ++it) {
      if (std::abs(it->frequency - nu) <= kFrequencyTolerance) {
        it->op = it->op + h;
        if (it->op.nnz() == 0) terms_.erase(it);
        refresh_adjoints();
        return;
      }
    }
    terms_.push_back({std::move(h), nu});
    std::sort(terms_.begin(), terms_.end(), [](const auto& a, const auto& b) { return a.frequency < b.frequency; });
    refresh_adjoints();
  }

  void add_static(const SparseOperator& op) { static_ = static_ + op; }

  const SparseOperator& static_part() const { return static_; }
  const std::vector<RotatingTerm>& rotating_terms() const { return terms_; }
  const HilbertSpace& space() const { return static_.space(); }
  Index dim() const { return static_.dim(); }

  std::vector<double> frequencies() const {
    std::vector<double> f;
    for (const auto& t : terms_) f.push_back(t.frequency);
    return f;
  }

  double max_frequency() const {
    double m = 0.0;
    for (const auto& t : terms_) m = std::max(m, t.frequency);
    return m;
  }

  bool is_static() const { return terms_.empty(); }

  /// H(t) as a Hermitian operator.
  SparseOperator at(double t) const {
    SparseMatrix m = static_.matrix();
    for (const auto& term : terms_) {
      const Complex ph = std::exp(kI * term.frequency * t);
      SparseMatrix x = ph * term.op.matrix();
      m += x;
      m += SparseMatrix(x.adjoint());
    }
    return SparseOperator(static_.space(), std::move(m), true);
  }

  /// out = H(t) in, without forming H(t).
  void apply(double t, const Vector& in, Vector& out) const {
    out.resize(in.size());
    out.noalias() = static_.matrix() * in;
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      const Complex ph = std::exp(kI * terms_[k].frequency * t);
      out.noalias() += ph * (terms_[k].op.matrix() * in);
      out.noalias() += std::conj(ph) * (adjoints_[k].matrix() * in);
    }
  }

 private:
  void refresh_adjoints() {
    adjoints_.clear();
    for (const auto& t : terms_) adjoints_.push_back(t.op.adjoint());
  }

  SparseOperator static_;
  std::vector<RotatingTerm> terms_;
  std::vector<SparseOperator> adjoints_;
};

/// Largest nu such that every frequency is an integer multiple of it (within a
/// relative tolerance), provided the multiples stay at or below `max_harmonic`.
inline std::optional<double> common_base_frequency(const std::vector<double>& freqs, double rel_tol = 1e-9,
                                                   int max_harmonic = 256) {
  if (freqs.empty()) return std::nullopt;
  const double fmax = *std::max_element(freqs.begin(), freqs.end());
  const double tol = rel_tol * fmax;
  double base = freqs.front();
  for (double f : freqs) {
    double a = std::max(base, f), b = std::min(base, f);
    while (b > tol) {
      double r = std::fmod(a, b);
      if (r > b - tol) r = 0.0;
      a = b;
      b = r;
    }
    base = a;
  }
  for (double f : freqs) {
    const double n = f / base;
    if (std::abs(n - std::round(n)) > rel_tol * std::max(1.0, n) * 10 || std::round(n) > max_harmonic) return std::nullopt;
  }
  return base;
}

}  // namespace cavspin
