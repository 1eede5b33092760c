#pragma once

#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "types.hpp"

namespace cavspin {

/// Ordered tensor-product space. Factor 0 is the most significant digit of a
/// basis index, so index = ((i0 * d1 + i1) * d2 + i2) ...
class HilbertSpace {
 public:
  HilbertSpace() = default;

  explicit HilbertSpace(std::vector<int> local_dims) : dims_(std::move(local_dims)) {
    if (dims_.empty()) throw std::invalid_argument("HilbertSpace: no factors");
    total_ = 1;
    for (int d : dims_) {
      if (d < 2) throw std::invalid_argument("HilbertSpace: local dimension " + std::to_string(d) + " < 2");
      total_ *= d;
    }
  }

  /// Single-factor space of the given dimension.
  static HilbertSpace single(int dim) { return HilbertSpace({dim}); }

  const std::vector<int>& local_dims() const { return dims_; }
  int n_sites() const { return static_cast<int>(dims_.size()); }
  int local_dim(int site) const { return dims_.at(static_cast<std::size_t>(site)); }
  Index total_dim() const { return total_; }

  /// Product of local dims strictly after `site` (the index stride of that factor).
  Index stride(int site) const {
    Index s = 1;
    for (int k = site + 1; k < n_sites(); ++k) s *= dims_[static_cast<std::size_t>(k)];
    return s;
  }

  /// Product of local dims over [first, first + count).
  Index block_dim(int first, int count) const {
    check_block(first, count);
    Index d = 1;
    for (int k = first; k < first + count; ++k) d *= dims_[static_cast<std::size_t>(k)];
    return d;
  }

  int digit(Index basis_index, int site) const {
    return static_cast<int>((basis_index / stride(site)) % dims_[static_cast<std::size_t>(site)]);
  }

  Index index_of(std::span<const int> digits) const {
    if (static_cast<int>(digits.size()) != n_sites()) throw std::invalid_argument("HilbertSpace: digit count mismatch");
    Index idx = 0;
    for (int k = 0; k < n_sites(); ++k) {
      if (digits[k] < 0 || digits[k] >= dims_[static_cast<std::size_t>(k)])
        throw std::out_of_range("HilbertSpace: digit out of range");
      idx = idx * dims_[static_cast<std::size_t>(k)] + digits[k];
    }
    return idx;
  }

  void check_block(int first, int count) const {
    if (first < 0 || count < 1 || first + count > n_sites())
      throw std::out_of_range("HilbertSpace: site block out of range");
  }

  friend bool operator==(const HilbertSpace& a, const HilbertSpace& b) { return a.dims_ == b.dims_; }

 private:
  std::vector<int> dims_;
  Index total_ = 0;
};

inline void require_same_space(const HilbertSpace& a, const HilbertSpace& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": Hilbert space mismatch");
}

/// Concatenation a ⊗ b.
inline HilbertSpace tensor(const HilbertSpace& a, const HilbertSpace& b) {
  std::vector<int> d = a.local_dims();
  d.insert(d.end(), b.local_dims().begin(), b.local_dims().end());
  return HilbertSpace(std::move(d));
}

}  // namespace cavspin
