#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace cavspin {

using Complex = std::complex<double>;
using Index = std::int64_t;
using Vector = Eigen::VectorXcd;
using DenseMatrix = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Raised when an iterative solver fails to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a parameter set falls outside the regime an operation requires.
class RegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline std::function<void(std::string_view)>& warning_handler() {
  static std::function<void(std::string_view)> handler = [](std::string_view msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return handler;
}
}  // namespace detail

/// Replace the sink for non-fatal diagnostics (default: stderr). Returns the old sink.
inline std::function<void(std::string_view)> set_warning_handler(
    std::function<void(std::string_view)> handler) {
  auto old = std::move(detail::warning_handler());
  detail::warning_handler() = std::move(handler);
  return old;
}

inline void warn(std::string_view msg) {
  if (detail::warning_handler()) detail::warning_handler()(msg);
}

}  // namespace cavspin
