#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

// Units used throughout: frequencies in MHz (linear), times in µs, rates in 1/µs.
// Angular factors (2π) only appear inside the dynamics engine.

namespace lambda_cpt {

using cplx = std::complex<double>;
using Spinor = Eigen::Vector2cd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Raised when an input violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by the engine for numerical setups it refuses to run (e.g. step too coarse).
class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lambda_cpt
