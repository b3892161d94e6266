#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace proxflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Extended value used for indicator functions outside their domain.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Bad user input: unknown names, inconsistent dimensions, out-of-range parameters.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation that started from valid input but could not finish
// (non-finite state, divergence).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

inline void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw InvalidArgument(std::string(name) + " must be positive and finite");
}

inline void require_nonnegative(double value, const char* name) {
  if (!(value >= 0.0) || !std::isfinite(value))
    throw InvalidArgument(std::string(name) + " must be nonnegative and finite");
}

}  // namespace detail
}  // namespace proxflow
