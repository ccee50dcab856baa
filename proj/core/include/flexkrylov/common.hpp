#ifndef FLEXKRYLOV_COMMON_HPP
#define FLEXKRYLOV_COMMON_HPP

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace flexkrylov {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised for invalid sizes, bad parameters, unknown ids and malformed input.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when an iteration produces non-finite values and cannot continue.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace flexkrylov

#endif  // FLEXKRYLOV_COMMON_HPP
