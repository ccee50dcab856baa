#ifndef FLEXKRYLOV_WEIGHTS_HPP
#define FLEXKRYLOV_WEIGHTS_HPP

#include "flexkrylov/linop.hpp"

namespace flexkrylov {

enum class ThresholdMode {
  absolute,  ///< tau1 is used as given
  relative,  ///< tau1 * ||x||_inf, floored at kMinAbsoluteTau1
};

/// Parameters of the iteratively reweighted norm approximation of ||x||_p^p.
struct WeightPolicy {
  static constexpr double kMinAbsoluteTau1 = 1e-10;

  double p = 1.0;
  double tau1 = 1e-4;
  double tau2 = 1e-10;
  ThresholdMode mode = ThresholdMode::relative;

  /// Throws ConfigError unless p >= 1 and 0 < tau2, tau1 > 0.
  void validate() const;
  /// The absolute threshold that applies to the iterate x.
  double effective_tau1(const Vector& x) const;
};

struct WeightPair {
  DiagonalOperator l;
  DiagonalOperator l_inverse;
};

/// L(x) = diag(f_tau(|x_i|)^((p-2)/2)) with f_tau(t) = t if t >= tau1, else
/// tau2, and its inverse. For p = 2 both are the identity.
WeightPair build_weights(const Vector& x, const WeightPolicy& policy);

}  // namespace flexkrylov

#endif  // FLEXKRYLOV_WEIGHTS_HPP
