#include "flexkrylov/weights.hpp"

#include <algorithm>
#include <cmath>

namespace flexkrylov {

void WeightPolicy::validate() const {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ConfigError("weight policy: p must be >= 1");
  if (!(tau1 > 0.0) || !(tau2 > 0.0)) {
    throw ConfigError("weight policy: thresholds tau1 and tau2 must be positive");
  }
  if (mode == ThresholdMode::absolute && tau2 > tau1) {
    throw ConfigError("weight policy: tau2 must not exceed tau1");
  }
}

double WeightPolicy::effective_tau1(const Vector& x) const {
  if (mode == ThresholdMode::absolute) return tau1;
  const double scale = x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
  return std::max(tau1 * scale, kMinAbsoluteTau1);
}

WeightPair build_weights(const Vector& x, const WeightPolicy& policy) {
  policy.validate();
  const double t1 = policy.effective_tau1(x);
  const double exponent = (policy.p - 2.0) / 2.0;
  Vector d(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double a = std::abs(x[i]);
    const double f = a >= t1 ? a : policy.tau2;
    d[i] = exponent == 0.0 ? 1.0 : std::pow(f, exponent);
  }
  DiagonalOperator l(std::move(d));
  DiagonalOperator l_inverse = l.inverse();
  return {std::move(l), std::move(l_inverse)};
}

}  // namespace flexkrylov
