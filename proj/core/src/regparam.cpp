#include "flexkrylov/regparam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace flexkrylov {

std::string to_string(ParamKind kind) {
  switch (kind) {
    case ParamKind::fixed:
      return "fixed";
    case ParamKind::dp_exact:
      return "dp_exact";
    case ParamKind::dp_secant:
      return "dp_secant";
    case ParamKind::optimal:
      return "optimal";
  }
  return "unknown";
}

ParamKind parse_param_kind(const std::string& name) {
  if (name == "fixed") return ParamKind::fixed;
  if (name == "dp_exact" || name == "dp") return ParamKind::dp_exact;
  if (name == "dp_secant" || name == "secant") return ParamKind::dp_secant;
  if (name == "optimal" || name == "opt") return ParamKind::optimal;
  throw ConfigError("unknown parameter-selection policy '" + name + "'");
}

void ParamPolicy::validate() const {
  if (!(lambda_min > 0.0) || !(lambda_max > lambda_min)) {
    throw ConfigError("parameter policy: need 0 < lambda_min < lambda_max");
  }
  if (!(eta >= 1.0)) throw ConfigError("parameter policy: safety factor eta must be >= 1");
  if (kind == ParamKind::fixed && !(fixed_lambda >= 0.0)) {
    throw ConfigError("parameter policy: fixed lambda must be nonnegative");
  }
  if ((kind == ParamKind::dp_exact || kind == ParamKind::dp_secant) && !(noise_norm > 0.0)) {
    throw ConfigError("parameter policy: discrepancy principle needs a positive noise norm");
  }
  if (kind == ParamKind::optimal && grid_points < 2) {
    throw ConfigError("parameter policy: optimal selection needs at least two grid points");
  }
  if (lambda0 && !(*lambda0 > 0.0)) throw ConfigError("parameter policy: lambda0 must be positive");
}

double ParamPolicy::initial_lambda(double beta1) const {
  if (lambda0) return clamp(*lambda0);
  const double ratio = beta1 > 0.0 ? discrepancy_target() / beta1 : 0.0;
  return clamp(ratio * ratio);
}

double ParamPolicy::clamp(double lambda) const {
  return std::clamp(lambda, lambda_min, lambda_max);
}

double solve_discrepancy(const std::function<double(double)>& residual,
                         const std::function<double(double)>& derivative, double target,
                         double lambda_min, double lambda_max) {
  if (!(target > 0.0)) return 0.0;
  const double r0 = residual(0.0);
  if (target <= r0) return 0.0;
  const double rmax = residual(lambda_max);
  if (target >= rmax) return lambda_max;
  const double tol = 1e-12 * target;

  const double rmin = residual(lambda_min);
  if (rmin >= target) {
    // Root below the lower bound: plain bisection on [0, lambda_min].
    double lo = 0.0;
    double hi = lambda_min;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double r = residual(mid);
      if (std::abs(r - target) <= tol) return mid;
      (r < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  // Bracket in t = log(lambda): g(lo) < 0 < g(hi).
  double lo = std::log(lambda_min);
  double hi = std::log(lambda_max);
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 300; ++it) {
    const double lambda = std::exp(t);
    const double g = residual(lambda) - target;
    if (std::abs(g) <= tol) return lambda;
    (g < 0.0 ? lo : hi) = t;
    if (hi - lo < 1e-15 * std::max(1.0, std::abs(t))) return lambda;
    double next = 0.5 * (lo + hi);
    if (derivative) {
      const double slope = derivative(lambda) * lambda;  // dg/dt
      if (slope > 0.0 && std::isfinite(slope)) {
        const double newton = t - g / slope;
        if (newton > lo && newton < hi) next = newton;
      }
    }
    t = next;
  }
  return std::exp(t);
}

double select_dp_exact(const SpectralTikhonov& s, double eps, double eta, double lambda_min,
                       double lambda_max) {
  if (!(eta >= 1.0)) throw ConfigError("select_dp_exact: eta must be >= 1");
  if (!(eps >= 0.0)) throw ConfigError("select_dp_exact: noise norm must be nonnegative");
  return solve_discrepancy([&s](double l) { return s.residual(l); },
                           [&s](double l) { return s.residual_derivative(l); }, eta * eps,
                           lambda_min, lambda_max);
}

double select_dp_exact(const ProjectedProblem& p, double eps, double eta, double lambda_min,
                       double lambda_max) {
  return select_dp_exact(SpectralTikhonov(p), eps, eta, lambda_min, lambda_max);
}

double select_dp_secant(double prev_lambda, double r_reg, double r_zero, double eps, double eta,
                        double lambda_min, double lambda_max) {
  const double denom = std::abs(r_reg - r_zero);
  if (denom < 1e-15) return std::clamp(prev_lambda, lambda_min, lambda_max);
  const double next = prev_lambda * std::abs(eta * eps - r_zero) / denom;
  if (!std::isfinite(next)) return std::clamp(prev_lambda, lambda_min, lambda_max);
  return std::clamp(next, lambda_min, lambda_max);
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo) || points < 1) throw ConfigError("log_grid: invalid range");
  std::vector<double> g(static_cast<std::size_t>(points));
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < points; ++i) {
    g[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (points - 1));
  }
  return g;
}

double select_optimal(const std::vector<double>& candidates,
                      const std::function<Vector(double)>& solve, const Vector& x_true) {
  if (candidates.empty()) throw ConfigError("select_optimal: empty candidate list");
  if (x_true.size() == 0) throw ConfigError("select_optimal: x_true is required");
  double best = candidates.front();
  double best_err = std::numeric_limits<double>::infinity();
  for (double l : candidates) {
    const double err = (solve(l) - x_true).norm();
    if (err < best_err) {
      best_err = err;
      best = l;
    }
  }
  return best;
}

}  // namespace flexkrylov
