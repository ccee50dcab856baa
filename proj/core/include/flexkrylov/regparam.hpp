#ifndef FLEXKRYLOV_REGPARAM_HPP
#define FLEXKRYLOV_REGPARAM_HPP

#include "flexkrylov/projsolve.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace flexkrylov {

enum class ParamKind {
  fixed,      ///< constant lambda
  dp_exact,   ///< discrepancy principle enforced on every projected problem
  dp_secant,  ///< one secant-type lambda update per iteration
  optimal,    ///< per-iteration grid minimizer of the true error (needs x_true)
};

std::string to_string(ParamKind kind);
ParamKind parse_param_kind(const std::string& name);

struct ParamPolicy {
  ParamKind kind = ParamKind::fixed;
  double fixed_lambda = 0.0;
  /// epsilon = ||e||. Required for the discrepancy kinds.
  double noise_norm = 0.0;
  double eta = 1.01;
  /// Starting lambda for dp_secant; (eta * eps / beta_1)^2 when unset.
  std::optional<double> lambda0;
  double lambda_min = 1e-12;
  double lambda_max = 1e12;
  int grid_points = 40;

  void validate() const;
  double discrepancy_target() const noexcept { return eta * noise_norm; }
  double initial_lambda(double beta1) const;
  double clamp(double lambda) const;
};

/// Root of residual(lambda) = target for a residual that increases with
/// lambda. Safeguarded Newton on log(lambda) when a derivative is supplied,
/// bisection otherwise. Returns 0 when target <= residual(0) and lambda_max
/// when target >= residual(lambda_max).
double solve_discrepancy(const std::function<double(double)>& residual,
                         const std::function<double(double)>& derivative, double target,
                         double lambda_min, double lambda_max);

/// Discrepancy principle on the projected problem: |r(lambda) - eta*eps| <=
/// 1e-8 * eta*eps whenever r(0) < eta*eps < beta.
double select_dp_exact(const ProjectedProblem& p, double eps, double eta,
                       double lambda_min = 1e-12, double lambda_max = 1e12);
double select_dp_exact(const SpectralTikhonov& s, double eps, double eta,
                       double lambda_min = 1e-12, double lambda_max = 1e12);

/// lambda_next = lambda * |eta*eps - r_zero| / |r_reg - r_zero|, clamped.
/// r_reg is the residual at `prev_lambda`, r_zero the residual at lambda = 0.
/// Fixed points satisfy r_reg = eta*eps.
double select_dp_secant(double prev_lambda, double r_reg, double r_zero, double eps, double eta,
                        double lambda_min = 1e-12, double lambda_max = 1e12);

std::vector<double> log_grid(double lo, double hi, int points);

/// Grid argmin of ||x(lambda) - x_true||; ties go to the smaller lambda.
double select_optimal(const std::vector<double>& candidates,
                      const std::function<Vector(double)>& solve, const Vector& x_true);

}  // namespace flexkrylov

#endif  // FLEXKRYLOV_REGPARAM_HPP
