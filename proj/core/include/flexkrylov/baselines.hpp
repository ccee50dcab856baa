#ifndef FLEXKRYLOV_BASELINES_HPP
#define FLEXKRYLOV_BASELINES_HPP

#include "flexkrylov/run.hpp"
#include "flexkrylov/transforms.hpp"
#include "flexkrylov/weights.hpp"

#include <cstdint>

namespace flexkrylov {

/// Outer reweighting loop with inner CGLS, for both IRN and PIRN.
struct IrnConfig {
  int outer_iterations = 20;
  int inner_iterations = 20;
  /// Inner CGLS stops once ||K^T r|| <= inner_tol * ||K^T r_0||; 0 runs the
  /// full inner budget.
  double inner_tol = 0.0;
  double lambda = 0.0;
  WeightPolicy weights;
  /// Penalize ||L Psi x|| instead of ||L x||.
  TransformPtr transform;
  Vector x_true;
  bool record_wall_time = false;
  bool keep_iterates = false;

  void validate(const LinearOperator& a) const;
};

/// FISTA for min 1/2 ||A x - b||^2 + lambda ||Psi x||_1.
struct FistaConfig {
  double lambda = 0.0;
  int max_iterations = 200;
  /// 0 estimates 1 / sigma_1^2 by power iteration (with a 2% safety margin).
  double step = 0.0;
  int power_iterations = 50;
  std::uint64_t seed = 0x5eed;
  TransformPtr transform;
  Vector x_true;
  bool record_wall_time = false;
  bool keep_iterates = false;

  void validate(const LinearOperator& a) const;
};

struct CglsResult {
  Vector x;
  Vector residual;  ///< rhs - K x
  int iterations = 0;
  bool converged = false;
};

/// CGLS on min ||K x - rhs|| from x0. Stops once ||K^T r|| <= tol times its
/// starting value and returns the last iterate, except near roundoff level
/// where the iterate with the smallest ||K^T r|| is returned.
CglsResult cgls(const LinearOperator& k, const Vector& rhs, const Vector& x0, int max_iterations,
                double tol);

/// sign(t) max(|t| - gamma, 0), elementwise.
Vector soft_threshold(const Vector& t, double gamma);

/// Step k solves min ||A x - b||^2 + lambda ||L_k x||^2 by CGLS on
/// [A; sqrt(lambda) L_k], warm-started from x_{k-1}. L_1 = I.
SolverRun run_irn(OperatorPtr a, const Vector& b, const IrnConfig& cfg);

/// Same outer loop in standard form: CGLS on [A L_k^{-1}; sqrt(lambda) I]
/// for xhat, then x = L_k^{-1} xhat.
SolverRun run_pirn(OperatorPtr a, const Vector& b, const IrnConfig& cfg);

/// Two matvecs per iteration; residual norms come from the maintained A x_k.
/// Stops with StopReason::diverged once the objective exceeds ten times its
/// starting value.
SolverRun run_fista(OperatorPtr a, const Vector& b, const FistaConfig& cfg);

/// 1/2 ||A x - b||^2 + lambda ||Psi x||_1 (psi may be null).
double fista_objective(const LinearOperator& a, const Vector& b, const Vector& x, double lambda,
                       const OrthonormalTransform* psi = nullptr);

}  // namespace flexkrylov

#endif  // FLEXKRYLOV_BASELINES_HPP
