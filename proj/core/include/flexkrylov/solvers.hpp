#ifndef FLEXKRYLOV_SOLVERS_HPP
#define FLEXKRYLOV_SOLVERS_HPP

#include "flexkrylov/decomp.hpp"
#include "flexkrylov/regparam.hpp"
#include "flexkrylov/run.hpp"
#include "flexkrylov/transforms.hpp"
#include "flexkrylov/weights.hpp"

#include <string>
#include <vector>

namespace flexkrylov {

/// Krylov drivers. The non-flexible methods are the identity-preconditioner
/// special cases of their flexible counterparts.
enum class Method {
  lsqr,
  lsmr,
  flsqr,
  flsmr,
  flsqr_i,
  flsqr_r,
  flsmr_i,
  flsmr_r,
  gmres,
  fgmres,
  gat,
};

struct MethodTraits {
  bool golub_kahan = true;    ///< false: flexible Arnoldi (square A only)
  bool lsmr_family = false;   ///< project the normal-equation residual
  bool flexible = false;      ///< reweight L_k from the previous iterate
  bool hybrid = false;        ///< Tikhonov term on the projected problem
  bool qr_regularizer = false;  ///< ||R_k y|| instead of ||y||
};

MethodTraits traits(Method m);
std::string to_string(Method m);
Method parse_method(const std::string& name);
const std::vector<Method>& all_methods();

struct StopRule {
  int max_iterations = 100;
  /// Stop when ||x_k - x_{k-1}|| / ||x_k|| stays below this for
  /// `stagnation_window` consecutive iterations; <= 0 disables the test.
  double stagnation_tol = 1e-8;
  int stagnation_window = 3;
  /// Stop once ||A x_k - b|| <= eta * eps (needs a noise norm in the policy).
  bool discrepancy = false;
};

struct SolverConfig {
  Method method = Method::flsqr;
  StopRule stop;
  WeightPolicy weights;
  ParamPolicy param;
  /// When set, per-iteration relative errors and the optimal policy use it.
  Vector x_true;
  /// Solve for s = Psi x with the sparsity weights applied to s.
  TransformPtr transform;
  /// Data-space transform for the Arnoldi path; defaults to `transform`.
  /// Golub-Kahan methods ignore it.
  TransformPtr data_transform;
  /// Explicit preconditioners L_1, L_2, ... overriding the weight policy.
  std::vector<DiagonalOperator> fixed_preconditioners;
  bool record_wall_time = false;
  bool keep_iterates = false;

  void validate(const LinearOperator& a) const;
};

/// FLSQR / FLSMR and their hybrid -I / -R variants (plus LSQR / LSMR).
///
/// Step k builds L_k from x_{k-1} (L_1 = I), expands the flexible Golub-Kahan
/// factorization, picks lambda per the configured policy and sets
/// x_k = Z_k y_k. Residual norms are read off the projected problem:
/// ||A x_k - b|| = ||M_k y - beta_1 e_1|| and
/// ||A^T (A x_k - b)|| = ||T_{k+1} M_k y - beta_1 t_11 e_1||.
SolverRun run_flexible(OperatorPtr a, const Vector& b, const SolverConfig& cfg);

/// GMRES / FGMRES / GAT on square A via the flexible Arnoldi process:
/// x_k = Zhat_k y_k with y_k = argmin ||Hhat_k y - ||r_0|| e_1||^2 + lambda ||y||^2.
SolverRun run_gat(OperatorPtr a, const Vector& b, const SolverConfig& cfg);

/// Dispatches on traits(cfg.method).golub_kahan.
SolverRun run_krylov(OperatorPtr a, const Vector& b, const SolverConfig& cfg);

/// Runs FLSMR on (A, b) and FGMRES on A^T A x = A^T b with the same fixed
/// preconditioners for k steps and returns max_j ||x_j^FLSMR - x_j^FGMRES|| /
/// ||x_j^FLSMR|| over the common iterations.
double verify_flsmr_fgmres_equivalence(OperatorPtr a, const Vector& b,
                                       const std::vector<DiagonalOperator>& preconditioners,
                                       int k);

}  // namespace flexkrylov

#endif  // FLEXKRYLOV_SOLVERS_HPP
