#ifndef FLEXKRYLOV_DECOMP_HPP
#define FLEXKRYLOV_DECOMP_HPP

#include "flexkrylov/linop.hpp"

#include <vector>

namespace flexkrylov {

/// Relative size below which a new basis direction counts as a breakdown.
inline constexpr double kBreakdownTolerance = 1e-14;

enum class Breakdown {
  none,
  residual_space,  ///< A z_k lies in span(U_k): the subspace holds the exact solution
  solution_space,  ///< A^T u_{k+1} lies in span(V_k): no new direction available
};

/// Flexible Golub-Kahan process
///
///   A Z_k = U_{k+1} M_k,   A^T U_{k+1} = V_{k+1} T_{k+1},
///
/// with z_i = L_i^{-1} v_i for an iteration-dependent diagonal L_i. M_k is
/// (k+1) x k upper Hessenberg, T_{k+1} is (k+1) x (k+1) upper triangular, and
/// U, V have orthonormal columns (modified Gram-Schmidt plus one
/// reorthogonalization pass).
///
/// The state is grown one column at a time. Each call to expand() costs one
/// product with A and one with A^T; init() costs one product with A^T.
class FgkState {
 public:
  /// u_1 = b / ||b||, v_1 and t_11 from A^T u_1. Throws ConfigError for b = 0.
  static FgkState init(OperatorPtr a, const Vector& b);

  /// Appends z_k = L_k^{-1} v_k, u_{k+1} and v_{k+1}. Returns the breakdown
  /// detected during this step; after a breakdown the state may not grow.
  Breakdown expand(const DiagonalOperator& l_inverse);

  Index steps() const noexcept { return k_; }
  Breakdown breakdown() const noexcept { return breakdown_; }
  bool can_expand() const noexcept { return breakdown_ == Breakdown::none; }

  double beta1() const noexcept { return beta1_; }
  double t11() const noexcept { return t_.rows() ? t_(0, 0) : 0.0; }
  double norm_estimate() const noexcept { return anorm_; }

  /// M_k, (k+1) x k.
  Matrix m_matrix() const;
  /// T_{k+1}, (k+1) x (k+1).
  Matrix t_matrix() const;
  Matrix u_matrix() const;
  Matrix v_matrix() const;
  Matrix z_matrix() const;

  const Vector& z(Index i) const { return z_.at(static_cast<std::size_t>(i)); }
  const std::vector<Vector>& z_columns() const noexcept { return z_; }

  /// Z_k y.
  Vector combine(const Vector& y) const;

  const LinearOperator& op() const noexcept { return *a_; }

 private:
  FgkState() = default;

  OperatorPtr a_;
  std::vector<Vector> u_;
  std::vector<Vector> v_;
  std::vector<Vector> z_;
  Matrix m_;  // grows to (k+1) x k
  Matrix t_;  // grows to (k+1) x (k+1)
  double beta1_ = 0.0;
  double anorm_ = 0.0;
  Index k_ = 0;
  Breakdown breakdown_ = Breakdown::none;
};

/// Flexible Arnoldi process for square A (x_0 = 0):
///
///   A Zhat_k = Vhat_{k+1} Hhat_k,   zhat_i = L_i^{-1} vhat_i,
///
/// one product with A per step. With L_i fixed this is right-preconditioned
/// Arnoldi (GMRES).
class ArnoldiState {
 public:
  static ArnoldiState init(OperatorPtr a, const Vector& b);

  /// Returns true on happy breakdown (h_{k+1,k} ~ 0).
  bool expand(const DiagonalOperator& l_inverse);

  Index steps() const noexcept { return k_; }
  bool broken_down() const noexcept { return broken_down_; }
  double r0_norm() const noexcept { return r0norm_; }
  double norm_estimate() const noexcept { return anorm_; }

  /// Hhat_k, (k+1) x k.
  Matrix h_matrix() const;
  Matrix v_matrix() const;
  Matrix z_matrix() const;
  Vector combine(const Vector& y) const;

 private:
  ArnoldiState() = default;

  OperatorPtr a_;
  std::vector<Vector> v_;
  std::vector<Vector> z_;
  Matrix h_;
  double r0norm_ = 0.0;
  double anorm_ = 0.0;
  Index k_ = 0;
  bool broken_down_ = false;
};

/// Orthogonalizes w against basis[0..count) with modified Gram-Schmidt and one
/// reorthogonalization pass. Accumulated coefficients land in `coeffs`
/// (length >= count). Returns ||w|| after orthogonalization.
double orthogonalize(Vector& w, const std::vector<Vector>& basis, Index count, double* coeffs);

}  // namespace flexkrylov

#endif  // FLEXKRYLOV_DECOMP_HPP
