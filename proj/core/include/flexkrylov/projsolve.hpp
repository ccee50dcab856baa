#ifndef FLEXKRYLOV_PROJSOLVE_HPP
#define FLEXKRYLOV_PROJSOLVE_HPP

#include "flexkrylov/common.hpp"

#include <Eigen/SVD>

#include <vector>

namespace flexkrylov {

/// min_y ||C y - beta e_1||^2 + lambda ||R y||^2 with C (k+1) x k.
///
/// `reg` empty means R = I. For the LSQR family C = M_k and beta = beta_1;
/// for the LSMR family C = T_{k+1} M_k and beta = beta_1 t_11.
struct ProjectedProblem {
  Matrix coeff;
  double beta = 0.0;
  Matrix reg;

  Index size() const noexcept { return coeff.cols(); }
  bool identity_reg() const noexcept { return reg.size() == 0; }
  /// Throws ConfigError on inconsistent shapes or a singular R.
  void validate() const;
  Vector rhs() const;
};

struct TikhonovSolution {
  Vector y;
  double residual = 0.0;  ///< ||C y - beta e_1||
  bool rank_deficient = false;
};

/// Solves the augmented least-squares system [C; sqrt(lambda) R] y = [beta e_1; 0]
/// with a complete orthogonal decomposition, so a rank-deficient lambda = 0
/// problem returns the minimum-norm solution.
TikhonovSolution tikhonov_projected(const ProjectedProblem& p, double lambda);

/// ||C y(lambda) - beta e_1|| for each lambda.
std::vector<double> projected_residual_curve(const ProjectedProblem& p,
                                             const std::vector<double>& lambdas);

/// SVD of C R^{-1}, cached so residual(lambda) and y(lambda) cost O(k^2) and
/// parameter searches can sweep lambda cheaply.
class SpectralTikhonov {
 public:
  explicit SpectralTikhonov(const ProjectedProblem& p);

  Vector solve(double lambda) const;
  double residual(double lambda) const;
  /// d residual / d lambda, for Newton steps.
  double residual_derivative(double lambda) const;
  double residual_at_zero() const { return residual(0.0); }
  double beta() const noexcept { return beta_; }
  const Vector& singular_values() const noexcept { return sigma_; }

  /// Filter coefficients f(lambda): y(lambda) = R^{-1} Q f.
  Vector filtered_coefficients(double lambda) const;
  /// G R^{-1} Q for an arbitrary G with k columns; combined with
  /// filtered_coefficients() it evaluates G y(lambda) in O(rows * k).
  Matrix map_through(const Matrix& g) const;

 private:
  Matrix r_;
  Matrix q_;       // right singular vectors
  Vector sigma_;
  Vector gamma_;   // P^T (beta e_1)
  double out_of_range_sq_ = 0.0;
  double beta_ = 0.0;
  bool identity_reg_ = true;
  double cutoff_ = 0.0;
};

/// Thin QR of a growing basis Z_k = Q_k R_k, one column per append.
class IncrementalQr {
 public:
  /// Returns false (and leaves the factors untouched) when the new column is
  /// numerically dependent on the previous ones.
  bool append(const Vector& z);

  Index size() const noexcept { return static_cast<Index>(q_.size()); }
  Matrix r_matrix() const { return r_.topLeftCorner(size(), size()); }
  Matrix q_matrix() const;

 private:
  std::vector<Vector> q_;
  Matrix r_;
};

struct SingularValueEstimate {
  Vector values;  ///< descending
  double r_condition = 1.0;
  bool ill_conditioned = false;  ///< cond(R) > 1e12
};

/// Singular values of M R^{-1}. Since Z_k = Q_k R_k and A Z_k = U_{k+1} M_k,
/// these are the singular values of A Q_k.
SingularValueEstimate approx_singular_values(const Matrix& m, const Matrix& r);

}  // namespace flexkrylov

#endif  // FLEXKRYLOV_PROJSOLVE_HPP
