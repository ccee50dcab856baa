#ifndef FLEXKRYLOV_LINOP_HPP
#define FLEXKRYLOV_LINOP_HPP

#include "flexkrylov/common.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace flexkrylov {

/// Matrix-free linear map R^cols -> R^rows with its adjoint.
///
/// Implementations are immutable after construction, so one operator may be
/// applied from several threads at once. The public entry points check sizes
/// and never modify their argument.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  Vector apply(const Vector& x) const;
  Vector apply_adjoint(const Vector& y) const;

  virtual std::string describe() const = 0;

 protected:
  LinearOperator(Index rows, Index cols);

  /// `y` arrives sized rows() and zeroed.
  virtual void do_apply(const Vector& x, Vector& y) const = 0;
  /// `x` arrives sized cols() and zeroed.
  virtual void do_apply_adjoint(const Vector& y, Vector& x) const = 0;

 private:
  Index rows_;
  Index cols_;
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

class IdentityOperator final : public LinearOperator {
 public:
  explicit IdentityOperator(Index n);
  std::string describe() const override;

 protected:
  void do_apply(const Vector& x, Vector& y) const override;
  void do_apply_adjoint(const Vector& y, Vector& x) const override;
};

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Matrix m);
  const Matrix& matrix() const noexcept { return m_; }
  std::string describe() const override;

 protected:
  void do_apply(const Vector& x, Vector& y) const override;
  void do_apply_adjoint(const Vector& y, Vector& x) const override;

 private:
  Matrix m_;
};

/// Square diagonal map with strictly positive entries; holds the IRN weights.
class DiagonalOperator final : public LinearOperator {
 public:
  explicit DiagonalOperator(Vector diag);
  static DiagonalOperator identity(Index n);

  const Vector& diagonal() const noexcept { return diag_; }
  DiagonalOperator inverse() const;
  Vector apply_inverse(const Vector& x) const;
  std::string describe() const override;

 protected:
  void do_apply(const Vector& x, Vector& y) const override;
  void do_apply_adjoint(const Vector& y, Vector& x) const override;

 private:
  Vector diag_;
};

/// Compressed sparse row storage. Row-major order keeps ray-by-ray assembly
/// (tomography) append-only.
struct CsrMatrix {
  Index rows = 0;
  Index cols = 0;
  std::vector<std::int64_t> row_ptr{0};
  std::vector<std::int32_t> col_idx;
  std::vector<double> values;

  std::size_t nnz() const noexcept { return values.size(); }
  Matrix to_dense() const;
};

class SparseOperator final : public LinearOperator {
 public:
  explicit SparseOperator(CsrMatrix csr);
  const CsrMatrix& csr() const noexcept { return csr_; }
  std::string describe() const override;

 protected:
  void do_apply(const Vector& x, Vector& y) const override;
  void do_apply_adjoint(const Vector& y, Vector& x) const override;

 private:
  CsrMatrix csr_;
};

/// Wraps a pair of callables. Both must write into a pre-sized, zeroed output.
class FunctionOperator final : public LinearOperator {
 public:
  using Kernel = std::function<void(const Vector&, Vector&)>;
  FunctionOperator(Index rows, Index cols, Kernel forward, Kernel adjoint,
                   std::string name = "function");
  std::string describe() const override;

 protected:
  void do_apply(const Vector& x, Vector& y) const override;
  void do_apply_adjoint(const Vector& y, Vector& x) const override;

 private:
  Kernel forward_;
  Kernel adjoint_;
  std::string name_;
};

/// Product op_0 * op_1 * ... * op_{n-1}, applied right to left.
class ComposedOperator final : public LinearOperator {
 public:
  explicit ComposedOperator(std::vector<OperatorPtr> factors);
  const std::vector<OperatorPtr>& factors() const noexcept { return factors_; }
  std::string describe() const override;

 protected:
  void do_apply(const Vector& x, Vector& y) const override;
  void do_apply_adjoint(const Vector& y, Vector& x) const override;

 private:
  std::vector<OperatorPtr> factors_;
};

/// The adjoint of another operator, sharing its storage.
class AdjointOperator final : public LinearOperator {
 public:
  explicit AdjointOperator(OperatorPtr inner);
  std::string describe() const override;

 protected:
  void do_apply(const Vector& x, Vector& y) const override;
  void do_apply_adjoint(const Vector& y, Vector& x) const override;

 private:
  OperatorPtr inner_;
};

/// [top; bottom] with a common column space. Used for augmented
/// least-squares systems such as [A; sqrt(lambda) L].
class StackedOperator final : public LinearOperator {
 public:
  StackedOperator(OperatorPtr top, OperatorPtr bottom);
  std::string describe() const override;

 protected:
  void do_apply(const Vector& x, Vector& y) const override;
  void do_apply_adjoint(const Vector& y, Vector& x) const override;

 private:
  OperatorPtr top_;
  OperatorPtr bottom_;
};

/// alpha * inner.
class ScaledOperator final : public LinearOperator {
 public:
  ScaledOperator(OperatorPtr inner, double alpha);
  std::string describe() const override;

 protected:
  void do_apply(const Vector& x, Vector& y) const override;
  void do_apply_adjoint(const Vector& y, Vector& x) const override;

 private:
  OperatorPtr inner_;
  double alpha_;
};

/// Counts forward and adjoint applications of the wrapped operator.
class CountingOperator final : public LinearOperator {
 public:
  explicit CountingOperator(OperatorPtr inner);

  std::int64_t forward_count() const noexcept { return forward_.load(); }
  std::int64_t adjoint_count() const noexcept { return adjoint_.load(); }
  std::int64_t total_count() const noexcept { return forward_count() + adjoint_count(); }
  void reset() const noexcept;
  std::string describe() const override;

 protected:
  void do_apply(const Vector& x, Vector& y) const override;
  void do_apply_adjoint(const Vector& y, Vector& x) const override;

 private:
  OperatorPtr inner_;
  mutable std::atomic<std::int64_t> forward_{0};
  mutable std::atomic<std::int64_t> adjoint_{0};
};

/// Builds ops[0] * ops[1] * ... ; throws ConfigError naming the first
/// mismatching adjacent pair.
OperatorPtr compose(const std::vector<OperatorPtr>& ops);

OperatorPtr adjoint(OperatorPtr op);
OperatorPtr stack(OperatorPtr top, OperatorPtr bottom);
OperatorPtr scale(OperatorPtr op, double alpha);

/// H = psi_tilde * A * psi^T for orthonormal psi (so psi^{-1} = psi^T).
/// A null psi_tilde means the identity on the data space.
OperatorPtr conjugate_by_transform(OperatorPtr a, OperatorPtr psi, OperatorPtr psi_tilde = nullptr);

/// Largest singular value estimated by power iteration on A^T A.
double estimate_norm(const LinearOperator& a, int iterations = 30, std::uint64_t seed = 0x5eed);

/// Assembles the explicit matrix column by column. Meant for small operators.
Matrix to_dense(const LinearOperator& a);

}  // namespace flexkrylov

#endif  // FLEXKRYLOV_LINOP_HPP
