#ifndef FLEXKRYLOV_TRANSFORMS_HPP
#define FLEXKRYLOV_TRANSFORMS_HPP

#include "flexkrylov/linop.hpp"

#include <memory>

namespace flexkrylov {

/// Orthonormal change of basis: apply() is the forward transform and
/// apply_adjoint() is its exact inverse.
class OrthonormalTransform : public LinearOperator {
 public:
  Vector forward(const Vector& x) const { return apply(x); }
  Vector inverse(const Vector& s) const { return apply_adjoint(s); }
  int levels() const noexcept { return levels_; }

 protected:
  OrthonormalTransform(Index n, int levels) : LinearOperator(n, n), levels_(levels) {}

 private:
  int levels_;
};

using TransformPtr = std::shared_ptr<const OrthonormalTransform>;

/// Multi-level orthonormal Haar transform of a 1D signal.
///
/// Coefficient layout: approximation block first, then detail blocks from the
/// coarsest level to the finest. Each level maps a pair (a, b) to
/// ((a + b)/sqrt(2), (a - b)/sqrt(2)).
class HaarTransform1D final : public OrthonormalTransform {
 public:
  HaarTransform1D(Index length, int levels);
  std::string describe() const override;

 protected:
  void do_apply(const Vector& x, Vector& y) const override;
  void do_apply_adjoint(const Vector& y, Vector& x) const override;
};

/// Multi-level separable 2D Haar transform of a row-major rows x cols image.
///
/// Each level transforms the rows, then the columns, of the current
/// approximation block. The coefficient vector holds the coarsest LL block
/// (row-major) followed, for each level from coarsest to finest, by LH
/// (top-right quadrant: horizontal detail), HL (bottom-left) and HH blocks.
class HaarTransform2D final : public OrthonormalTransform {
 public:
  HaarTransform2D(Index rows, Index cols, int levels);
  Index image_rows() const noexcept { return rows_; }
  Index image_cols() const noexcept { return cols_; }
  std::string describe() const override;

 protected:
  void do_apply(const Vector& x, Vector& y) const override;
  void do_apply_adjoint(const Vector& y, Vector& x) const override;

 private:
  Index rows_;
  Index cols_;
};

Vector haar_forward(const Vector& x, int levels);
Vector haar_inverse(const Vector& s, int levels);
Vector haar_forward_2d(const Vector& image, Index rows, Index cols, int levels);
Vector haar_inverse_2d(const Vector& coeffs, Index rows, Index cols, int levels);

/// Number of entries with |s_i| > tol.
Index count_sparsity(const Vector& s, double tol);

}  // namespace flexkrylov

#endif  // FLEXKRYLOV_TRANSFORMS_HPP
