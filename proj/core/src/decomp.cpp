#include "flexkrylov/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace flexkrylov {

namespace {

Matrix columns_to_matrix(const std::vector<Vector>& cols, Index rows, Index count) {
  Matrix out(rows, count);
  for (Index j = 0; j < count; ++j) out.col(j) = cols[static_cast<std::size_t>(j)];
  return out;
}

Vector combine_columns(const std::vector<Vector>& cols, const Vector& y) {
  if (y.size() > static_cast<Index>(cols.size()) || cols.empty()) {
    throw ConfigError("combine: coefficient vector longer than the basis");
  }
  Vector x = Vector::Zero(cols.front().size());
  for (Index j = 0; j < y.size(); ++j) x += y[j] * cols[static_cast<std::size_t>(j)];
  return x;
}

void grow(Matrix& m, Index rows, Index cols) {
  const Index r0 = m.rows();
  const Index c0 = m.cols();
  m.conservativeResize(rows, cols);
  if (rows > r0) m.bottomRows(rows - r0).setZero();
  if (cols > c0) m.rightCols(cols - c0).topRows(std::min(r0, rows)).setZero();
}

void check_finite(const Vector& w, const char* where) {
  if (!w.allFinite()) throw NumericalError(std::string(where) + ": non-finite basis vector");
}

}  // namespace

double orthogonalize(Vector& w, const std::vector<Vector>& basis, Index count, double* coeffs) {
  for (Index j = 0; j < count; ++j) coeffs[j] = 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    for (Index j = 0; j < count; ++j) {
      const Vector& q = basis[static_cast<std::size_t>(j)];
      const double c = q.dot(w);
      w -= c * q;
      coeffs[j] += c;
    }
  }
  return w.norm();
}

// --- Flexible Golub-Kahan ---------------------------------------------------

FgkState FgkState::init(OperatorPtr a, const Vector& b) {
  if (!a) throw ConfigError("fgk_init: null operator");
  if (b.size() != a->rows()) {
    std::ostringstream os;
    os << "fgk_init: right-hand side has length " << b.size() << ", operator has " << a->rows()
       << " rows";
    throw ConfigError(os.str());
  }
  const double beta = b.norm();
  if (!std::isfinite(beta)) throw NumericalError("fgk_init: non-finite right-hand side");
  if (!(beta > 0.0)) throw ConfigError("fgk_init: zero right-hand side, nothing to solve");

  FgkState s;
  s.a_ = std::move(a);
  s.beta1_ = beta;
  s.u_.push_back(b / beta);

  Vector w = s.a_->apply_adjoint(s.u_[0]);
  check_finite(w, "fgk_init");
  const double t = w.norm();
  s.anorm_ = t;
  s.t_ = Matrix::Zero(1, 1);
  s.m_ = Matrix::Zero(1, 0);
  if (!(t > 0.0)) {
    // A^T b = 0: x = 0 already minimizes the residual.
    s.breakdown_ = Breakdown::solution_space;
    s.v_.push_back(Vector::Zero(s.a_->cols()));
    return s;
  }
  s.t_(0, 0) = t;
  s.v_.push_back(w / t);
  return s;
}

Breakdown FgkState::expand(const DiagonalOperator& l_inverse) {
  if (!can_expand()) throw ConfigError("fgk_expand: state has broken down and cannot grow");
  if (l_inverse.rows() != a_->cols()) {
    throw ConfigError("fgk_expand: preconditioner size does not match operator columns");
  }
  const Index k = k_;  // zero-based index of the new column
  const Vector& vk = v_[static_cast<std::size_t>(k)];

  Vector zk = l_inverse.apply(vk);
  const double znorm = zk.norm();
  Vector w = a_->apply(zk);
  check_finite(w, "fgk_expand");
  if (znorm > 0.0) anorm_ = std::max(anorm_, w.norm() / znorm);

  grow(m_, k + 2, k + 1);
  std::vector<double> coeffs(static_cast<std::size_t>(k + 1));
  const double mnext = orthogonalize(w, u_, k + 1, coeffs.data());
  for (Index j = 0; j <= k; ++j) m_(j, k) = coeffs[static_cast<std::size_t>(j)];
  z_.push_back(std::move(zk));
  k_ = k + 1;

  grow(t_, k + 2, k + 2);
  if (mnext <= kBreakdownTolerance * anorm_ * znorm) {
    m_(k + 1, k) = 0.0;
    u_.push_back(Vector::Zero(a_->rows()));
    v_.push_back(Vector::Zero(a_->cols()));
    breakdown_ = Breakdown::residual_space;
    return breakdown_;
  }
  m_(k + 1, k) = mnext;
  u_.push_back(w / mnext);

  Vector g = a_->apply_adjoint(u_.back());
  check_finite(g, "fgk_expand");
  anorm_ = std::max(anorm_, g.norm());
  coeffs.resize(static_cast<std::size_t>(k + 1));
  const double tnext = orthogonalize(g, v_, k + 1, coeffs.data());
  for (Index j = 0; j <= k; ++j) t_(j, k + 1) = coeffs[static_cast<std::size_t>(j)];
  if (tnext <= kBreakdownTolerance * anorm_) {
    t_(k + 1, k + 1) = 0.0;
    v_.push_back(Vector::Zero(a_->cols()));
    breakdown_ = Breakdown::solution_space;
    return breakdown_;
  }
  t_(k + 1, k + 1) = tnext;
  v_.push_back(g / tnext);
  return Breakdown::none;
}

Matrix FgkState::m_matrix() const { return m_.topLeftCorner(k_ + 1, k_); }

Matrix FgkState::t_matrix() const { return t_.topLeftCorner(k_ + 1, k_ + 1); }

Matrix FgkState::u_matrix() const { return columns_to_matrix(u_, a_->rows(), k_ + 1); }

Matrix FgkState::v_matrix() const { return columns_to_matrix(v_, a_->cols(), k_ + 1); }

Matrix FgkState::z_matrix() const { return columns_to_matrix(z_, a_->cols(), k_); }

Vector FgkState::combine(const Vector& y) const {
  if (k_ == 0) return Vector::Zero(a_->cols());
  return combine_columns(z_, y);
}

// --- Flexible Arnoldi -------------------------------------------------------

ArnoldiState ArnoldiState::init(OperatorPtr a, const Vector& b) {
  if (!a) throw ConfigError("arnoldi_init: null operator");
  if (!a->is_square()) throw ConfigError("arnoldi_init: Arnoldi methods need a square operator");
  if (b.size() != a->rows()) throw ConfigError("arnoldi_init: right-hand side length mismatch");
  const double beta = b.norm();
  if (!std::isfinite(beta)) throw NumericalError("arnoldi_init: non-finite right-hand side");
  if (!(beta > 0.0)) throw ConfigError("arnoldi_init: zero right-hand side, nothing to solve");
  ArnoldiState s;
  s.a_ = std::move(a);
  s.r0norm_ = beta;
  s.v_.push_back(b / beta);
  s.h_ = Matrix::Zero(1, 0);
  return s;
}

bool ArnoldiState::expand(const DiagonalOperator& l_inverse) {
  if (broken_down_) throw ConfigError("arnoldi_expand: state has broken down and cannot grow");
  if (l_inverse.rows() != a_->cols()) {
    throw ConfigError("arnoldi_expand: preconditioner size does not match operator");
  }
  const Index k = k_;
  Vector zk = l_inverse.apply(v_[static_cast<std::size_t>(k)]);
  const double znorm = zk.norm();
  Vector w = a_->apply(zk);
  check_finite(w, "arnoldi_expand");
  if (znorm > 0.0) anorm_ = std::max(anorm_, w.norm() / znorm);

  grow(h_, k + 2, k + 1);
  std::vector<double> coeffs(static_cast<std::size_t>(k + 1));
  const double hnext = orthogonalize(w, v_, k + 1, coeffs.data());
  for (Index j = 0; j <= k; ++j) h_(j, k) = coeffs[static_cast<std::size_t>(j)];
  z_.push_back(std::move(zk));
  k_ = k + 1;
  if (hnext <= kBreakdownTolerance * anorm_ * znorm) {
    h_(k + 1, k) = 0.0;
    v_.push_back(Vector::Zero(a_->rows()));
    broken_down_ = true;
    return true;
  }
  h_(k + 1, k) = hnext;
  v_.push_back(w / hnext);
  return false;
}

Matrix ArnoldiState::h_matrix() const { return h_.topLeftCorner(k_ + 1, k_); }

Matrix ArnoldiState::v_matrix() const { return columns_to_matrix(v_, a_->rows(), k_ + 1); }

Matrix ArnoldiState::z_matrix() const { return columns_to_matrix(z_, a_->cols(), k_); }

Vector ArnoldiState::combine(const Vector& y) const {
  if (k_ == 0) return Vector::Zero(a_->cols());
  return combine_columns(z_, y);
}

}  // namespace flexkrylov
