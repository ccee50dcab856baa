#include "flexkrylov/linop.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace flexkrylov {

namespace {

std::string dims(const LinearOperator& op) {
  std::ostringstream os;
  os << op.rows() << "x" << op.cols();
  return os.str();
}

}  // namespace

LinearOperator::LinearOperator(Index rows, Index cols) : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0) {
    throw ConfigError("linear operator dimensions must be positive");
  }
}

Vector LinearOperator::apply(const Vector& x) const {
  if (x.size() != cols_) {
    std::ostringstream os;
    os << describe() << ": apply expects length " << cols_ << ", got " << x.size();
    throw ConfigError(os.str());
  }
  Vector y = Vector::Zero(rows_);
  do_apply(x, y);
  return y;
}

Vector LinearOperator::apply_adjoint(const Vector& y) const {
  if (y.size() != rows_) {
    std::ostringstream os;
    os << describe() << ": apply_adjoint expects length " << rows_ << ", got " << y.size();
    throw ConfigError(os.str());
  }
  Vector x = Vector::Zero(cols_);
  do_apply_adjoint(y, x);
  return x;
}

// --- Identity ---------------------------------------------------------------

IdentityOperator::IdentityOperator(Index n) : LinearOperator(n, n) {}

std::string IdentityOperator::describe() const { return "identity(" + dims(*this) + ")"; }

void IdentityOperator::do_apply(const Vector& x, Vector& y) const { y = x; }

void IdentityOperator::do_apply_adjoint(const Vector& y, Vector& x) const { x = y; }

// --- Dense ------------------------------------------------------------------

DenseOperator::DenseOperator(Matrix m)
    : LinearOperator(m.rows(), m.cols()), m_(std::move(m)) {}

std::string DenseOperator::describe() const { return "dense(" + dims(*this) + ")"; }

void DenseOperator::do_apply(const Vector& x, Vector& y) const { y.noalias() = m_ * x; }

void DenseOperator::do_apply_adjoint(const Vector& y, Vector& x) const {
  x.noalias() = m_.transpose() * y;
}

// --- Diagonal ---------------------------------------------------------------

DiagonalOperator::DiagonalOperator(Vector diag)
    : LinearOperator(diag.size(), diag.size()), diag_(std::move(diag)) {
  for (Index i = 0; i < diag_.size(); ++i) {
    if (!(diag_[i] > 0.0) || !std::isfinite(diag_[i])) {
      std::ostringstream os;
      os << "diagonal operator entry " << i << " is not finite and positive (" << diag_[i] << ")";
      throw ConfigError(os.str());
    }
  }
}

DiagonalOperator DiagonalOperator::identity(Index n) { return DiagonalOperator(Vector::Ones(n)); }

DiagonalOperator DiagonalOperator::inverse() const {
  return DiagonalOperator(diag_.cwiseInverse());
}

Vector DiagonalOperator::apply_inverse(const Vector& x) const {
  if (x.size() != diag_.size()) {
    throw ConfigError("diagonal operator: apply_inverse length mismatch");
  }
  return x.cwiseQuotient(diag_);
}

std::string DiagonalOperator::describe() const { return "diagonal(" + dims(*this) + ")"; }

void DiagonalOperator::do_apply(const Vector& x, Vector& y) const { y = diag_.cwiseProduct(x); }

void DiagonalOperator::do_apply_adjoint(const Vector& y, Vector& x) const {
  x = diag_.cwiseProduct(y);
}

// --- Sparse -----------------------------------------------------------------

Matrix CsrMatrix::to_dense() const {
  Matrix d = Matrix::Zero(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (auto p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      d(i, col_idx[p]) += values[p];
    }
  }
  return d;
}

SparseOperator::SparseOperator(CsrMatrix csr)
    : LinearOperator(csr.rows, csr.cols), csr_(std::move(csr)) {
  if (static_cast<Index>(csr_.row_ptr.size()) != csr_.rows + 1 ||
      csr_.col_idx.size() != csr_.values.size() ||
      csr_.row_ptr.back() != static_cast<std::int64_t>(csr_.values.size())) {
    throw ConfigError("sparse operator: inconsistent CSR arrays");
  }
}

std::string SparseOperator::describe() const {
  std::ostringstream os;
  os << "sparse(" << dims(*this) << ", nnz=" << csr_.nnz() << ")";
  return os.str();
}

void SparseOperator::do_apply(const Vector& x, Vector& y) const {
  for (Index i = 0; i < csr_.rows; ++i) {
    double acc = 0.0;
    for (auto p = csr_.row_ptr[i]; p < csr_.row_ptr[i + 1]; ++p) {
      acc += csr_.values[p] * x[csr_.col_idx[p]];
    }
    y[i] = acc;
  }
}

void SparseOperator::do_apply_adjoint(const Vector& y, Vector& x) const {
  for (Index i = 0; i < csr_.rows; ++i) {
    const double yi = y[i];
    if (yi == 0.0) continue;
    for (auto p = csr_.row_ptr[i]; p < csr_.row_ptr[i + 1]; ++p) {
      x[csr_.col_idx[p]] += csr_.values[p] * yi;
    }
  }
}

// --- Function ---------------------------------------------------------------

FunctionOperator::FunctionOperator(Index rows, Index cols, Kernel forward, Kernel adjoint,
                                   std::string name)
    : LinearOperator(rows, cols),
      forward_(std::move(forward)),
      adjoint_(std::move(adjoint)),
      name_(std::move(name)) {
  if (!forward_ || !adjoint_) {
    throw ConfigError("function operator needs both forward and adjoint kernels");
  }
}

std::string FunctionOperator::describe() const { return name_ + "(" + dims(*this) + ")"; }

void FunctionOperator::do_apply(const Vector& x, Vector& y) const { forward_(x, y); }

void FunctionOperator::do_apply_adjoint(const Vector& y, Vector& x) const { adjoint_(y, x); }

// --- Composition ------------------------------------------------------------

ComposedOperator::ComposedOperator(std::vector<OperatorPtr> factors)
    : LinearOperator(factors.empty() || !factors.front() ? 1 : factors.front()->rows(),
                     factors.empty() || !factors.back() ? 1 : factors.back()->cols()),
      factors_(std::move(factors)) {
  if (factors_.empty()) throw ConfigError("compose: empty operator list");
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (!factors_[i]) throw ConfigError("compose: null operator at position " + std::to_string(i));
  }
  for (std::size_t i = 0; i + 1 < factors_.size(); ++i) {
    if (factors_[i]->cols() != factors_[i + 1]->rows()) {
      std::ostringstream os;
      os << "compose: dimension mismatch between operator " << i << " ("
         << factors_[i]->describe() << ") and operator " << i + 1 << " ("
         << factors_[i + 1]->describe() << ")";
      throw ConfigError(os.str());
    }
  }
}

std::string ComposedOperator::describe() const {
  std::string s = "compose[";
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) s += " * ";
    s += factors_[i]->describe();
  }
  return s + "]";
}

void ComposedOperator::do_apply(const Vector& x, Vector& y) const {
  Vector t = x;
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) t = (*it)->apply(t);
  y = std::move(t);
}

void ComposedOperator::do_apply_adjoint(const Vector& y, Vector& x) const {
  Vector t = y;
  for (const auto& f : factors_) t = f->apply_adjoint(t);
  x = std::move(t);
}

// --- Adjoint / stacked / scaled ---------------------------------------------

AdjointOperator::AdjointOperator(OperatorPtr inner)
    : LinearOperator(inner ? inner->cols() : 1, inner ? inner->rows() : 1),
      inner_(std::move(inner)) {
  if (!inner_) throw ConfigError("adjoint of null operator");
}

std::string AdjointOperator::describe() const { return "adjoint(" + inner_->describe() + ")"; }

void AdjointOperator::do_apply(const Vector& x, Vector& y) const { y = inner_->apply_adjoint(x); }

void AdjointOperator::do_apply_adjoint(const Vector& y, Vector& x) const {
  x = inner_->apply(y);
}

StackedOperator::StackedOperator(OperatorPtr top, OperatorPtr bottom)
    : LinearOperator((top ? top->rows() : 0) + (bottom ? bottom->rows() : 0),
                     top ? top->cols() : 1),
      top_(std::move(top)),
      bottom_(std::move(bottom)) {
  if (!top_ || !bottom_) throw ConfigError("stack: null operator");
  if (top_->cols() != bottom_->cols()) {
    throw ConfigError("stack: column mismatch between " + top_->describe() + " and " +
                      bottom_->describe());
  }
}

std::string StackedOperator::describe() const {
  return "stack[" + top_->describe() + "; " + bottom_->describe() + "]";
}

void StackedOperator::do_apply(const Vector& x, Vector& y) const {
  y.head(top_->rows()) = top_->apply(x);
  y.tail(bottom_->rows()) = bottom_->apply(x);
}

void StackedOperator::do_apply_adjoint(const Vector& y, Vector& x) const {
  x = top_->apply_adjoint(y.head(top_->rows()));
  x += bottom_->apply_adjoint(y.tail(bottom_->rows()));
}

ScaledOperator::ScaledOperator(OperatorPtr inner, double alpha)
    : LinearOperator(inner ? inner->rows() : 1, inner ? inner->cols() : 1),
      inner_(std::move(inner)),
      alpha_(alpha) {
  if (!inner_) throw ConfigError("scale: null operator");
}

std::string ScaledOperator::describe() const {
  std::ostringstream os;
  os << alpha_ << "*" << inner_->describe();
  return os.str();
}

void ScaledOperator::do_apply(const Vector& x, Vector& y) const { y = alpha_ * inner_->apply(x); }

void ScaledOperator::do_apply_adjoint(const Vector& y, Vector& x) const {
  x = alpha_ * inner_->apply_adjoint(y);
}

// --- Counting ---------------------------------------------------------------

CountingOperator::CountingOperator(OperatorPtr inner)
    : LinearOperator(inner ? inner->rows() : 1, inner ? inner->cols() : 1),
      inner_(std::move(inner)) {
  if (!inner_) throw ConfigError("counting wrapper of null operator");
}

void CountingOperator::reset() const noexcept {
  forward_ = 0;
  adjoint_ = 0;
}

std::string CountingOperator::describe() const { return inner_->describe(); }

void CountingOperator::do_apply(const Vector& x, Vector& y) const {
  ++forward_;
  y = inner_->apply(x);
}

void CountingOperator::do_apply_adjoint(const Vector& y, Vector& x) const {
  ++adjoint_;
  x = inner_->apply_adjoint(y);
}

// --- Free functions ---------------------------------------------------------

OperatorPtr compose(const std::vector<OperatorPtr>& ops) {
  if (ops.size() == 1) {
    if (!ops.front()) throw ConfigError("compose: null operator at position 0");
    return ops.front();
  }
  return std::make_shared<ComposedOperator>(ops);
}

OperatorPtr adjoint(OperatorPtr op) { return std::make_shared<AdjointOperator>(std::move(op)); }

OperatorPtr stack(OperatorPtr top, OperatorPtr bottom) {
  return std::make_shared<StackedOperator>(std::move(top), std::move(bottom));
}

OperatorPtr scale(OperatorPtr op, double alpha) {
  return std::make_shared<ScaledOperator>(std::move(op), alpha);
}

OperatorPtr conjugate_by_transform(OperatorPtr a, OperatorPtr psi, OperatorPtr psi_tilde) {
  if (!a || !psi) throw ConfigError("conjugate_by_transform: null operator");
  if (!psi->is_square()) throw ConfigError("conjugate_by_transform: transform must be square");
  if (psi->rows() != a->cols()) {
    std::ostringstream os;
    os << "conjugate_by_transform: transform of length " << psi->rows()
       << " does not match operator with " << a->cols() << " columns";
    throw ConfigError(os.str());
  }
  std::vector<OperatorPtr> factors;
  if (psi_tilde) {
    if (!psi_tilde->is_square() || psi_tilde->cols() != a->rows()) {
      throw ConfigError("conjugate_by_transform: data-space transform does not match operator rows");
    }
    factors.push_back(psi_tilde);
  }
  factors.push_back(a);
  factors.push_back(adjoint(psi));
  return compose(factors);
}

double estimate_norm(const LinearOperator& a, int iterations, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vector v(a.cols());
  for (Index i = 0; i < v.size(); ++i) v[i] = unif(gen);
  v.normalize();
  double sigma = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const Vector w = a.apply_adjoint(a.apply(v));
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    sigma = std::sqrt(nw);
    v = w / nw;
  }
  return sigma;
}

Matrix to_dense(const LinearOperator& a) {
  Matrix d(a.rows(), a.cols());
  Vector e = Vector::Zero(a.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    e[j] = 1.0;
    d.col(j) = a.apply(e);
    e[j] = 0.0;
  }
  return d;
}

}  // namespace flexkrylov
