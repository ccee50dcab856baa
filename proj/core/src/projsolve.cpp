#include "flexkrylov/projsolve.hpp"

#include "flexkrylov/decomp.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>

namespace flexkrylov {

namespace {

constexpr double kRegSingular = 1e-14;

Matrix right_solve_upper(const Matrix& c, const Matrix& r) {
  Matrix b = c;
  r.triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(b);
  return b;
}

}  // namespace

void ProjectedProblem::validate() const {
  const Index k = coeff.cols();
  if (k < 1 || coeff.rows() != k + 1) {
    throw ConfigError("projected problem: coefficient matrix must be (k+1) x k with k >= 1");
  }
  if (!std::isfinite(beta)) throw NumericalError("projected problem: non-finite right-hand side");
  if (!identity_reg()) {
    if (reg.rows() != k || reg.cols() != k) {
      throw ConfigError("projected problem: regularization matrix must be k x k");
    }
    const double scale = std::max(reg.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    for (Index i = 0; i < k; ++i) {
      if (!(std::abs(reg(i, i)) > kRegSingular * scale)) {
        throw ConfigError("projected problem: regularization matrix is singular");
      }
    }
  }
}

Vector ProjectedProblem::rhs() const {
  Vector c = Vector::Zero(coeff.rows());
  c[0] = beta;
  return c;
}

TikhonovSolution tikhonov_projected(const ProjectedProblem& p, double lambda) {
  p.validate();
  if (!(lambda >= 0.0)) throw ConfigError("tikhonov_projected: lambda must be nonnegative");
  const Index k = p.size();
  const Vector c = p.rhs();

  Matrix aug;
  Vector rhs;
  if (lambda == 0.0) {
    aug = p.coeff;
    rhs = c;
  } else {
    aug.resize(2 * k + 1, k);
    aug.topRows(k + 1) = p.coeff;
    const double s = std::sqrt(lambda);
    if (p.identity_reg()) {
      aug.bottomRows(k) = s * Matrix::Identity(k, k);
    } else {
      aug.bottomRows(k) = s * p.reg.triangularView<Eigen::Upper>().toDenseMatrix();
    }
    rhs = Vector::Zero(2 * k + 1);
    rhs.head(k + 1) = c;
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(aug);
  TikhonovSolution out;
  out.y = cod.solve(rhs);
  out.rank_deficient = cod.rank() < k;
  out.residual = (p.coeff * out.y - c).norm();
  if (!out.y.allFinite()) throw NumericalError("tikhonov_projected: non-finite solution");
  return out;
}

std::vector<double> projected_residual_curve(const ProjectedProblem& p,
                                             const std::vector<double>& lambdas) {
  std::vector<double> out;
  out.reserve(lambdas.size());
  for (double l : lambdas) out.push_back(tikhonov_projected(p, l).residual);
  return out;
}

// --- Spectral form ----------------------------------------------------------

SpectralTikhonov::SpectralTikhonov(const ProjectedProblem& p) {
  p.validate();
  identity_reg_ = p.identity_reg();
  beta_ = p.beta;
  const Matrix b = identity_reg_ ? p.coeff : right_solve_upper(p.coeff, p.reg);
  if (!identity_reg_) r_ = p.reg.triangularView<Eigen::Upper>().toDenseMatrix();
  Eigen::BDCSVD<Matrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  sigma_ = svd.singularValues();
  q_ = svd.matrixV();
  gamma_ = beta_ * svd.matrixU().row(0).transpose();
  out_of_range_sq_ = std::max(0.0, beta_ * beta_ - gamma_.squaredNorm());
  const double smax = sigma_.size() ? sigma_[0] : 0.0;
  cutoff_ = smax * static_cast<double>(b.rows()) * std::numeric_limits<double>::epsilon();
}

Vector SpectralTikhonov::filtered_coefficients(double lambda) const {
  Vector f(sigma_.size());
  for (Index i = 0; i < sigma_.size(); ++i) {
    const double s = sigma_[i];
    f[i] = s > cutoff_ ? s * gamma_[i] / (s * s + lambda) : 0.0;
  }
  return f;
}

Vector SpectralTikhonov::solve(double lambda) const {
  Vector w = q_ * filtered_coefficients(lambda);
  if (!identity_reg_) r_.triangularView<Eigen::Upper>().solveInPlace(w);
  return w;
}

double SpectralTikhonov::residual(double lambda) const {
  double acc = out_of_range_sq_;
  for (Index i = 0; i < sigma_.size(); ++i) {
    const double s = sigma_[i];
    const double one_minus_phi = s > cutoff_ ? lambda / (s * s + lambda) : 1.0;
    const double t = one_minus_phi * gamma_[i];
    acc += t * t;
  }
  return std::sqrt(acc);
}

double SpectralTikhonov::residual_derivative(double lambda) const {
  double d = 0.0;
  for (Index i = 0; i < sigma_.size(); ++i) {
    const double s = sigma_[i];
    if (s <= cutoff_) continue;
    const double s2 = s * s;
    const double den = s2 + lambda;
    d += 2.0 * lambda * s2 * gamma_[i] * gamma_[i] / (den * den * den);
  }
  const double r = residual(lambda);
  return r > 0.0 ? d / (2.0 * r) : 0.0;
}

Matrix SpectralTikhonov::map_through(const Matrix& g) const {
  if (g.cols() != q_.rows()) throw ConfigError("map_through: column count mismatch");
  if (identity_reg_) return g * q_;
  return right_solve_upper(g, r_) * q_;
}

// --- Incremental QR ---------------------------------------------------------

bool IncrementalQr::append(const Vector& z) {
  const Index k = size();
  if (k > 0 && z.size() != q_.front().size()) throw ConfigError("qr_append: length mismatch");
  const double znorm = z.norm();
  Vector w = z;
  std::vector<double> coeffs(static_cast<std::size_t>(k));
  const double rkk = orthogonalize(w, q_, k, coeffs.data());
  if (!(rkk > kBreakdownTolerance * znorm)) return false;
  Matrix grown = Matrix::Zero(k + 1, k + 1);
  if (k > 0) grown.topLeftCorner(k, k) = r_.topLeftCorner(k, k);
  for (Index j = 0; j < k; ++j) grown(j, k) = coeffs[static_cast<std::size_t>(j)];
  grown(k, k) = rkk;
  r_ = std::move(grown);
  q_.push_back(w / rkk);
  return true;
}

Matrix IncrementalQr::q_matrix() const {
  if (q_.empty()) return Matrix();
  Matrix q(q_.front().size(), size());
  for (Index j = 0; j < size(); ++j) q.col(j) = q_[static_cast<std::size_t>(j)];
  return q;
}

// --- Singular values --------------------------------------------------------

SingularValueEstimate approx_singular_values(const Matrix& m, const Matrix& r) {
  if (r.rows() != r.cols() || m.cols() != r.cols()) {
    throw ConfigError("approx_singular_values: need M (k+1) x k and R k x k");
  }
  for (Index i = 0; i < r.rows(); ++i) {
    if (r(i, i) == 0.0) throw ConfigError("approx_singular_values: R is singular");
  }
  SingularValueEstimate out;
  const Matrix ru = r.triangularView<Eigen::Upper>().toDenseMatrix();
  Eigen::BDCSVD<Matrix> rsvd(ru);
  const Vector rs = rsvd.singularValues();
  out.r_condition = rs[rs.size() - 1] > 0.0 ? rs[0] / rs[rs.size() - 1]
                                            : std::numeric_limits<double>::infinity();
  out.ill_conditioned = out.r_condition > 1e12;
  Eigen::BDCSVD<Matrix> svd(right_solve_upper(m, ru));
  out.values = svd.singularValues();
  return out;
}

}  // namespace flexkrylov
