// Independent dense reference implementations used as test oracles. None of
// these call into the library's Krylov or projected-solve code.
#ifndef FLEXKRYLOV_TESTS_ORACLES_HPP
#define FLEXKRYLOV_TESTS_ORACLES_HPP

#include "flexkrylov/common.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using flexkrylov::Index;
using flexkrylov::Matrix;
using flexkrylov::Vector;

struct Rng {
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double normal() { return nd(gen); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
  Vector vector(Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }
  Matrix matrix(Index m, Index n) {
    Matrix a(m, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < m; ++i) a(i, j) = normal();
    return a;
  }
  Vector positive(Index n, double lo = 0.2, double hi = 5.0) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }
  std::mt19937_64 gen;
  std::normal_distribution<double> nd{0.0, 1.0};
};

/// Matrix with prescribed singular values sigma (m >= n).
inline Matrix with_singular_values(Rng& rng, Index m, const Vector& sigma) {
  const Index n = sigma.size();
  Eigen::HouseholderQR<Matrix> qu(rng.matrix(m, n));
  Eigen::HouseholderQR<Matrix> qv(rng.matrix(n, n));
  const Matrix u = qu.householderQ() * Matrix::Identity(m, n);
  const Matrix v = qv.householderQ() * Matrix::Identity(n, n);
  return u * sigma.asDiagonal() * v.transpose();
}

/// Textbook LSQR (bidiagonalization + Givens rotations), iterates 1..k.
inline std::vector<Vector> lsqr(const Matrix& a, const Vector& b, int k) {
  std::vector<Vector> out;
  double beta = b.norm();
  Vector u = b / beta;
  Vector v = a.transpose() * u;
  double alpha = v.norm();
  v /= alpha;
  Vector w = v;
  Vector x = Vector::Zero(a.cols());
  double phibar = beta;
  double rhobar = alpha;
  for (int i = 0; i < k; ++i) {
    u = a * v - alpha * u;
    beta = u.norm();
    u /= beta;
    v = a.transpose() * u - beta * v;
    alpha = v.norm();
    v /= alpha;
    const double rho = std::hypot(rhobar, beta);
    const double c = rhobar / rho;
    const double s = beta / rho;
    const double theta = s * alpha;
    rhobar = -c * alpha;
    const double phi = c * phibar;
    phibar = s * phibar;
    x += (phi / rho) * w;
    w = v - (theta / rho) * w;
    out.push_back(x);
  }
  return out;
}

/// GMRES iterates 1..k: classical Gram-Schmidt Arnoldi (applied twice) and a
/// Householder least-squares solve of each Hessenberg problem.
inline std::vector<Vector> gmres(const Matrix& a, const Vector& b, int k) {
  const Index n = a.rows();
  Matrix v = Matrix::Zero(n, k + 1);
  Matrix h = Matrix::Zero(k + 1, k);
  const double beta = b.norm();
  v.col(0) = b / beta;
  std::vector<Vector> out;
  for (int j = 0; j < k; ++j) {
    Vector w = a * v.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      const Vector c = v.leftCols(j + 1).transpose() * w;
      w -= v.leftCols(j + 1) * c;
      h.col(j).head(j + 1) += c;
    }
    h(j + 1, j) = w.norm();
    v.col(j + 1) = w / h(j + 1, j);
    Vector rhs = Vector::Zero(j + 2);
    rhs[0] = beta;
    const Vector y = h.topLeftCorner(j + 2, j + 1).householderQr().solve(rhs);
    out.push_back(v.leftCols(j + 1) * y);
  }
  return out;
}

/// argmin ||A x - b||^2 + lambda ||L x||^2 through the stacked normal
/// equations solved by a complete-pivoting LU.
inline Vector tikhonov(const Matrix& a, const Vector& b, double lambda, const Matrix& l) {
  const Matrix lhs = a.transpose() * a + lambda * l.transpose() * l;
  return lhs.fullPivLu().solve(a.transpose() * b);
}

// Chord length of the line {p + t d} inside [x0,x1] x [y0,y1] (Liang-Barsky).
// A line lying on a pixel edge belongs to the pixel on its right (x) or
// below it (y), i.e. pixels are [x0, x1) x (y0, y1].
inline double chord(double px, double py, double dx, double dy, double x0, double x1, double y0, double y1) {
  double lo = -1e300;
  double hi = 1e300;
  bool is_x = true;
  auto clip = [&](double p, double d, double a, double b) {
    const bool horizontal_axis = is_x;
    is_x = false;
    if (std::abs(d) < 1e-14) return horizontal_axis ? (p >= a && p < b) : (p > a && p <= b);
    double t0 = (a - p) / d;
    double t1 = (b - p) / d;
    if (t0 > t1) std::swap(t0, t1);
    lo = std::max(lo, t0);
    hi = std::min(hi, t1);
    return true;
  };
  if (!clip(px, dx, x0, x1) || !clip(py, dy, y0, y1)) return 0.0;
  return hi > lo ? hi - lo : 0.0;
}

/// Parallel-beam chord-length matrix, pixels row-major with row 0 at the top.
inline Matrix dense_tomography(int n, const std::vector<double>& angles, int rays, double width) {
  Matrix a = Matrix::Zero(static_cast<Index>(angles.size()) * rays, static_cast<Index>(n) * n);
  Index row = 0;
  for (double deg : angles) {
    const double th = deg * std::numbers::pi / 180.0;
    for (int r = 0; r < rays; ++r) {
      const double s = rays == 1 ? 0.0 : -0.5 * width + width * r / (rays - 1);
      const double px = s * std::cos(th);
      const double py = s * std::sin(th);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const double x0 = -0.5 * n + j;
          const double y1 = 0.5 * n - i;
          a(row, i * n + j) = chord(px, py, -std::sin(th), std::cos(th), x0, x0 + 1, y1 - 1, y1);
        }
      }
      ++row;
    }
  }
  return a;
}

inline double rel_diff(const Vector& x, const Vector& ref) {
  const double n = ref.norm();
  return n > 0.0 ? (x - ref).norm() / n : (x - ref).norm();
}

}  // namespace oracle

#endif  // FLEXKRYLOV_TESTS_ORACLES_HPP
