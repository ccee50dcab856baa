#include "flexkrylov/regparam.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace flexkrylov;

namespace {

Matrix random_hessenberg(oracle::Rng& rng, Index k) {
  Matrix h = rng.matrix(k + 1, k);
  for (Index j = 0; j < k; ++j)
    for (Index i = j + 2; i <= k; ++i) h(i, j) = 0.0;
  return h;
}

double dense_residual(const ProjectedProblem& p, double lambda) {
  const Matrix r = p.identity_reg() ? Matrix::Identity(p.size(), p.size()) : p.reg;
  const Vector y = oracle::tikhonov(p.coeff, p.rhs(), lambda, r);
  return (p.coeff * y - p.rhs()).norm();
}

}  // namespace

TEST(DpExact, ScalarClosedForm) {
  ProjectedProblem p;
  p.coeff = Matrix::Zero(2, 1);
  p.coeff(0, 0) = 1.0;
  p.beta = 1.0;
  EXPECT_NEAR(select_dp_exact(p, 0.5, 1.0), 1.0, 1e-9);
  EXPECT_EQ(select_dp_exact(p, 0.0, 1.0), 0.0);
  EXPECT_EQ(select_dp_exact(p, 2.0, 1.0), 1e12);  // unreachable: clamp high
}

TEST(DpExact, BelowZeroResidualReturnsZero) {
  ProjectedProblem p;
  p.coeff = Matrix::Zero(2, 1);
  p.coeff(0, 0) = 1.0;
  p.coeff(1, 0) = 1.0;  // r(0) = 1/sqrt(2)
  p.beta = 1.0;
  EXPECT_EQ(select_dp_exact(p, 0.5, 1.0), 0.0);
}

TEST(Property, DpExactHitsTarget) {
  oracle::Rng rng(91);
  int reached = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index k = rng.integer(2, 9);
    ProjectedProblem p;
    p.coeff = random_hessenberg(rng, k);
    p.beta = rng.uniform(0.5, 5.0);
    const SpectralTikhonov spec(p);
    const double r0 = spec.residual(0.0);
    const double target = r0 + rng.uniform(0.05, 0.95) * (p.beta - r0);
    const double eta = 1.01;
    const double eps = target / eta;
    const double lambda = select_dp_exact(p, eps, eta);
    const double r = dense_residual(p, lambda);
    if (lambda > 1e-12 && lambda < 1e12) {
      ++reached;
      EXPECT_LE(std::abs(r - target), 1e-8 * target) << "trial " << trial;
    }
  }
  EXPECT_GE(reached, 45);
}

TEST(Property, DpExactScaleInvariant) {
  oracle::Rng rng(92);
  for (int trial = 0; trial < 10; ++trial) {
    ProjectedProblem p;
    p.coeff = random_hessenberg(rng, 6);
    p.beta = 2.0;
    const double r0 = SpectralTikhonov(p).residual(0.0);
    const double eps = 0.5 * (r0 + p.beta);
    const double l1 = select_dp_exact(p, eps, 1.0);
    ProjectedProblem q = p;
    q.beta *= 7.5;
    const double l2 = select_dp_exact(q, 7.5 * eps, 1.0);
    EXPECT_NEAR(l2, l1, 1e-7 * l1);
    EXPECT_LT(oracle::rel_diff(tikhonov_projected(q, l2).y, 7.5 * tikhonov_projected(p, l1).y), 1e-7);
  }
}

TEST(DpSecant, FormulaAndFixedPoint) {
  EXPECT_NEAR(select_dp_secant(1.0, 0.5, 0.1, 0.3, 1.0), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(select_dp_secant(2.0, 0.3, 0.1, 0.3, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(select_dp_secant(2.0, 0.1, 0.1, 0.3, 1.0), 2.0);  // flat: keep
  EXPECT_DOUBLE_EQ(select_dp_secant(1.0, 0.5, 0.1, 1e9, 1.0, 1e-12, 1e3), 1e3);
}

// A secant fixed point, found by iterating on one projected problem, satisfies
// the discrepancy equation when substituted back.
TEST(Property, DpSecantFixedPointsSatisfyDiscrepancy) {
  oracle::Rng rng(93);
  for (int trial = 0; trial < 20; ++trial) {
    ProjectedProblem p;
    p.coeff = random_hessenberg(rng, 5);
    p.beta = 1.0;
    const SpectralTikhonov spec(p);
    const double r0 = spec.residual(0.0);
    const double target = r0 + 0.4 * (p.beta - r0);
    double lambda = 1.0;
    for (int it = 0; it < 500; ++it) {
      const double next = select_dp_secant(lambda, spec.residual(lambda), r0, target, 1.0);
      if (std::abs(next - lambda) <= 1e-14 * lambda) break;
      lambda = next;
    }
    EXPECT_NEAR(spec.residual(lambda), target, 1e-8 * target) << "trial " << trial;
    EXPECT_NEAR(select_dp_secant(lambda, spec.residual(lambda), r0, target, 1.0), lambda, 1e-12 * lambda);
  }
}

TEST(Optimal, InteriorMinimum) {
  const auto grid = log_grid(1e-3, 1e3, 7);
  ASSERT_EQ(grid.size(), 7u);
  EXPECT_NEAR(grid[3], 1.0, 1e-12);
  // x(lambda) = log10(lambda) * 1, x_true = 1: minimum at lambda = 10.
  auto solve = [](double l) { return Vector::Constant(1, std::log10(l)); };
  EXPECT_NEAR(select_optimal(grid, solve, Vector::Constant(1, 1.0)), 10.0, 1e-9);
}

TEST(Optimal, ExactAtZeroPicksSmallest) {
  const auto grid = log_grid(1e-12, 1e12, 40);
  auto solve = [](double l) { return Vector::Constant(2, 1.0 / (1.0 + l)); };
  EXPECT_DOUBLE_EQ(select_optimal(grid, solve, Vector::Constant(2, 1.0)), 1e-12);
  EXPECT_THROW(select_optimal({}, solve, Vector::Ones(2)), ConfigError);
}

TEST(ParamPolicy, ValidationAndDefaults) {
  ParamPolicy p;
  p.kind = ParamKind::dp_exact;
  EXPECT_THROW(p.validate(), ConfigError);  // no noise norm
  p.noise_norm = 0.1;
  EXPECT_NO_THROW(p.validate());
  p.eta = 0.9;
  EXPECT_THROW(p.validate(), ConfigError);
  p.eta = 1.01;
  EXPECT_NEAR(p.initial_lambda(2.0), std::pow(1.01 * 0.1 / 2.0, 2), 1e-15);
  p.lambda0 = 3.0;
  EXPECT_DOUBLE_EQ(p.initial_lambda(2.0), 3.0);
  EXPECT_EQ(parse_param_kind("secant"), ParamKind::dp_secant);
  EXPECT_THROW(parse_param_kind("gcv"), ConfigError);
}
