#include "flexkrylov/problems.hpp"
#include "flexkrylov/solvers.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace flexkrylov;

namespace {

OperatorPtr dense(const Matrix& a) { return std::make_shared<DenseOperator>(a); }

SolverConfig plain(Method m, int iters) {
  SolverConfig c;
  c.method = m;
  c.stop.max_iterations = iters;
  c.stop.stagnation_tol = 0.0;
  c.keep_iterates = true;
  return c;
}

}  // namespace

TEST(MethodTable, RoundTripNames) {
  for (Method m : all_methods()) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_EQ(parse_method("FLSQR-I"), Method::flsqr_i);
  EXPECT_THROW(parse_method("cgls"), ConfigError);
  EXPECT_TRUE(traits(Method::flsmr_r).lsmr_family);
  EXPECT_TRUE(traits(Method::flsmr_r).qr_regularizer);
  EXPECT_FALSE(traits(Method::gat).golub_kahan);
}

TEST(Flexible, IdentityConvergesInOneStep) {
  oracle::Rng rng(1);
  const Vector b = rng.vector(5);
  const SolverRun run = run_flexible(dense(Matrix::Identity(5, 5)), b, plain(Method::flsqr, 5));
  EXPECT_EQ(run.iterations(), 1);
  EXPECT_EQ(run.stop_reason, StopReason::breakdown);
  EXPECT_LT((run.x - b).norm(), 1e-14);
}

TEST(Flexible, LsqrMatchesOracle) {
  oracle::Rng rng(2);
  const Matrix a = rng.matrix(40, 25);
  const Vector b = rng.vector(40);
  const auto ref = oracle::lsqr(a, b, 10);
  for (Method m : {Method::lsqr, Method::flsqr}) {
    SolverConfig c = plain(m, 10);
    c.weights.p = 2.0;  // identity weights for flsqr
    const SolverRun run = run_flexible(dense(a), b, c);
    ASSERT_EQ(run.iterates.size(), 10u);
    for (std::size_t k = 0; k < 10; ++k) EXPECT_LT(oracle::rel_diff(run.iterates[k], ref[k]), 1e-8);
  }
}

TEST(Flexible, ResidualNormsFromProjectionAreExact) {
  oracle::Rng rng(3);
  const Matrix a = rng.matrix(30, 20);
  const Vector b = rng.vector(30);
  for (Method m : {Method::flsqr, Method::flsmr, Method::flsqr_i, Method::flsmr_r}) {
    SolverConfig c = plain(m, 8);
    c.param.fixed_lambda = 0.05;
    const SolverRun run = run_flexible(dense(a), b, c);
    for (std::size_t k = 0; k < run.iterates.size(); ++k) {
      const Vector r = a * run.iterates[k] - b;
      EXPECT_NEAR(run.records[k].res_norm, r.norm(), 1e-10 * b.norm()) << to_string(m);
      EXPECT_NEAR(run.records[k].ne_res_norm, (a.transpose() * r).norm(), 1e-9 * a.norm() * b.norm())
          << to_string(m);
    }
  }
}

TEST(Flexible, TwoMatvecsPerIteration) {
  oracle::Rng rng(4);
  const SolverRun run = run_flexible(dense(rng.matrix(20, 15)), rng.vector(20), plain(Method::flsqr, 6));
  for (const auto& r : run.records) EXPECT_EQ(r.matvecs, 1 + 2 * r.iteration);
}

// With lambda = 0 each iterate is the subspace minimizer, and the
// minimized quantity is nonincreasing.
TEST(Property, FlexibleOptimalityAndMonotonicity) {
  oracle::Rng rng(5);
  for (int trial = 0; trial < 8; ++trial) {
    const Matrix a = rng.matrix(25, 15);
    const Vector b = rng.vector(25);
    for (Method m : {Method::flsqr, Method::flsmr}) {
      SolverConfig c = plain(m, 8);
      c.fixed_preconditioners.clear();
      for (int i = 0; i < 8; ++i) c.fixed_preconditioners.emplace_back(rng.positive(15, 0.3, 3.0));
      // Rebuild Z with the same preconditioners for the dense check.
      const SolverRun run = run_flexible(dense(a), b, c);
      FgkState st = FgkState::init(dense(a), b);
      for (std::size_t k = 0; k < run.iterates.size(); ++k) {
        st.expand(c.fixed_preconditioners[k].inverse());
        const Matrix z = st.z_matrix();
        double best;
        if (m == Method::flsqr) {
          const Vector y = (a * z).colPivHouseholderQr().solve(b);
          best = (a * z * y - b).norm();
          EXPECT_NEAR(run.records[k].res_norm, best, 1e-9 * b.norm());
        } else {
          const Matrix g = a.transpose() * a * z;
          const Vector y = g.colPivHouseholderQr().solve(a.transpose() * b);
          best = (g * y - a.transpose() * b).norm();
          EXPECT_NEAR(run.records[k].ne_res_norm, best, 1e-9 * (a.transpose() * b).norm());
        }
        if (k > 0) {
          const double prev = m == Method::flsqr ? run.records[k - 1].res_norm : run.records[k - 1].ne_res_norm;
          const double cur = m == Method::flsqr ? run.records[k].res_norm : run.records[k].ne_res_norm;
          EXPECT_LE(cur, prev * (1 + 1e-12));
        }
      }
    }
  }
}

TEST(Flexible, RangeRestrictedTikhonov) {
  oracle::Rng rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix a = rng.matrix(15, 10);
    const Vector b = rng.vector(15);
    const double lambda = 0.02 * (trial + 1);
    SolverConfig c = plain(Method::flsqr_r, 8);
    c.param.fixed_lambda = lambda;
    const SolverRun run = run_flexible(dense(a), b, c);
    FgkState st = FgkState::init(dense(a), b);
    for (std::size_t k = 0; k < run.iterates.size(); ++k) {
      const DiagonalOperator linv =
          k == 0 ? DiagonalOperator::identity(10) : build_weights(run.iterates[k - 1], c.weights).l_inverse;
      st.expand(linv);
      const Matrix z = st.z_matrix();
      const Matrix az = a * z;
      const Vector y = (az.transpose() * az + lambda * z.transpose() * z).fullPivLu().solve(az.transpose() * b);
      EXPECT_LT(oracle::rel_diff(run.iterates[k], z * y), 1e-9) << "k=" << k;
    }
  }
}

TEST(Gat, IdentityGivesRhs) {
  oracle::Rng rng(7);
  const Vector b = rng.vector(6);
  const SolverRun run = run_gat(dense(Matrix::Identity(6, 6)), b, plain(Method::fgmres, 4));
  EXPECT_LT((run.x - b).norm(), 1e-14);
}

TEST(Gat, GmresMatchesOracle) {
  oracle::Rng rng(8);
  const Matrix a = rng.matrix(20, 20) + 5.0 * Matrix::Identity(20, 20);
  const Vector b = rng.vector(20);
  const auto ref = oracle::gmres(a, b, 10);
  const SolverRun run = run_gat(dense(a), b, plain(Method::gmres, 10));
  for (std::size_t k = 0; k < 10; ++k) EXPECT_LT(oracle::rel_diff(run.iterates[k], ref[k]), 1e-8);
  for (const auto& r : run.records) EXPECT_EQ(r.matvecs, r.iteration);
}

TEST(Gat, RejectsNonSquare) {
  EXPECT_THROW(run_gat(dense(Matrix::Ones(4, 3)), Vector::Ones(4), plain(Method::gmres, 2)), ConfigError);
  EXPECT_THROW(run_flexible(dense(Matrix::Ones(4, 4)), Vector::Ones(4), plain(Method::gmres, 2)),
               ConfigError);
}

TEST(Equivalence, FlsmrFgmresNormalEquations) {
  oracle::Rng rng(9);
  const Matrix a = rng.matrix(60, 40);
  const Vector b = rng.vector(60);
  std::vector<DiagonalOperator> precs;
  for (int i = 0; i < 10; ++i) precs.emplace_back(rng.positive(40, 0.5, 2.0));
  EXPECT_LE(verify_flsmr_fgmres_equivalence(dense(a), b, precs, 1), 1e-12);
  EXPECT_LE(verify_flsmr_fgmres_equivalence(dense(a), b, precs, 10), 1e-6);
  std::vector<DiagonalOperator> ident(10, DiagonalOperator::identity(40));
  EXPECT_LE(verify_flsmr_fgmres_equivalence(dense(a), b, ident, 10), 1e-8);
}

TEST(Flexible, NonFiniteAborts) {
  Matrix a = Matrix::Identity(3, 3);
  Vector b = Vector::Ones(3);
  b[1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(run_flexible(dense(a), b, plain(Method::flsqr, 3)), NumericalError);
}

TEST(Flexible, DiscrepancyStop) {
  oracle::Rng rng(10);
  const Matrix a = oracle::with_singular_values(rng, 40, Vector::LinSpaced(30, 0, -8).unaryExpr([](double t) {
    return std::pow(10.0, t);
  }));
  const Vector x = rng.vector(30);
  Vector e = rng.vector(40);
  const Vector bt = a * x;
  e *= 1e-2 * bt.norm() / e.norm();
  SolverConfig c = plain(Method::flsqr_i, 40);
  c.param.kind = ParamKind::dp_exact;
  c.param.noise_norm = e.norm();
  c.stop.discrepancy = true;
  const SolverRun run = run_flexible(dense(a), bt + e, c);
  EXPECT_EQ(run.stop_reason, StopReason::discrepancy);
  EXPECT_LE(run.records.back().res_norm, 1.01 * e.norm() * (1 + 1e-6));
}

TEST(Flexible, TransformModeReportsPixelDomain) {
  oracle::Rng rng(11);
  const Matrix a = rng.matrix(24, 16);
  const Vector b = rng.vector(24);
  auto psi = std::make_shared<HaarTransform1D>(16, 2);
  SolverConfig c = plain(Method::flsqr, 5);
  c.weights.p = 2.0;
  c.transform = psi;
  const SolverRun with = run_flexible(dense(a), b, c);
  c.transform = nullptr;
  const SolverRun without = run_flexible(dense(a), b, c);
  // With identity weights the Krylov space is rotation invariant.
  for (std::size_t k = 0; k < 5; ++k) EXPECT_LT(oracle::rel_diff(with.iterates[k], without.iterates[k]), 1e-10);
}

// On the heat problem the secant-updated lambda settles, and where it settles
// is the discrepancy root that dp_exact computes directly.
TEST(Secant, SettlesAtDiscrepancyRootOnHeat) {
  ProblemSpec spec;
  spec.n = 512;
  spec.noise_level = 1e-4;
  spec.seed = 1;
  const TestProblem p = generate(spec);
  SolverConfig c = plain(Method::flsqr_r, 100);
  c.keep_iterates = false;
  c.param.noise_norm = p.e.norm();
  c.param.kind = ParamKind::dp_secant;
  const SolverRun secant = run_flexible(p.a, p.b, c);
  c.param.kind = ParamKind::dp_exact;
  const SolverRun exact = run_flexible(p.a, p.b, c);
  ASSERT_EQ(secant.iterations(), 100);
  for (int k = 95; k < 100; ++k) {
    const double prev = secant.records[static_cast<std::size_t>(k - 1)].lambda;
    EXPECT_LT(std::abs(secant.records[static_cast<std::size_t>(k)].lambda - prev), 0.05 * prev);
  }
  EXPECT_NEAR(secant.final_lambda, exact.final_lambda, 0.05 * exact.final_lambda);
}
