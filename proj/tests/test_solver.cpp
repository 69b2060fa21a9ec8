#include <gtest/gtest.h>

#include <cmath>

#include "kit/oracles.hpp"
#include "kit/properties.hpp"
#include "laros/errors.hpp"
#include "laros/generators.hpp"
#include "laros/solver.hpp"

namespace {

using namespace laros;

SolverConfig with_theta(double theta) {
  SolverConfig cfg;
  cfg.theta = theta;
  return cfg;
}

TEST(SolverConfig, Validation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.theta = -1.0;
  EXPECT_THROW(cfg.validate(), InvalidParameter);
  cfg = SolverConfig{};
  cfg.max_iters = 0;
  EXPECT_THROW(cfg.validate(), InvalidParameter);
  cfg = SolverConfig{};
  cfg.tol_gap = 1.0;
  EXPECT_THROW(cfg.validate(), InvalidParameter);
  cfg = SolverConfig{};
  cfg.penalty = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidParameter);
}

TEST(Solve, ZeroMatrixIsDegenerate) {
  EXPECT_THROW(solve(DenseMatrix::zeros(2, 3), with_theta(1.0)), DegenerateInput);
}

TEST(Solve, Fixture6x6) {
  const LarosSolution sol = solve(paper_example_6x6(), with_theta(0.5));
  ASSERT_TRUE(sol.converged);
  const IndexSet block = {3, 4, 5};
  EXPECT_EQ(sol.support_rows, block);
  EXPECT_EQ(sol.support_cols, block);
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index j = 0; j < 6; ++j) {
      if (i >= 3 && j >= 3) {
        EXPECT_GE(sol.X(i, j), 0.07);
        EXPECT_LE(sol.X(i, j), 0.17);
      } else {
        EXPECT_LE(std::abs(sol.X(i, j)), 1e-9);
      }
    }
}

TEST(Solve, ThetaZeroIsScaledLeadingPair) {
  const DenseMatrix a = DenseMatrix::from_rows({{3, 1, 0}, {1, 2, 1}});
  const LarosSolution sol = solve(a, with_theta(0.0));
  ASSERT_TRUE(sol.converged);
  const SvdFactors f = svd(a);
  const Matrix expect = f.left.col(0) * f.right.col(0).transpose() / f.singular_values(0);
  EXPECT_LE((sol.X.values() - expect).norm(), 1e-6);
}

TEST(Solve, LargeThetaSingleton) {
  const LarosSolution sol = solve(DenseMatrix::from_rows({{5, 1}, {1, 1}}), with_theta(3.0));
  ASSERT_TRUE(sol.converged);
  Matrix expect = Matrix::Zero(2, 2);
  expect(0, 0) = 0.2;
  EXPECT_LE((sol.X.values() - expect).norm(), 1e-6);
  EXPECT_NEAR(sol.dual_norm, 5.0 / 4.0, 1e-9);
}

TEST(Solve, ScalarIsReciprocal) {
  for (double c : {0.5, 2.0, -3.0})
    for (double theta : {0.0, 1.0, 7.0}) {
      const LarosSolution sol = solve(DenseMatrix::from_rows({{c}}), with_theta(theta));
      ASSERT_TRUE(sol.converged);
      EXPECT_NEAR(sol.X(0, 0), 1.0 / c, 1e-9);
    }
}

TEST(Solve, SolutionInvariants) {
  RandomStream rng(77, 0);
  const DenseMatrix a(testkit::uniform_matrix(rng, 7, 5, 0.0, 1.0));
  SolverConfig cfg = with_theta(0.4);
  const LarosSolution sol = solve(a, cfg);
  ASSERT_TRUE(sol.converged);
  EXPECT_GE(inner(a.values(), sol.X.values()), 1.0 - cfg.tol_primal);
  const SvdFactors f = svd(sol.X);
  EXPECT_NEAR(sol.sigma, f.singular_values(0), 1e-10);
  EXPECT_LE((sol.sigma * sol.u * sol.v.transpose() -
             f.singular_values(0) * f.left.col(0) * f.right.col(0).transpose()).norm(),
            1e-9);
  const double cutoff = cfg.support_tol * sol.X.values().cwiseAbs().maxCoeff();
  IndexSet rows;
  for (Eigen::Index i = 0; i < 7; ++i)
    if (sol.X.values().row(i).cwiseAbs().maxCoeff() > cutoff) rows.push_back(i);
  EXPECT_EQ(sol.support_rows, rows);
  EXPECT_NEAR(sol.objective * sol.dual_norm, 1.0, 1e-9);
}

TEST(Solve, AccelerationDoesNotChangeTheAnswer) {
  const DenseMatrix a = paper_example_6x6();
  SolverConfig plain = with_theta(0.5);
  plain.acceleration = false;
  plain.polish = false;
  const LarosSolution slow = solve(a, plain);
  const LarosSolution fast = solve(a, with_theta(0.5));
  ASSERT_TRUE(slow.converged);
  ASSERT_TRUE(fast.converged);
  EXPECT_LE((slow.X.values() - fast.X.values()).norm(), 1e-6);
}

TEST(DualThetaNorm, Examples) {
  for (double c : {1.0, 4.0})
    for (double theta : {0.5, 1.0, 3.0})
      EXPECT_NEAR(dual_theta_norm(DenseMatrix::from_rows({{c}}), theta), c / (1.0 + theta), 1e-9);
  EXPECT_NEAR(dual_theta_norm(DenseMatrix::diagonal({3, 4}), 1e-8), 4.0, 1e-6);
  EXPECT_THROW(dual_theta_norm(DenseMatrix::zeros(2, 2), 1.0), InvalidInput);
}

TEST(DualThetaNorm, MatchesGridOracleOnDiag21) {
  const DenseMatrix a = DenseMatrix::diagonal({2, 1});
  EXPECT_NEAR(dual_theta_norm(a, 1.0), testkit::dual_theta_norm_grid(a.values(), 1.0), 1e-3);
}

TEST(ExtractRankOne, Examples) {
  const RankOneStructure r = extract_rank_one(DenseMatrix(2.0 * DenseMatrix::unit(6, 6, 2, 4).values()), 1e-6);
  EXPECT_NEAR(r.sigma, 2.0, 1e-14);
  EXPECT_EQ(r.rows, IndexSet{2});
  EXPECT_EQ(r.cols, IndexSet{4});
  EXPECT_TRUE(r.rank_one);

  const LarosSolution sol = solve(paper_example_6x6(), with_theta(0.5));
  const RankOneStructure s = extract_rank_one(sol.X, 1e-6);
  EXPECT_EQ(s.rows, (IndexSet{3, 4, 5}));
  EXPECT_EQ(s.cols, (IndexSet{3, 4, 5}));
  EXPECT_TRUE(s.rank_one);

  const RankOneStructure z = extract_rank_one(DenseMatrix::zeros(3, 3), 1e-6);
  EXPECT_EQ(z.sigma, 0.0);
  EXPECT_TRUE(z.rows.empty());
  EXPECT_FALSE(extract_rank_one(DenseMatrix::diagonal({1, 1}), 1e-6).rank_one);
}

DualCertificate make_cert(const Matrix& y, const Matrix& z, double alpha, double beta) {
  DualCertificate c{DenseMatrix(y), DenseMatrix(z)};
  c.alpha = alpha;
  c.beta = beta;
  return c;
}

TEST(CheckOptimality, ScalarCertificateIsExact) {
  const double c = 3.0;
  const auto rep = check_optimality(DenseMatrix::from_rows({{c}}), 1.0, DenseMatrix::from_rows({{0.5}}),
                                    make_cert(Matrix::Constant(1, 1, c / 2), Matrix::Constant(1, 1, c / 2), 0.5, 0.5));
  EXPECT_LE(rep.max_residual(), 1e-15);
}

TEST(CheckOptimality, ThetaZeroCertificate) {
  const DenseMatrix a = DenseMatrix::from_rows({{3, 1}, {1, 2}});
  const SvdFactors f = svd(a);
  const Matrix x = f.left.col(0) * f.right.col(0).transpose();
  const auto rep = check_optimality(a, 0.0, DenseMatrix(x),
                                    make_cert(a.values(), Matrix::Zero(2, 2), 1.0, x.cwiseAbs().sum()));
  EXPECT_LE(rep.max_residual(), 1e-12);
}

TEST(CheckOptimality, ReportsInjectedImbalance) {
  const auto rep = check_optimality(DenseMatrix::from_rows({{2.0}}), 1.0, DenseMatrix::from_rows({{0.5}}),
                                    make_cert(Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 0.9), 0.5, 0.5));
  EXPECT_NEAR(rep.balance, 0.1, 1e-12);
  EXPECT_FALSE(rep.certifies(1e-6));
}

TEST(RecoverDual, ScalarSplitsEvenly) {
  const double c = 3.0;
  const SolveOutput out = solve_with_state(DenseMatrix::from_rows({{c}}), with_theta(1.0));
  ASSERT_TRUE(out.state.converged);
  const DualCertificate cert = recover_dual(DenseMatrix::from_rows({{c}}), 1.0, out.state);
  EXPECT_NEAR(cert.Y(0, 0), c / 2, 1e-9);
  EXPECT_NEAR(cert.Z(0, 0), c / 2, 1e-9);
  EXPECT_NEAR(cert.lambda_star * cert.dual_norm, 1.0, 1e-12);
}

TEST(RecoverDual, ThetaZeroHasNoSparsePart) {
  const DenseMatrix a = DenseMatrix::from_rows({{3, 1, 0}, {1, 2, 1}});
  const SolveOutput out = solve_with_state(a, with_theta(0.0));
  ASSERT_TRUE(out.state.converged);
  EXPECT_LE(recover_dual(a, 0.0, out.state).Z.values().cwiseAbs().maxCoeff(), 1e-8);
}

TEST(RecoverDual, RandomNonnegativeGapAndWeakDuality) {
  RandomStream rng(108, 0);
  const DenseMatrix a(testkit::uniform_matrix(rng, 10, 8, 0.0, 1.0));
  const double theta = 0.3;
  const SolveOutput out = solve_with_state(a, with_theta(theta));
  ASSERT_TRUE(out.state.converged);
  const DualCertificate cert = recover_dual(a, theta, out.state);
  EXPECT_LE((cert.Y.values() + cert.Z.values() - a.values()).norm(), 1e-9 * a.values().norm());
  EXPECT_NEAR(cert.alpha + theta * cert.beta, 1.0, 1e-9);
  const auto rep = check_optimality(a, theta, out.solution.normalized(), cert);
  EXPECT_LE(rep.max_residual(), 1e-6);
  const double upper = std::max(norm(cert.Y, NormKind::kSpectral),
                                cert.Z.values().cwiseAbs().maxCoeff() / theta);
  EXPECT_LE(inner(a.values(), out.solution.normalized().values()), upper * (1 + 1e-9));
  EXPECT_LE(out.solution.dual_gap, 1e-6);

  const DenseMatrix corner(a.values().topLeftCorner(2, 2));
  EXPECT_NEAR(dual_theta_norm(corner, theta), testkit::dual_theta_norm_grid(corner.values(), theta), 1e-3);
}

TEST(RecoverDual, UnconvergedStateThrows) {
  SolverConfig cfg = with_theta(0.5);
  cfg.max_iters = 1;
  cfg.polish = false;
  const DenseMatrix a = paper_example_6x6();
  const SolveOutput out = solve_with_state(a, cfg);
  ASSERT_FALSE(out.state.converged);
  EXPECT_FALSE(out.solution.converged);
  EXPECT_THROW(recover_dual(a, 0.5, out.state), CertificateUnavailable);
}

}  // namespace
