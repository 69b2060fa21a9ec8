#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "laros/errors.hpp"
#include "laros/generators.hpp"
#include "laros/solver.hpp"
#include "laros/structure.hpp"

namespace {

using namespace laros;

SolverConfig with_theta(double theta) {
  SolverConfig cfg;
  cfg.theta = theta;
  return cfg;
}

bool mentions(const RegimeReport& r, const std::string& name) {
  return std::find(r.violated.begin(), r.violated.end(), name) != r.violated.end();
}

TEST(ThetaA, Examples) {
  EXPECT_NEAR(theta_A(DenseMatrix::diagonal({2, 1})), 0.1, 1e-14);
  EXPECT_NEAR(theta_A(DenseMatrix(Matrix::Ones(3, 3))), 1.0 / 9.0, 1e-14);
  EXPECT_NEAR(theta_A(DenseMatrix::diagonal({1, 1})), 0.0, 1e-14);
  EXPECT_THROW(theta_A(DenseMatrix::zeros(2, 2)), InvalidInput);
}

TEST(ThetaB, Examples) {
  Matrix a = Matrix::Ones(4, 4);
  a.topLeftCorner(2, 2).setConstant(2.0);
  const BlockSelector block = BlockSelector::leading(2, 2, 4, 4);
  const auto tb = theta_B(DenseMatrix(a), block);
  ASSERT_TRUE(tb.has_value());
  EXPECT_NEAR(*tb, 2.5, 1e-14);

  EXPECT_FALSE(theta_B(DenseMatrix(Matrix::Ones(4, 4)), block).has_value());
  EXPECT_FALSE(theta_B(paper_example_6x6(), BlockSelector({3, 4, 5}, {3, 4, 5}, 6, 6)).has_value());
}

TEST(ThetaB, Errors) {
  Matrix a = Matrix::Ones(3, 3);
  a(2, 2) = -1.0;
  EXPECT_THROW(theta_B(DenseMatrix(a), BlockSelector::leading(1, 1, 3, 3)), InvalidInput);
  EXPECT_THROW(theta_B(DenseMatrix(Matrix::Ones(2, 2)), BlockSelector::leading(2, 2, 2, 2)), InvalidInput);
  EXPECT_THROW(theta_B(DenseMatrix(Matrix::Ones(2, 2)), BlockSelector({2}, {0}, 3, 3)), InvalidInput);
}

TEST(RowZeroThreshold, Examples) {
  const DenseMatrix a = DenseMatrix::from_rows({{2, 2, 2}, {1, 1, 1}, {1, 2, 3}, {2, 2, 2}, {0, 0, 0}});
  EXPECT_NEAR(row_zero_threshold(a, 0, 1).value(), 1.0, 1e-14);
  EXPECT_FALSE(row_zero_threshold(a, 2, 3).has_value());
  EXPECT_EQ(row_zero_threshold(a, 0, 4).value(), 0.0);
  EXPECT_NEAR(row_zero_threshold(DenseMatrix::from_rows({{3, 3}, {1, 1}}), 0, 1).value(), 0.5, 1e-14);
  EXPECT_THROW(row_zero_threshold(a, 1, 1), InvalidParameter);
  EXPECT_THROW(row_zero_threshold(a, 0, 9), InvalidParameter);
}

TEST(RowRatioCheck, FixtureResidualsVanish) {
  const DenseMatrix a = paper_example_6x6();
  const LarosSolution sol = solve(a, with_theta(0.5));
  ASSERT_TRUE(sol.converged);
  EXPECT_LE(row_ratio_check(a, sol, 0.5).max_residual(), 1e-6);
}

TEST(RowRatioCheck, SingletonEqualityExact) {
  const DenseMatrix a = DenseMatrix::from_rows({{5, 1}, {1, 1}});
  const LarosSolution sol = solve(a, with_theta(3.0));
  ASSERT_TRUE(sol.converged);
  const RatioReport r = row_ratio_check(a, sol, 3.0);
  EXPECT_LE(r.row_residuals[0], 1e-12);
  EXPECT_LE(r.col_residuals[0], 1e-12);
  EXPECT_LE(r.max_residual(), 1e-12);
}

TEST(RowRatioCheck, ReportsViolation) {
  const DenseMatrix a = DenseMatrix::from_rows({{1, 1}, {5, 5}});
  LarosSolution fake;
  fake.u = Vector::Unit(2, 0);
  fake.v = Vector::Constant(2, 1.0 / std::sqrt(2.0));
  fake.sigma = 1.0;
  fake.X = DenseMatrix(Matrix(fake.u * fake.v.transpose()));
  fake.support_rows = {0};
  fake.support_cols = {0, 1};
  fake.dual_norm = 1.0;
  fake.rank_one = true;
  const RatioReport r = row_ratio_check(a, fake, 1.0);
  EXPECT_NEAR(r.row_residuals[1], 4.0, 1e-12);
  EXPECT_GT(r.max_residual(), 1.0);
}

TEST(RowRatioCheck, RejectsNonRankOne) {
  const DenseMatrix a = DenseMatrix::diagonal({1, 1});
  LarosSolution fake;
  fake.X = DenseMatrix::diagonal({0.5, 0.5});
  fake.sigma = 0.5;
  fake.u = Vector::Unit(2, 0);
  fake.v = Vector::Unit(2, 0);
  fake.dual_norm = 1.0;
  EXPECT_THROW(row_ratio_check(a, fake, 1.0), PreconditionError);
}

TEST(SubgaussianTailBound, Examples) {
  EXPECT_EQ(subgaussian_tail_bound(1e-6, 1.0, 3, 3), 1.0);
  const double expect = std::exp(-(8.0 * 900.0 / 81.0 - std::log(7.0) * 40.0));
  EXPECT_NEAR(subgaussian_tail_bound(30.0, 1.0, 20, 20), expect, 1e-12 * expect);
  EXPECT_NEAR(expect, 1.6e-5, 0.1e-5);
  EXPECT_DOUBLE_EQ(subgaussian_tail_bound(40.0, 2.0, 20, 20), subgaussian_tail_bound(20.0, 1.0, 20, 20));
  EXPECT_THROW(subgaussian_tail_bound(0.0, 1.0, 2, 2), InvalidParameter);
  EXPECT_THROW(subgaussian_tail_bound(1.0, -1.0, 2, 2), InvalidParameter);
  EXPECT_THROW(subgaussian_tail_bound(1.0, 1.0, 0, 2), InvalidParameter);
}

PlantedModel regime_model() {
  PlantedModel model;
  model.m = model.n = 120;
  model.M = model.N = 40;
  model.c3 = 0.1;
  return model;
}

TEST(PlantedRegime, WindowArithmetic) {
  const RegimeReport r = validate_planted_regime(regime_model(), 0.05, 1.0 / 40.0);
  EXPECT_NEAR(r.theta_lo * 40.0, 0.2 / 0.85, 1e-12);
  EXPECT_NEAR(r.theta_hi * 40.0, 1.0 / 0.15, 1e-12);
  EXPECT_TRUE(r.theta_window_ok);
  EXPECT_FALSE(mentions(r, "theta >= theta_lo"));
  EXPECT_FALSE(mentions(r, "theta <= theta_hi"));
  EXPECT_EQ(r.valid, r.violated.empty() && r.theta_lo <= r.theta_hi);
}

TEST(PlantedRegime, Violations) {
  const RegimeReport big_c5 = validate_planted_regime(regime_model(), 0.4, 1.0 / 40.0);
  EXPECT_TRUE(mentions(big_c5, "c5 <= 1/3"));
  EXPECT_FALSE(big_c5.valid);
  const RegimeReport big_theta = validate_planted_regime(regime_model(), 0.05, 10.0 / 40.0);
  EXPECT_TRUE(mentions(big_theta, "theta <= theta_hi"));
  EXPECT_FALSE(big_theta.theta_window_ok);
  const RegimeReport small_c5 = validate_planted_regime(regime_model(), 0.0, 1.0 / 40.0);
  EXPECT_TRUE(mentions(small_c5, "c5 > c1 + c2 + c1*c2"));
}

TEST(PlantedCertificate, ZeroNoiseIsExact) {
  PlantedModel model;
  model.m = model.n = 12;
  model.M = model.N = 4;
  model.noise = NoiseFamily::kNone;
  const PlantedInstance inst = plant_rank_one(model, 1);
  const double theta = 0.25;
  const LarosSolution sol = solve(inst.A, with_theta(theta));
  ASSERT_TRUE(sol.converged);
  const PlantedCertificateReport rep = build_planted_certificate(inst.A, model, sol, theta);
  EXPECT_LE(rep.w11, 1e-8);
  EXPECT_EQ(rep.w12, 0.0);
  EXPECT_EQ(rep.w21, 0.0);
  EXPECT_EQ(rep.w22, 0.0);
  EXPECT_EQ(rep.V.bottomRightCorner(8, 8).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_TRUE(rep.passes);
}

TEST(PlantedCertificate, ValidRegimeInstancesPass) {
  PlantedModel model = regime_model();
  const double theta = 1.0 / 40.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    model.perturbation_seed = seed;
    const PlantedInstance inst = plant_rank_one(model, seed);
    const LarosSolution sol = solve(inst.A, with_theta(theta));
    ASSERT_TRUE(sol.converged);
    const PlantedCertificateReport rep = build_planted_certificate(inst.A, model, sol, theta);
    EXPECT_TRUE(rep.passes) << "seed " << seed;
    EXPECT_LE(rep.v_linf, 1.0 + 1e-8);
    EXPECT_LE(rep.w_norm, 1.0 + 1e-8);
  }
}

TEST(PlantedCertificate, OutOfWindowThetaFails) {
  PlantedModel model = regime_model();
  model.perturbation_seed = 1;
  const PlantedInstance inst = plant_rank_one(model, 1);
  const RegimeReport window = validate_planted_regime(model, 0.05, 1.0 / 40.0);

  // Far above the window the planted block admits no positive candidate.
  const double high = 10.0 * window.theta_hi;
  EXPECT_THROW(block_candidate(inst.A, inst.truth, high), PreconditionError);
  const LarosSolution sol = solve(inst.A, with_theta(high));
  EXPECT_FALSE(sol.support_rows == inst.truth.rows() && sol.support_cols == inst.truth.cols());

  const double low = window.theta_lo / 10.0;
  const LarosSolution cand = block_candidate(inst.A, inst.truth, low);
  const PlantedCertificateReport rep = build_planted_certificate(inst.A, model, cand, low);
  EXPECT_FALSE(rep.passes);
  EXPECT_GT(rep.v_linf, 1.0);
}

TEST(PlantedCertificate, RejectsWrongSupport) {
  PlantedModel model = regime_model();
  const PlantedInstance inst = plant_rank_one(model, 2);
  const LarosSolution cand = block_candidate(inst.A, BlockSelector::leading(30, 30, 120, 120), 1.0 / 40.0);
  EXPECT_THROW(build_planted_certificate(inst.A, model, cand, 1.0 / 40.0), PreconditionError);
}

TEST(BlockCandidate, AgreesWithSolverWhenOptimal) {
  const DenseMatrix a = paper_example_6x6();
  const LarosSolution sol = solve(a, with_theta(0.5));
  const LarosSolution cand = block_candidate(a, BlockSelector({3, 4, 5}, {3, 4, 5}, 6, 6), 0.5);
  EXPECT_LE((sol.X.values() - cand.X.values()).norm(), 1e-8);
  EXPECT_NEAR(cand.dual_norm, sol.dual_norm, 1e-9);
}

}  // namespace
