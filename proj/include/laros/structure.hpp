#pragma once

#include <optional>
#include <string>
#include <vector>

#include "laros/block.hpp"
#include "laros/generators.hpp"
#include "laros/matrix.hpp"
#include "laros/solver.hpp"

namespace laros {

/// Below this theta the optimizer is unique and rank one:
/// (sigma_1 - sigma_2) / ((3 sigma_1 - sigma_2) sqrt(mn)). Throws InvalidInput
/// for A = 0.
double theta_A(const DenseMatrix& a);

/// Above this theta every optimizer vanishes outside the block, when the block
/// mean exceeds the largest entry outside it. nullopt when that hypothesis
/// fails. Throws InvalidInput for negative entries, a block that does not fit A or a
/// block covering all of A.
std::optional<double> theta_B(const DenseMatrix& a, const BlockSelector& block);

/// Threshold above which row j of every nonnegative rank-one optimizer is
/// zero because row i dominates it: 1 / (alpha - 1) with
/// alpha = min_k a_ik / max_k a_jk. Returns 0 for an all-zero row j and
/// nullopt when alpha <= 1. Throws InvalidInput for negative entries and
/// InvalidParameter for i == j or indices out of range.
std::optional<double> row_zero_threshold(const DenseMatrix& a, Eigen::Index i,
                                         Eigen::Index j);

/// Per-row and per-column residuals of the ratio identities satisfied by a
/// nonnegative rank-one optimizer sigma u v^T.
///   support row i:  |a_i^T v / (theta ||v||_1 + u_i) - ||A||_theta^*|
///   zero row j:     max(0, a_j^T v / (theta ||v||_1) - ||A||_theta^*)
/// and the same for columns with u and v exchanged.
struct RatioReport {
  std::vector<double> row_residuals;
  std::vector<double> col_residuals;
  double max_residual() const;
};

/// Throws PreconditionError unless sol is rank one with u, v of one sign.
RatioReport row_ratio_check(const DenseMatrix& a, const LarosSolution& sol,
                            double theta);

/// min(1, exp(-(8 u^2 / (81 b^2) - log(7) (m + n)))): bound on
/// P(||B|| >= u) for an m x n matrix of independent b-subgaussian entries.
/// Throws InvalidParameter unless u, b > 0 and m, n >= 1.
double subgaussian_tail_bound(double u, double b, Eigen::Index m,
                              Eigen::Index n);

struct RegimeReport {
  bool valid = false;
  bool theta_window_ok = false;
  bool size_ok = false;
  std::vector<std::string> violated;
  double theta_lo = 0.0;
  double theta_hi = 0.0;
  double k1_bound = 0.0;
  double k2_bound = 0.0;
};

/// Checks the constant, theta-window and size conditions under which the
/// planted block is the unique optimizer with high probability.
RegimeReport validate_planted_regime(const PlantedModel& model, double c5,
                                     double theta);

/// Blockwise dual certificate (V, W) for a solution supported on the planted
/// block, with Y = (u v^T + W) / lambda and Z = theta V / lambda.
struct PlantedCertificateReport {
  double lambda_star = 0.0;
  double v_linf = 0.0;
  double w11 = 0.0;
  double w12 = 0.0;
  double w21 = 0.0;
  double w22 = 0.0;
  double w_norm = 0.0;
  double wt_u = 0.0;
  double w_v = 0.0;
  /// Every block of W has spectral norm at most 1/2.
  bool blocks_within_half = false;
  /// ||V||_inf <= 1, ||W|| <= 1 and W^T u = 0, W v = 0 up to tol.
  bool passes = false;
  Matrix V;
  Matrix W;
};

/// Throws PreconditionError when sol is not rank one and nonnegative with
/// support equal to the model's leading M x N block.
PlantedCertificateReport build_planted_certificate(const DenseMatrix& a,
                                                   const PlantedModel& model,
                                                   const LarosSolution& sol,
                                                   double theta,
                                                   double tol = 1e-8);

/// Rank-one candidate supported on the block with positive factors, taken
/// from ||lambda A_b - theta e e^T|| = 1. Its dual_norm field is 1 / lambda,
/// which equals ||A||_theta^* only when the candidate is optimal. Throws
/// PreconditionError when no admissible lambda or positive pair exists.
LarosSolution block_candidate(const DenseMatrix& a, const BlockSelector& block,
                              double theta);

}  // namespace laros
