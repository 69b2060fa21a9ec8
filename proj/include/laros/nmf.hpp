#pragma once

#include <vector>

#include "laros/block.hpp"
#include "laros/matrix.hpp"
#include "laros/solver.hpp"

namespace laros {

/// A ~ W H^T with W (m x k) and H (n x k) nonnegative, k <= p features.
struct NmfResult {
  Matrix W;
  Matrix H;
  /// ||R_0||_F, ..., ||R_k||_F with R_0 = A.
  std::vector<double> residual_norms;
  std::vector<BlockSelector> supports;
  /// Fewer than p features: the residual vanished first.
  bool short_count = false;
  /// Solver iterations per round.
  std::vector<int> iterations;

  Eigen::Index features() const { return W.cols(); }
};

/// max(R - sigma u v^T, 0) with u, v zeroed outside the block.
DenseMatrix residual_update(const DenseMatrix& r, double sigma, const Vector& u,
                            const Vector& v, const BlockSelector& block);

/// Greedy extraction: each round solves on the current residual, refits the
/// best rank-one approximation of the residual on the solution's support,
/// subtracts it and clamps at zero. Entries at or below 1e-13 max(A) are
/// cleared as rounding residue. Throws InvalidInput for A = 0 or negative
/// entries, InvalidParameter for p < 1, and ConvergenceFailure when an inner
/// solve does not converge.
NmfResult greedy_extract(const DenseMatrix& a, int p, double theta,
                         const SolverConfig& config);

/// As above with one theta per round; p = thetas.size().
NmfResult greedy_extract(const DenseMatrix& a,
                         const std::vector<double>& thetas,
                         const SolverConfig& config);

}  // namespace laros
