#pragma once

#include <optional>

#include "laros/matrix.hpp"
#include "laros/solver.hpp"

namespace laros {

/// Largest lambda with ||lambda A_b - theta S|| = 1 and the top singular pair
/// of lambda A_b - theta S there. The norm is convex in lambda; the root is
/// taken on its increasing branch, where u^T A_b v > 0.
struct BlockBalance {
  double lambda = 0.0;
  Vector u;
  Vector v;
};

std::optional<BlockBalance> balance_block(const Matrix& a_block,
                                          const Matrix& signs, double theta,
                                          double lambda_hint);

/// Point of [-1, 1]^n closest to `start` on the hyperplane <w, x> = c.
/// When the hyperplane misses the box the nearest box face is returned.
Vector project_box_hyperplane(const Vector& start, const Vector& w, double c);

/// Rank-one optimizer supported on rows x cols together with an explicit
/// decomposition (Y, Z) of the input matrix. Everything is expressed for the
/// matrix handed to refine_on_block; certificate() rescales to A = scale * a.
struct BlockRefinement {
  Matrix x;
  double lambda = 0.0;
  double sigma = 0.0;
  Vector u;
  Vector v;
  IndexSet rows;
  IndexSet cols;
  double theta = 0.0;
  Matrix y;
  Matrix z;

  DualCertificate certificate(double scale) const;
};

/// Returns nullopt when the balance equation has no admissible root or the
/// top singular pair disagrees with the requested sign pattern.
/// `l1_hint`, when given, seeds the off-block part of the l1 subgradient.
std::optional<BlockRefinement> refine_on_block(const Matrix& a, double theta,
                                               const IndexSet& rows,
                                               const IndexSet& cols,
                                               const Vector& row_signs,
                                               const Vector& col_signs,
                                               double lambda_hint,
                                               const Matrix* l1_hint);

/// Reads support, signs and a value estimate off a nearly rank-one feasible
/// iterate and refines on that block.
std::optional<BlockRefinement> refine_rank_one(const Matrix& a, double theta,
                                               const Matrix& x_estimate,
                                               double support_tol,
                                               const Matrix* l1_multiplier);

}  // namespace laros
