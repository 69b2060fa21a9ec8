#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "laros/block.hpp"
#include "laros/matrix.hpp"

namespace laros {

/// Parameters of a LAROS solve:
///   minimize ||X||_* + theta ||X||_1  subject to  <A, X> >= 1.
struct SolverConfig {
  double theta = 0.0;
  /// Splitting penalty; applied to A rescaled to unit Frobenius norm.
  double penalty = 1.0;
  int max_iters = 50000;
  double tol_primal = 1e-8;
  double tol_dual = 1e-8;
  /// Certificate residuals must fall below tol_gap * max(1, ||A||_theta^*).
  double tol_gap = 1e-8;
  /// Relative cutoff (against ||X||_inf) for support detection.
  double support_tol = 1e-6;
  /// Residual-balancing updates of the penalty during the first phase.
  bool adaptive_penalty = true;
  /// Safeguarded Anderson mixing of the splitting iterates.
  bool acceleration = true;
  /// Rank-one active-set refinement with an exact dual certificate.
  bool polish = true;

  /// Throws InvalidParameter.
  void validate() const;
};

/// Decomposition Y + Z = A certifying optimality through
///   ||Y|| = ||Z||_inf / theta,  X in alpha d||Y||,  X in beta d||Z||_inf,
///   alpha + theta beta = 1
/// for the normalized solution X * dual_norm.
struct DualCertificate {
  DenseMatrix Y;
  DenseMatrix Z;
  double alpha = 0.0;
  double beta = 0.0;
  /// max(||Y||, ||Z||_inf / theta): an upper bound on ||A||_theta^*, equal to
  /// it when the certificate is exact.
  double dual_norm = 0.0;
  double lambda_star = 0.0;
};

struct LarosSolution {
  /// Optimizer of the problem with <A, X> >= 1 (tight at the optimum).
  DenseMatrix X = DenseMatrix::zeros(1, 1);
  double sigma = 0.0;
  Vector u;
  Vector v;
  IndexSet support_rows;
  IndexSet support_cols;
  /// ||X||_theta, the optimal value, equal to 1 / ||A||_theta^*.
  double objective = 0.0;
  double dual_norm = 0.0;
  /// |objective * dual_norm - 1|.
  double dual_gap = 0.0;
  int iterations = 0;
  bool converged = false;
  /// True when the solution came from the rank-one active-set refinement.
  bool polished = false;
  bool rank_one = false;
  /// sigma_1(Y) - sigma_2(Y) of the certificate.
  double y_spectral_gap = 0.0;
  /// Number of entries of Z attaining ||Z||_inf.
  Eigen::Index z_argmax_multiplicity = 0;
  /// Neither uniqueness condition (simple top singular value of Y, unique
  /// argmax of |Z|) could be confirmed.
  bool possibly_non_unique = false;

  /// X scaled to ||X||_theta = 1 (the max <A, X> s.t. ||X||_theta <= 1 form).
  DenseMatrix normalized() const;
};

/// Splitting iterate handed to an observer. Matrices are in the original
/// scaling of A; multipliers are elements of the subdifferentials of the
/// nuclear term, the theta-l1 term and the constraint indicator at their copies.
struct IterationSnapshot {
  int iteration;
  const Matrix& consensus;
  const Matrix& nuclear_multiplier;
  const Matrix& l1_multiplier;
  const Matrix& constraint_multiplier;
  double penalty;
  /// ||T(s) - s|| of the Douglas-Rachford map at the accepted iterate
  /// (normalized scale). Nonincreasing while the penalty is held fixed.
  double fixed_point_residual;
  double primal_residual;
  double dual_residual;
};

using IterationObserver = std::function<void(const IterationSnapshot&)>;

struct SolverState {
  Matrix consensus;
  Matrix nuclear_multiplier;
  Matrix l1_multiplier;
  Matrix constraint_multiplier;
  double penalty = 0.0;
  int iterations = 0;
  bool converged = false;
  std::optional<DualCertificate> certificate;
};

struct SolveOutput {
  LarosSolution solution;
  SolverState state;
};

SolveOutput solve_with_state(const DenseMatrix& a, const SolverConfig& config,
                             const IterationObserver& observer = {});

/// Throws DegenerateInput for A = 0. A non-converged run returns its best
/// iterate with converged = false.
LarosSolution solve(const DenseMatrix& a, const SolverConfig& config);

/// ||A||_theta^* = 1 / (optimal value). Throws InvalidInput for A = 0.
double dual_theta_norm(const DenseMatrix& a, double theta);

/// Dual certificate of a converged solve. Throws CertificateUnavailable when
/// the state has not converged.
DualCertificate recover_dual(const DenseMatrix& a, double theta,
                             const SolverState& state);

struct RankOneStructure {
  double sigma = 0.0;
  Vector u;
  Vector v;
  IndexSet rows;
  IndexSet cols;
  /// sigma_2 / sigma_1 <= 1e-6.
  bool rank_one = false;
};

RankOneStructure extract_rank_one(const DenseMatrix& x, double support_tol);
RankOneStructure extract_rank_one(const Matrix& x, double support_tol);

/// Residuals of the optimality system for a normalized X (||X||_theta = 1).
struct OptimalityReport {
  /// ||Y|| - ||Z||_inf / theta; ||Z||_inf when theta = 0.
  double balance = 0.0;
  /// |<X, Y> - ||X||_* ||Y|||
  double spectral_alignment = 0.0;
  /// |<X, Z> - ||X||_1 ||Z||_inf|
  double linf_alignment = 0.0;
  /// |alpha + theta beta - 1|
  double weight_sum = 0.0;
  /// |||X||_theta - 1|
  double normalization = 0.0;
  /// ||Y + Z - A||_F / ||A||_F
  double decomposition = 0.0;

  double max_residual() const;
  bool certifies(double tol) const { return max_residual() <= tol; }
};

OptimalityReport check_optimality(const DenseMatrix& a, double theta,
                                  const DenseMatrix& x_normalized,
                                  const DualCertificate& cert);

}  // namespace laros
