#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace laros {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Real m x n dense matrix with at least one row and one column and only
/// finite entries. Immutable once constructed; all operations return new
/// values.
class DenseMatrix {
 public:
  /// Throws InvalidInput on empty shape or NaN/Inf entries.
  explicit DenseMatrix(Matrix values);

  static DenseMatrix zeros(Eigen::Index rows, Eigen::Index cols);
  static DenseMatrix from_rows(
      std::initializer_list<std::initializer_list<double>> rows);
  /// Row-major entries; entries.size() must equal rows * cols.
  static DenseMatrix from_row_major(Eigen::Index rows, Eigen::Index cols,
                                    const std::vector<double>& entries);
  static DenseMatrix diagonal(std::initializer_list<double> diag);
  /// m x n matrix with a single 1 at (row, col), 0-based.
  static DenseMatrix unit(Eigen::Index rows, Eigen::Index cols,
                          Eigen::Index row, Eigen::Index col);

  Eigen::Index rows() const noexcept { return values_.rows(); }
  Eigen::Index cols() const noexcept { return values_.cols(); }
  double operator()(Eigen::Index i, Eigen::Index j) const {
    return values_(i, j);
  }
  const Matrix& values() const noexcept { return values_; }

  bool is_zero() const { return (values_.array() == 0.0).all(); }
  bool is_nonnegative() const { return (values_.array() >= 0.0).all(); }

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.values_.rows() == b.values_.rows() &&
           a.values_.cols() == b.values_.cols() && a.values_ == b.values_;
  }

 private:
  Matrix values_;
};

/// Ordered singular triples. left.col(k), right.col(k) pair with
/// singular_values(k); values are nonincreasing. In each left vector the
/// first entry of largest magnitude is nonnegative.
struct SvdFactors {
  Vector singular_values;
  Matrix left;
  Matrix right;
};

enum class NormKind { kNuclear, kSpectral, kL1, kLinf };

/// Thin SVD with min(m, n) triples and the sign convention above.
SvdFactors svd(const DenseMatrix& a);
SvdFactors svd(const Matrix& a);

double norm(const DenseMatrix& a, NormKind kind);
double norm(const Matrix& a, NormKind kind);

/// ||A||_* + theta * ||A||_1. Throws InvalidParameter for theta < 0.
double theta_norm(const DenseMatrix& a, double theta);
double theta_norm(const Matrix& a, double theta);

/// Singular value thresholding: U max(S - tau, 0) V^T.
DenseMatrix svt(const DenseMatrix& a, double tau);
Matrix svt(const Matrix& a, double tau);

/// Entrywise sgn(a) max(|a| - tau, 0).
DenseMatrix soft_threshold(const DenseMatrix& a, double tau);
Matrix soft_threshold(const Matrix& a, double tau);

/// Euclidean projection of X onto {Y : <A, Y> >= level}.
/// Throws DegenerateInput when A = 0.
DenseMatrix project_halfspace(const DenseMatrix& x, const DenseMatrix& a,
                              double level);
Matrix project_halfspace(const Matrix& x, const Matrix& a, double level);

/// u_1 v_1^T, the canonical element of the spectral-norm subdifferential.
DenseMatrix spectral_subgrad(const DenseMatrix& a);

struct LinfSubgradient {
  DenseMatrix matrix;
  Eigen::Index row;
  Eigen::Index col;
};

/// sgn(a_ij) E_ij at the row-major-first entry of maximal magnitude.
LinfSubgradient linf_subgrad(const DenseMatrix& a);

/// Frobenius inner product.
inline double inner(const Matrix& a, const Matrix& b) {
  return a.cwiseProduct(b).sum();
}

}  // namespace laros
