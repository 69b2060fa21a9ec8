#include "laros/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "laros/errors.hpp"

namespace laros {

namespace {

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) {
    throw InvalidInput(std::string(what) + ": matrix has non-finite entries");
  }
}

void require_nonnegative_tau(double tau, const char* what) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw InvalidParameter(std::string(what) +
                           ": threshold must be finite and nonnegative");
  }
}

void apply_sign_convention(SvdFactors& f) {
  for (Eigen::Index k = 0; k < f.left.cols(); ++k) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < f.left.rows(); ++i) {
      const double v = std::abs(f.left(i, k));
      if (v > best_abs) {
        best_abs = v;
        best = i;
      }
    }
    if (f.left(best, k) < 0.0) {
      f.left.col(k) *= -1.0;
      f.right.col(k) *= -1.0;
    }
  }
}

}  // namespace

DenseMatrix::DenseMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw InvalidInput("DenseMatrix: shape must be at least 1 x 1");
  }
  require_finite(values_, "DenseMatrix");
}

DenseMatrix DenseMatrix::zeros(Eigen::Index rows, Eigen::Index cols) {
  return DenseMatrix(Matrix::Zero(rows, cols));
}

DenseMatrix DenseMatrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto n = m > 0 ? static_cast<Eigen::Index>(rows.begin()->size()) : 0;
  Matrix out(m, n);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != n) {
      throw InvalidInput("DenseMatrix::from_rows: ragged rows");
    }
    Eigen::Index j = 0;
    for (double v : row) out(i, j++) = v;
    ++i;
  }
  return DenseMatrix(std::move(out));
}

DenseMatrix DenseMatrix::from_row_major(Eigen::Index rows, Eigen::Index cols,
                                        const std::vector<double>& entries) {
  if (rows < 1 || cols < 1 ||
      static_cast<std::size_t>(rows * cols) != entries.size()) {
    throw InvalidInput("DenseMatrix::from_row_major: entry count mismatch");
  }
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      out(i, j) = entries[static_cast<std::size_t>(i * cols + j)];
  return DenseMatrix(std::move(out));
}

DenseMatrix DenseMatrix::diagonal(std::initializer_list<double> diag) {
  const auto n = static_cast<Eigen::Index>(diag.size());
  Matrix out = Matrix::Zero(n, n);
  Eigen::Index k = 0;
  for (double v : diag) {
    out(k, k) = v;
    ++k;
  }
  return DenseMatrix(std::move(out));
}

DenseMatrix DenseMatrix::unit(Eigen::Index rows, Eigen::Index cols,
                              Eigen::Index row, Eigen::Index col) {
  Matrix out = Matrix::Zero(rows, cols);
  out(row, col) = 1.0;
  return DenseMatrix(std::move(out));
}

SvdFactors svd(const Matrix& a) {
  require_finite(a, "svd");
  Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdFactors f{dec.singularValues(), dec.matrixU(), dec.matrixV()};
  apply_sign_convention(f);
  return f;
}

SvdFactors svd(const DenseMatrix& a) { return svd(a.values()); }

double norm(const Matrix& a, NormKind kind) {
  switch (kind) {
    case NormKind::kNuclear:
      return Eigen::BDCSVD<Matrix>(a).singularValues().sum();
    case NormKind::kSpectral:
      return Eigen::BDCSVD<Matrix>(a).singularValues()(0);
    case NormKind::kL1:
      return a.cwiseAbs().sum();
    case NormKind::kLinf:
      return a.cwiseAbs().maxCoeff();
  }
  return 0.0;
}

double norm(const DenseMatrix& a, NormKind kind) {
  return norm(a.values(), kind);
}

double theta_norm(const Matrix& a, double theta) {
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    throw InvalidParameter("theta_norm: theta must be finite and >= 0");
  }
  return norm(a, NormKind::kNuclear) + theta * norm(a, NormKind::kL1);
}

double theta_norm(const DenseMatrix& a, double theta) {
  return theta_norm(a.values(), theta);
}

Matrix svt(const Matrix& a, double tau) {
  require_nonnegative_tau(tau, "svt");
  if (tau == 0.0) return a;
  Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = dec.singularValues();
  Eigen::Index keep = 0;
  while (keep < s.size() && s(keep) > tau) ++keep;
  if (keep == 0) return Matrix::Zero(a.rows(), a.cols());
  const Vector shrunk = s.head(keep).array() - tau;
  return dec.matrixU().leftCols(keep) * shrunk.asDiagonal() *
         dec.matrixV().leftCols(keep).transpose();
}

DenseMatrix svt(const DenseMatrix& a, double tau) {
  return DenseMatrix(svt(a.values(), tau));
}

Matrix soft_threshold(const Matrix& a, double tau) {
  require_nonnegative_tau(tau, "soft_threshold");
  return a.unaryExpr([tau](double x) {
    const double mag = std::abs(x) - tau;
    if (mag <= 0.0) return 0.0;
    return x > 0.0 ? mag : -mag;
  });
}

DenseMatrix soft_threshold(const DenseMatrix& a, double tau) {
  return DenseMatrix(soft_threshold(a.values(), tau));
}

Matrix project_halfspace(const Matrix& x, const Matrix& a, double level) {
  const double a2 = a.squaredNorm();
  if (a2 == 0.0) {
    throw DegenerateInput("project_halfspace: constraint matrix is zero");
  }
  const double slack = inner(a, x) - level;
  if (slack >= 0.0) return x;
  return x - (slack / a2) * a;
}

DenseMatrix project_halfspace(const DenseMatrix& x, const DenseMatrix& a,
                              double level) {
  if (x.rows() != a.rows() || x.cols() != a.cols()) {
    throw InvalidInput("project_halfspace: shape mismatch");
  }
  return DenseMatrix(project_halfspace(x.values(), a.values(), level));
}

DenseMatrix spectral_subgrad(const DenseMatrix& a) {
  if (a.is_zero()) {
    throw InvalidInput("spectral_subgrad: matrix is zero");
  }
  const SvdFactors f = svd(a);
  return DenseMatrix(f.left.col(0) * f.right.col(0).transpose());
}

LinfSubgradient linf_subgrad(const DenseMatrix& a) {
  if (a.is_zero()) {
    throw InvalidInput("linf_subgrad: matrix is zero");
  }
  Eigen::Index bi = 0, bj = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double v = std::abs(a(i, j));
      if (v > best) {
        best = v;
        bi = i;
        bj = j;
      }
    }
  }
  Matrix g = Matrix::Zero(a.rows(), a.cols());
  g(bi, bj) = a(bi, bj) > 0.0 ? 1.0 : -1.0;
  return {DenseMatrix(std::move(g)), bi, bj};
}

}  // namespace laros
