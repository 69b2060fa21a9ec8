#include "laros/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace laros {

namespace {

constexpr double kNearRankOne = 1e-3;

double top_pair(const Matrix& m, Vector& u, Vector& v) {
  Eigen::BDCSVD<Matrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  u = dec.matrixU().col(0);
  v = dec.matrixV().col(0);
  return dec.singularValues()(0);
}

double spectral(const Matrix& m) {
  return Eigen::BDCSVD<Matrix>(m).singularValues()(0);
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

std::optional<BlockBalance> balance_block(const Matrix& a_block,
                                          const Matrix& signs, double theta,
                                          double lambda_hint) {
  Vector u, v;
  double lambda = lambda_hint;
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    lambda = 1.0 / std::max(spectral(a_block), 1e-300);
  }
  auto eval = [&](double lam) {
    return top_pair(lam * a_block - theta * signs, u, v);
  };

  double f = eval(lambda);
  double slope = u.dot(a_block * v);
  for (int t = 0; t < 200 && !(f >= 1.0 && slope > 0.0); ++t) {
    lambda *= 2.0;
    f = eval(lambda);
    slope = u.dot(a_block * v);
  }
  if (!(f >= 1.0 && slope > 0.0)) return std::nullopt;

  // Newton from the right of the root stays on the increasing branch.
  for (int it = 0; it < 100; ++it) {
    const double step = (f - 1.0) / slope;
    const double next = lambda - step;
    if (!(next > 0.0)) return std::nullopt;
    const bool small = std::abs(step) <= 4e-16 * lambda;
    lambda = next;
    f = eval(lambda);
    slope = u.dot(a_block * v);
    if (!(slope > 0.0)) return std::nullopt;
    if (small || std::abs(f - 1.0) <= 1e-15) break;
  }
  if (std::abs(f - 1.0) > 1e-12) return std::nullopt;
  return BlockBalance{lambda, u, v};
}

Vector project_box_hyperplane(const Vector& start, const Vector& w, double c) {
  const Eigen::Index n = start.size();
  auto at = [&](double nu) {
    return Vector((start + nu * w).cwiseMax(-1.0).cwiseMin(1.0));
  };
  auto h = [&](double nu) { return w.dot(at(nu)); };
  const double reach = w.cwiseAbs().sum();
  if (c >= reach) {
    Vector out(n);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = w(i) != 0.0 ? sign_of(w(i)) : std::clamp(start(i), -1.0, 1.0);
    return out;
  }
  if (c <= -reach) {
    Vector out(n);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = w(i) != 0.0 ? -sign_of(w(i)) : std::clamp(start(i), -1.0, 1.0);
    return out;
  }

  double lo = -1.0, hi = 1.0;
  for (int t = 0; t < 2000 && h(hi) < c; ++t) hi *= 2.0;
  for (int t = 0; t < 2000 && h(lo) > c; ++t) lo *= 2.0;
  for (int t = 0; t < 200 && hi - lo > 1e-17 * std::max(1.0, std::abs(hi)); ++t) {
    const double mid = 0.5 * (lo + hi);
    if (h(mid) < c) lo = mid; else hi = mid;
  }
  // h is affine in nu between breakpoints; solve exactly on the active piece.
  const double mid = 0.5 * (lo + hi);
  const Vector trial = start + mid * w;
  double fixed = 0.0, base = 0.0, slope = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (trial(i) >= 1.0 || trial(i) <= -1.0) {
      fixed += w(i) * std::clamp(trial(i), -1.0, 1.0);
    } else {
      base += w(i) * start(i);
      slope += w(i) * w(i);
    }
  }
  double nu = mid;
  if (slope > 0.0) {
    const double exact = (c - fixed - base) / slope;
    if (exact >= lo - 1e-12 * std::max(1.0, std::abs(lo)) &&
        exact <= hi + 1e-12 * std::max(1.0, std::abs(hi))) {
      nu = exact;
    }
  }
  return at(nu);
}

DualCertificate BlockRefinement::certificate(double scale) const {
  DualCertificate cert{DenseMatrix(y * scale), DenseMatrix(z * scale)};
  const double ynorm = spectral(cert.Y.values());
  cert.dual_norm =
      theta > 0.0
          ? std::max(ynorm, cert.Z.values().cwiseAbs().maxCoeff() / theta)
          : ynorm;
  cert.lambda_star = 1.0 / cert.dual_norm;
  const Matrix xn = x / scale * cert.dual_norm;
  cert.alpha = norm(xn, NormKind::kNuclear);
  cert.beta = xn.cwiseAbs().sum();
  return cert;
}

std::optional<BlockRefinement> refine_on_block(const Matrix& a, double theta,
                                               const IndexSet& rows,
                                               const IndexSet& cols,
                                               const Vector& row_signs,
                                               const Vector& col_signs,
                                               double lambda_hint,
                                               const Matrix* l1_hint) {
  if (rows.empty() || cols.empty()) return std::nullopt;
  const Matrix ab = a(rows, cols);
  const Matrix signs = row_signs * col_signs.transpose();
  auto bal = balance_block(ab, signs, theta, lambda_hint);
  if (!bal) return std::nullopt;

  Vector ub = bal->u;
  Vector vb = bal->v;
  if (ub.dot(row_signs) < 0.0) {
    ub = -ub;
    vb = -vb;
  }
  for (Eigen::Index i = 0; i < ub.size(); ++i)
    if (!(ub(i) * row_signs(i) > 0.0)) return std::nullopt;
  for (Eigen::Index j = 0; j < vb.size(); ++j)
    if (!(vb(j) * col_signs(j) > 0.0)) return std::nullopt;

  const double lambda = bal->lambda;
  const double fit = ub.dot(ab * vb);
  if (!(fit > 0.0)) return std::nullopt;

  BlockRefinement ref;
  ref.theta = theta;
  ref.lambda = lambda;
  ref.sigma = 1.0 / fit;
  ref.rows = rows;
  ref.cols = cols;
  ref.u = Vector::Zero(a.rows());
  ref.v = Vector::Zero(a.cols());
  ref.u(rows) = ub;
  ref.v(cols) = vb;
  ref.x = ref.sigma * ref.u * ref.v.transpose();

  if (theta == 0.0) {
    ref.y = a;
    ref.z = Matrix::Zero(a.rows(), a.cols());
    return ref;
  }

  std::vector<bool> in_rows(static_cast<std::size_t>(a.rows()), false);
  std::vector<bool> in_cols(static_cast<std::size_t>(a.cols()), false);
  for (auto i : rows) in_rows[static_cast<std::size_t>(i)] = true;
  for (auto j : cols) in_cols[static_cast<std::size_t>(j)] = true;

  // Off the block the l1 subgradient V is free in [-1, 1]; the spectral part
  // W = lambda A - theta V - u v^T must satisfy W^T u = 0, W v = 0 and
  // ||W|| <= 1. Columns outside the block meet W^T u = 0 by projecting V onto
  // a hyperplane, rows likewise; the remaining corner is left as seeded.
  auto build = [&](const Matrix& seed) {
    Matrix vsub = seed.cwiseMax(-1.0).cwiseMin(1.0);
    vsub(rows, cols) = signs;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (in_cols[static_cast<std::size_t>(j)]) continue;
      const Vector col = a(rows, j);
      const double target = lambda * ub.dot(col) / theta;
      const Vector start = vsub(rows, j);
      vsub(rows, j) = project_box_hyperplane(start, ub, target);
    }
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (in_rows[static_cast<std::size_t>(i)]) continue;
      const Vector row = a(i, cols).transpose();
      const double target = lambda * vb.dot(row) / theta;
      const Vector start = vsub(i, cols).transpose();
      vsub(i, cols) = project_box_hyperplane(start, vb, target).transpose();
    }
    return vsub;
  };

  Matrix best_v;
  double best_norm = std::numeric_limits<double>::infinity();
  auto consider = [&](const Matrix& seed) {
    Matrix vsub = build(seed);
    const double nrm = spectral(lambda * a - theta * vsub);
    if (nrm < best_norm) {
      best_norm = nrm;
      best_v = std::move(vsub);
    }
  };
  if (l1_hint != nullptr) consider(*l1_hint / theta);
  consider(lambda * a / theta);

  ref.z = theta * best_v / lambda;
  ref.y = a - ref.z;
  return ref;
}

std::optional<BlockRefinement> refine_rank_one(const Matrix& a, double theta,
                                               const Matrix& x_estimate,
                                               double support_tol,
                                               const Matrix* l1_multiplier) {
  const SvdFactors f = svd(x_estimate);
  const double s1 = f.singular_values(0);
  const double s2 = f.singular_values.size() > 1 ? f.singular_values(1) : 0.0;
  if (!(s1 > 0.0) || s2 > kNearRankOne * s1) return std::nullopt;

  const double cutoff = support_tol * x_estimate.cwiseAbs().maxCoeff();
  IndexSet rows, cols;
  for (Eigen::Index i = 0; i < x_estimate.rows(); ++i)
    if (x_estimate.row(i).cwiseAbs().maxCoeff() > cutoff) rows.push_back(i);
  for (Eigen::Index j = 0; j < x_estimate.cols(); ++j)
    if (x_estimate.col(j).cwiseAbs().maxCoeff() > cutoff) cols.push_back(j);

  Vector row_signs(static_cast<Eigen::Index>(rows.size()));
  Vector col_signs(static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    row_signs(static_cast<Eigen::Index>(k)) = sign_of(f.left(rows[k], 0));
    if (row_signs(static_cast<Eigen::Index>(k)) == 0.0) return std::nullopt;
  }
  for (std::size_t k = 0; k < cols.size(); ++k) {
    col_signs(static_cast<Eigen::Index>(k)) = sign_of(f.right(cols[k], 0));
    if (col_signs(static_cast<Eigen::Index>(k)) == 0.0) return std::nullopt;
  }
  const double hint = theta_norm(x_estimate, theta) /
                      std::max(inner(a, x_estimate), 1e-300);
  return refine_on_block(a, theta, rows, cols, row_signs, col_signs, hint,
                         l1_multiplier);
}

}  // namespace laros
