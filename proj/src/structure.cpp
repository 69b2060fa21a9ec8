#include "laros/structure.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "laros/errors.hpp"
#include "laros/refine.hpp"

namespace laros {

namespace {

void require_nonnegative(const DenseMatrix& a, const char* what) {
  if (!a.is_nonnegative()) {
    throw InvalidInput(std::string(what) + ": A must be entrywise nonnegative");
  }
}

double spectral(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::BDCSVD<Matrix>(m).singularValues()(0);
}

}  // namespace

double theta_A(const DenseMatrix& a) {
  if (a.is_zero()) throw InvalidInput("theta_A: A = 0");
  const Vector s = svd(a).singular_values;
  const double s1 = s(0);
  const double s2 = s.size() > 1 ? s(1) : 0.0;
  if (s1 == s2) return 0.0;
  const double mn = static_cast<double>(a.rows()) * static_cast<double>(a.cols());
  return (s1 - s2) / ((3.0 * s1 - s2) * std::sqrt(mn));
}

std::optional<double> theta_B(const DenseMatrix& a,
                              const BlockSelector& block) {
  require_nonnegative(a, "theta_B");
  if (block.rows().back() >= a.rows() || block.cols().back() >= a.cols()) {
    throw InvalidInput("theta_B: block does not fit A");
  }
  if (block.covers(a.rows(), a.cols())) {
    throw InvalidInput("theta_B: block covers all of A");
  }
  const Matrix& v = a.values();
  const double mean = v(block.rows(), block.cols()).mean();
  double outside = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (!block.contains(i, j)) outside = std::max(outside, v(i, j));
  if (!(mean > outside)) return std::nullopt;
  const double root_mn = std::sqrt(static_cast<double>(block.row_count()) *
                                   static_cast<double>(block.col_count()));
  return (mean * root_mn + outside) / ((mean - outside) * root_mn);
}

std::optional<double> row_zero_threshold(const DenseMatrix& a, Eigen::Index i,
                                         Eigen::Index j) {
  require_nonnegative(a, "row_zero_threshold");
  if (i == j || i < 0 || j < 0 || i >= a.rows() || j >= a.rows()) {
    throw InvalidParameter("row_zero_threshold: need distinct rows in range");
  }
  const double dominated = a.values().row(j).maxCoeff();
  if (dominated == 0.0) return 0.0;
  const double alpha = a.values().row(i).minCoeff() / dominated;
  if (!(alpha > 1.0)) return std::nullopt;
  return 1.0 / (alpha - 1.0);
}

double RatioReport::max_residual() const {
  double out = 0.0;
  for (double r : row_residuals) out = std::max(out, r);
  for (double r : col_residuals) out = std::max(out, r);
  return out;
}

RatioReport row_ratio_check(const DenseMatrix& a, const LarosSolution& sol,
                            double theta) {
  if (!sol.rank_one) {
    throw PreconditionError("row_ratio_check: solution is not rank one");
  }
  Vector u = sol.u;
  Vector v = sol.v;
  if (u.sum() < 0.0) {
    u = -u;
    v = -v;
  }
  const double slack = 1e-12;
  if (u.minCoeff() < -slack || v.minCoeff() < -slack) {
    throw PreconditionError("row_ratio_check: factors are not nonnegative");
  }
  const double dual = sol.dual_norm;
  const Matrix& m = a.values();
  auto in = [](const IndexSet& set, Eigen::Index k) {
    return std::binary_search(set.begin(), set.end(), k);
  };

  RatioReport out;
  const Vector av = m * v;
  const Vector atu = m.transpose() * u;
  const double v1 = v.lpNorm<1>();
  const double u1 = u.lpNorm<1>();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (in(sol.support_rows, i)) {
      out.row_residuals.push_back(std::abs(av(i) / (theta * v1 + u(i)) - dual));
    } else {
      const double ratio = theta > 0.0 ? av(i) / (theta * v1) : 0.0;
      out.row_residuals.push_back(std::max(0.0, ratio - dual));
    }
  }
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    if (in(sol.support_cols, j)) {
      out.col_residuals.push_back(std::abs(atu(j) / (theta * u1 + v(j)) - dual));
    } else {
      const double ratio = theta > 0.0 ? atu(j) / (theta * u1) : 0.0;
      out.col_residuals.push_back(std::max(0.0, ratio - dual));
    }
  }
  return out;
}

double subgaussian_tail_bound(double u, double b, Eigen::Index m,
                              Eigen::Index n) {
  if (!(u > 0.0) || !(b > 0.0) || m < 1 || n < 1) {
    throw InvalidParameter("subgaussian_tail_bound: need u, b > 0, m, n >= 1");
  }
  const double exponent = 8.0 * u * u / (81.0 * b * b) -
                          std::log(7.0) * static_cast<double>(m + n);
  return std::min(1.0, std::exp(-exponent));
}

RegimeReport validate_planted_regime(const PlantedModel& model, double c5,
                                     double theta) {
  RegimeReport r;
  const double c1 = model.c1, c2 = model.c2, c3 = model.c3;
  const double b = model.subgaussian_b();
  const double M = static_cast<double>(model.M);
  const double N = static_cast<double>(model.N);
  const double root_mn = std::sqrt(M * N);
  auto fail = [&](const char* name) { r.violated.emplace_back(name); };

  bool constants_ok = true;
  if (!(c5 > c1 + c2 + c1 * c2)) {
    fail("c5 > c1 + c2 + c1*c2");
    constants_ok = false;
  }
  if (!(c5 <= 1.0 / 3.0)) {
    fail("c5 <= 1/3");
    constants_ok = false;
  }
  if (!(c3 + c5 < 1.0)) {
    fail("c3 + c5 < 1");
    constants_ok = false;
  }

  r.theta_lo = 2.0 * c3 / ((1.0 - c3 - c5) * root_mn);
  const double cap = c5 > 0.0 ? (1.0 + c3 - 3.0 * c5) / (2.0 * c5)
                              : std::numeric_limits<double>::infinity();
  const double hi_a = c3 + c5 > 0.0 ? 1.0 / (c3 + c5)
                                    : std::numeric_limits<double>::infinity();
  r.theta_hi = std::min(hi_a, cap) / root_mn;
  bool window_ok = constants_ok && r.theta_lo <= r.theta_hi;
  if (!(theta >= r.theta_lo)) {
    fail("theta >= theta_lo");
    window_ok = false;
  }
  if (!(theta <= r.theta_hi)) {
    fail("theta <= theta_hi");
    window_ok = false;
  }
  r.theta_window_ok = window_ok;

  const double log7 = std::log(7.0);
  r.k1_bound = std::pow(log7 * 81.0 * b * b, 4.0 / 3.0);
  r.k2_bound = c5 > 0.0 ? log7 * 36.0 * 81.0 * b * b / (8.0 * c5 * c5)
                        : std::numeric_limits<double>::infinity();
  bool size_ok = true;
  if (!(M * N > r.k1_bound * std::pow(M + N, 4.0 / 3.0))) {
    fail("MN > k1 (M+N)^(4/3)");
    size_ok = false;
  }
  const double mn_sum = static_cast<double>(model.m + model.n);
  if (!(M * N > r.k2_bound * mn_sum)) {
    fail("MN > k2 (m+n)");
    size_ok = false;
  }
  r.size_ok = size_ok;
  r.valid = r.violated.empty() && r.theta_lo <= r.theta_hi;
  return r;
}

PlantedCertificateReport build_planted_certificate(const DenseMatrix& a,
                                                   const PlantedModel& model,
                                                   const LarosSolution& sol,
                                                   double theta, double tol) {
  const Eigen::Index m = a.rows(), n = a.cols(), M = model.M, N = model.N;
  if (model.m != m || model.n != n) {
    throw PreconditionError("build_planted_certificate: model shape mismatch");
  }
  const BlockSelector truth = BlockSelector::leading(M, N, m, n);
  if (!sol.rank_one || sol.support_rows != truth.rows() ||
      sol.support_cols != truth.cols()) {
    throw PreconditionError(
        "build_planted_certificate: solution is not rank one on the planted "
        "block");
  }
  if (!(theta > 0.0) || !(sol.dual_norm > 0.0)) {
    throw PreconditionError("build_planted_certificate: need theta > 0");
  }
  Vector u = sol.u;
  Vector v = sol.v;
  if (u.sum() < 0.0) {
    u = -u;
    v = -v;
  }
  const Vector u1 = u.head(M);
  const Vector v1 = v.head(N);
  if (u1.minCoeff() < 0.0 || v1.minCoeff() < 0.0) {
    throw PreconditionError("build_planted_certificate: factors change sign");
  }
  u.tail(m - M).setZero();
  v.tail(n - N).setZero();

  const Matrix& av = a.values();
  PlantedCertificateReport r;
  const double lam = 1.0 / sol.dual_norm;
  r.lambda_star = lam;
  r.V = Matrix::Zero(m, n);
  r.W = Matrix::Zero(m, n);

  r.V.topLeftCorner(M, N).setOnes();
  r.W.topLeftCorner(M, N) = lam * av.topLeftCorner(M, N) -
                            theta * Matrix::Ones(M, N) - u1 * v1.transpose();

  const double u1_l1 = u1.sum();
  for (Eigen::Index j = N; j < n; ++j) {
    const double level = lam * av.col(j).head(M).dot(u1) / (theta * u1_l1);
    r.V.col(j).head(M).setConstant(level);
  }
  const double v1_l1 = v1.sum();
  for (Eigen::Index i = M; i < m; ++i) {
    const double level = lam * av.row(i).head(N).dot(v1) / (theta * v1_l1);
    r.V.row(i).head(N).setConstant(level);
  }
  r.V.bottomRightCorner(m - M, n - N)
      .setConstant(lam * model.sigma0 * model.c3 / theta);

  r.W.topRightCorner(M, n - N) = lam * av.topRightCorner(M, n - N) -
                                 theta * r.V.topRightCorner(M, n - N);
  r.W.bottomLeftCorner(m - M, N) = lam * av.bottomLeftCorner(m - M, N) -
                                   theta * r.V.bottomLeftCorner(m - M, N);
  r.W.bottomRightCorner(m - M, n - N) =
      lam * av.bottomRightCorner(m - M, n - N) -
      theta * r.V.bottomRightCorner(m - M, n - N);

  r.v_linf = r.V.cwiseAbs().maxCoeff();
  r.w11 = spectral(r.W.topLeftCorner(M, N));
  r.w12 = spectral(r.W.topRightCorner(M, n - N));
  r.w21 = spectral(r.W.bottomLeftCorner(m - M, N));
  r.w22 = spectral(r.W.bottomRightCorner(m - M, n - N));
  r.w_norm = spectral(r.W);
  r.wt_u = (r.W.transpose() * u).norm();
  r.w_v = (r.W * v).norm();
  r.blocks_within_half = std::max({r.w11, r.w12, r.w21, r.w22}) <= 0.5 + tol;
  r.passes = r.v_linf <= 1.0 + tol && r.w_norm <= 1.0 + tol &&
             r.wt_u <= tol && r.w_v <= tol;
  return r;
}

LarosSolution block_candidate(const DenseMatrix& a, const BlockSelector& block,
                              double theta) {
  const Vector ones_r = Vector::Ones(block.row_count());
  const Vector ones_c = Vector::Ones(block.col_count());
  const auto ref = refine_on_block(a.values(), theta, block.rows(),
                                   block.cols(), ones_r, ones_c, 0.0, nullptr);
  if (!ref) {
    throw PreconditionError(
        "block_candidate: no positive rank-one candidate on this block");
  }
  LarosSolution sol;
  sol.X = DenseMatrix(ref->x);
  sol.sigma = ref->sigma;
  sol.u = ref->u;
  sol.v = ref->v;
  sol.support_rows = block.rows();
  sol.support_cols = block.cols();
  sol.objective = theta_norm(ref->x, theta);
  sol.dual_norm = 1.0 / ref->lambda;
  sol.dual_gap = std::abs(sol.objective * sol.dual_norm - 1.0);
  sol.rank_one = true;
  return sol;
}

}  // namespace laros
