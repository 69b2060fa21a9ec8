#include "laros/nmf.hpp"

#include <cmath>
#include <string>

#include "laros/errors.hpp"

namespace laros {

namespace {

/// Residual entries at or below this fraction of max(A) count as rounding
/// residue of the subtraction and are cleared.
constexpr double kRoundoff = 1e-13;

}  // namespace

DenseMatrix residual_update(const DenseMatrix& r, double sigma, const Vector& u,
                            const Vector& v, const BlockSelector& block) {
  if (u.size() != r.rows() || v.size() != r.cols()) {
    throw InvalidInput("residual_update: factor length mismatch");
  }
  Matrix out = r.values();
  for (auto j : block.cols()) {
    for (auto i : block.rows()) {
      out(i, j) = std::max(out(i, j) - sigma * u(i) * v(j), 0.0);
    }
  }
  return DenseMatrix(std::move(out));
}

NmfResult greedy_extract(const DenseMatrix& a, int p, double theta,
                         const SolverConfig& config) {
  if (p < 1) throw InvalidParameter("greedy_extract: p must be >= 1");
  return greedy_extract(a, std::vector<double>(static_cast<std::size_t>(p), theta),
                        config);
}

NmfResult greedy_extract(const DenseMatrix& a,
                         const std::vector<double>& thetas,
                         const SolverConfig& config) {
  if (thetas.empty()) throw InvalidParameter("greedy_extract: p must be >= 1");
  if (a.is_zero()) throw InvalidInput("greedy_extract: A = 0");
  if (!a.is_nonnegative()) {
    throw InvalidInput("greedy_extract: A must be entrywise nonnegative");
  }
  const Eigen::Index m = a.rows(), n = a.cols();
  NmfResult out;
  std::vector<Vector> wcols, hcols;
  DenseMatrix residual = a;
  out.residual_norms.push_back(a.values().norm());
  const double roundoff = kRoundoff * a.values().maxCoeff();

  for (std::size_t round = 0; round < thetas.size(); ++round) {
    if (residual.is_zero()) {
      out.short_count = true;
      break;
    }
    SolverConfig cfg = config;
    cfg.theta = thetas[round];
    const LarosSolution sol = solve(residual, cfg);
    if (!sol.converged) {
      throw ConvergenceFailure(
          "greedy_extract: round " + std::to_string(round + 1) +
          " did not converge after " + std::to_string(sol.iterations) +
          " iterations (gap " + std::to_string(sol.dual_gap) + ")");
    }
    const BlockSelector block(sol.support_rows, sol.support_cols, m, n);
    const Matrix sub = residual.values()(block.rows(), block.cols());
    const SvdFactors f = svd(sub);
    Vector ub = f.left.col(0).cwiseAbs();
    Vector vb = f.right.col(0).cwiseAbs();
    const double sigma = f.singular_values(0);

    Vector u = Vector::Zero(m), v = Vector::Zero(n);
    u(block.rows()) = ub;
    v(block.cols()) = vb;
    residual = residual_update(residual, sigma, u, v, block);
    residual = DenseMatrix(
        (residual.values().array() <= roundoff).select(0.0, residual.values()));

    const double scale = std::sqrt(sigma);
    wcols.push_back(scale * u);
    hcols.push_back(scale * v);
    out.supports.push_back(block);
    out.iterations.push_back(sol.iterations);
    out.residual_norms.push_back(residual.values().norm());
  }

  out.W = Matrix::Zero(m, static_cast<Eigen::Index>(wcols.size()));
  out.H = Matrix::Zero(n, static_cast<Eigen::Index>(hcols.size()));
  for (std::size_t k = 0; k < wcols.size(); ++k) {
    out.W.col(static_cast<Eigen::Index>(k)) = wcols[k];
    out.H.col(static_cast<Eigen::Index>(k)) = hcols[k];
  }
  return out;
}

}  // namespace laros
