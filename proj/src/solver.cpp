#include "laros/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "laros/errors.hpp"
#include "laros/refine.hpp"
#include "anderson.hpp"

namespace laros {

namespace {

constexpr double kRankOneRatio = 1e-6;
// Residual level below which the first rank-one refinement is attempted.
constexpr double kFirstPolishLevel = 1e-3;
constexpr int kAdaptEvery = 25;
constexpr int kMaxAdaptations = 60;
constexpr int kCertificateCheckEvery = 10;
constexpr int kMixingMemory = 8;

IndexSet support_of(const Matrix& x, double support_tol, bool by_rows) {
  IndexSet out;
  const double cutoff = support_tol * x.cwiseAbs().maxCoeff();
  const Eigen::Index count = by_rows ? x.rows() : x.cols();
  for (Eigen::Index k = 0; k < count; ++k) {
    const double peak = by_rows ? x.row(k).cwiseAbs().maxCoeff()
                                : x.col(k).cwiseAbs().maxCoeff();
    if (peak > cutoff) out.push_back(k);
  }
  return out;
}

double spectral(const Matrix& m) {
  return Eigen::BDCSVD<Matrix>(m).singularValues()(0);
}

// Certificate read off the splitting multipliers, in the scaling of A.
// At a fixed point g_nuc + g_l1 = mu A with g_nuc = mu Y, g_l1 = mu Z.
DualCertificate multiplier_certificate(const Matrix& a, double theta,
                                       const Matrix& x, const Matrix& g_nuc,
                                       const Matrix& g_l1) {
  Matrix y = a;
  Matrix z = Matrix::Zero(a.rows(), a.cols());
  if (theta > 0.0) {
    const double mu = inner(g_nuc + g_l1, a) / a.squaredNorm();
    if (mu > 0.0) {
      y = g_nuc / mu;
      z = a - y;
    }
  }
  DualCertificate cert{DenseMatrix(y), DenseMatrix(z)};
  const double ynorm = spectral(y);
  cert.dual_norm =
      theta > 0.0 ? std::max(ynorm, z.cwiseAbs().maxCoeff() / theta) : ynorm;
  cert.lambda_star = 1.0 / cert.dual_norm;
  const Matrix xn = x * cert.dual_norm;
  cert.alpha = norm(xn, NormKind::kNuclear);
  cert.beta = xn.cwiseAbs().sum();
  return cert;
}

void fill_uniqueness_diagnostics(LarosSolution& sol,
                                 const DualCertificate& cert) {
  const Vector sy = Eigen::BDCSVD<Matrix>(cert.Y.values()).singularValues();
  const double s1 = sy(0);
  const double s2 = sy.size() > 1 ? sy(1) : 0.0;
  sol.y_spectral_gap = s1 - s2;
  const Matrix& z = cert.Z.values();
  const double zmax = z.cwiseAbs().maxCoeff();
  Eigen::Index mult = 0;
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    if (std::abs(z.data()[k]) >= zmax * (1.0 - 1e-9)) ++mult;
  }
  sol.z_argmax_multiplicity = mult;
  const bool y_simple = sol.y_spectral_gap > 1e-9 * std::max(s1, 1e-300);
  sol.possibly_non_unique = !(y_simple || mult == 1);
}

double certificate_tolerance(const SolverConfig& cfg,
                             const DualCertificate& cert) {
  return cfg.tol_gap * std::max(1.0, cert.dual_norm);
}

LarosSolution assemble(const Matrix& a, double theta, const Matrix& x,
                       const DualCertificate& cert, double support_tol) {
  LarosSolution sol;
  sol.X = DenseMatrix(x);
  const RankOneStructure r1 = extract_rank_one(x, support_tol);
  sol.sigma = r1.sigma;
  sol.u = r1.u;
  sol.v = r1.v;
  sol.support_rows = r1.rows;
  sol.support_cols = r1.cols;
  sol.rank_one = r1.rank_one;
  sol.objective = theta_norm(x, theta);
  sol.dual_norm = cert.dual_norm;
  sol.dual_gap = std::abs(sol.objective * sol.dual_norm - 1.0);
  (void)a;
  return sol;
}

}  // namespace

void SolverConfig::validate() const {
  auto in_unit = [](double t) { return t > 0.0 && t < 1.0; };
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    throw InvalidParameter("SolverConfig: theta must be finite and >= 0");
  }
  if (!(penalty > 0.0) || !std::isfinite(penalty)) {
    throw InvalidParameter("SolverConfig: penalty must be positive");
  }
  if (max_iters < 1) {
    throw InvalidParameter("SolverConfig: max_iters must be >= 1");
  }
  if (!in_unit(tol_primal) || !in_unit(tol_dual) || !in_unit(tol_gap) ||
      !in_unit(support_tol)) {
    throw InvalidParameter("SolverConfig: tolerances must lie in (0, 1)");
  }
}

DenseMatrix LarosSolution::normalized() const {
  return DenseMatrix(X.values() * dual_norm);
}

double OptimalityReport::max_residual() const {
  return std::max({balance, spectral_alignment, linf_alignment, weight_sum,
                   normalization, decomposition});
}

OptimalityReport check_optimality(const DenseMatrix& a, double theta,
                                  const DenseMatrix& x_normalized,
                                  const DualCertificate& cert) {
  const Matrix& x = x_normalized.values();
  const Matrix& y = cert.Y.values();
  const Matrix& z = cert.Z.values();
  OptimalityReport r;
  const double ynorm = spectral(y);
  const double zinf = z.cwiseAbs().maxCoeff();
  const double xnuc = norm(x, NormKind::kNuclear);
  const double xl1 = x.cwiseAbs().sum();
  r.balance = theta > 0.0 ? std::abs(ynorm - zinf / theta) : zinf;
  r.spectral_alignment = std::abs(inner(x, y) - xnuc * ynorm);
  r.linf_alignment = std::abs(inner(x, z) - xl1 * zinf);
  r.weight_sum = std::abs(cert.alpha + theta * cert.beta - 1.0);
  r.normalization = std::abs(xnuc + theta * xl1 - 1.0);
  r.decomposition = (y + z - a.values()).norm() / a.values().norm();
  return r;
}

RankOneStructure extract_rank_one(const Matrix& x, double support_tol) {
  RankOneStructure out;
  out.u = Vector::Zero(x.rows());
  out.v = Vector::Zero(x.cols());
  if ((x.array() == 0.0).all()) return out;
  const SvdFactors f = svd(x);
  out.sigma = f.singular_values(0);
  out.u = f.left.col(0);
  out.v = f.right.col(0);
  const double s2 = f.singular_values.size() > 1 ? f.singular_values(1) : 0.0;
  out.rank_one = s2 <= kRankOneRatio * out.sigma;
  out.rows = support_of(x, support_tol, true);
  out.cols = support_of(x, support_tol, false);
  return out;
}

RankOneStructure extract_rank_one(const DenseMatrix& x, double support_tol) {
  return extract_rank_one(x.values(), support_tol);
}

SolveOutput solve_with_state(const DenseMatrix& a_in,
                             const SolverConfig& cfg,
                             const IterationObserver& observer) {
  cfg.validate();
  if (a_in.is_zero()) {
    throw DegenerateInput("solve: A = 0 makes <A, X> >= 1 infeasible");
  }
  const Matrix& a = a_in.values();
  const double theta = cfg.theta;
  const double scale = a.norm();
  const Matrix ah = a / scale;

  // Douglas-Rachford on three copies: nuclear, theta-l1, constraint.
  double rho = cfg.penalty;
  std::array<Matrix, 3> s{ah, ah, ah};
  std::array<Matrix, 3> x;
  std::array<Matrix, 3> g;
  Matrix xbar = ah;
  Matrix xbar_prev = ah;
  double next_polish = kFirstPolishLevel;
  int adaptations = 0;

  SolveOutput out;
  out.solution.X = DenseMatrix(ah / scale);
  bool done = false;
  int k = 0;

  auto finish_polished = [&](const BlockRefinement& ref,
                             const DualCertificate& cert) {
    LarosSolution sol = assemble(a, theta, ref.x / scale, cert, cfg.support_tol);
    // Exact factors from the refinement (zeros off the block are exact).
    sol.sigma = ref.sigma / scale;
    sol.u = ref.u;
    sol.v = ref.v;
    sol.rank_one = true;
    sol.polished = true;
    sol.converged = true;
    sol.iterations = k;
    fill_uniqueness_diagnostics(sol, cert);
    out.solution = std::move(sol);
    out.state.certificate = cert;
    out.state.converged = true;
  };

  auto try_polish = [&]() -> bool {
    const Matrix& xc = theta > 0.0 ? x[1] : x[0];
    if ((xc.array() == 0.0).all()) return false;
    const double ax = inner(ah, xc);
    if (!(ax > 0.0)) return false;
    const Matrix xs = xc / ax;
    const auto ref = refine_rank_one(ah, theta, xs, cfg.support_tol,
                                     theta > 0.0 ? &g[1] : nullptr);
    if (!ref) return false;
    const DualCertificate cert = ref->certificate(scale);
    const OptimalityReport rep =
        check_optimality(a_in, theta, DenseMatrix(ref->x / scale * cert.dual_norm), cert);
    if (!rep.certifies(certificate_tolerance(cfg, cert))) return false;
    finish_polished(*ref, cert);
    return true;
  };

  const Eigen::Index block = ah.size();
  detail::AndersonMixer mixer(3 * block, kMixingMemory);
  auto flatten = [&](const std::array<Matrix, 3>& parts) {
    Vector out(3 * block);
    for (int i = 0; i < 3; ++i)
      out.segment(i * block, block) = parts[i].reshaped();
    return out;
  };
  std::array<Matrix, 3> fallback;
  std::array<Matrix, 3> step;
  bool mixed = false;
  double accepted_fp = std::numeric_limits<double>::infinity();

  for (k = 1; k <= cfg.max_iters && !done; ++k) {
    x[0] = svt(s[0], 1.0 / rho);
    x[1] = soft_threshold(s[1], theta / rho);
    x[2] = project_halfspace(s[2], ah, 1.0);
    const Matrix z = (2.0 * (x[0] + x[1] + x[2]) - s[0] - s[1] - s[2]) / 3.0;

    double fp2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      step[i] = z - x[i];
      fp2 += step[i].squaredNorm();
    }
    const double fp = std::sqrt(fp2);
    if (mixed && fp > accepted_fp) {
      s = fallback;
      mixer.reset();
      mixed = false;
      continue;
    }
    accepted_fp = fp;

    for (int i = 0; i < 3; ++i) g[i] = rho * (s[i] - x[i]);
    xbar_prev = xbar;
    xbar = (x[0] + x[1] + x[2]) / 3.0;
    double pr2 = 0.0;
    for (int i = 0; i < 3; ++i) pr2 += (x[i] - xbar).squaredNorm();
    const double primal_res = std::sqrt(pr2);
    const double dual_res = (g[0] + g[1] + g[2]).norm();
    const double step_res = rho * (xbar - xbar_prev).norm();

    if (observer) {
      const Matrix xo = xbar / scale;
      observer(IterationSnapshot{k, xo, g[0], g[1], g[2], rho, fp, primal_res,
                                 dual_res});
    }

    if (cfg.polish && std::max(primal_res, dual_res) <= next_polish) {
      next_polish = std::max(next_polish * 0.1, 1e-14);
      if (try_polish()) {
        done = true;
        break;
      }
    }

    if (primal_res <= cfg.tol_primal && dual_res <= cfg.tol_dual &&
        k % kCertificateCheckEvery == 0) {
      const Matrix& xc = theta > 0.0 ? x[1] : x[0];
      const double ax = inner(ah, xc);
      if (ax > 0.0) {
        const Matrix xa = xc / ax / scale;
        const DualCertificate cert = multiplier_certificate(a, theta, xa, g[0], g[1]);
        const OptimalityReport rep = check_optimality(
            a_in, theta, DenseMatrix(xa * cert.dual_norm), cert);
        if (rep.certifies(certificate_tolerance(cfg, cert))) {
          LarosSolution sol = assemble(a, theta, xa, cert, cfg.support_tol);
          sol.converged = true;
          sol.iterations = k;
          fill_uniqueness_diagnostics(sol, cert);
          out.solution = std::move(sol);
          out.state.certificate = cert;
          out.state.converged = true;
          done = true;
          break;
        }
      }
    }

    if (cfg.adaptive_penalty && adaptations < kMaxAdaptations &&
        k % kAdaptEvery == 0) {
      double factor = 1.0;
      if (primal_res > 10.0 * step_res) factor = 2.0;
      if (step_res > 10.0 * primal_res) factor = 0.5;
      if (factor != 1.0) {
        rho *= factor;
        ++adaptations;
        for (int i = 0; i < 3; ++i) s[i] = z + g[i] / rho;
        mixer.reset();
        mixed = false;
        accepted_fp = std::numeric_limits<double>::infinity();
        continue;
      }
    }

    for (int i = 0; i < 3; ++i) fallback[i] = s[i] + step[i];
    if (cfg.acceleration) {
      const Vector next = mixer.step(flatten(s), flatten(step));
      for (int i = 0; i < 3; ++i)
        s[i] = next.segment(i * block, block).reshaped(ah.rows(), ah.cols());
      mixed = true;
    } else {
      s = fallback;
    }
  }

  if (!done) {
    k = std::min(k, cfg.max_iters);
    if (cfg.polish && try_polish()) {
      done = true;
    } else {
      const Matrix& xc = theta > 0.0 ? x[1] : x[0];
      double ax = inner(ah, xc);
      const Matrix& xf = ax > 0.0 ? xc : x[2];
      ax = inner(ah, xf);
      const Matrix xa = xf / ax / scale;
      const DualCertificate cert = multiplier_certificate(a, theta, xa, g[0], g[1]);
      LarosSolution sol = assemble(a, theta, xa, cert, cfg.support_tol);
      sol.converged = false;
      sol.iterations = k;
      fill_uniqueness_diagnostics(sol, cert);
      out.solution = std::move(sol);
      out.state.converged = false;
    }
  }

  out.state.consensus = out.solution.X.values();
  out.state.nuclear_multiplier = g[0];
  out.state.l1_multiplier = g[1];
  out.state.constraint_multiplier = g[2];
  out.state.penalty = rho;
  out.state.iterations = out.solution.iterations;
  return out;
}

LarosSolution solve(const DenseMatrix& a, const SolverConfig& config) {
  return solve_with_state(a, config).solution;
}

double dual_theta_norm(const DenseMatrix& a, double theta) {
  if (a.is_zero()) throw InvalidInput("dual_theta_norm: A = 0");
  if (!(theta >= 0.0)) {
    throw InvalidParameter("dual_theta_norm: theta must be nonnegative");
  }
  SolverConfig cfg;
  cfg.theta = theta;
  return solve(a, cfg).dual_norm;
}

DualCertificate recover_dual(const DenseMatrix& a, double theta,
                             const SolverState& state) {
  if (!state.converged) {
    throw CertificateUnavailable("recover_dual: solver state has not converged");
  }
  if (state.certificate) return *state.certificate;
  return multiplier_certificate(a.values(), theta, state.consensus,
                                state.nuclear_multiplier, state.l1_multiplier);
}

}  // namespace laros
