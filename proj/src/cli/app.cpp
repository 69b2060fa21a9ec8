#include "laros/cli/app.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>

#include "laros/cli/io.hpp"
#include "laros/errors.hpp"
#include "laros/generators.hpp"
#include "laros/nmf.hpp"
#include "laros/solver.hpp"
#include "laros/structure.hpp"

#ifndef LAROS_VERSION
#define LAROS_VERSION "0.0.0"
#endif

namespace laros::cli {

namespace {

using json = nlohmann::ordered_json;

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
  return out;
}

json one_based(const IndexSet& set) {
  json out = json::array();
  for (auto k : set) out.push_back(k + 1);
  return out;
}

IndexSet zero_based(const std::vector<long long>& ids, const char* what) {
  IndexSet out;
  for (auto k : ids) {
    if (k < 1) throw InvalidParameter(std::string(what) + ": indices are 1-based");
    out.push_back(static_cast<Eigen::Index>(k - 1));
  }
  return out;
}

struct Common {
  std::string output;
  std::string format = "auto";
  std::optional<double> tol;
  int max_iters = SolverConfig{}.max_iters;
  std::uint64_t seed = 0;
};

SolverConfig solver_config(const Common& c, double theta) {
  SolverConfig cfg;
  cfg.theta = theta;
  cfg.max_iters = c.max_iters;
  if (c.tol) cfg.tol_primal = cfg.tol_dual = cfg.tol_gap = *c.tol;
  cfg.validate();
  return cfg;
}

void add_solver_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--tol", c.tol, "Primal, dual and certificate tolerance");
  cmd->add_option("--max-iters", c.max_iters, "Iteration limit")->check(CLI::PositiveNumber);
}

void add_output_flag(CLI::App* cmd, Common& c) {
  cmd->add_option("--output,-o", c.output, "Result record path (default: stdout)");
}

json manifest(const std::string& command, const std::vector<std::string>& inputs,
              json parameters) {
  json m;
  m["command"] = command;
  m["inputs"] = inputs;
  m["parameters"] = std::move(parameters);
  m["tool_version"] = tool_version();
  return m;
}

json solution_json(const LarosSolution& s) {
  json r;
  r["sigma"] = s.sigma;
  r["u"] = to_json(s.u);
  r["v"] = to_json(s.v);
  r["support_rows"] = one_based(s.support_rows);
  r["support_cols"] = one_based(s.support_cols);
  r["objective"] = s.objective;
  r["dual_norm"] = s.dual_norm;
  r["dual_gap"] = s.dual_gap;
  r["iterations"] = s.iterations;
  r["converged"] = s.converged;
  r["polished"] = s.polished;
  r["rank_one"] = s.rank_one;
  r["y_spectral_gap"] = s.y_spectral_gap;
  r["z_argmax_multiplicity"] = s.z_argmax_multiplicity;
  r["possibly_non_unique"] = s.possibly_non_unique;
  return r;
}

json report_json(const OptimalityReport& r) {
  json j;
  j["balance"] = r.balance;
  j["spectral_alignment"] = r.spectral_alignment;
  j["linf_alignment"] = r.linf_alignment;
  j["weight_sum"] = r.weight_sum;
  j["normalization"] = r.normalization;
  j["decomposition"] = r.decomposition;
  j["max_residual"] = r.max_residual();
  return j;
}

}  // namespace

const char* tool_version() { return LAROS_VERSION; }

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Large approximately rank-one submatrix finder", "laros"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version()));

  Common common;
  std::function<json()> action;
  std::string command;

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Solve for the optimizer X of a matrix");
  std::string solve_input, x_out, y_out, z_out;
  double solve_theta = 0.0;
  std::optional<double> support_tol;
  solve_cmd->add_option("input", solve_input, "Matrix file")->required();
  solve_cmd->add_option("--theta", solve_theta, "Sparsity weight (required)")
      ->required()
      ->check(CLI::NonNegativeNumber);
  solve_cmd->add_option("--format", common.format, "Input format");
  solve_cmd->add_option("--support-tol", support_tol, "Relative support cutoff");
  solve_cmd->add_option("--x-out", x_out, "Write X (array format)");
  solve_cmd->add_option("--y-out", y_out, "Write certificate Y (array format)");
  solve_cmd->add_option("--z-out", z_out, "Write certificate Z (array format)");
  add_solver_flags(solve_cmd, common);
  add_output_flag(solve_cmd, common);
  solve_cmd->callback([&] {
    command = "solve";
    action = [&]() -> json {
      const DenseMatrix a = parse_matrix(solve_input, parse_format(common.format));
      SolverConfig cfg = solver_config(common, solve_theta);
      if (support_tol) cfg.support_tol = *support_tol;
      cfg.validate();
      const SolveOutput res = solve_with_state(a, cfg);
      const LarosSolution& s = res.solution;
      if (!s.converged) {
        err << "warning: no certificate within " << s.iterations
            << " iterations; reporting the last iterate\n";
      }
      if (!x_out.empty()) write_matrix(x_out, s.X, MatrixFormat::kMatrixMarketArray);
      if ((!y_out.empty() || !z_out.empty()) && res.state.converged) {
        const DualCertificate cert = recover_dual(a, cfg.theta, res.state);
        if (!y_out.empty()) write_matrix(y_out, cert.Y, MatrixFormat::kMatrixMarketArray);
        if (!z_out.empty()) write_matrix(z_out, cert.Z, MatrixFormat::kMatrixMarketArray);
      }
      json params;
      params["theta"] = cfg.theta;
      params["tol_primal"] = cfg.tol_primal;
      params["tol_dual"] = cfg.tol_dual;
      params["tol_gap"] = cfg.tol_gap;
      params["support_tol"] = cfg.support_tol;
      params["max_iters"] = cfg.max_iters;
      params["format"] = common.format;
      json rec;
      rec["manifest"] = manifest("solve", {solve_input}, params);
      rec["result"] = solution_json(s);
      rec["result"]["X"] = to_json(s.X.values());
      return rec;
    };
  });

  // thresholds
  auto* thr_cmd = app.add_subcommand("thresholds", "Closed-form theta thresholds");
  std::string thr_input;
  std::vector<long long> block_rows, block_cols;
  thr_cmd->add_option("input", thr_input, "Matrix file")->required();
  thr_cmd->add_option("--format", common.format, "Input format");
  thr_cmd->add_option("--block-rows", block_rows, "1-based rows of a block")->delimiter(',');
  thr_cmd->add_option("--block-cols", block_cols, "1-based columns of a block")->delimiter(',');
  add_output_flag(thr_cmd, common);
  thr_cmd->callback([&] {
    command = "thresholds";
    action = [&]() -> json {
      const DenseMatrix a = parse_matrix(thr_input, parse_format(common.format));
      json res;
      res["theta_A"] = theta_A(a);
      const bool nonneg = a.is_nonnegative();
      if (!block_rows.empty() || !block_cols.empty()) {
        const BlockSelector block(zero_based(block_rows, "--block-rows"),
                                  zero_based(block_cols, "--block-cols"), a.rows(),
                                  a.cols());
        res["block"] = {{"rows", one_based(block.rows())},
                        {"cols", one_based(block.cols())}};
        const auto tb = theta_B(a, block);
        res["theta_B"] = tb ? json(*tb) : json(nullptr);
        res["theta_B_status"] = tb ? "ok" : "not-applicable";
      }
      if (nonneg) {
        json pairs = json::array();
        for (Eigen::Index i = 0; i < a.rows(); ++i)
          for (Eigen::Index j = 0; j < a.rows(); ++j)
            if (i != j)
              if (const auto t = row_zero_threshold(a, i, j))
                pairs.push_back({{"dominant", i + 1}, {"dominated", j + 1}, {"threshold", *t}});
        res["row_zero_thresholds"] = pairs;
      } else {
        err << "note: A has negative entries; row-zero thresholds skipped\n";
      }
      json params;
      params["format"] = common.format;
      params["block_rows"] = block_rows;
      params["block_cols"] = block_cols;
      json rec;
      rec["manifest"] = manifest("thresholds", {thr_input}, params);
      rec["result"] = res;
      return rec;
    };
  });

  // plant
  auto* plant_cmd = app.add_subcommand("plant", "Generate a planted rank-one instance");
  PlantedModel model;
  model.m = 0;
  std::string noise = "uniform", matrix_out;
  std::optional<double> model_b, c5, plant_theta;
  plant_cmd->add_option("--m", model.m, "Rows")->required();
  plant_cmd->add_option("--n", model.n, "Columns")->required();
  plant_cmd->add_option("--M", model.M, "Planted rows")->required();
  plant_cmd->add_option("--N", model.N, "Planted columns")->required();
  plant_cmd->add_option("--sigma0", model.sigma0, "Planted scale");
  plant_cmd->add_option("--c1", model.c1, "Row perturbation level");
  plant_cmd->add_option("--c2", model.c2, "Column perturbation level");
  plant_cmd->add_option("--c3", model.c3, "Noise mean relative to sigma0");
  plant_cmd->add_option("--b", model_b, "Subgaussian constant of the noise");
  plant_cmd->add_option("--noise", noise, "uniform | bernoulli | none");
  plant_cmd->add_option("--perturbation-seed", model.perturbation_seed, "Seed for p and q");
  plant_cmd->add_option("--seed", common.seed, "Noise seed");
  plant_cmd->add_option("--c5", c5, "Regime constant for validation");
  plant_cmd->add_option("--theta", plant_theta, "Theta for regime validation");
  plant_cmd->add_option("--matrix-out", matrix_out, "Write A here");
  plant_cmd->add_option("--format", common.format, "Format for --matrix-out");
  add_output_flag(plant_cmd, common);
  plant_cmd->callback([&] {
    command = "plant";
    action = [&]() -> json {
      model.noise = parse_noise_family(noise);
      model.b = model_b;
      const PlantedInstance inst = plant_rank_one(model, common.seed);
      json res;
      res["m"] = model.m;
      res["n"] = model.n;
      res["truth_rows"] = one_based(inst.truth.rows());
      res["truth_cols"] = one_based(inst.truth.cols());
      res["p"] = to_json(inst.p);
      res["q"] = to_json(inst.q);
      res["b"] = model.subgaussian_b();
      if (!matrix_out.empty()) {
        write_matrix(matrix_out, inst.A, parse_format(common.format));
        res["matrix"] = matrix_out;
      } else {
        res["A"] = to_json(inst.A.values());
      }
      if (c5 && plant_theta) {
        const RegimeReport r = validate_planted_regime(model, *c5, *plant_theta);
        res["regime"] = {{"valid", r.valid},
                         {"theta_window_ok", r.theta_window_ok},
                         {"size_ok", r.size_ok},
                         {"violated", r.violated},
                         {"theta_lo", r.theta_lo},
                         {"theta_hi", r.theta_hi},
                         {"k1_bound", r.k1_bound},
                         {"k2_bound", r.k2_bound}};
      }
      json params = {{"m", model.m},           {"n", model.n},
                     {"M", model.M},           {"N", model.N},
                     {"sigma0", model.sigma0}, {"c1", model.c1},
                     {"c2", model.c2},         {"c3", model.c3},
                     {"noise", noise},         {"perturbation_seed", model.perturbation_seed},
                     {"seed", common.seed}};
      if (model_b) params["b"] = *model_b;
      if (c5) params["c5"] = *c5;
      if (plant_theta) params["theta"] = *plant_theta;
      json rec;
      rec["manifest"] = manifest("plant", {}, params);
      rec["result"] = res;
      return rec;
    };
  });

  // certify
  auto* cert_cmd = app.add_subcommand("certify", "Check a solution against a certificate Y + Z = A");
  std::string cert_a, cert_x, cert_y, cert_z;
  double cert_theta = 0.0;
  double cert_tol = 1e-6;
  cert_cmd->add_option("matrix", cert_a, "A")->required();
  cert_cmd->add_option("solution", cert_x, "X with <A, X> = 1")->required();
  cert_cmd->add_option("y", cert_y, "Y")->required();
  cert_cmd->add_option("z", cert_z, "Z")->required();
  cert_cmd->add_option("--theta", cert_theta, "Sparsity weight")->required()->check(CLI::NonNegativeNumber);
  cert_cmd->add_option("--tol", cert_tol, "Residual tolerance for the verdict");
  cert_cmd->add_option("--format", common.format, "Input format");
  add_output_flag(cert_cmd, common);
  cert_cmd->callback([&] {
    command = "certify";
    action = [&]() -> json {
      const MatrixFormat f = parse_format(common.format);
      const DenseMatrix a = parse_matrix(cert_a, f);
      const DenseMatrix x = parse_matrix(cert_x, f);
      const DenseMatrix y = parse_matrix(cert_y, f);
      const DenseMatrix z = parse_matrix(cert_z, f);
      for (const DenseMatrix* mm : {&x, &y, &z}) {
        if (mm->rows() != a.rows() || mm->cols() != a.cols()) {
          throw InvalidInput("certify: all matrices must have the shape of A");
        }
      }
      DualCertificate cert{y, z};
      const double ynorm = norm(y, NormKind::kSpectral);
      cert.dual_norm = cert_theta > 0.0
                           ? std::max(ynorm, norm(z, NormKind::kLinf) / cert_theta)
                           : ynorm;
      if (!(cert.dual_norm > 0.0)) throw InvalidInput("certify: Y and Z are both zero");
      cert.lambda_star = 1.0 / cert.dual_norm;
      const DenseMatrix xn(x.values() * cert.dual_norm);
      cert.alpha = norm(xn, NormKind::kNuclear);
      cert.beta = norm(xn, NormKind::kL1);
      const OptimalityReport rep = check_optimality(a, cert_theta, xn, cert);
      json res;
      res["constraint_value"] = inner(a.values(), x.values());
      res["dual_norm"] = cert.dual_norm;
      res["lambda_star"] = cert.lambda_star;
      res["alpha"] = cert.alpha;
      res["beta"] = cert.beta;
      res["residuals"] = report_json(rep);
      res["certified"] = rep.certifies(cert_tol);
      json params = {{"theta", cert_theta}, {"tol", cert_tol}, {"format", common.format}};
      json rec;
      rec["manifest"] = manifest("certify", {cert_a, cert_x, cert_y, cert_z}, params);
      rec["result"] = res;
      return rec;
    };
  });

  // nmf
  auto* nmf_cmd = app.add_subcommand("nmf", "Greedy nonnegative factorization");
  std::string nmf_input, w_out, h_out;
  int nmf_p = 1;
  std::optional<double> nmf_theta;
  std::vector<double> nmf_thetas;
  nmf_cmd->add_option("input", nmf_input, "Nonnegative matrix file")->required();
  nmf_cmd->add_option("--p", nmf_p, "Number of features")->check(CLI::PositiveNumber);
  auto* theta_opt = nmf_cmd->add_option("--theta", nmf_theta, "Theta for every round");
  nmf_cmd->add_option("--thetas", nmf_thetas, "Per-round theta list")->delimiter(',')->excludes(theta_opt);
  nmf_cmd->add_option("--format", common.format, "Input format");
  nmf_cmd->add_option("--w-out", w_out, "Write W (array format)");
  nmf_cmd->add_option("--h-out", h_out, "Write H (array format)");
  add_solver_flags(nmf_cmd, common);
  add_output_flag(nmf_cmd, common);
  nmf_cmd->callback([&] {
    command = "nmf";
    action = [&]() -> json {
      if (!nmf_theta && nmf_thetas.empty()) {
        throw InvalidParameter("nmf: --theta or --thetas is required");
      }
      const DenseMatrix a = parse_matrix(nmf_input, parse_format(common.format));
      const SolverConfig cfg = solver_config(common, nmf_theta.value_or(0.0));
      const NmfResult r = nmf_thetas.empty() ? greedy_extract(a, nmf_p, *nmf_theta, cfg)
                                             : greedy_extract(a, nmf_thetas, cfg);
      if (!w_out.empty() && r.features() > 0) write_matrix(w_out, DenseMatrix(r.W), MatrixFormat::kMatrixMarketArray);
      if (!h_out.empty() && r.features() > 0) write_matrix(h_out, DenseMatrix(r.H), MatrixFormat::kMatrixMarketArray);
      json res;
      res["features"] = r.features();
      res["short_count"] = r.short_count;
      res["residual_norms"] = r.residual_norms;
      res["relative_residual"] = r.residual_norms.back() / r.residual_norms.front();
      json supports = json::array();
      for (const auto& b : r.supports) supports.push_back({{"rows", one_based(b.rows())}, {"cols", one_based(b.cols())}});
      res["supports"] = supports;
      res["iterations"] = r.iterations;
      res["W"] = to_json(r.W);
      res["H"] = to_json(r.H);
      json params = {{"p", nmf_thetas.empty() ? nmf_p : static_cast<int>(nmf_thetas.size())},
                     {"tol_gap", cfg.tol_gap},
                     {"max_iters", cfg.max_iters},
                     {"format", common.format}};
      if (nmf_theta) params["theta"] = *nmf_theta;
      if (!nmf_thetas.empty()) params["thetas"] = nmf_thetas;
      json rec;
      rec["manifest"] = manifest("nmf", {nmf_input}, params);
      rec["result"] = res;
      return rec;
    };
  });

  // biclique
  auto* bic_cmd = app.add_subcommand("biclique", "Plant a biclique and try to recover it");
  Eigen::Index bm = 0, bn = 0, bM = 0, bN = 0;
  double p_edge = 0.5;
  std::optional<double> bic_theta;
  std::string bic_matrix_out;
  bic_cmd->add_option("--m", bm, "Rows")->required();
  bic_cmd->add_option("--n", bn, "Columns")->required();
  bic_cmd->add_option("--M", bM, "Biclique rows")->required();
  bic_cmd->add_option("--N", bN, "Biclique columns")->required();
  bic_cmd->add_option("--p", p_edge, "Edge probability outside the biclique");
  bic_cmd->add_option("--seed", common.seed, "Seed");
  bic_cmd->add_option("--theta", bic_theta, "Sparsity weight (default 1/sqrt(MN))");
  bic_cmd->add_option("--matrix-out", bic_matrix_out, "Write the adjacency matrix here");
  add_solver_flags(bic_cmd, common);
  add_output_flag(bic_cmd, common);
  bic_cmd->callback([&] {
    command = "biclique";
    action = [&]() -> json {
      const PlantedInstance inst = plant_biclique(bm, bn, bM, bN, p_edge, common.seed);
      const double theta = bic_theta.value_or(1.0 / std::sqrt(double(bM) * double(bN)));
      const SolverConfig cfg = solver_config(common, theta);
      const LarosSolution s = solve(inst.A, cfg);
      if (!bic_matrix_out.empty()) write_matrix(bic_matrix_out, inst.A, MatrixFormat::kMatrixMarketArray);
      const bool recovered = s.support_rows == inst.truth.rows() && s.support_cols == inst.truth.cols();
      json res;
      res["recovered"] = recovered;
      res["theta"] = theta;
      res["truth_rows"] = one_based(inst.truth.rows());
      res["truth_cols"] = one_based(inst.truth.cols());
      res["solution"] = solution_json(s);
      json params = {{"m", bm}, {"n", bn}, {"M", bM}, {"N", bN}, {"p", p_edge},
                     {"seed", common.seed}, {"theta", theta},
                     {"tol_gap", cfg.tol_gap}, {"max_iters", cfg.max_iters}};
      json rec;
      rec["manifest"] = manifest("biclique", {}, params);
      rec["result"] = res;
      return rec;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    const json record = action();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::string text = record.dump(2) + "\n";
    if (common.output.empty()) {
      out << text;
      err << command << ": " << seconds << " s\n";
    } else {
      std::ofstream f(common.output, std::ios::binary);
      if (!f) throw InvalidInput("cannot write '" + common.output + "'");
      f << text;
      std::ofstream timing(common.output + ".timing.json", std::ios::binary);
      timing << json{{"command", command}, {"wall_seconds", seconds}}.dump(2) << "\n";
    }
    return 0;
  } catch (const ParseError& e) {
    err << "error: parse: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace laros::cli
