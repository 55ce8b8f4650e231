// dagbench: generate synthetic SEM benchmarks, fit DAG estimators, run sweeps.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "notears/acyclicity.hpp"
#include "notears/bench.hpp"
#include "notears/errors.hpp"
#include "notears/estimators.hpp"
#include "notears/graphs.hpp"
#include "notears/io.hpp"
#include "notears/model_select.hpp"
#include "notears/rng.hpp"
#include "notears/simulate.hpp"

namespace fs = std::filesystem;
using namespace notears;

namespace {

NoiseKind parse_noise(const std::string& kind, double scale) {
  NoiseKind z;
  z.scale = scale;
  if (kind == "gaussian")
    z.kind = NoiseKind::Kind::gaussian;
  else if (kind == "exponential")
    z.kind = NoiseKind::Kind::exponential;
  else if (kind == "gumbel")
    z.kind = NoiseKind::Kind::gumbel;
  else
    throw invalid_argument_error("unknown noise kind: " + kind);
  return z;
}

WeightDist parse_weights(const std::string& kind, double a, double b) {
  WeightDist w;
  if (kind == "gaussian") {
    w.kind = WeightDist::Kind::gaussian;
    w.a = a;
    w.b = b;
  } else if (kind == "uniform_sym") {
    w.kind = WeightDist::Kind::uniform_sym;
    w.a = a;
  } else if (kind == "uniform_gap") {
    w.kind = WeightDist::Kind::uniform_gap;
    w.a = a;
    w.b = b;
  } else {
    throw invalid_argument_error("unknown weight kind: " + kind);
  }
  return w;
}

void write_trace(const std::vector<std::vector<TraceRecord>>& stages, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw error("cannot write trace: " + path);
  for (const auto& stage : stages)
    for (const auto& t : stage) {
      nlohmann::json j{{"outer_iter", t.outer_iter},
                       {"rho", t.rho},
                       {"alpha", t.alpha},
                       {"h", t.h},
                       {"score", t.score}};
      out << j.dump() << '\n';
    }
}

EstimateResult wrap_dense(Mat W) {
  EstimateResult r;
  r.support = support_edges(W);
  r.h_final = h_and_grad(W).h;
  r.lambda_used = 0.0;
  r.W_hat = std::move(W);
  return r;
}

void print_metrics(const RecoveryMetrics& m) {
  std::cout << "shd=" << m.shd << " tpr=" << m.tpr << " fdr=" << m.fdr << " tp=" << m.tp
            << " fp=" << m.fp << " fn=" << m.fn << " reversed=" << m.reversed
            << " predicted=" << m.predicted << " true_edges=" << m.true_edges << '\n';
}

int cmd_generate(int d, double er_degree, int n, const std::string& noise_kind,
                 double noise_scale, const std::string& model, const std::string& w_kind,
                 double w_a, double w_b, uint64_t seed, const std::string& out) {
  GraphSpec gs;
  gs.d = d;
  gs.er_degree = er_degree;
  gs.weight_dist = parse_weights(w_kind, w_a, w_b);
  gs.seed = derive_seed(seed, 1, 0);

  const Mat pattern = sample_er_dag(gs);
  const Mat W = assign_weights(pattern, gs.weight_dist, derive_seed(seed, 2, 0));
  const NoiseKind z = parse_noise(noise_kind, noise_scale);
  const uint64_t data_seed = derive_seed(seed, 3, 0);
  const Dataset data = model == "logistic" ? simulate_logistic_sem(W, n, data_seed)
                                           : simulate_linear_sem(W, n, z, data_seed);

  fs::create_directories(out);
  const fs::path dir(out);
  save_edge_csv(W, (dir / "graph.csv").string());
  save_dataset_csv(data, (dir / "data.csv").string());
  save_dataset_meta(data, z, seed, "graph.csv", (dir / "meta.json").string());
  std::cout << "wrote " << (dir / "graph.csv").string() << ", data.csv, meta.json (d=" << d
            << ", n=" << n << ", edges=" << support_edges(W).size() << ")\n";
  return 0;
}

int cmd_fit(const std::string& data_path, const std::string& estimator, double lambda,
            double threshold, double gamma, double lambda_n, const std::string& truth_path,
            const std::string& trace_path, const std::string& out) {
  const Dataset data = ingest_csv(data_path);
  const bool logistic = data.kind == DataKind::binary;
  const SolverConfig cfg;

  EstimateResult res;
  if (estimator == "ols_only") {
    std::vector<TraceRecord> tr;
    Mat W = logistic ? logistic_stage(data, cfg, &tr) : ols_stage(data, cfg, &tr);
    res = wrap_dense(std::move(W));
    res.stage_traces.push_back(std::move(tr));
  } else if (estimator == "notears_fixed") {
    res = logistic ? notears_logistic(data, lambda, threshold, cfg)
                   : notears_fixed(data, lambda, threshold, cfg);
  } else if (estimator == "notears_al") {
    res = logistic ? notears_al_logistic(data, lambda_n, gamma, cfg)
                   : notears_al(data, lambda_n, gamma, cfg);
  } else {
    throw invalid_argument_error("unknown estimator: " + estimator);
  }

  fs::create_directories(out);
  const fs::path dir(out);
  save_edge_csv(res.W_hat, (dir / "estimate.csv").string());
  save_estimate_json(res, (dir / "estimate.json").string());
  if (!trace_path.empty()) write_trace(res.stage_traces, trace_path);

  std::cout << estimator << (logistic ? " (logistic)" : " (linear)") << ": support "
            << res.support.size() << ", h_final " << res.h_final
            << (res.converged ? "" : " [not converged]") << '\n';
  if (!truth_path.empty()) {
    const Mat truth = load_edge_csv(truth_path, data.d());
    print_metrics(compare(res.W_hat, truth));
  }
  return 0;
}

int cmd_cv(const std::string& data_path, double gamma, int folds, uint64_t seed,
           const std::string& truth_path, const std::string& out) {
  const Dataset data = ingest_csv(data_path);
  if (data.kind == DataKind::binary)
    throw invalid_argument_error("cv: only the linear model is supported");
  CvPlan plan;
  plan.gamma_grid = {gamma};
  plan.folds = folds;
  plan.seed = seed;
  const CvResult cv = cross_validate(data, plan, SolverConfig{});

  fs::create_directories(out);
  const fs::path dir(out);
  save_cv_table(cv, (dir / "cv_table.csv").string());
  save_cv_winner_json(cv, (dir / "cv_winner.json").string());

  EstimateResult res = wrap_dense(cv.best.refit_W);
  res.lambda_used = cv.best.lambda;
  res.gamma_used = cv.best.gamma;
  save_edge_csv(res.W_hat, (dir / "estimate.csv").string());
  save_estimate_json(res, (dir / "estimate.json").string());

  std::cout << "cv winner: lambda " << cv.best.lambda << ", support " << cv.best.support.size()
            << ", mean val loss " << cv.best.val_loss
            << (cv.ridge_flagged ? " [ridge fallback used]" : "") << '\n';
  if (!truth_path.empty()) {
    const Mat truth = load_edge_csv(truth_path, data.d());
    print_metrics(compare(res.W_hat, truth));
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, bool seed_set, uint64_t seed, bool out_set,
              const std::string& out, int jobs, bool timings) {
  ExperimentConfig config = load_experiment_config(config_path);
  if (seed_set) config.master_seed = seed;
  if (out_set) config.output_dir = out;

  const SweepOutcome result = run_sweep(config, jobs, timings);
  int failures = 0;
  for (const auto& r : result.records) failures += r.failed ? 1 : 0;
  std::cout << "sweep complete: " << result.n_records << " records, " << failures
            << " failed, output in " << config.output_dir << '\n';
  return result.any_failed ? 2 : 0;
}

int cmd_report(const std::string& sweep_dir, const std::string& out) {
  const std::string plot_dir = out.empty() ? (fs::path(sweep_dir) / "plots").string() : out;
  emit_plot_data(sweep_dir, plot_dir);
  std::cout << "plot data written to " << plot_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dagbench: score-based DAG structure learning benchmarks"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Sample a random DAG and simulate a dataset");
  int g_d = 10, g_n = 1000;
  double g_deg = 1.0, g_noise_scale = 1.0, g_wa = 0.5, g_wb = 2.0;
  std::string g_noise = "gaussian", g_model = "linear", g_wkind = "uniform_gap", g_out = ".";
  uint64_t g_seed = 0;
  gen->add_option("--d", g_d, "number of nodes")->check(CLI::PositiveNumber);
  gen->add_option("--er-degree", g_deg, "expected edges per node");
  gen->add_option("--n", g_n, "sample count")->check(CLI::PositiveNumber);
  gen->add_option("--noise", g_noise, "gaussian|exponential|gumbel");
  gen->add_option("--noise-scale", g_noise_scale, "noise scale parameter");
  gen->add_option("--model", g_model, "linear|logistic");
  gen->add_option("--weights", g_wkind, "gaussian|uniform_sym|uniform_gap");
  gen->add_option("--w-a", g_wa, "mean / c / lo, by weight kind");
  gen->add_option("--w-b", g_wb, "sd / unused / hi, by weight kind");
  gen->add_option("--seed", g_seed, "master seed");
  gen->add_option("--out", g_out, "output directory");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit one estimator on one dataset");
  std::string f_data, f_est = "notears_al", f_truth, f_trace, f_out = ".";
  double f_lambda = 0.1, f_threshold = 0.1, f_gamma = 1.0, f_lambda_n = 0.01;
  fit->add_option("--data", f_data, "dataset CSV (headerless)")->required();
  fit->add_option("--estimator", f_est, "notears_fixed|notears_al|ols_only");
  fit->add_option("--lambda", f_lambda, "l1 weight (notears_fixed)");
  fit->add_option("--threshold", f_threshold, "hard threshold (notears_fixed)");
  fit->add_option("--gamma", f_gamma, "adaptive penalty exponent");
  fit->add_option("--lambda-n", f_lambda_n, "adaptive l1 weight (notears_al)");
  fit->add_option("--truth", f_truth, "truth edge CSV; prints recovery metrics");
  fit->add_option("--trace", f_trace, "write solver trace (JSON lines)");
  fit->add_option("--out", f_out, "output directory");

  // cv
  auto* cv = app.add_subcommand("cv", "Adaptive-lasso fit with cross-validated lambda");
  std::string c_data, c_truth, c_out = ".";
  double c_gamma = 1.0;
  int c_folds = 5;
  uint64_t c_seed = 0;
  cv->add_option("--data", c_data, "dataset CSV (headerless)")->required();
  cv->add_option("--gamma", c_gamma, "adaptive penalty exponent");
  cv->add_option("--folds", c_folds, "fold count")->check(CLI::PositiveNumber);
  cv->add_option("--seed", c_seed, "split seed");
  cv->add_option("--truth", c_truth, "truth edge CSV; prints recovery metrics");
  cv->add_option("--out", c_out, "output directory");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a full factorial benchmark from a config file");
  std::string s_config, s_out;
  uint64_t s_seed = 0;
  int s_jobs = 1;
  bool s_timings = false;
  sweep->add_option("--config", s_config, "experiment config JSON")->required();
  auto* s_seed_opt = sweep->add_option("--seed", s_seed, "override master_seed");
  auto* s_out_opt = sweep->add_option("--out", s_out, "override output_dir");
  sweep->add_option("--jobs", s_jobs, "worker count")->check(CLI::PositiveNumber);
  sweep->add_flag("--timings", s_timings, "also write timings.csv (not deterministic)");

  // report
  auto* rep = app.add_subcommand("report", "Emit plot-ready CSV bundles from a sweep directory");
  std::string r_sweep, r_out;
  rep->add_option("sweep_dir", r_sweep, "finished sweep directory")->required();
  rep->add_option("--out", r_out, "plot output directory (default: <sweep_dir>/plots)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed())
      return cmd_generate(g_d, g_deg, g_n, g_noise, g_noise_scale, g_model, g_wkind, g_wa, g_wb,
                          g_seed, g_out);
    if (fit->parsed())
      return cmd_fit(f_data, f_est, f_lambda, f_threshold, f_gamma, f_lambda_n, f_truth, f_trace,
                     f_out);
    if (cv->parsed()) return cmd_cv(c_data, c_gamma, c_folds, c_seed, c_truth, c_out);
    if (sweep->parsed())
      return cmd_sweep(s_config, s_seed_opt->count() > 0, s_seed, s_out_opt->count() > 0, s_out,
                       s_jobs, s_timings);
    if (rep->parsed()) return cmd_report(r_sweep, r_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
