#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "notears/graphs.hpp"
#include "notears/simulate.hpp"
#include "notears/solver.hpp"
#include "notears/types.hpp"

namespace notears {

struct EstimatorSpec {
  std::string name;        // notears_fixed | notears_al | ols_only
  double lambda = 0.1;     // l1 weight for the fixed variant
  double threshold = 0.1;
  double gamma = 1.0;
  double lambda_n = 0.01;  // adaptive-lasso l1 when cv is off
  bool cv = false;         // linear AL only: pick lambda_n by cross-validation
};

struct GraphCell {
  int d = 10;
  double er_degree = 1.0;
};

struct ExperimentConfig {
  int schema_version = 1;
  std::vector<GraphCell> graphs;
  std::vector<int> n;
  std::vector<NoiseKind> noise;  // ignored by the logistic model's generator
  std::string model = "linear";  // linear | logistic
  WeightDist weights;
  std::vector<EstimatorSpec> estimators;
  int replicates = 15;
  uint64_t master_seed = 0;
  std::string output_dir = "out";
};

ExperimentConfig load_experiment_config(const std::string& path);

struct RunRecord {
  int cell = 0;        // index over graphs x n x noise (data axes only)
  int replicate = 0;
  int est_idx = 0;
  // coordinates
  int d = 0;
  double er_degree = 0.0;
  int n = 0;
  std::string noise_kind;
  double noise_scale = 0.0;
  std::string model;
  std::string estimator;
  uint64_t seed = 0;  // per-(cell, replicate) derived seed
  // outcome
  bool failed = false;
  bool converged = true;
  RecoveryMetrics metrics;
  int support_size = 0;
  double h_final = 0.0;
  double lambda_used = 0.0;
  double frob_err = 0.0;  // ||W_hat - W*||_F
  double wall_s = 0.0;    // diagnostic only; never part of deterministic outputs
};

struct SweepOutcome {
  bool any_failed = false;
  int n_records = 0;
  std::vector<RunRecord> records;
};

// Full factorial sweep. Writes, under config.output_dir:
//   manifest.json     resolved configuration
//   records.csv       one row per cell x replicate x estimator, appended in order
//   aggregate.csv     mean/sample-sd of SHD/TPR/FDR per cell x estimator
//   estimates/        per-run truth & estimate edge lists
//   timings.csv       only when with_timings (wall clock, not deterministic)
// Output bytes are a pure function of (config, master seed) for any jobs count.
// Individual failures are recorded and never abort the sweep.
SweepOutcome run_sweep(const ExperimentConfig& config, int jobs = 1, bool with_timings = false,
                       const SolverConfig& cfg = {});

// Plot-ready bundles from a finished sweep directory:
//   plot_by_d_er<k>_<metric>.csv      d,estimator,mean,sd
//   plot_by_estimator_<metric>.csv    d,er_degree,n,noise,estimator,mean,sd
//   plot_missed_hist.csv              bin_lo,bin_hi,estimator,count   (0.25-wide bins)
void emit_plot_data(const std::string& sweep_dir, const std::string& plot_dir);

}  // namespace notears
