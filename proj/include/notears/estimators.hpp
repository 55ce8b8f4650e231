#pragma once

#include <string>
#include <vector>

#include "notears/solver.hpp"
#include "notears/types.hpp"

namespace notears {

struct PenaltyWeights {
  Mat C;           // active entries: 1/|W_ols|^gamma
  BoolMat frozen;  // first-stage magnitude <= freeze_tol (and the diagonal)
  double gamma = 1.0;
};

struct EstimateResult {
  Mat W_hat;                 // exactly acyclic (repair applied)
  std::vector<Edge> support;
  double h_final = 0.0;
  double lambda_used = 0.0;
  double gamma_used = 0.0;
  std::vector<std::vector<TraceRecord>> stage_traces;
  double timing_s = 0.0;
  bool converged = true;
};

// Least-squares score (1/2n)||X - XW||_F^2 through the Gram matrix, so one
// evaluation costs O(d^3) independent of n after construction.
class LinearScore {
 public:
  explicit LinearScore(const Mat& X);
  double operator()(const Mat& W, Mat& grad) const;
  double sigma2_hat(const Mat& W) const;  // residual variance ||X - XW||^2 / (n d)
  const Mat& gram() const { return G_; }
  int n() const { return n_; }

 private:
  Mat G_;
  double trG_;
  int n_, d_;
};

// L1-penalized least squares under the acyclicity constraint, then entries
// |w| < threshold are zeroed and the result is repaired to an exact DAG.
EstimateResult notears_fixed(const Dataset& data, double lambda, double threshold,
                             const SolverConfig& cfg = {}, double zero_tol = 1e-8);

// First stage: constrained least squares with no l1 term; returns the dense
// estimate (no thresholding, no repair).
Mat ols_stage(const Dataset& data, const SolverConfig& cfg = {},
              std::vector<TraceRecord>* trace = nullptr);

PenaltyWeights build_penalties(const Mat& W_ols, double gamma, double freeze_tol = 1e-8);

// Second stage on the reparametrized variable W_C = C o W with a uniform l1
// coefficient lambda_n; frozen entries come back as exact zeros and no hard
// threshold is applied. warm/final_split allow warm starts along a lambda path.
EstimateResult notears_al_with_penalties(const Dataset& data, const PenaltyWeights& P,
                                         double lambda_n, const SolverConfig& cfg = {},
                                         double zero_tol = 1e-8,
                                         const SplitVars* warm = nullptr,
                                         SplitVars* final_split = nullptr);

// Two-stage adaptive-lasso estimator: ols_stage -> build_penalties -> reparametrized fit.
EstimateResult notears_al(const Dataset& data, double lambda_n, double gamma = 1.0,
                          const SolverConfig& cfg = {}, double zero_tol = 1e-8);

// Logistic log loss over binary data: value (1/n) sum_ij [softplus(t) - x t]
// with t = X D, gradient (1/n) X^T (sigmoid(XD) - X).
std::pair<double, Mat> logistic_score(const Mat& D, const Dataset& data);

// Unpenalized constrained logistic fit (first stage of the logistic lane).
Mat logistic_stage(const Dataset& data, const SolverConfig& cfg = {},
                   std::vector<TraceRecord>* trace = nullptr);

EstimateResult notears_logistic(const Dataset& data, double lambda, double threshold,
                                const SolverConfig& cfg = {}, double zero_tol = 1e-8);
EstimateResult notears_al_logistic(const Dataset& data, double lambda_n, double gamma = 1.0,
                                   const SolverConfig& cfg = {}, double zero_tol = 1e-8);

// JSON serialization of a fit: dense row-major W_hat, support, h_final,
// lambda_used, gamma, timing.
void save_estimate_json(const EstimateResult& r, const std::string& path);

}  // namespace notears
