#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "notears/estimators.hpp"
#include "notears/types.hpp"

namespace notears {

struct CvPlan {
  std::vector<double> lambda_grid;        // descending; empty = build the default grid
  std::vector<double> gamma_grid{1.0};
  double val_fraction = 0.8;              // swapped proportion: most rows validate
  int folds = 5;
  uint64_t seed = 0;
};

struct CandidateModel {
  std::vector<Edge> support;
  double lambda = 0.0;
  double gamma = 1.0;
  Mat refit_W;          // filled for the winner (full-data restricted refit)
  double val_loss = 0.0;  // mean over folds
};

struct CvFoldRow {
  double lambda;
  double gamma;
  int fold;
  int support_size;
  double val_loss;
};

struct CvResult {
  CandidateModel best;
  std::vector<CandidateModel> candidates;
  std::vector<CvFoldRow> fold_rows;
  bool ridge_flagged = false;  // some refit needed the jitter fallback
};

// Default lambda grid: n_points log-spaced values from lambda_max (smallest
// lambda giving an empty support on the reparametrized problem, located by
// bisection) down to an adaptive floor
//   max(lambda_max * 1e-6, min(lambda_max * 1e-3, 20 * sigma2_hat / n)).
// The floor tracks the scale where sampling-noise entries would enter the path
// while still reaching the predictive optimum on graphs whose node variances
// span several decades.
std::vector<double> default_lambda_grid(const Dataset& data, const PenaltyWeights& P,
                                        const SolverConfig& cfg, double sigma2_hat,
                                        int n_points = 20);

// Supports of notears_al along the (lambda, gamma) grid, warm-started down each
// lambda path, deduplicated by support. Grid points whose solve fails are
// skipped with a note on stderr.
std::vector<CandidateModel> solution_path(const Dataset& data, const CvPlan& plan,
                                          const SolverConfig& cfg = {});

// Per-node least squares restricted to the support; zeros elsewhere.
// Rank-deficient normal equations fall back to a 1e-10 ridge and set *ridge_used.
Mat restricted_refit(const std::vector<Edge>& support, const Dataset& train,
                     bool* ridge_used = nullptr);

// Selection core: refit every candidate support on the training part of each
// fold (split by plan.seed; val_fraction of rows validate) and score
// (1/2 n_v)||X_v - X_v W||^2; pick minimal mean loss, ties toward the smaller
// support, then the larger lambda. Exposed separately so candidate sets can be
// constructed by hand.
CvResult cv_select(const Dataset& data, std::vector<CandidateModel> candidates,
                   const CvPlan& plan);

// Full pipeline: solution path -> cv_select -> winner refit on all rows.
CvResult cross_validate(const Dataset& data, const CvPlan& plan, const SolverConfig& cfg = {});

// CSV "lambda,gamma,fold,support_size,val_loss" plus a JSON winner summary.
void save_cv_table(const CvResult& cv, const std::string& csv_path);
void save_cv_winner_json(const CvResult& cv, const std::string& path);

}  // namespace notears
