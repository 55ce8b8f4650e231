#pragma once

#include <functional>
#include <vector>

#include "notears/acyclicity.hpp"
#include "notears/errors.hpp"
#include "notears/types.hpp"

namespace notears {

struct SolverConfig {
  double rho0 = 1.0;
  double alpha0 = 0.0;
  double xi = 0.25;          // required h decrease factor per outer step
  double eta = 10.0;         // rho inflation factor
  double rho_max = 1e16;
  double h_tol = 1e-8;
  int max_outer = 100;
  double inner_grad_tol = 1e-7;  // projected-gradient inf norm
  int inner_max_iter = 500;
  int memory = 10;           // quasi-Newton history length
};

// Nonnegative split W = w_plus - w_minus; mask marks optimizable entries
// (diagonal and masked-off entries stay exactly 0).
struct SplitVars {
  Mat w_plus, w_minus;
  BoolMat mask;
};

struct AugLagState {
  double rho = 1.0;
  double alpha = 0.0;
  SplitVars iterate;
  double h_val = 0.0;
  int outer_iter = 0;
  bool converged = false;
};

// One record per accepted outer iteration; alpha is the post-update multiplier.
struct TraceRecord {
  int outer_iter;
  double rho;
  double alpha;
  double h;
  double score;  // data-fit term only
};

// Thrown when rho hits rho_max with h still above h_tol; carries the best iterate.
struct convergence_error : error {
  Mat W;
  double h_val;
  int outer_iter;
  convergence_error(const std::string& msg, Mat w, double h, int outer)
      : error(msg), W(std::move(w)), h_val(h), outer_iter(outer) {}
};

// Objective callback: return value, write gradient (same size as x).
using BoxObjective = std::function<double(const Vec&, Vec&)>;

// Projected limited-memory quasi-Newton descent over x >= 0 with backtracking
// line search along the projected path. Stops at projected-gradient inf norm
// <= cfg.inner_grad_tol or cfg.inner_max_iter. Accepted steps never increase
// the objective. Throws numerical_error on non-finite values.
Vec minimize_box(const BoxObjective& f, Vec x0, const SolverConfig& cfg);

// Smooth data-fit callback over the reconstructed matrix W: return value, write gradient.
using ScoreFn = std::function<double(const Mat&, Mat&)>;
// Acyclicity oracle over W in optimization coordinates.
using HOracle = std::function<AcyclicityValue(const Mat&)>;

// Dual ascent on score(W) + sum(l1 o (w+ + w-)) + (rho/2) h^2 + alpha h over the
// nonnegative split, with the inner rho search (inflate by eta until the new h
// drops below xi * previous h) and multiplier update alpha += rho * h.
// active_mask selects optimizable entries (the diagonal is always excluded).
// Returns the reconstructed W in optimization coordinates plus the final state.
std::pair<Mat, AugLagState> augmented_lagrangian(const ScoreFn& score, const HOracle& h_fn,
                                                 const Mat& l1_coeffs, const BoolMat& active_mask,
                                                 const SolverConfig& cfg,
                                                 std::vector<TraceRecord>* trace = nullptr,
                                                 const SplitVars* start = nullptr);

}  // namespace notears
