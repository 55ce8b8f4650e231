#include "notears/model_select.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <tuple>

#include "notears/errors.hpp"
#include "notears/graphs.hpp"
#include "notears/rng.hpp"

#include <json.hpp>

namespace notears {

namespace {

bool support_empty(const EstimateResult& r) { return r.support.empty(); }

std::vector<double> geomspace(double hi, double lo, int n) {
  std::vector<double> g(n);
  if (n == 1) return {hi};
  const double step = std::log(lo / hi) / (n - 1);
  for (int k = 0; k < n; ++k) g[k] = hi * std::exp(step * k);
  return g;
}

}  // namespace

std::vector<double> default_lambda_grid(const Dataset& data, const PenaltyWeights& P,
                                        const SolverConfig& cfg, double sigma2_hat,
                                        int n_points) {
  const int d = data.d();
  const int n = data.n();
  const LinearScore score(data.X);

  // gradient magnitude at W = 0 in W_C coordinates bounds where total shrinkage wins
  double g0 = 0.0;
  {
    Mat g(d, d);
    score(Mat::Zero(d, d), g);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (i != j && !P.frozen(i, j)) g0 = std::max(g0, std::abs(g(i, j)) / P.C(i, j));
  }

  auto empty_at = [&](double lam) {
    return support_empty(notears_al_with_penalties(data, P, lam, cfg));
  };

  double hi = std::max(g0 * 1.05, 1e-8);
  int guard = 0;
  while (!empty_at(hi) && guard++ < 60) hi *= 4.0;
  double lo = hi / 4.0;
  while (lo > 1e-12 && empty_at(lo)) {
    hi = lo;
    lo /= 4.0;
  }
  if (lo <= 1e-12) {
    // nothing ever enters the support: any tiny grid will do
    return geomspace(hi, hi * 1e-3, n_points);
  }
  for (int it = 0; it < 12; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (empty_at(mid))
      hi = mid;
    else
      lo = mid;
  }
  const double lam_max = hi;
  double floor = std::max(lam_max * 1e-6, std::min(lam_max * 1e-3, 20.0 * sigma2_hat / n));
  floor = std::min(floor, lam_max * 0.5);
  return geomspace(lam_max, floor, n_points);
}

namespace {

struct PathContext {
  Mat W_ols;
  double sigma2 = 1.0;
};

PathContext make_context(const Dataset& data, const SolverConfig& cfg) {
  PathContext ctx;
  try {
    ctx.W_ols = ols_stage(data, cfg);
  } catch (const convergence_error& e) {
    ctx.W_ols = e.W;
  }
  const LinearScore score(data.X);
  ctx.sigma2 = score.sigma2_hat(ctx.W_ols);
  return ctx;
}

std::vector<CandidateModel> path_from_context(const Dataset& data, const PathContext& ctx,
                                              const CvPlan& plan, const SolverConfig& cfg) {
  std::vector<CandidateModel> out;
  std::set<std::vector<Edge>> seen;
  for (double gamma : plan.gamma_grid) {
    const PenaltyWeights P = build_penalties(ctx.W_ols, gamma);
    std::vector<double> grid = plan.lambda_grid;
    if (grid.empty()) grid = default_lambda_grid(data, P, cfg, ctx.sigma2);

    SplitVars warm;
    bool have_warm = false;
    for (double lam : grid) {
      try {
        SplitVars fin;
        const EstimateResult r = notears_al_with_penalties(data, P, lam, cfg, 1e-8,
                                                           have_warm ? &warm : nullptr, &fin);
        warm = fin;
        have_warm = true;
        if (seen.insert(r.support).second) {
          CandidateModel c;
          c.support = r.support;
          c.lambda = lam;
          c.gamma = gamma;
          out.push_back(std::move(c));
        }
      } catch (const error& e) {
        std::cerr << "solution_path: skipping lambda=" << lam << " gamma=" << gamma << ": "
                  << e.what() << "\n";
      }
    }
  }
  return out;
}

}  // namespace

std::vector<CandidateModel> solution_path(const Dataset& data, const CvPlan& plan,
                                          const SolverConfig& cfg) {
  if (!plan.lambda_grid.empty())
    for (size_t k = 1; k < plan.lambda_grid.size(); ++k)
      if (plan.lambda_grid[k] > plan.lambda_grid[k - 1])
        throw invalid_argument_error("solution_path: lambda grid must be descending");
  const PathContext ctx = make_context(data, cfg);
  return path_from_context(data, ctx, plan, cfg);
}

Mat restricted_refit(const std::vector<Edge>& support, const Dataset& train, bool* ridge_used) {
  const int d = train.d();
  Mat W = Mat::Zero(d, d);
  if (ridge_used) *ridge_used = false;

  std::vector<std::vector<int>> parents(d);
  for (const auto& [i, j] : support) {
    if (i < 0 || i >= d || j < 0 || j >= d || i == j)
      throw invalid_argument_error("restricted_refit: bad edge in support");
    parents[j].push_back(i);
  }

  for (int j = 0; j < d; ++j) {
    const auto& pa = parents[j];
    if (pa.empty()) continue;
    const int k = static_cast<int>(pa.size());
    Mat A(k, k);
    Vec b(k);
    for (int a = 0; a < k; ++a) {
      b(a) = train.X.col(pa[a]).dot(train.X.col(j));
      for (int c = 0; c < k; ++c) A(a, c) = train.X.col(pa[a]).dot(train.X.col(pa[c]));
    }
    Eigen::LDLT<Mat> ldlt(A);
    Vec sol = ldlt.solve(b);
    const bool bad = ldlt.info() != Eigen::Success || !sol.allFinite() ||
                     (A * sol - b).cwiseAbs().maxCoeff() >
                         1e-6 * std::max(1.0, b.cwiseAbs().maxCoeff());
    if (bad) {
      Mat Aj = A + 1e-10 * Mat::Identity(k, k);
      sol = Aj.ldlt().solve(b);
      if (ridge_used) *ridge_used = true;
    }
    for (int a = 0; a < k; ++a) W(pa[a], j) = sol(a);
  }
  return W;
}

CvResult cv_select(const Dataset& data, std::vector<CandidateModel> candidates,
                   const CvPlan& plan) {
  const int n = data.n();
  if (n < 20) throw invalid_argument_error("cv_select: need n >= 20");
  if (candidates.empty()) throw invalid_argument_error("cv_select: no candidates");
  if (!(plan.val_fraction > 0.0 && plan.val_fraction < 1.0))
    throw invalid_argument_error("cv_select: val_fraction must be in (0,1)");
  if (plan.folds < 1) throw invalid_argument_error("cv_select: folds must be >= 1");

  CvResult out;
  const int nc = static_cast<int>(candidates.size());
  std::vector<double> mean_loss(nc, 0.0);

  Rng rng(plan.seed);
  const int n_v = static_cast<int>(std::llround(plan.val_fraction * n));
  const int n_t = n - n_v;
  if (n_v < 1 || n_t < 1) throw invalid_argument_error("cv_select: degenerate split");

  for (int f = 0; f < plan.folds; ++f) {
    const std::vector<int> perm = rng.permutation(n);
    Dataset train, val;
    train.kind = val.kind = data.kind;
    train.X = Mat(n_t, data.d());
    val.X = Mat(n_v, data.d());
    for (int r = 0; r < n_v; ++r) val.X.row(r) = data.X.row(perm[r]);
    for (int r = 0; r < n_t; ++r) train.X.row(r) = data.X.row(perm[n_v + r]);

    for (int c = 0; c < nc; ++c) {
      bool ridge = false;
      const Mat W = restricted_refit(candidates[c].support, train, &ridge);
      out.ridge_flagged = out.ridge_flagged || ridge;
      const double loss = (val.X - val.X * W).squaredNorm() / (2.0 * n_v);
      mean_loss[c] += loss;
      out.fold_rows.push_back({candidates[c].lambda, candidates[c].gamma, f,
                               static_cast<int>(candidates[c].support.size()), loss});
    }
  }
  for (int c = 0; c < nc; ++c) mean_loss[c] /= plan.folds;

  int best = 0;
  auto key = [&](int c) {
    return std::make_tuple(mean_loss[c], candidates[c].support.size(), -candidates[c].lambda);
  };
  for (int c = 1; c < nc; ++c)
    if (key(c) < key(best)) best = c;

  for (int c = 0; c < nc; ++c) candidates[c].val_loss = mean_loss[c];
  out.best = candidates[best];
  bool ridge = false;
  out.best.refit_W = restricted_refit(out.best.support, data, &ridge);
  out.ridge_flagged = out.ridge_flagged || ridge;
  out.candidates = std::move(candidates);
  return out;
}

CvResult cross_validate(const Dataset& data, const CvPlan& plan, const SolverConfig& cfg) {
  if (data.n() < 20) throw invalid_argument_error("cross_validate: need n >= 20");
  const PathContext ctx = make_context(data, cfg);
  std::vector<CandidateModel> candidates = path_from_context(data, ctx, plan, cfg);
  return cv_select(data, std::move(candidates), plan);
}

void save_cv_table(const CvResult& cv, const std::string& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw error("cannot open for writing: " + csv_path);
  out << "lambda,gamma,fold,support_size,val_loss\n";
  char buf[160];
  for (const auto& r : cv.fold_rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%d,%.17g\n", r.lambda, r.gamma, r.fold,
                  r.support_size, r.val_loss);
    out << buf;
  }
}

void save_cv_winner_json(const CvResult& cv, const std::string& path) {
  nlohmann::json j;
  j["lambda"] = cv.best.lambda;
  j["gamma"] = cv.best.gamma;
  j["support_size"] = cv.best.support.size();
  j["val_loss"] = cv.best.val_loss;
  std::vector<std::vector<int>> edges;
  for (const auto& e : cv.best.support) edges.push_back({e.first, e.second});
  j["support"] = edges;
  j["ridge_flagged"] = cv.ridge_flagged;
  std::ofstream out(path);
  if (!out) throw error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace notears
