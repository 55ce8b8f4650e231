#include "notears/estimators.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "notears/errors.hpp"
#include "notears/graphs.hpp"

#include <json.hpp>

namespace notears {

namespace {

using clock_t_ = std::chrono::steady_clock;

double seconds_since(clock_t_::time_point t0) {
  return std::chrono::duration<double>(clock_t_::now() - t0).count();
}

void check_continuous(const Dataset& data) {
  if (data.kind != DataKind::continuous)
    throw invalid_argument_error("estimator requires a continuous dataset");
  if (!data.X.allFinite()) throw invalid_argument_error("dataset has non-finite entries");
}

void check_binary(const Dataset& data) {
  if (data.kind != DataKind::binary)
    throw invalid_argument_error("logistic estimator requires a binary dataset");
  for (int i = 0; i < data.n(); ++i)
    for (int j = 0; j < data.d(); ++j)
      if (data.X(i, j) != 0.0 && data.X(i, j) != 1.0)
        throw invalid_argument_error("binary dataset must contain only {0,1}");
}

// shared post-processing: drop numeric zeros, repair, collect support/h
void finalize(EstimateResult& r, double zero_tol) {
  for (int i = 0; i < r.W_hat.rows(); ++i)
    for (int j = 0; j < r.W_hat.cols(); ++j)
      if (std::abs(r.W_hat(i, j)) <= zero_tol) r.W_hat(i, j) = 0.0;
  r.W_hat = repair_to_dag(r.W_hat, zero_tol);
  r.support = support_edges(r.W_hat, zero_tol);
  r.h_final = h_and_grad(r.W_hat).h;
}

double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) {
  return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

}  // namespace

LinearScore::LinearScore(const Mat& X) : n_(static_cast<int>(X.rows())), d_(static_cast<int>(X.cols())) {
  G_ = X.transpose() * X;
  trG_ = G_.trace();
}

double LinearScore::operator()(const Mat& W, Mat& grad) const {
  const Mat GW = G_ * W;
  const double val =
      (trG_ - 2.0 * G_.cwiseProduct(W).sum() + W.cwiseProduct(GW).sum()) / (2.0 * n_);
  grad = (GW - G_) / n_;
  return val;
}

double LinearScore::sigma2_hat(const Mat& W) const {
  const Mat GW = G_ * W;
  const double rss = trG_ - 2.0 * G_.cwiseProduct(W).sum() + W.cwiseProduct(GW).sum();
  return std::max(rss, 0.0) / (static_cast<double>(n_) * d_);
}

EstimateResult notears_fixed(const Dataset& data, double lambda, double threshold,
                             const SolverConfig& cfg, double zero_tol) {
  check_continuous(data);
  if (lambda < 0.0 || threshold < 0.0)
    throw invalid_argument_error("notears_fixed: lambda and threshold must be >= 0");
  const auto t0 = clock_t_::now();
  const int d = data.d();
  const LinearScore score(data.X);

  EstimateResult r;
  r.lambda_used = lambda;
  r.stage_traces.emplace_back();
  const Mat l1 = Mat::Constant(d, d, lambda);
  const BoolMat active = BoolMat::Constant(d, d, true);
  try {
    auto [W, st] = augmented_lagrangian(
        [&](const Mat& W_, Mat& g_) { return score(W_, g_); },
        [](const Mat& W_) { return h_and_grad(W_); }, l1, active, cfg, &r.stage_traces.back());
    r.W_hat = W;
    r.converged = st.converged;
  } catch (const convergence_error& e) {
    r.W_hat = e.W;
    r.converged = false;
  }

  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (std::abs(r.W_hat(i, j)) < threshold) r.W_hat(i, j) = 0.0;
  finalize(r, zero_tol);
  r.timing_s = seconds_since(t0);
  return r;
}

Mat ols_stage(const Dataset& data, const SolverConfig& cfg, std::vector<TraceRecord>* trace) {
  check_continuous(data);
  const int d = data.d();
  const LinearScore score(data.X);
  auto [W, st] = augmented_lagrangian(
      [&](const Mat& W_, Mat& g_) { return score(W_, g_); },
      [](const Mat& W_) { return h_and_grad(W_); }, Mat::Zero(d, d),
      BoolMat::Constant(d, d, true), cfg, trace);
  return W;
}

PenaltyWeights build_penalties(const Mat& W_ols, double gamma, double freeze_tol) {
  if (gamma <= 0.0) throw invalid_argument_error("build_penalties: gamma must be > 0");
  const int d = static_cast<int>(W_ols.rows());
  PenaltyWeights P;
  P.gamma = gamma;
  P.C = Mat::Ones(d, d);
  P.frozen = BoolMat::Constant(d, d, true);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      const double mag = std::abs(W_ols(i, j));
      if (mag > freeze_tol) {
        P.frozen(i, j) = false;
        P.C(i, j) = 1.0 / std::pow(mag, gamma);
      }
    }
  return P;
}

namespace {

// run the reparametrized adaptive loop for a generic smooth score over W
EstimateResult adaptive_loop(const ScoreFn& w_score, int d, const PenaltyWeights& P,
                             double lambda_n, const SolverConfig& cfg, double zero_tol,
                             const SplitVars* warm, SplitVars* final_split,
                             std::vector<TraceRecord>* trace) {
  EstimateResult r;
  r.lambda_used = lambda_n;
  r.gamma_used = P.gamma;

  // score and gradient in W_C coordinates (chain rule: divide by C elementwise)
  auto wc_score = [&](const Mat& Wc, Mat& g) -> double {
    Mat W = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (i != j && !P.frozen(i, j)) W(i, j) = Wc(i, j) / P.C(i, j);
    Mat gw(d, d);
    const double v = w_score(W, gw);
    g = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (i != j && !P.frozen(i, j)) g(i, j) = gw(i, j) / P.C(i, j);
    return v;
  };
  auto wc_h = [&](const Mat& Wc) { return h_and_grad_reparam(Wc, P.C, P.frozen); };

  Mat Wc;
  try {
    auto [Wc_, st] = augmented_lagrangian(wc_score, wc_h, Mat::Constant(d, d, lambda_n),
                                          !P.frozen, cfg, trace, warm);
    Wc = Wc_;
    r.converged = st.converged;
    if (final_split) *final_split = st.iterate;
  } catch (const convergence_error& e) {
    Wc = e.W;
    r.converged = false;
    if (final_split) {
      final_split->w_plus = Wc.cwiseMax(0.0);
      final_split->w_minus = (-Wc).cwiseMax(0.0);
      final_split->mask = !P.frozen;
    }
  }

  r.W_hat = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i != j && !P.frozen(i, j)) r.W_hat(i, j) = Wc(i, j) / P.C(i, j);
  finalize(r, zero_tol);
  return r;
}

}  // namespace

EstimateResult notears_al_with_penalties(const Dataset& data, const PenaltyWeights& P,
                                         double lambda_n, const SolverConfig& cfg,
                                         double zero_tol, const SplitVars* warm,
                                         SplitVars* final_split) {
  check_continuous(data);
  if (lambda_n < 0.0) throw invalid_argument_error("lambda_n must be >= 0");
  const auto t0 = clock_t_::now();
  const LinearScore score(data.X);
  std::vector<TraceRecord> trace;
  EstimateResult r = adaptive_loop([&](const Mat& W, Mat& g) { return score(W, g); }, data.d(), P,
                                   lambda_n, cfg, zero_tol, warm, final_split, &trace);
  r.stage_traces.push_back(std::move(trace));
  r.timing_s = seconds_since(t0);
  return r;
}

EstimateResult notears_al(const Dataset& data, double lambda_n, double gamma,
                          const SolverConfig& cfg, double zero_tol) {
  check_continuous(data);
  if (lambda_n < 0.0) throw invalid_argument_error("lambda_n must be >= 0");
  const auto t0 = clock_t_::now();

  std::vector<TraceRecord> ols_trace;
  bool stage1_ok = true;
  Mat W_ols;
  try {
    W_ols = ols_stage(data, cfg, &ols_trace);
  } catch (const convergence_error& e) {
    W_ols = e.W;
    stage1_ok = false;
  }
  const PenaltyWeights P = build_penalties(W_ols, gamma);

  EstimateResult r = notears_al_with_penalties(data, P, lambda_n, cfg, zero_tol);
  r.stage_traces.insert(r.stage_traces.begin(), std::move(ols_trace));
  r.converged = r.converged && stage1_ok;
  r.timing_s = seconds_since(t0);
  return r;
}

std::pair<double, Mat> logistic_score(const Mat& D, const Dataset& data) {
  check_binary(data);
  if (D.rows() != data.d() || D.cols() != data.d())
    throw invalid_argument_error("logistic_score: coefficient matrix shape mismatch");
  const int n = data.n();
  const Mat T = data.X * D;
  double val = 0.0;
  Mat S(T.rows(), T.cols());
  for (int i = 0; i < T.rows(); ++i)
    for (int j = 0; j < T.cols(); ++j) {
      val += softplus(T(i, j)) - data.X(i, j) * T(i, j);
      S(i, j) = sigmoid(T(i, j));
    }
  val /= n;
  Mat grad = data.X.transpose() * (S - data.X) / n;
  return {val, grad};
}

namespace {

// dense logistic score closure that avoids revalidating the dataset per call
ScoreFn make_logistic_score(const Dataset& data) {
  const Mat& X = data.X;
  const int n = data.n();
  return [&X, n](const Mat& D, Mat& grad) -> double {
    const Mat T = X * D;
    double val = 0.0;
    Mat S(T.rows(), T.cols());
    for (int i = 0; i < T.rows(); ++i)
      for (int j = 0; j < T.cols(); ++j) {
        val += softplus(T(i, j)) - X(i, j) * T(i, j);
        S(i, j) = sigmoid(T(i, j));
      }
    val /= n;
    grad = X.transpose() * (S - X) / n;
    return val;
  };
}

}  // namespace

Mat logistic_stage(const Dataset& data, const SolverConfig& cfg, std::vector<TraceRecord>* trace) {
  check_binary(data);
  const int d = data.d();
  auto [D, st] = augmented_lagrangian(make_logistic_score(data),
                                      [](const Mat& W_) { return h_and_grad(W_); },
                                      Mat::Zero(d, d), BoolMat::Constant(d, d, true), cfg, trace);
  return D;
}

EstimateResult notears_logistic(const Dataset& data, double lambda, double threshold,
                                const SolverConfig& cfg, double zero_tol) {
  check_binary(data);
  if (lambda < 0.0 || threshold < 0.0)
    throw invalid_argument_error("notears_logistic: lambda and threshold must be >= 0");
  const auto t0 = clock_t_::now();
  const int d = data.d();

  EstimateResult r;
  r.lambda_used = lambda;
  r.stage_traces.emplace_back();
  try {
    auto [D, st] = augmented_lagrangian(make_logistic_score(data),
                                        [](const Mat& W_) { return h_and_grad(W_); },
                                        Mat::Constant(d, d, lambda),
                                        BoolMat::Constant(d, d, true), cfg, &r.stage_traces.back());
    r.W_hat = D;
    r.converged = st.converged;
  } catch (const convergence_error& e) {
    r.W_hat = e.W;
    r.converged = false;
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (std::abs(r.W_hat(i, j)) < threshold) r.W_hat(i, j) = 0.0;
  finalize(r, zero_tol);
  r.timing_s = seconds_since(t0);
  return r;
}

EstimateResult notears_al_logistic(const Dataset& data, double lambda_n, double gamma,
                                   const SolverConfig& cfg, double zero_tol) {
  check_binary(data);
  if (lambda_n < 0.0) throw invalid_argument_error("lambda_n must be >= 0");
  const auto t0 = clock_t_::now();

  std::vector<TraceRecord> stage1_trace;
  bool stage1_ok = true;
  Mat D1;
  try {
    D1 = logistic_stage(data, cfg, &stage1_trace);
  } catch (const convergence_error& e) {
    D1 = e.W;
    stage1_ok = false;
  }
  const PenaltyWeights P = build_penalties(D1, gamma);

  std::vector<TraceRecord> trace;
  EstimateResult r = adaptive_loop(make_logistic_score(data), data.d(), P, lambda_n, cfg,
                                   zero_tol, nullptr, nullptr, &trace);
  r.stage_traces.push_back(std::move(stage1_trace));
  r.stage_traces.push_back(std::move(trace));
  r.converged = r.converged && stage1_ok;
  r.timing_s = seconds_since(t0);
  return r;
}

void save_estimate_json(const EstimateResult& r, const std::string& path) {
  nlohmann::json j;
  std::vector<double> flat;
  flat.reserve(r.W_hat.size());
  for (int i = 0; i < r.W_hat.rows(); ++i)
    for (int jj = 0; jj < r.W_hat.cols(); ++jj) flat.push_back(r.W_hat(i, jj));
  j["d"] = r.W_hat.rows();
  j["W_hat"] = flat;  // dense row-major
  std::vector<std::vector<int>> edges;
  for (const auto& e : r.support) edges.push_back({e.first, e.second});
  j["support"] = edges;
  j["h_final"] = r.h_final;
  j["lambda_used"] = r.lambda_used;
  j["gamma"] = r.gamma_used;
  j["converged"] = r.converged;
  j["timings"] = r.timing_s;
  std::ofstream out(path);
  if (!out) throw error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace notears
