#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "notears/acyclicity.hpp"
#include "notears/errors.hpp"
#include "notears/estimators.hpp"
#include "notears/graphs.hpp"
#include "notears/simulate.hpp"
#include "oracles.hpp"

using namespace notears;

namespace {

Dataset chain2(double w, int n, uint64_t seed) {
  Mat W = Mat::Zero(2, 2);
  W(0, 1) = w;
  NoiseKind z;
  return simulate_linear_sem(W, n, z, seed);
}

double l1_objective(const Dataset& data, const Mat& W, double lambda) {
  const Mat R = data.X - data.X * W;
  return 0.5 * R.squaredNorm() / data.n() + lambda * W.cwiseAbs().sum();
}

}  // namespace

TEST_CASE("fixed-threshold estimator recovers a strong chain edge") {
  const Dataset data = chain2(2.0, 1000, 101);
  const EstimateResult r = notears_fixed(data, 0.1, 0.1);
  CHECK(r.converged);
  Mat truth = Mat::Zero(2, 2);
  truth(0, 1) = 2.0;
  CHECK(compare(r.W_hat, truth).shd == 0);
  CHECK(r.support.size() == 1);
  CHECK(r.lambda_used == 0.1);
  CHECK_NOTHROW(topological_order(r.W_hat, 1e-8));
}

TEST_CASE("fixed threshold wipes out weak true edges") {
  const Dataset data = chain2(0.2, 4000, 103);
  const EstimateResult r = notears_fixed(data, 0.01, 0.3);
  // the fitted coefficient sits near 0.2, under the 0.3 cut
  CHECK(r.W_hat(0, 1) == 0.0);
  CHECK(r.support.empty());
  // the adaptive variant keeps it
  const EstimateResult a = notears_al(data, 0.01);
  CHECK(std::abs(a.W_hat(0, 1)) > 0.1);
}

TEST_CASE("ols stage: null data leaves only sampling noise") {
  std::vector<double> max_abs;
  NoiseKind z;
  for (uint64_t s = 0; s < 11; ++s) {
    const Dataset data = simulate_linear_sem(Mat::Zero(4, 4), 1000, z, 200 + s);
    const Mat W = ols_stage(data);
    max_abs.push_back(W.cwiseAbs().maxCoeff());
  }
  std::sort(max_abs.begin(), max_abs.end());
  CHECK(max_abs[5] <= 3.0 / std::sqrt(1000.0));
}

TEST_CASE("ols stage: error shrinks at the root-n rate") {
  std::mt19937 gen(7);
  GraphSpec spec;
  spec.d = 4;
  spec.er_degree = 1.0;
  spec.weight_dist.kind = WeightDist::Kind::uniform_gap;
  spec.weight_dist.a = 0.5;
  spec.weight_dist.b = 2.0;
  spec.seed = 5;
  const Mat Wstar = assign_weights(sample_er_dag(spec), spec.weight_dist, 6);
  REQUIRE(support_edges(Wstar).size() >= 2);
  NoiseKind z;
  double e_small = 0.0, e_big = 0.0;
  for (uint64_t s = 0; s < 5; ++s) {
    e_small += (ols_stage(simulate_linear_sem(Wstar, 500, z, 300 + s)) - Wstar).norm();
    e_big += (ols_stage(simulate_linear_sem(Wstar, 2000, z, 400 + s)) - Wstar).norm();
  }
  const double ratio = e_small / e_big;  // n quadrupled; target ratio 2
  CHECK(ratio >= 1.3);
  CHECK(ratio <= 3.0);
}

TEST_CASE("ols stage is scale equivariant in argmin") {
  Mat Wstar = Mat::Zero(3, 3);
  Wstar(0, 1) = 1.2;
  Wstar(1, 2) = -0.9;
  NoiseKind z;
  const Dataset data = simulate_linear_sem(Wstar, 2000, z, 111);
  Dataset scaled = data;
  scaled.X *= 3.0;
  const Mat a = ols_stage(data);
  const Mat b = ols_stage(scaled);
  CHECK((a - b).cwiseAbs().maxCoeff() <= 5e-3);
}

TEST_CASE("penalty weights from the first stage") {
  Mat W = Mat::Zero(2, 2);
  W(0, 1) = 0.5;
  const PenaltyWeights p1 = build_penalties(W, 1.0);
  CHECK(p1.C(0, 1) == doctest::Approx(2.0));
  CHECK(!p1.frozen(0, 1));
  CHECK(p1.frozen(1, 0));  // zero entry
  CHECK(p1.frozen(0, 0));  // diagonal

  W(0, 1) = 0.1;
  const PenaltyWeights p2 = build_penalties(W, 2.0);
  CHECK(p2.C(0, 1) == doctest::Approx(100.0));
}

TEST_CASE("frozen positions come back as exact zeros") {
  Mat Wstar = Mat::Zero(3, 3);
  Wstar(0, 1) = 1.5;
  Wstar(1, 2) = 1.0;
  NoiseKind z;
  const Dataset data = simulate_linear_sem(Wstar, 1500, z, 113);
  PenaltyWeights P = build_penalties(ols_stage(data), 1.0);
  // freeze one active position by hand; it must return exactly 0
  P.frozen(0, 2) = true;
  const EstimateResult r = notears_al_with_penalties(data, P, 0.01);
  CHECK(r.W_hat(0, 2) == 0.0);
  for (int i = 0; i < 3; ++i) CHECK(r.W_hat(i, i) == 0.0);
}

TEST_CASE("all-ones penalties reduce the adaptive loop to the plain lasso") {
  Mat Wstar = Mat::Zero(3, 3);
  Wstar(0, 1) = 1.4;
  Wstar(0, 2) = -1.1;
  NoiseKind z;
  const Dataset data = simulate_linear_sem(Wstar, 800, z, 117);
  const double lambda = 0.2;

  PenaltyWeights P;
  P.C = Mat::Ones(3, 3);
  P.frozen = BoolMat::Constant(3, 3, false);
  for (int i = 0; i < 3; ++i) P.frozen(i, i) = true;
  P.gamma = 0.0;
  const EstimateResult a = notears_al_with_penalties(data, P, lambda);
  const EstimateResult f = notears_fixed(data, lambda, 0.0);
  CHECK(std::abs(l1_objective(data, a.W_hat, lambda) - l1_objective(data, f.W_hat, lambda)) <=
        1e-6);
}

TEST_CASE("adaptive estimator output is exactly acyclic with consistent support") {
  std::mt19937 gen(9);
  GraphSpec spec;
  spec.d = 8;
  spec.er_degree = 1.5;
  spec.weight_dist.kind = WeightDist::Kind::uniform_gap;
  spec.weight_dist.a = 0.5;
  spec.weight_dist.b = 2.0;
  spec.seed = 21;
  const Mat Wstar = assign_weights(sample_er_dag(spec), spec.weight_dist, 22);
  NoiseKind z;
  const Dataset data = simulate_linear_sem(Wstar, 1200, z, 121);
  const EstimateResult r = notears_al(data, 0.05);
  CHECK_NOTHROW(topological_order(r.W_hat, 1e-8));
  CHECK(r.support == support_edges(r.W_hat));
  for (const auto& [i, j] : r.support) CHECK(std::abs(r.W_hat(i, j)) > 1e-8);
  CHECK(r.h_final <= 1e-6);
  CHECK(r.stage_traces.size() == 2);  // first stage + adaptive stage
  CHECK(r.gamma_used == 1.0);
}

TEST_CASE("logistic score: value at zero, finite differences, input validation") {
  std::mt19937 gen(11);
  Mat W = Mat::Zero(4, 4);
  W(0, 1) = 1.0;
  W(1, 2) = -1.5;
  const Dataset bin = simulate_logistic_sem(W, 400, 131);

  const auto [v0, g0] = logistic_score(Mat::Zero(4, 4), bin);
  CHECK(v0 == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-12));

  for (int t = 0; t < 10; ++t) {
    const Mat D = oracles::random_hollow(gen, 4, -1.5, 1.5);
    const auto [val, grad] = logistic_score(D, bin);
    auto f = [&bin](const Mat& M) { return logistic_score(M, bin).first; };
    Mat fd = oracles::fd_gradient(f, D, 1e-6);
    fd.diagonal().setZero();
    Mat gg = grad;
    gg.diagonal().setZero();
    CHECK(oracles::rel_err(gg, fd) <= 1e-5);
  }

  NoiseKind z;
  const Dataset cont = simulate_linear_sem(Mat::Zero(2, 2), 50, z, 133);
  CHECK_THROWS_AS(logistic_score(Mat::Zero(2, 2), cont), invalid_argument_error);
  CHECK_THROWS_AS(notears_logistic(cont, 0.1, 0.1), invalid_argument_error);
  CHECK_THROWS_AS(notears_al_logistic(cont, 0.01), invalid_argument_error);
}

TEST_CASE("logistic score approaches zero under perfect saturation") {
  // all-ones data with large coefficients: every cell's predictor is strongly
  // positive and every observation is 1, so each per-cell loss collapses
  Dataset bin;
  bin.kind = DataKind::binary;
  bin.X = Mat::Ones(100, 3);
  Mat D = Mat::Constant(3, 3, 40.0);
  D.diagonal().setZero();
  const auto [val, grad] = logistic_score(D, bin);
  CHECK(val >= 0.0);
  CHECK(val <= 1e-12);

  // with a stochastic root the child column still floors at log 2 on rows
  // where the parent is absent (zero predictor gives probability one half)
  Mat W = Mat::Zero(2, 2);
  W(0, 1) = 20.0;
  const Dataset sim = simulate_logistic_sem(W, 2000, 137);
  double zero_parent = 0.0;
  for (int i = 0; i < 2000; ++i) zero_parent += sim.X(i, 0) == 0.0 ? 1.0 : 0.0;
  zero_parent /= 2000.0;
  const double vsim = logistic_score(W, sim).first;
  CHECK(std::abs(vsim - (1.0 + zero_parent) * std::log(2.0)) <= 1e-8);
}

TEST_CASE("logistic estimators: null truth yields near-empty graphs") {
  std::vector<int> fixed_sizes, al_sizes;
  for (uint64_t s = 0; s < 7; ++s) {
    const Dataset bin = simulate_logistic_sem(Mat::Zero(5, 5), 1000, 500 + s);
    fixed_sizes.push_back(static_cast<int>(notears_logistic(bin, 0.1, 0.1).support.size()));
    al_sizes.push_back(static_cast<int>(notears_al_logistic(bin, 0.01).support.size()));
  }
  std::sort(fixed_sizes.begin(), fixed_sizes.end());
  std::sort(al_sizes.begin(), al_sizes.end());
  CHECK(fixed_sizes[3] <= 1);
  CHECK(al_sizes[3] <= 1);
}

TEST_CASE("logistic chain is recovered by both variants") {
  Mat W = Mat::Zero(2, 2);
  W(0, 1) = 2.5;
  const Dataset bin = simulate_logistic_sem(W, 2000, 139);
  const EstimateResult f = notears_logistic(bin, 0.1, 0.1);
  const EstimateResult a = notears_al_logistic(bin, 0.01);
  CHECK(f.support == std::vector<Edge>{{0, 1}});
  CHECK(a.support == std::vector<Edge>{{0, 1}});
  CHECK(a.W_hat(0, 1) > 0.5);
}

TEST_CASE("estimate serialization carries the documented fields") {
  const Dataset data = chain2(1.5, 400, 141);
  const EstimateResult r = notears_al(data, 0.05);
  const std::string path = "estimator_json_test.json";
  save_estimate_json(r, path);
  std::ifstream in(path);
  nlohmann::json j;
  in >> j;
  CHECK(j.at("d").get<int>() == 2);
  CHECK(j.at("W_hat").size() == 4);  // dense row-major
  CHECK(j.contains("support"));
  CHECK(j.contains("h_final"));
  CHECK(j.contains("lambda_used"));
  CHECK(j.contains("gamma"));
  CHECK(j.contains("timings"));
  CHECK(j.at("W_hat")[1].get<double>() == r.W_hat(0, 1));
  std::filesystem::remove(path);
}
