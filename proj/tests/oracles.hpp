// Independent reference implementations used only by tests. Everything here is
// deliberately written with different algorithms than the library (plain Taylor
// series, explicit set arithmetic, exhaustive search) so agreement is evidence,
// not tautology.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "notears/types.hpp"

namespace oracles {

using notears::Mat;

// Plain truncated Taylor series for e^A; adequate for the small-norm matrices
// the tests feed it, and structurally unrelated to scaling-and-squaring.
inline Mat taylor_expm(const Mat& A, int terms = 40) {
  Mat acc = Mat::Identity(A.rows(), A.cols());
  Mat term = Mat::Identity(A.rows(), A.cols());
  for (int k = 1; k <= terms; ++k) {
    term = (term * A / static_cast<double>(k)).eval();
    acc += term;
  }
  return acc;
}

// Central finite differences of a scalar function of a matrix.
inline Mat fd_gradient(const std::function<double(const Mat&)>& f, const Mat& X,
                       double eps = 1e-6) {
  Mat g(X.rows(), X.cols());
  Mat P = X;
  for (int i = 0; i < X.rows(); ++i)
    for (int j = 0; j < X.cols(); ++j) {
      const double orig = P(i, j);
      P(i, j) = orig + eps;
      const double fp = f(P);
      P(i, j) = orig - eps;
      const double fm = f(P);
      P(i, j) = orig;
      g(i, j) = (fp - fm) / (2.0 * eps);
    }
  return g;
}

inline double rel_err(const Mat& got, const Mat& want) {
  const double denom = std::max(want.norm(), 1e-12);
  return (got - want).norm() / denom;
}

struct OracleMetrics {
  int shd = 0, tp = 0, fp = 0, fn = 0, reversed = 0, predicted = 0, true_edges = 0;
  double tpr = 0.0, fdr = 0.0;
};

// Explicit set arithmetic over ordered pairs.
inline OracleMetrics metrics_oracle(const Mat& est, const Mat& truth, double tol = 1e-8) {
  using P = std::pair<int, int>;
  std::set<P> e, t;
  for (int i = 0; i < est.rows(); ++i)
    for (int j = 0; j < est.cols(); ++j) {
      if (i == j) continue;
      if (std::abs(est(i, j)) > tol) e.insert({i, j});
      if (std::abs(truth(i, j)) > tol) t.insert({i, j});
    }
  OracleMetrics m;
  m.predicted = static_cast<int>(e.size());
  m.true_edges = static_cast<int>(t.size());
  for (const auto& [i, j] : e) {
    if (t.count({i, j}))
      ++m.tp;
    else if (t.count({j, i}))
      ++m.reversed;
    else
      ++m.fp;
  }
  for (const auto& [i, j] : t)
    if (!e.count({i, j}) && !e.count({j, i})) ++m.fn;
  m.shd = m.fn + m.fp + m.reversed;
  m.tpr = m.true_edges ? static_cast<double>(m.tp) / m.true_edges : 0.0;
  m.fdr = m.predicted ? static_cast<double>(m.fp + m.reversed) / m.predicted : 0.0;
  return m;
}

// Cycle check by DFS on the |w| > tol pattern.
inline bool is_acyclic(const Mat& W, double tol = 1e-8) {
  const int d = static_cast<int>(W.rows());
  std::vector<int> state(d, 0);  // 0 new, 1 on stack, 2 done
  std::function<bool(int)> dfs = [&](int u) {
    state[u] = 1;
    for (int v = 0; v < d; ++v) {
      if (v == u || std::abs(W(u, v)) <= tol) continue;
      if (state[v] == 1) return false;
      if (state[v] == 0 && !dfs(v)) return false;
    }
    state[u] = 2;
    return true;
  };
  for (int u = 0; u < d; ++u)
    if (state[u] == 0 && !dfs(u)) return false;
  return true;
}

inline bool edge_on_cycle(const Mat& W, int u, int v, double tol) {
  // u->v lies on a cycle iff v reaches u
  const int d = static_cast<int>(W.rows());
  std::vector<bool> seen(d, false);
  std::vector<int> stack{v};
  seen[v] = true;
  while (!stack.empty()) {
    const int x = stack.back();
    stack.pop_back();
    if (x == u) return true;
    for (int y = 0; y < d; ++y)
      if (y != x && !seen[y] && std::abs(W(x, y)) > tol) {
        seen[y] = true;
        stack.push_back(y);
      }
  }
  return false;
}

// Minimum total removed |weight| over the whole family of greedy repairs: at
// every step any minimum-|w| cycle edge may be removed; branch over all of them.
inline double best_greedy_removal(Mat W, double tol) {
  std::vector<std::pair<int, int>> cyc_edges;
  for (int i = 0; i < W.rows(); ++i)
    for (int j = 0; j < W.cols(); ++j)
      if (i != j && std::abs(W(i, j)) > tol && edge_on_cycle(W, i, j, tol))
        cyc_edges.push_back({i, j});
  if (cyc_edges.empty()) return 0.0;
  double wmin = std::abs(W(cyc_edges[0].first, cyc_edges[0].second));
  for (const auto& [i, j] : cyc_edges) wmin = std::min(wmin, std::abs(W(i, j)));
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [i, j] : cyc_edges) {
    if (std::abs(W(i, j)) > wmin + 1e-15) continue;
    const double saved = W(i, j);
    W(i, j) = 0.0;
    best = std::min(best, std::abs(saved) + best_greedy_removal(W, tol));
    W(i, j) = saved;
  }
  return best;
}

inline Mat random_matrix(std::mt19937& gen, int rows, int cols, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Mat M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = u(gen);
  return M;
}

// Random hollow matrix (zero diagonal), entries in [lo, hi].
inline Mat random_hollow(std::mt19937& gen, int d, double lo, double hi) {
  Mat M = random_matrix(gen, d, d, lo, hi);
  M.diagonal().setZero();
  return M;
}

// Strictly lower-triangular random matrix conjugated by a random permutation:
// a DAG with an arbitrary node order.
inline Mat random_permuted_dag(std::mt19937& gen, int d, double density, double lo, double hi) {
  std::uniform_real_distribution<double> u01(0.0, 1.0), uw(lo, hi);
  Mat L = Mat::Zero(d, d);
  for (int i = 1; i < d; ++i)
    for (int j = 0; j < i; ++j)
      if (u01(gen) < density) L(i, j) = uw(gen);
  std::vector<int> perm(d);
  for (int i = 0; i < d; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), gen);
  Mat W = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) W(perm[i], perm[j]) = L(i, j);
  return W;
}

}  // namespace oracles
