#include "notears/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>

#include "notears/errors.hpp"
#include "notears/rng.hpp"

namespace notears {

namespace {

void check_dist(const WeightDist& dist) {
  switch (dist.kind) {
    case WeightDist::Kind::gaussian:
      if (dist.b <= 0.0) throw invalid_argument_error("gaussian weight dist needs sd > 0");
      break;
    case WeightDist::Kind::uniform_sym:
      if (dist.a <= 0.0) throw invalid_argument_error("uniform_sym weight dist needs c > 0");
      break;
    case WeightDist::Kind::uniform_gap:
      if (!(0.0 < dist.a && dist.a < dist.b))
        throw invalid_argument_error("uniform_gap weight dist needs 0 < lo < hi");
      break;
  }
}

double draw_weight(Rng& rng, const WeightDist& dist) {
  switch (dist.kind) {
    case WeightDist::Kind::gaussian:
      return rng.normal(dist.a, dist.b);
    case WeightDist::Kind::uniform_sym:
      return -dist.a + 2.0 * dist.a * rng.uniform();
    case WeightDist::Kind::uniform_gap: {
      // single uniform over [-hi,-lo] U [lo,hi]
      const double span = dist.b - dist.a;
      const double v = rng.uniform() * 2.0 * span;
      return v < span ? dist.a + v : -dist.b + (v - span);
    }
  }
  return 0.0;
}

}  // namespace

Mat sample_er_dag(const GraphSpec& spec) {
  if (spec.d < 2) throw invalid_argument_error("sample_er_dag: d must be >= 2");
  if (spec.er_degree <= 0.0) throw invalid_argument_error("sample_er_dag: er_degree must be > 0");
  const int d = spec.d;
  const double s0 = spec.er_degree * d;
  const double p = std::min(1.0, 2.0 * s0 / (static_cast<double>(d) * (d - 1)));

  Rng rng(spec.seed);
  const std::vector<int> perm = rng.permutation(d);
  std::vector<int> rank(d);
  for (int i = 0; i < d; ++i) rank[perm[i]] = i;

  Mat pattern = Mat::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      if (rng.uniform() >= p) continue;
      if (rank[a] < rank[b])
        pattern(a, b) = 1.0;
      else
        pattern(b, a) = 1.0;
    }
  return pattern;
}

Mat assign_weights(const Mat& pattern, const WeightDist& dist, uint64_t seed) {
  check_dist(dist);
  topological_order(pattern, 0.0);  // rejects cyclic patterns
  Rng rng(seed);
  Mat W = Mat::Zero(pattern.rows(), pattern.cols());
  for (int i = 0; i < pattern.rows(); ++i)
    for (int j = 0; j < pattern.cols(); ++j)
      if (pattern(i, j) != 0.0) W(i, j) = draw_weight(rng, dist);
  return W;
}

std::vector<int> topological_order(const Mat& W, double zero_tol) {
  check_weight_matrix(W);
  const int d = static_cast<int>(W.rows());
  std::vector<int> indeg(d, 0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i != j && std::abs(W(i, j)) > zero_tol) ++indeg[j];

  std::vector<bool> placed(d, false);
  std::vector<int> order;
  order.reserve(d);
  for (int step = 0; step < d; ++step) {
    int next = -1;
    for (int v = 0; v < d; ++v)
      if (!placed[v] && indeg[v] == 0) {
        next = v;
        break;
      }
    if (next < 0) break;
    placed[next] = true;
    order.push_back(next);
    for (int j = 0; j < d; ++j)
      if (j != next && std::abs(W(next, j)) > zero_tol) --indeg[j];
  }
  if (static_cast<int>(order.size()) == d) return order;

  // extract one cycle among the unplaced nodes: walk predecessors until a repeat
  std::vector<int> seen_at(d, -1);
  std::vector<int> walk;
  int v = 0;
  while (placed[v]) ++v;
  while (seen_at[v] < 0) {
    seen_at[v] = static_cast<int>(walk.size());
    walk.push_back(v);
    int pred = -1;
    for (int i = 0; i < d; ++i)
      if (!placed[i] && i != v && std::abs(W(i, v)) > zero_tol) {
        pred = i;
        break;
      }
    v = pred;  // every unplaced node has an unplaced predecessor
  }
  std::vector<int> cycle(walk.begin() + seen_at[v], walk.end());
  std::reverse(cycle.begin(), cycle.end());  // report in edge direction
  std::ostringstream msg;
  msg << "graph contains a cycle:";
  for (int node : cycle) msg << " " << node;
  throw cyclic_graph_error(msg.str(), cycle);
}

namespace {

// is there a directed path from s to t (edges |w| > 0 in B)?
bool reachable(const std::vector<std::vector<int>>& adj, int s, int t) {
  if (s == t) return true;
  std::vector<bool> vis(adj.size(), false);
  std::deque<int> q{s};
  vis[s] = true;
  while (!q.empty()) {
    const int u = q.front();
    q.pop_front();
    for (int w : adj[u]) {
      if (w == t) return true;
      if (!vis[w]) {
        vis[w] = true;
        q.push_back(w);
      }
    }
  }
  return false;
}

}  // namespace

Mat repair_to_dag(Mat W, double zero_tol) {
  check_weight_matrix(W);
  const int d = static_cast<int>(W.rows());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (std::abs(W(i, j)) <= zero_tol) W(i, j) = 0.0;

  while (true) {
    std::vector<std::vector<int>> adj(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (W(i, j) != 0.0) adj[i].push_back(j);

    // edge (u,v) lies on a cycle iff v reaches u
    int bu = -1, bv = -1;
    double best = 0.0;
    for (int u = 0; u < d; ++u)
      for (int v = 0; v < d; ++v) {
        if (W(u, v) == 0.0) continue;
        if (!reachable(adj, v, u)) continue;
        const double mag = std::abs(W(u, v));
        if (bu < 0 || mag < best) {
          best = mag;
          bu = u;
          bv = v;
        }
      }
    if (bu < 0) return W;
    W(bu, bv) = 0.0;
  }
}

RecoveryMetrics compare(const Mat& estimate, const Mat& truth, double zero_tol) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols() ||
      estimate.rows() != estimate.cols())
    throw invalid_argument_error("compare: matrices must be square with matching dimensions");
  const int d = static_cast<int>(truth.rows());
  auto est = [&](int i, int j) { return i != j && std::abs(estimate(i, j)) > zero_tol; };
  auto tru = [&](int i, int j) { return i != j && std::abs(truth(i, j)) > zero_tol; };

  RecoveryMetrics m;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      if (tru(i, j)) ++m.true_edges;
      if (est(i, j)) {
        ++m.predicted;
        if (tru(i, j))
          ++m.tp;
        else if (tru(j, i))
          ++m.reversed;
        else
          ++m.fp;
      }
      if (tru(i, j) && !est(i, j) && !est(j, i)) ++m.fn;
    }
  m.shd = m.fn + m.fp + m.reversed;
  m.tpr = m.true_edges > 0 ? static_cast<double>(m.tp) / m.true_edges : 0.0;
  m.fdr = m.predicted > 0 ? static_cast<double>(m.fp + m.reversed) / m.predicted : 0.0;
  return m;
}

std::vector<Edge> support_edges(const Mat& W, double zero_tol) {
  std::vector<Edge> edges;
  for (int i = 0; i < W.rows(); ++i)
    for (int j = 0; j < W.cols(); ++j)
      if (i != j && std::abs(W(i, j)) > zero_tol) edges.emplace_back(i, j);
  return edges;
}

void save_edge_csv(const Mat& W, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw error("cannot open for writing: " + path);
  out << "src,dst,weight\n";
  char buf[64];
  for (int i = 0; i < W.rows(); ++i)
    for (int j = 0; j < W.cols(); ++j)
      if (i != j && W(i, j) != 0.0) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.17g\n", i, j, W(i, j));
        out << buf;
      }
}

Mat load_edge_csv(const std::string& path, int d) {
  std::ifstream in(path);
  if (!in) throw error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw parse_error("empty edge file: " + path, 0, 0);
  Mat W = Mat::Zero(d, d);
  int row = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int i, j;
    double w;
    if (std::sscanf(line.c_str(), "%d,%d,%lg", &i, &j, &w) != 3)
      throw parse_error("bad edge row in " + path, row, 0);
    if (i < 0 || i >= d || j < 0 || j >= d)
      throw parse_error("edge index out of range in " + path, row, 0);
    W(i, j) = w;
    ++row;
  }
  return W;
}

}  // namespace notears
