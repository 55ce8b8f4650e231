#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "notears/types.hpp"

namespace notears {

struct WeightDist {
  enum class Kind { gaussian, uniform_sym, uniform_gap };
  Kind kind = Kind::gaussian;
  // gaussian: a = mean, b = sd; uniform_sym: a = c (interval (-c, c));
  // uniform_gap: a = lo, b = hi (support [-hi,-lo] U [lo,hi]).
  double a = 0.0;
  double b = 1.0;
};

struct GraphSpec {
  int d = 2;
  double er_degree = 1.0;  // expected edges per node k; s0 = k*d edges total
  WeightDist weight_dist;
  uint64_t seed = 0;
};

// Erdos-Renyi DAG pattern: undirected pairs kept with p = min(1, 2*s0/(d(d-1))),
// each edge oriented low-to-high rank under a uniformly random node permutation.
// Returns a 0/1 matrix; acyclic by construction; deterministic given spec.seed.
Mat sample_er_dag(const GraphSpec& spec);

// Nonzero pattern entries get i.i.d. draws from dist (row-major draw order).
Mat assign_weights(const Mat& pattern, const WeightDist& dist, uint64_t seed);

// Kahn order with smallest-index tie-break; edge i->j exists when |W(i,j)| > zero_tol.
// Throws cyclic_graph_error naming one cycle if none exists.
std::vector<int> topological_order(const Mat& W, double zero_tol);

// Zero out |w| <= zero_tol, then repeatedly drop the globally smallest-|w| edge
// that lies on some directed cycle (ties: lexicographic by (src, dst)) until acyclic.
Mat repair_to_dag(Mat W, double zero_tol);

// Binarize both matrices at zero_tol and count:
//   tp       estimated edge matching truth's direction
//   reversed estimated edge present in truth's skeleton with opposite direction
//   fp       estimated edge absent from truth's skeleton
//   fn       true edge absent from the estimate's skeleton
// shd = fn + fp + reversed; tpr = tp/true_edges; fdr = (fp+reversed)/predicted.
RecoveryMetrics compare(const Mat& estimate, const Mat& truth, double zero_tol = 1e-8);

std::vector<Edge> support_edges(const Mat& W, double zero_tol = 1e-8);

// Edge-list CSV with header "src,dst,weight"; weights at 17 significant digits
// so reload is bit-exact. d is not stored in the file and must be supplied on load.
void save_edge_csv(const Mat& W, const std::string& path);
Mat load_edge_csv(const std::string& path, int d);

}  // namespace notears
