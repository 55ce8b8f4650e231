#pragma once

#include <cstdint>
#include <string>

#include "notears/types.hpp"

namespace notears {

struct NoiseKind {
  enum class Kind { gaussian, exponential, gumbel };
  Kind kind = Kind::gaussian;
  double scale = 1.0;  // sd for gaussian, scale parameter otherwise
};

// Linear SEM: columns filled in topological order, X[:,j] = X * W[:,j] + z_j.
// Exponential and Gumbel draws are centered to mean zero (subtract scale and
// scale*euler_gamma respectively). Noise draw order: one column at a time in
// topological position order, n draws per column.
Dataset simulate_linear_sem(const Mat& W, int n, const NoiseKind& noise, uint64_t seed);

// Binary SEM through the logistic link: X_ij ~ Bernoulli(sigmoid(X_i . W[:,j])),
// one uniform per cell, same column order as the linear case.
Dataset simulate_logistic_sem(const Mat& W, int n, uint64_t seed);

// Headerless CSV, n rows x d comma-separated values at 17 significant digits.
void save_dataset_csv(const Dataset& data, const std::string& path);

// Sidecar JSON: {n, d, kind, seed, noise:{kind, scale}, graph_file}.
void save_dataset_meta(const Dataset& data, const NoiseKind& noise, uint64_t seed,
                       const std::string& graph_file, const std::string& path);

}  // namespace notears
