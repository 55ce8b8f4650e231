#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace notears {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using BoolMat = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Edge = std::pair<int, int>;  // (src, dst), zero-based

enum class DataKind { continuous, binary };

struct Dataset {
  Mat X;
  DataKind kind = DataKind::continuous;

  int n() const { return static_cast<int>(X.rows()); }
  int d() const { return static_cast<int>(X.cols()); }
};

struct RecoveryMetrics {
  int shd = 0;
  double tpr = 0.0;
  double fdr = 0.0;
  int tp = 0, fp = 0, fn = 0, reversed = 0;
  int predicted = 0, true_edges = 0;
};

// Throws invalid_argument_error unless W is square, finite, with exactly zero diagonal.
void check_weight_matrix(const Mat& W);

}  // namespace notears
