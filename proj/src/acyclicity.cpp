#include "notears/acyclicity.hpp"

#include <algorithm>

#include "notears/errors.hpp"
#include "notears/matrix_exp.hpp"

namespace notears {

void check_weight_matrix(const Mat& W) {
  if (W.rows() != W.cols() || W.rows() < 1)
    throw invalid_argument_error("weight matrix must be square, d >= 1");
  if (!W.allFinite()) throw invalid_argument_error("weight matrix has non-finite entries");
  for (int i = 0; i < W.rows(); ++i)
    if (W(i, i) != 0.0) throw invalid_argument_error("weight matrix diagonal must be exactly zero");
}

AcyclicityValue h_and_grad(const Mat& W) {
  check_weight_matrix(W);
  const int d = static_cast<int>(W.rows());
  const Mat E = matrix_exp(W.cwiseProduct(W));
  AcyclicityValue out;
  out.h = std::max(E.trace() - static_cast<double>(d), 0.0);
  out.grad = E.transpose().cwiseProduct(2.0 * W);
  return out;
}

AcyclicityValue h_and_grad_reparam(const Mat& W_C, const Mat& C, const BoolMat& frozen) {
  const int d = static_cast<int>(W_C.rows());
  if (C.rows() != d || C.cols() != d || frozen.rows() != d || frozen.cols() != d ||
      W_C.cols() != d)
    throw invalid_argument_error("h_and_grad_reparam: shape mismatch");
  if (!W_C.allFinite() || !C.allFinite())
    throw invalid_argument_error("h_and_grad_reparam: non-finite input");

  Mat M = Mat::Zero(d, d);  // (W_C o W_C) / (C o C), frozen entries 0
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (frozen(i, j) || i == j) continue;
      if (C(i, j) <= 0.0)
        throw invalid_argument_error("h_and_grad_reparam: active penalty weight must be > 0");
      const double v = W_C(i, j) / C(i, j);
      M(i, j) = v * v;
    }

  const Mat E = matrix_exp(M);
  AcyclicityValue out;
  out.h = std::max(E.trace() - static_cast<double>(d), 0.0);
  out.grad = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (frozen(i, j) || i == j) continue;
      out.grad(i, j) = 2.0 * E(j, i) * W_C(i, j) / (C(i, j) * C(i, j));
    }
  return out;
}

}  // namespace notears
