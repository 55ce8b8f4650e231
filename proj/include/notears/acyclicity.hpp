#pragma once

#include "notears/types.hpp"

namespace notears {

struct AcyclicityValue {
  double h = 0.0;  // >= 0 (round-off negatives clamped)
  Mat grad;        // d x d
};

// h(W) = tr(exp(W o W)) - d, grad = exp(W o W)^T o 2W.
// One matrix exponential shared by value and gradient.
AcyclicityValue h_and_grad(const Mat& W);

// Same quantity for the reparametrized variable W_C = C o W, i.e. h(W_C / C),
// with gradient taken with respect to W_C:
//   grad = 2 * exp((W_C o W_C) / (C o C))^T o W_C / (C o C).
// Frozen entries are treated as exact zeros and get gradient 0.
// Active penalty weights must be strictly positive.
AcyclicityValue h_and_grad_reparam(const Mat& W_C, const Mat& C, const BoolMat& frozen);

}  // namespace notears
