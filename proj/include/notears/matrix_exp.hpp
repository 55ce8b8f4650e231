#pragma once

#include "notears/types.hpp"

namespace notears {

// Matrix exponential via scaling-and-squaring with Pade approximants
// (orders 3/5/7/9/13 chosen by the 1-norm). Deterministic; throws
// invalid_argument_error on non-square or non-finite input.
Mat matrix_exp(const Mat& A);

}  // namespace notears
