#pragma once

#include <vector>

#include "rcurv/tensor.hpp"

namespace rcurv {

/// Inverse of a rank-2 tensor viewed as a matrix; slot variances are flipped.
/// Throws std::domain_error when the matrix is numerically singular.
Tensor matrix_inverse(const Tensor& m);

/// Series inverse of a jet-valued matrix: (M0 + N)^-1 = sum_k (-M0^-1 N)^k M0^-1,
/// exact to the jet order of the input.
JetTensor matrix_inverse(const JetTensor& m);

double determinant(const Tensor& m);

/// Numerical rank of the row vectors (SVD, relative threshold).
int numerical_rank(const std::vector<std::vector<double>>& rows, double rel_tol = 1e-10);

}  // namespace rcurv
