#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>

namespace cocyclelab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative cutoff on sigma_min / sigma_max below which a matrix is treated
// as rank deficient.
inline constexpr double kSingularityThreshold = 1e-12;

// Operator norm induced by the Euclidean vector norm.
double spectral_norm(const Matrix& m);

// Smallest and largest singular values.
struct SingularRange {
  double min = 0.0;
  double max = 0.0;
};
SingularRange singular_range(const Matrix& m);

bool is_exact_zero(const Matrix& m);

// Exact zero, exactly zero determinant, or sigma_min < threshold * sigma_max.
bool is_numerically_singular(const Matrix& m,
                             double threshold = kSingularityThreshold);

// log|det m|; -inf for numerically singular input.
double log_abs_det(const Matrix& m);

std::uint64_t binomial(int n, int k);

}  // namespace cocyclelab
