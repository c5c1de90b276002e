#pragma once

// Builtin generator families.

#include "cocyclelab/cocycle.hpp"

#include <map>
#include <vector>

namespace cocyclelab {

MatrixGenerator identity_generator(const Sft& s, int dim, double alpha = 1.0);

MatrixGenerator constant_generator(const Sft& s, const Matrix& a, double alpha = 1.0);

// Radius 0: A(x) = per_symbol[x_0].
MatrixGenerator symbol_generator(const Sft& s, const std::vector<Matrix>& per_symbol,
                                 double alpha = 1.0);

MatrixGenerator diagonal_by_symbol(const Sft& s,
                                   const std::vector<std::vector<double>>& diagonals,
                                   double alpha = 1.0);

// 2x2 rotation by angles[x_0], optionally scaled by scales[x_0].
MatrixGenerator rotation_by_symbol(const Sft& s, const std::vector<double>& angles,
                                   const std::vector<double>& scales = {},
                                   double alpha = 1.0);

// A(x) = P(f x) P(x)^{-1} for P given on windows of radius `transfer_radius`.
// The result has radius transfer_radius + 1. Throws SingularWindow when some
// P entry is singular.
MatrixGenerator coboundary_generator(const Sft& s, int transfer_radius,
                                     const std::map<Word, Matrix>& transfer,
                                     double alpha = 1.0);

}  // namespace cocyclelab
