#pragma once

// Locally constant matrix generators over an SFT, overflow-safe cocycle
// products and exterior powers realized as compound matrices.

#include "cocyclelab/linalg.hpp"
#include "cocyclelab/symbolic.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

namespace cocyclelab {

// A(x) = table[x_{-r} .. x_r]. Locally constant maps are alpha-Hoelder for
// every alpha; `alpha` records the exponent the caller wants to work with.
class MatrixGenerator {
 public:
  using Table = std::map<Word, Matrix>;

  // Requires an entry for every admissible window of length 2r+1 and nothing
  // else, each a finite dim x dim matrix, and alpha in (0, 1].
  MatrixGenerator(Sft sft, int dim, int radius, Table table, double alpha = 1.0);

  const Sft& sft() const noexcept { return sft_; }
  int dim() const noexcept { return dim_; }
  int radius() const noexcept { return radius_; }
  int window_length() const noexcept { return 2 * radius_ + 1; }
  double alpha() const noexcept { return alpha_; }

  // Sorted windows and their matrices; index i of one matches index i of the
  // other ("slot").
  const std::vector<Word>& windows() const noexcept { return windows_; }
  const std::vector<Matrix>& matrices() const noexcept { return matrices_; }
  std::size_t window_count() const noexcept { return windows_.size(); }

  std::optional<std::size_t> slot(const Word& window) const;
  // Throws InadmissibleWindow.
  const Matrix& at(const Word& window) const;

  // Slots of the consecutive windows of `symbols`: symbols.size() - 2r
  // entries, entry i for the window starting at symbols[i]. Throws
  // InadmissibleWindow.
  std::vector<std::size_t> slots_along(const Word& symbols) const;

  Table table() const;

 private:
  Sft sft_;
  int dim_;
  int radius_;
  double alpha_;
  std::vector<Word> windows_;
  std::vector<Matrix> matrices_;
  std::vector<int> dense_slot_;  // indexed by base-k window code, -1 if absent
};

// A stored as exp(log_scale) * body with ||body||_2 == 1, or the absorbing
// exact-zero state (body == 0, log_scale == -inf).
class ScaledMatrix {
 public:
  static ScaledMatrix identity(int dim);
  static ScaledMatrix from(const Matrix& m);

  const Matrix& body() const noexcept { return body_; }
  double log_scale() const noexcept { return log_scale_; }
  bool is_zero() const noexcept;
  int dim() const noexcept { return static_cast<int>(body_.rows()); }

  // May overflow for long products; prefer log_norm().
  Matrix value() const;
  // log ||value||_2.
  double log_norm() const noexcept { return log_scale_; }
  bool is_singular(double threshold = kSingularityThreshold) const;

  // *this <- m * (*this), renormalized.
  void left_multiply(const Matrix& m);

  friend ScaledMatrix operator*(const ScaledMatrix& a, const ScaledMatrix& b);

 private:
  ScaledMatrix(Matrix body, double log_scale);
  void normalize();

  Matrix body_;
  double log_scale_ = 0.0;
};

// ||a - b||_2 / ||a||_2 computed in scaled form; 0 when both are zero and
// +inf when exactly one is.
double relative_difference(const ScaledMatrix& a, const ScaledMatrix& b);

Word window_at(const MatrixGenerator& g, const SymbolicPoint& x, long index = 0);

// A(x). Throws InadmissibleWindow.
const Matrix& evaluate(const MatrixGenerator& g, const SymbolicPoint& x);

// A^n(x) = A(f^{n-1} x) ... A(f x) A(x), identity for n = 0. Throws
// BudgetExceeded when n > budget.
ScaledMatrix cocycle_product(const MatrixGenerator& g, const SymbolicPoint& x, long n,
                             std::size_t budget = kDefaultBudget);

// Product of table matrices along every window of `symbols`, latest on the
// left.
ScaledMatrix word_product(const MatrixGenerator& g, const Word& symbols);

// Index subsets of {0..d-1} of size i in lexicographic order; the basis of the
// i-th exterior power.
std::vector<std::vector<int>> index_subsets(int d, int i);

// i-th compound matrix: entry (I, J) is the minor on rows I and columns J.
Matrix compound(const Matrix& m, int i);

// Same SFT and radius, tables replaced by their i-th compounds.
MatrixGenerator exterior_generator(const MatrixGenerator& g, int i);

// diag(1, A): keeps log ||A~^n(x)|| finite; ||A~^n|| = max(1, ||A^n||).
MatrixGenerator augment(const MatrixGenerator& g);

// C_1 = max over window pairs of ||A_w - A_w'|| * b^{r alpha}. Distinct
// windows force d(x, y) >= b^{-r}, so ||A(x) - A(y)|| <= C_1 d(x, y)^alpha.
double holder_constant(const MatrixGenerator& g);

}  // namespace cocyclelab
