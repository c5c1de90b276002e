#include "cocyclelab/cocycle.hpp"

#include "cocyclelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cocyclelab {

namespace {

constexpr std::size_t kDenseSlotLimit = std::size_t{1} << 22;

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, msg);
}

[[noreturn]] void inadmissible(const Word& w) {
  throw Error(ErrorCode::kInadmissibleWindow,
              "window '" + format_word(w) + "' is not in the generator table");
}

std::optional<std::size_t> code_space(int k, int length) {
  std::size_t size = 1;
  for (int i = 0; i < length; ++i) {
    size *= static_cast<std::size_t>(k);
    if (size > kDenseSlotLimit) return std::nullopt;
  }
  return size;
}

std::size_t window_code(const Word& w, int k) {
  std::size_t c = 0;
  for (Symbol a : w) c = c * static_cast<std::size_t>(k) + static_cast<std::size_t>(a);
  return c;
}

}  // namespace

MatrixGenerator::MatrixGenerator(Sft sft, int dim, int radius, Table table, double alpha)
    : sft_(std::move(sft)), dim_(dim), radius_(radius), alpha_(alpha) {
  if (dim_ < 1) invalid("generator dimension must be >= 1");
  if (radius_ < 0) invalid("generator radius must be >= 0");
  if (!(alpha_ > 0.0 && alpha_ <= 1.0)) invalid("alpha must lie in (0, 1]");
  const int len = window_length();
  const auto expected = admissible_words(sft_, len);
  for (const auto& [w, m] : table) {
    if (static_cast<int>(w.size()) != len) {
      invalid("table window '" + format_word(w) + "' has length " + std::to_string(w.size()) +
              ", expected " + std::to_string(len));
    }
    if (!sft_.is_admissible(w)) inadmissible(w);
    if (m.rows() != dim_ || m.cols() != dim_) {
      invalid("table entry '" + format_word(w) + "' is not " + std::to_string(dim_) + "x" +
              std::to_string(dim_));
    }
    if (!m.allFinite()) invalid("table entry '" + format_word(w) + "' has non-finite entries");
  }
  for (const auto& w : expected) {
    if (!table.contains(w)) {
      invalid("table is missing admissible window '" + format_word(w) + "'");
    }
  }
  windows_.reserve(table.size());
  matrices_.reserve(table.size());
  for (auto& [w, m] : table) {
    windows_.push_back(w);
    matrices_.push_back(std::move(m));
  }
  if (const auto space = code_space(sft_.alphabet_size(), len)) {
    dense_slot_.assign(*space, -1);
    for (std::size_t i = 0; i < windows_.size(); ++i) {
      dense_slot_[window_code(windows_[i], sft_.alphabet_size())] = static_cast<int>(i);
    }
  }
}

std::optional<std::size_t> MatrixGenerator::slot(const Word& window) const {
  if (static_cast<int>(window.size()) != window_length()) return std::nullopt;
  for (Symbol a : window) {
    if (!sft_.is_symbol(a)) return std::nullopt;
  }
  if (!dense_slot_.empty()) {
    const int s = dense_slot_[window_code(window, sft_.alphabet_size())];
    if (s < 0) return std::nullopt;
    return static_cast<std::size_t>(s);
  }
  const auto it = std::lower_bound(windows_.begin(), windows_.end(), window);
  if (it == windows_.end() || *it != window) return std::nullopt;
  return static_cast<std::size_t>(it - windows_.begin());
}

const Matrix& MatrixGenerator::at(const Word& window) const {
  const auto s = slot(window);
  if (!s) inadmissible(window);
  return matrices_[*s];
}

std::vector<std::size_t> MatrixGenerator::slots_along(const Word& symbols) const {
  const long len = window_length();
  const long count = static_cast<long>(symbols.size()) - len + 1;
  std::vector<std::size_t> out;
  if (count <= 0) return out;
  out.reserve(static_cast<std::size_t>(count));
  const int k = sft_.alphabet_size();
  if (!dense_slot_.empty()) {
    std::size_t modulus = 1;
    for (long i = 0; i < len; ++i) modulus *= static_cast<std::size_t>(k);
    std::size_t code = 0;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      const Symbol a = symbols[i];
      if (!sft_.is_symbol(a)) inadmissible(Word{a});
      code = (code * static_cast<std::size_t>(k) + static_cast<std::size_t>(a)) % modulus;
      if (static_cast<long>(i) + 1 < len) continue;
      const int s = dense_slot_[code];
      if (s < 0) {
        const auto first = symbols.begin() + static_cast<long>(i) + 1 - len;
        inadmissible(Word(first, first + len));
      }
      out.push_back(static_cast<std::size_t>(s));
    }
    return out;
  }
  for (long i = 0; i < count; ++i) {
    const Word w(symbols.begin() + i, symbols.begin() + i + len);
    const auto s = slot(w);
    if (!s) inadmissible(w);
    out.push_back(*s);
  }
  return out;
}

MatrixGenerator::Table MatrixGenerator::table() const {
  Table t;
  for (std::size_t i = 0; i < windows_.size(); ++i) t.emplace(windows_[i], matrices_[i]);
  return t;
}

// ScaledMatrix

ScaledMatrix::ScaledMatrix(Matrix body, double log_scale)
    : body_(std::move(body)), log_scale_(log_scale) {}

ScaledMatrix ScaledMatrix::identity(int dim) {
  return ScaledMatrix(Matrix::Identity(dim, dim), 0.0);
}

ScaledMatrix ScaledMatrix::from(const Matrix& m) {
  ScaledMatrix s(m, 0.0);
  s.normalize();
  return s;
}

bool ScaledMatrix::is_zero() const noexcept {
  return log_scale_ == -std::numeric_limits<double>::infinity();
}

Matrix ScaledMatrix::value() const {
  if (is_zero()) return Matrix::Zero(body_.rows(), body_.cols());
  return std::exp(log_scale_) * body_;
}

bool ScaledMatrix::is_singular(double threshold) const {
  return is_zero() || is_numerically_singular(body_, threshold);
}

void ScaledMatrix::normalize() {
  if (is_zero()) return;
  // Max-abs prescale keeps the norm computation itself from overflowing.
  const double peak = body_.cwiseAbs().maxCoeff();
  if (peak == 0.0) {
    body_.setZero();
    log_scale_ = -std::numeric_limits<double>::infinity();
    return;
  }
  body_ /= peak;
  const double norm = spectral_norm(body_);
  body_ /= norm;
  log_scale_ += std::log(peak) + std::log(norm);
}

void ScaledMatrix::left_multiply(const Matrix& m) {
  if (is_zero()) return;
  body_ = m * body_;
  normalize();
}

ScaledMatrix operator*(const ScaledMatrix& a, const ScaledMatrix& b) {
  if (a.is_zero() || b.is_zero()) {
    return ScaledMatrix(Matrix::Zero(a.body_.rows(), b.body_.cols()),
                        -std::numeric_limits<double>::infinity());
  }
  ScaledMatrix out(a.body_ * b.body_, a.log_scale_ + b.log_scale_);
  out.normalize();
  return out;
}

double relative_difference(const ScaledMatrix& a, const ScaledMatrix& b) {
  if (a.is_zero() && b.is_zero()) return 0.0;
  if (a.is_zero() || b.is_zero()) return std::numeric_limits<double>::infinity();
  const double delta = b.log_scale() - a.log_scale();
  if (delta > 700.0) return std::numeric_limits<double>::infinity();
  return spectral_norm(a.body() - std::exp(delta) * b.body());
}

Word window_at(const MatrixGenerator& g, const SymbolicPoint& x, long index) {
  return x.window(index - g.radius(), g.window_length());
}

const Matrix& evaluate(const MatrixGenerator& g, const SymbolicPoint& x) {
  return g.at(window_at(g, x));
}

ScaledMatrix word_product(const MatrixGenerator& g, const Word& symbols) {
  ScaledMatrix acc = ScaledMatrix::identity(g.dim());
  for (std::size_t s : g.slots_along(symbols)) acc.left_multiply(g.matrices()[s]);
  return acc;
}

ScaledMatrix cocycle_product(const MatrixGenerator& g, const SymbolicPoint& x, long n,
                             std::size_t budget) {
  if (n < 0) invalid("cocycle_product needs n >= 0");
  if (static_cast<std::size_t>(n) > budget) {
    throw Error(ErrorCode::kBudgetExceeded,
                "product length " + std::to_string(n) + " exceeds budget " + std::to_string(budget));
  }
  if (n == 0) return ScaledMatrix::identity(g.dim());
  return word_product(g, x.window(-g.radius(), n + 2L * g.radius()));
}

std::vector<std::vector<int>> index_subsets(int d, int i) {
  std::vector<std::vector<int>> out;
  if (i < 0 || i > d) return out;
  std::vector<int> cur(static_cast<std::size_t>(i));
  for (int j = 0; j < i; ++j) cur[static_cast<std::size_t>(j)] = j;
  while (true) {
    out.push_back(cur);
    int pos = i - 1;
    while (pos >= 0 && cur[static_cast<std::size_t>(pos)] == d - i + pos) --pos;
    if (pos < 0) break;
    ++cur[static_cast<std::size_t>(pos)];
    for (int j = pos + 1; j < i; ++j) {
      cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

Matrix compound(const Matrix& m, int i) {
  if (m.rows() != m.cols()) invalid("compound needs a square matrix");
  const int d = static_cast<int>(m.rows());
  if (i < 1 || i > d) invalid("compound order must lie in 1..d");
  const auto subsets = index_subsets(d, i);
  const auto n = static_cast<Eigen::Index>(subsets.size());
  Matrix out(n, n);
  Matrix minor(i, i);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& rows = subsets[static_cast<std::size_t>(r)];
      const auto& cols = subsets[static_cast<std::size_t>(c)];
      for (int a = 0; a < i; ++a) {
        for (int b = 0; b < i; ++b) {
          minor(a, b) = m(rows[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
        }
      }
      out(r, c) = minor.determinant();
    }
  }
  return out;
}

MatrixGenerator exterior_generator(const MatrixGenerator& g, int i) {
  if (i < 1 || i > g.dim()) invalid("exterior power order must lie in 1..d");
  MatrixGenerator::Table t;
  for (std::size_t s = 0; s < g.window_count(); ++s) {
    t.emplace(g.windows()[s], compound(g.matrices()[s], i));
  }
  return MatrixGenerator(g.sft(), static_cast<int>(binomial(g.dim(), i)), g.radius(),
                         std::move(t), g.alpha());
}

MatrixGenerator augment(const MatrixGenerator& g) {
  MatrixGenerator::Table t;
  const int d = g.dim();
  for (std::size_t s = 0; s < g.window_count(); ++s) {
    Matrix m = Matrix::Zero(d + 1, d + 1);
    m(0, 0) = 1.0;
    m.bottomRightCorner(d, d) = g.matrices()[s];
    t.emplace(g.windows()[s], std::move(m));
  }
  return MatrixGenerator(g.sft(), d + 1, g.radius(), std::move(t), g.alpha());
}

double holder_constant(const MatrixGenerator& g) {
  double max_diff = 0.0;
  const auto& mats = g.matrices();
  for (std::size_t a = 0; a < mats.size(); ++a) {
    for (std::size_t b = a + 1; b < mats.size(); ++b) {
      max_diff = std::max(max_diff, spectral_norm(mats[a] - mats[b]));
    }
  }
  return max_diff * std::pow(g.sft().metric_base(), g.radius() * g.alpha());
}

}  // namespace cocyclelab
