#include "cocyclelab/linalg.hpp"

#include "cocyclelab/errors.hpp"

#include <cmath>
#include <limits>

namespace cocyclelab {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotPrimitive: return "NotPrimitive";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kNotClosable: return "NotClosable";
    case ErrorCode::kInadmissibleWindow: return "InadmissibleWindow";
    case ErrorCode::kInadmissibleOrbit: return "InadmissibleOrbit";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kHypothesisUnavailable: return "HypothesisUnavailable";
    case ErrorCode::kObstructionFailed: return "ObstructionFailed";
    case ErrorCode::kCoverageIncomplete: return "CoverageIncomplete";
    case ErrorCode::kSingularWindow: return "SingularWindow";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kSchemaError: return "SchemaError";
  }
  return "Unknown";
}

namespace {

std::string join_violations(const std::vector<std::string>& v) {
  std::string out = "schema violations:";
  for (const auto& s : v) {
    out += "\n  - ";
    out += s;
  }
  return out;
}

}  // namespace

SchemaError::SchemaError(std::vector<std::string> violations)
    : Error(ErrorCode::kSchemaError, join_violations(violations)),
      violations_(std::move(violations)) {}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  if (m.rows() == 2 && m.cols() == 2) {
    // sigma_max^2 = (F + sqrt(F^2 - 4 det^2)) / 2 with F the squared
    // Frobenius norm.
    const double f = m.squaredNorm();
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double disc = std::max(0.0, f * f - 4.0 * det * det);
    return std::sqrt(0.5 * (f + std::sqrt(disc)));
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

SingularRange singular_range(const Matrix& m) {
  if (m.size() == 0) return {};
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  return {s(s.size() - 1), s(0)};
}

bool is_exact_zero(const Matrix& m) {
  return (m.array() == 0.0).all();
}

bool is_numerically_singular(const Matrix& m, double threshold) {
  if (is_exact_zero(m)) return true;
  if (m.rows() != m.cols()) return true;
  if (m.determinant() == 0.0) return true;
  const auto range = singular_range(m);
  return range.min < threshold * range.max;
}

double log_abs_det(const Matrix& m) {
  if (is_numerically_singular(m)) {
    return -std::numeric_limits<double>::infinity();
  }
  // Sum of log |u_ii| from LU avoids overflow of the determinant itself.
  Eigen::PartialPivLU<Matrix> lu(m);
  const Matrix& u = lu.matrixLU();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) acc += std::log(std::abs(u(i, i)));
  return acc;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

}  // namespace cocyclelab
