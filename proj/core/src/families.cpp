#include "cocyclelab/families.hpp"

#include "cocyclelab/errors.hpp"

#include <cmath>

namespace cocyclelab {

namespace {

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, msg);
}

}  // namespace

MatrixGenerator identity_generator(const Sft& s, int dim, double alpha) {
  return constant_generator(s, Matrix::Identity(dim, dim), alpha);
}

MatrixGenerator constant_generator(const Sft& s, const Matrix& a, double alpha) {
  return symbol_generator(s, std::vector<Matrix>(static_cast<std::size_t>(s.alphabet_size()), a),
                          alpha);
}

MatrixGenerator symbol_generator(const Sft& s, const std::vector<Matrix>& per_symbol,
                                 double alpha) {
  if (static_cast<int>(per_symbol.size()) != s.alphabet_size()) {
    invalid("need one matrix per symbol");
  }
  MatrixGenerator::Table t;
  for (Symbol a = 0; a < s.alphabet_size(); ++a) t.emplace(Word{a}, per_symbol[static_cast<std::size_t>(a)]);
  return MatrixGenerator(s, static_cast<int>(per_symbol.front().rows()), 0, std::move(t), alpha);
}

MatrixGenerator diagonal_by_symbol(const Sft& s, const std::vector<std::vector<double>>& diagonals,
                                   double alpha) {
  std::vector<Matrix> mats;
  for (const auto& diag : diagonals) {
    Vector v = Eigen::Map<const Vector>(diag.data(), static_cast<Eigen::Index>(diag.size()));
    mats.emplace_back(v.asDiagonal());
  }
  return symbol_generator(s, mats, alpha);
}

MatrixGenerator rotation_by_symbol(const Sft& s, const std::vector<double>& angles,
                                   const std::vector<double>& scales, double alpha) {
  if (!scales.empty() && scales.size() != angles.size()) {
    invalid("rotation scales must match angles");
  }
  std::vector<Matrix> mats;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    Matrix r(2, 2);
    const double c = std::cos(angles[i]);
    const double sn = std::sin(angles[i]);
    r << c, -sn, sn, c;
    if (!scales.empty()) r *= scales[i];
    mats.push_back(std::move(r));
  }
  return symbol_generator(s, mats, alpha);
}

MatrixGenerator coboundary_generator(const Sft& s, int transfer_radius,
                                     const std::map<Word, Matrix>& transfer, double alpha) {
  if (transfer_radius < 0) invalid("transfer radius must be >= 0");
  const int plen = 2 * transfer_radius + 1;
  std::map<Word, Matrix> inverse;
  for (const auto& w : admissible_words(s, plen)) {
    const auto it = transfer.find(w);
    if (it == transfer.end()) invalid("transfer table is missing window '" + format_word(w) + "'");
    if (is_numerically_singular(it->second)) {
      throw Error(ErrorCode::kSingularWindow,
                  "transfer entry '" + format_word(w) + "' is singular");
    }
    inverse.emplace(w, it->second.inverse());
  }
  // Window x_{-q-1} .. x_{q+1}: P(x) reads positions 1..2q+1, P(fx) reads
  // positions 2..2q+2.
  MatrixGenerator::Table t;
  for (const auto& w : admissible_words(s, plen + 2)) {
    const Word here(w.begin() + 1, w.begin() + 1 + plen);
    const Word next(w.begin() + 2, w.end());
    t.emplace(w, transfer.at(next) * inverse.at(here));
  }
  const int dim = static_cast<int>(transfer.begin()->second.rows());
  return MatrixGenerator(s, dim, transfer_radius + 1, std::move(t), alpha);
}

}  // namespace cocyclelab
