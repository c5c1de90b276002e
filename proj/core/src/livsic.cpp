#include "cocyclelab/livsic.hpp"

#include "cocyclelab/errors.hpp"
#include "cocyclelab/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace cocyclelab {

namespace {

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, msg);
}

[[noreturn]] void uncovered(const Word& w) {
  throw Error(ErrorCode::kCoverageIncomplete,
              "transfer table has no entry for cylinder '" + format_word(w) + "'");
}

void require_invertible(const MatrixGenerator& g) {
  for (std::size_t s = 0; s < g.window_count(); ++s) {
    if (is_numerically_singular(g.matrices()[s])) {
      throw Error(ErrorCode::kSingularWindow,
                  "window '" + format_word(g.windows()[s]) + "' has a singular matrix");
    }
  }
}

// Random admissible word: uniform first symbol, then uniform allowed
// successors.
Word random_word(const Sft& s, int length, Rng& rng) {
  Word w;
  w.reserve(static_cast<std::size_t>(length));
  const int k = s.alphabet_size();
  std::vector<double> weights(static_cast<std::size_t>(k), 1.0);
  w.push_back(static_cast<Symbol>(rng.categorical(weights)));
  while (static_cast<int>(w.size()) < length) {
    for (Symbol b = 0; b < k; ++b) weights[static_cast<std::size_t>(b)] = s.allowed(w.back(), b) ? 1.0 : 0.0;
    w.push_back(static_cast<Symbol>(rng.categorical(weights)));
  }
  return w;
}

}  // namespace

const Matrix& TransferTable::at(const SymbolicPoint& x) const {
  const Word w = x.window(-offset(), depth);
  const auto it = entries.find(w);
  if (it == entries.end()) uncovered(w);
  return it->second;
}

nlohmann::json to_json(const TransferTable& t) {
  nlohmann::json entries = nlohmann::json::object();
  for (const auto& [w, m] : t.entries) {
    nlohmann::json row_major = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) row_major.push_back(m(i, j));
    }
    entries[format_word(w)] = std::move(row_major);
  }
  return {{"depth", t.depth},
          {"dim", t.dim},
          {"offset", t.offset()},
          {"oscillation", t.oscillation},
          {"steps_walked", t.steps_walked},
          {"entries", std::move(entries)}};
}

TransferTable transfer_table_from_json(const nlohmann::json& j) {
  std::vector<std::string> errors;
  TransferTable t;
  if (!j.is_object()) throw SchemaError({"transfer table must be a JSON object"});
  for (const auto& [key, value] : j.items()) {
    static const std::set<std::string> known = {"depth",       "dim",          "offset",
                                                "oscillation", "steps_walked", "entries"};
    if (!known.contains(key)) errors.push_back("transfer table: unknown key '" + key + "'");
  }
  auto positive_int = [&](const char* key, int& out) {
    if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<long>() < 1) {
      errors.push_back(std::string("transfer table: '") + key + "' must be a positive integer");
      return;
    }
    out = j[key].get<int>();
  };
  positive_int("depth", t.depth);
  positive_int("dim", t.dim);
  if (j.contains("oscillation")) {
    if (j["oscillation"].is_number()) {
      t.oscillation = j["oscillation"].get<double>();
    } else {
      errors.push_back("transfer table: 'oscillation' must be a number");
    }
  }
  if (j.contains("steps_walked")) {
    if (j["steps_walked"].is_number_unsigned()) {
      t.steps_walked = j["steps_walked"].get<std::size_t>();
    } else {
      errors.push_back("transfer table: 'steps_walked' must be a nonnegative integer");
    }
  }
  if (!j.contains("entries") || !j["entries"].is_object()) {
    errors.push_back("transfer table: 'entries' must be an object");
  } else if (errors.empty()) {
    const auto n = static_cast<std::size_t>(t.dim) * static_cast<std::size_t>(t.dim);
    for (const auto& [key, value] : j["entries"].items()) {
      Word w;
      try {
        w = parse_word(key);
      } catch (const Error& e) {
        errors.push_back("transfer table entry '" + key + "': " + e.what());
        continue;
      }
      if (static_cast<int>(w.size()) != t.depth) {
        errors.push_back("transfer table entry '" + key + "': length differs from depth");
        continue;
      }
      if (!value.is_array() || value.size() != n ||
          !std::all_of(value.begin(), value.end(), [](const auto& v) { return v.is_number(); })) {
        errors.push_back("transfer table entry '" + key + "': expected " + std::to_string(n) +
                         " numbers");
        continue;
      }
      Matrix m(t.dim, t.dim);
      for (int i = 0; i < t.dim; ++i) {
        for (int c = 0; c < t.dim; ++c) {
          m(i, c) = value[static_cast<std::size_t>(i * t.dim + c)].get<double>();
        }
      }
      t.entries.emplace(std::move(w), std::move(m));
    }
  }
  if (!errors.empty()) throw SchemaError(std::move(errors));
  return t;
}

ObstructionCheck check_periodic_obstruction(const MatrixGenerator& g, int max_period, double tol,
                                            std::size_t budget) {
  if (max_period < 1) invalid("max_period must be >= 1");
  if (!(tol >= 0.0)) invalid("tol must be >= 0");
  ObstructionCheck out;
  const Matrix id = Matrix::Identity(g.dim(), g.dim());
  for (const auto& orbit : enumerate_periodic_orbits(g.sft(), max_period, budget)) {
    const ScaledMatrix prod = cocycle_product(g, orbit.point(g.sft()), orbit.period(), budget);
    const double defect = prod.log_norm() > 700.0 ? std::numeric_limits<double>::infinity()
                                                  : spectral_norm(prod.value() - id);
    ++out.orbits_checked;
    if (!out.witness && !(defect <= tol)) {
      out.witness = orbit;
      out.witness_defect = defect;
    }
    if (!out.worst_orbit || defect > out.worst_defect) {
      out.worst_defect = defect;
      out.worst_orbit = orbit;
    }
  }
  out.holds = !out.witness;
  return out;
}

TransferTable solve_coboundary(const MatrixGenerator& g, int depth, std::size_t orbit_budget,
                               const SolveOptions& opts) {
  if (depth < 1) invalid("depth must be >= 1");
  const Sft& s = g.sft();
  const auto obstruction = check_periodic_obstruction(g, opts.obstruction_period, opts.tol, opts.budget);
  if (!obstruction.holds) {
    throw Error(ErrorCode::kObstructionFailed,
                "periodic obstruction fails at orbit '" + obstruction.witness->to_string() +
                    "' with defect " + std::to_string(obstruction.witness_defect));
  }
  require_invertible(g);

  TransferTable t;
  t.depth = depth;
  t.dim = g.dim();
  const Matrix gauge = opts.gauge.value_or(Matrix::Identity(g.dim(), g.dim()));
  if (gauge.rows() != g.dim() || gauge.cols() != g.dim() || is_numerically_singular(gauge)) {
    invalid("gauge must be an invertible dim x dim matrix");
  }
  const SymbolicPoint x0 =
      opts.start ? *opts.start : transitive_point(s, std::max(depth, g.window_length()), opts.budget);
  // A periodic base point needs one full period plus the return to x0.
  std::size_t steps = orbit_budget;
  if (!opts.start) steps = std::min(steps, x0.core().size());

  const int r = g.radius();
  const int h = t.offset();
  // Symbols [-max(h, r), steps + max(depth - h, r + 1)) cover every window
  // read along the walk.
  const long lo = -std::max(h, r);
  const long hi = static_cast<long>(steps) + std::max(depth - h, r + 1);
  const Word symbols = x0.window(lo, hi - lo);
  const auto slots = g.slots_along(Word(symbols.begin() + (-r - lo), symbols.end()));

  Matrix current = gauge;
  for (std::size_t k = 0; k <= steps; ++k) {
    const auto first = symbols.begin() + static_cast<long>(k) + (-h - lo);
    Word cylinder(first, first + depth);
    auto [it, inserted] = t.entries.try_emplace(std::move(cylinder), current);
    if (!inserted) t.oscillation = std::max(t.oscillation, spectral_norm(current - it->second));
    if (k == steps) break;
    current = g.matrices()[slots[k]] * current;
  }
  t.steps_walked = steps;

  for_each_word(
      s, depth,
      [&](const Word& w) {
        if (!t.entries.contains(w)) uncovered(w);
      },
      opts.budget);
  return t;
}

CoboundaryCheck verify_coboundary(const MatrixGenerator& g, const TransferTable& t,
                                  std::size_t samples, std::uint64_t seed, std::size_t budget) {
  if (t.dim != g.dim()) invalid("transfer table dimension differs from the generator");
  const int r = g.radius();
  const int h = t.offset();
  const int lo = std::min(-r, -h);
  const int hi = std::max(r, t.depth - h);  // inclusive; P(f x) reads up to depth - h
  const int length = hi - lo + 1;

  std::map<Word, Matrix> inverses;
  for (const auto& [w, m] : t.entries) inverses.emplace(w, m.fullPivLu().inverse());

  CoboundaryCheck out;
  out.window_start = lo;
  auto check = [&](const Word& w) {
    const Word a_window(w.begin() + (-r - lo), w.begin() + (-r - lo) + g.window_length());
    const Word here(w.begin() + (-h - lo), w.begin() + (-h - lo) + t.depth);
    const Word next(w.begin() + (1 - h - lo), w.begin() + (1 - h - lo) + t.depth);
    const auto p_next = t.entries.find(next);
    if (p_next == t.entries.end()) uncovered(next);
    const auto p_inv = inverses.find(here);
    if (p_inv == inverses.end()) uncovered(here);
    const double defect = spectral_norm(g.at(a_window) - p_next->second * p_inv->second);
    if (out.worst_window.empty() || defect > out.max_defect) {
      out.max_defect = defect;
      out.worst_window = w;
    }
  };
  for_each_word(
      g.sft(), length,
      [&](const Word& w) {
        check(w);
        ++out.windows_checked;
      },
      budget);
  Rng rng(seed);
  for (std::size_t i = 0; i < samples; ++i) {
    check(random_word(g.sft(), length, rng));
    ++out.samples_checked;
  }
  return out;
}

InverseHolderReport inverse_holder_bound(const MatrixGenerator& g) {
  require_invertible(g);
  InverseHolderReport out;
  std::vector<Matrix> inverses;
  inverses.reserve(g.window_count());
  out.c = 0.0;
  out.c_literal = 0.0;
  for (const auto& m : g.matrices()) {
    inverses.push_back(m.fullPivLu().inverse());
    const double norm = spectral_norm(m);
    out.c = std::max({out.c, norm, spectral_norm(inverses.back())});
    out.c_literal = std::max({out.c_literal, norm, 1.0 / norm});
  }
  out.c1 = holder_constant(g);
  out.bound = out.c * out.c * out.c1;

  const int r = g.radius();
  const double b = g.sft().metric_base();
  for (std::size_t i = 0; i < g.window_count(); ++i) {
    for (std::size_t j = i + 1; j < g.window_count(); ++j) {
      const Word& u = g.windows()[i];
      const Word& v = g.windows()[j];
      int m = r;
      for (int a = 0; a <= r; ++a) {
        if (u[static_cast<std::size_t>(r + a)] != v[static_cast<std::size_t>(r + a)] ||
            u[static_cast<std::size_t>(r - a)] != v[static_cast<std::size_t>(r - a)]) {
          m = a;
          break;
        }
      }
      const double lhs = spectral_norm(inverses[i] - inverses[j]);
      const double rhs = out.bound * std::pow(b, -g.alpha() * m);
      double ratio = 0.0;
      if (lhs > 0.0) ratio = rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity();
      out.max_ratio = std::max(out.max_ratio, ratio);
      ++out.pairs_checked;
    }
  }
  // Rounding in the inverses can push an exactly tight pair a hair over.
  out.holds = out.max_ratio <= 1.0 + 1e-12;
  return out;
}

double periodic_defect_bound(const TransferTable& t, double delta0, int k) {
  if (k < 1) invalid("period must be >= 1");
  double max_norm = 0.0;
  double max_inverse = 0.0;
  for (const auto& [w, m] : t.entries) {
    max_norm = std::max(max_norm, spectral_norm(m));
    max_inverse = std::max(max_inverse, spectral_norm(m.fullPivLu().inverse()));
  }
  const double kappa = max_norm * max_inverse;
  return kappa * std::expm1(k * std::log1p(kappa * delta0));
}

}  // namespace cocyclelab
