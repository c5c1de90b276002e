#include "config.hpp"

#include <cocyclelab/errors.hpp>
#include <cocyclelab/families.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace cocyclelab::app {

using nlohmann::json;

namespace {

const std::set<std::string> kStringParams = {"point", "word", "window", "table_path"};

const std::set<std::string> kParamKeys = {
    "steps",       "seed",       "orbit_budget", "samples",     "budget",       "max_period",
    "depth",       "n_max",      "growth_n_max", "verify_n",    "n",            "point_start",
    "exterior",    "obstruction_period",          "rho",         "tau",          "eps",
    "c",           "tol",        "defect_tol",   "centered",    "determinant",  "ground_truth",
    "point",       "word",       "window",       "table_path",  "rho_grid",     "tau_grid",
    "gauge"};

const std::set<std::string> kBuiltins = {"identity", "constant", "diagonal-by-symbol",
                                         "rotation-by-symbol", "coboundary-from-P"};

// Collects violations with their JSON paths instead of stopping at the first.
class Checker {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  bool object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    fail(path, "must be an object");
    return false;
  }

  void known_keys(const json& obj, const std::set<std::string>& keys, const std::string& path) {
    for (const auto& [k, v] : obj.items()) {
      if (!keys.contains(k)) fail(path, "unknown key '" + k + "'");
    }
  }

  std::optional<double> number(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    const auto& v = obj[key];
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      fail(path + "." + key, "must be a finite number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<long long> integer(const json& obj, const std::string& key, const std::string& path,
                                   long long min_value) {
    if (!obj.contains(key)) return std::nullopt;
    const auto& v = obj[key];
    if (!v.is_number_integer()) {
      fail(path + "." + key, "must be an integer");
      return std::nullopt;
    }
    const long long x = v.get<long long>();
    if (x < min_value) {
      fail(path + "." + key, "must be >= " + std::to_string(min_value));
      return std::nullopt;
    }
    return x;
  }

  std::optional<std::uint64_t> unsigned_integer(const json& obj, const std::string& key,
                                                const std::string& path, std::uint64_t min_value) {
    if (!obj.contains(key)) return std::nullopt;
    const auto& v = obj[key];
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0)) {
      fail(path + "." + key, "must be a nonnegative integer");
      return std::nullopt;
    }
    const auto x = v.get<std::uint64_t>();
    if (x < min_value) {
      fail(path + "." + key, "must be >= " + std::to_string(min_value));
      return std::nullopt;
    }
    return x;
  }

  std::optional<bool> boolean(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj[key].is_boolean()) {
      fail(path + "." + key, "must be true or false");
      return std::nullopt;
    }
    return obj[key].get<bool>();
  }

  std::optional<std::string> string(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj[key].is_string()) {
      fail(path + "." + key, "must be a string");
      return std::nullopt;
    }
    return obj[key].get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const json& v, const std::string& path) {
    if (!v.is_array()) {
      fail(path, "must be an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        fail(path + "[" + std::to_string(i) + "]", "must be a finite number");
        return std::nullopt;
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  // Nested rows [[..], ..] or row-major flat. dim < 0 infers a square size.
  std::optional<Matrix> matrix(const json& v, int dim, const std::string& path) {
    if (!v.is_array() || v.empty()) {
      fail(path, "must be a nonempty array");
      return std::nullopt;
    }
    if (v.front().is_array()) {
      const int n = dim < 0 ? static_cast<int>(v.size()) : dim;
      if (static_cast<int>(v.size()) != n) {
        fail(path, "expected " + std::to_string(n) + " rows, got " + std::to_string(v.size()));
        return std::nullopt;
      }
      Matrix m(n, n);
      for (int i = 0; i < n; ++i) {
        const std::string row_path = path + "[" + std::to_string(i) + "]";
        auto row = numbers(v[static_cast<std::size_t>(i)], row_path);
        if (!row) return std::nullopt;
        if (static_cast<int>(row->size()) != n) {
          fail(row_path, "expected " + std::to_string(n) + " entries, got " + std::to_string(row->size()));
          return std::nullopt;
        }
        for (int j = 0; j < n; ++j) m(i, j) = (*row)[static_cast<std::size_t>(j)];
      }
      return m;
    }
    auto flat = numbers(v, path);
    if (!flat) return std::nullopt;
    int n = dim;
    if (n < 0) {
      n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(flat->size()))));
    }
    if (static_cast<std::size_t>(n) * static_cast<std::size_t>(n) != flat->size()) {
      fail(path, "expected " + std::to_string(n * n) + " row-major entries, got " +
                     std::to_string(flat->size()));
      return std::nullopt;
    }
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m(i, j) = (*flat)[static_cast<std::size_t>(i * n + j)];
    }
    return m;
  }

  std::optional<std::map<Word, Matrix>> table(const json& v, int dim, const std::string& path) {
    if (!object(v, path)) return std::nullopt;
    std::map<Word, Matrix> out;
    bool ok = true;
    for (const auto& [key, entry] : v.items()) {
      const std::string entry_path = path + "['" + key + "']";
      Word w;
      try {
        w = parse_word(key);
      } catch (const Error& e) {
        fail(entry_path, e.what());
        ok = false;
        continue;
      }
      auto m = matrix(entry, dim, entry_path);
      if (!m) {
        ok = false;
        continue;
      }
      out.emplace(std::move(w), std::move(*m));
    }
    if (!ok) return std::nullopt;
    return out;
  }
};

json parse_override_value(const std::string& key, const std::string& text) {
  const std::string leaf = key.substr(key.find_last_of('.') + 1);
  if (kStringParams.contains(leaf) || leaf == "dir" || leaf == "builtin" || leaf == "kind") {
    return text;
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return text;
  }
}

void apply_overrides(json& doc, const Overrides& overrides) {
  for (const auto& [key, text] : overrides) {
    std::vector<std::string> path;
    if (key.find('.') == std::string::npos) {
      path = {"params", key};
    } else {
      std::stringstream ss(key);
      std::string part;
      while (std::getline(ss, part, '.')) path.push_back(part);
    }
    json* node = &doc;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      if (!node->contains(path[i]) || !(*node)[path[i]].is_object()) (*node)[path[i]] = json::object();
      node = &(*node)[path[i]];
    }
    (*node)[path.back()] = parse_override_value(key, text);
  }
}

std::optional<Sft> build_sft(Checker& ck, const json& doc) {
  if (!doc.contains("sft")) {
    ck.fail("sft", "section is required");
    return std::nullopt;
  }
  const json& sec = doc["sft"];
  if (!ck.object(sec, "sft")) return std::nullopt;
  ck.known_keys(sec, {"alphabet", "transitions", "metric_base"}, "sft");
  const auto alphabet = ck.integer(sec, "alphabet", "sft", 1);
  if (!sec.contains("alphabet")) ck.fail("sft.alphabet", "is required");
  const double base = ck.number(sec, "metric_base", "sft").value_or(2.0);
  if (!(base > 1.0)) ck.fail("sft.metric_base", "must be > 1");
  if (!alphabet) return std::nullopt;
  const int k = static_cast<int>(*alphabet);
  TransitionMatrix t(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(k), 1));
  bool ok = true;
  if (sec.contains("transitions")) {
    const json& rows = sec["transitions"];
    if (!rows.is_array() || static_cast<int>(rows.size()) != k) {
      ck.fail("sft.transitions", "must have " + std::to_string(k) + " rows");
      ok = false;
    } else {
      for (int i = 0; i < k; ++i) {
        const std::string row_path = "sft.transitions[" + std::to_string(i) + "]";
        const json& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != k) {
          ck.fail(row_path, "must have length " + std::to_string(k) + ", got " +
                                (row.is_array() ? std::to_string(row.size()) : "a non-array"));
          ok = false;
          continue;
        }
        for (int j = 0; j < k; ++j) {
          const json& e = row[static_cast<std::size_t>(j)];
          if (!e.is_number_integer() || (e.get<int>() != 0 && e.get<int>() != 1)) {
            ck.fail(row_path + "[" + std::to_string(j) + "]", "must be 0 or 1");
            ok = false;
            continue;
          }
          t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = e.get<int>();
        }
      }
    }
  }
  if (!ok || !(base > 1.0)) return std::nullopt;
  try {
    return Sft(std::move(t), base);
  } catch (const Error& e) {
    ck.fail("sft", e.what());
    return std::nullopt;
  }
}

std::optional<MatrixGenerator> build_generator(Checker& ck, const json& doc, const Sft* sft,
                                               std::string& family) {
  if (!doc.contains("generator")) {
    ck.fail("generator", "section is required");
    return std::nullopt;
  }
  const json& sec = doc["generator"];
  if (!ck.object(sec, "generator")) return std::nullopt;
  ck.known_keys(sec, {"dim", "radius", "alpha", "table", "builtin", "params"}, "generator");
  const double alpha = ck.number(sec, "alpha", "generator").value_or(1.0);
  if (!(alpha > 0.0 && alpha <= 1.0)) ck.fail("generator.alpha", "must lie in (0, 1]");
  const bool has_table = sec.contains("table");
  const bool has_builtin = sec.contains("builtin");
  if (has_table == has_builtin) {
    ck.fail("generator", "exactly one of 'table' and 'builtin' is required");
    return std::nullopt;
  }

  if (has_table) {
    family = "table";
    if (sec.contains("params")) ck.fail("generator.params", "only allowed with 'builtin'");
    const auto dim = ck.integer(sec, "dim", "generator", 1);
    if (!sec.contains("dim")) ck.fail("generator.dim", "is required with 'table'");
    const auto radius = ck.integer(sec, "radius", "generator", 0).value_or(0);
    if (!dim) return std::nullopt;
    auto table = ck.table(sec["table"], static_cast<int>(*dim), "generator.table");
    if (!table || !sft || !(alpha > 0.0 && alpha <= 1.0)) return std::nullopt;
    try {
      return MatrixGenerator(*sft, static_cast<int>(*dim), static_cast<int>(radius),
                             std::move(*table), alpha);
    } catch (const Error& e) {
      ck.fail("generator.table", e.what());
      return std::nullopt;
    }
  }

  for (const char* key : {"dim", "radius"}) {
    if (sec.contains(key)) ck.fail(std::string("generator.") + key, "not allowed with 'builtin'; use generator.params");
  }
  const auto name = ck.string(sec, "builtin", "generator");
  if (!name) return std::nullopt;
  family = *name;
  if (!kBuiltins.contains(*name)) {
    ck.fail("generator.builtin", "unknown family '" + *name + "'");
    return std::nullopt;
  }
  const json params = sec.value("params", json::object());
  const std::string path = "generator.params";
  if (!ck.object(params, path)) return std::nullopt;

  std::optional<MatrixGenerator> out;
  auto guarded = [&](auto&& make) {
    if (!sft || !(alpha > 0.0 && alpha <= 1.0)) return;
    try {
      out = make();
    } catch (const Error& e) {
      ck.fail(path, e.what());
    }
  };
  const int k = sft ? sft->alphabet_size() : 0;
  auto per_symbol_count = [&](std::size_t n, const std::string& key) {
    if (sft && static_cast<int>(n) != k) {
      ck.fail(path + "." + key, "needs one entry per symbol (" + std::to_string(k) + ")");
      return false;
    }
    return true;
  };

  if (*name == "identity") {
    ck.known_keys(params, {"dim"}, path);
    const auto dim = ck.integer(params, "dim", path, 1).value_or(2);
    guarded([&] { return identity_generator(*sft, static_cast<int>(dim), alpha); });
  } else if (*name == "constant") {
    ck.known_keys(params, {"matrix"}, path);
    if (!params.contains("matrix")) {
      ck.fail(path + ".matrix", "is required");
      return std::nullopt;
    }
    auto m = ck.matrix(params["matrix"], -1, path + ".matrix");
    if (m) guarded([&] { return constant_generator(*sft, *m, alpha); });
  } else if (*name == "diagonal-by-symbol") {
    ck.known_keys(params, {"diagonals"}, path);
    if (!params.contains("diagonals") || !params["diagonals"].is_array()) {
      ck.fail(path + ".diagonals", "is required and must be an array of arrays");
      return std::nullopt;
    }
    std::vector<std::vector<double>> diagonals;
    bool ok = true;
    for (std::size_t i = 0; i < params["diagonals"].size(); ++i) {
      const std::string p = path + ".diagonals[" + std::to_string(i) + "]";
      auto d = ck.numbers(params["diagonals"][i], p);
      if (!d || d->empty()) {
        if (d) ck.fail(p, "must be nonempty");
        ok = false;
        continue;
      }
      if (!diagonals.empty() && d->size() != diagonals.front().size()) {
        ck.fail(p, "length differs from the first diagonal");
        ok = false;
      }
      diagonals.push_back(std::move(*d));
    }
    if (ok && per_symbol_count(diagonals.size(), "diagonals")) {
      guarded([&] { return diagonal_by_symbol(*sft, diagonals, alpha); });
    }
  } else if (*name == "rotation-by-symbol") {
    ck.known_keys(params, {"angles", "scales"}, path);
    if (!params.contains("angles")) {
      ck.fail(path + ".angles", "is required");
      return std::nullopt;
    }
    auto angles = ck.numbers(params["angles"], path + ".angles");
    std::optional<std::vector<double>> scales = std::vector<double>{};
    if (params.contains("scales")) scales = ck.numbers(params["scales"], path + ".scales");
    if (angles && scales && per_symbol_count(angles->size(), "angles") &&
        (scales->empty() || per_symbol_count(scales->size(), "scales"))) {
      guarded([&] { return rotation_by_symbol(*sft, *angles, *scales, alpha); });
    }
  } else if (*name == "coboundary-from-P") {
    ck.known_keys(params, {"dim", "transfer_radius", "table"}, path);
    const auto dim = ck.integer(params, "dim", path, 1);
    if (!params.contains("dim")) ck.fail(path + ".dim", "is required");
    const auto q = ck.integer(params, "transfer_radius", path, 0).value_or(0);
    if (!params.contains("table")) {
      ck.fail(path + ".table", "is required");
      return std::nullopt;
    }
    if (!dim) return std::nullopt;
    auto table = ck.table(params["table"], static_cast<int>(*dim), path + ".table");
    if (table) {
      guarded([&] { return coboundary_generator(*sft, static_cast<int>(q), *table, alpha); });
    }
  }
  return out;
}

std::optional<ErgodicMeasure> build_measure(Checker& ck, const json& doc, const Sft* sft) {
  if (!doc.contains("measure")) return std::nullopt;
  const json& sec = doc["measure"];
  if (!ck.object(sec, "measure")) return std::nullopt;
  ck.known_keys(sec, {"kind", "probabilities", "matrix"}, "measure");
  const auto kind = ck.string(sec, "kind", "measure");
  if (!kind) {
    if (!sec.contains("kind")) ck.fail("measure.kind", "is required");
    return std::nullopt;
  }
  try {
    if (*kind == "bernoulli") {
      if (sec.contains("matrix")) ck.fail("measure.matrix", "not allowed for a Bernoulli measure");
      if (!sec.contains("probabilities")) {
        ck.fail("measure.probabilities", "is required");
        return std::nullopt;
      }
      auto p = ck.numbers(sec["probabilities"], "measure.probabilities");
      if (!p || !sft) return std::nullopt;
      return ErgodicMeasure::bernoulli(*sft, std::move(*p));
    }
    if (*kind == "markov") {
      if (sec.contains("probabilities")) ck.fail("measure.probabilities", "not allowed for a Markov measure");
      if (!sec.contains("matrix") || !sec["matrix"].is_array()) {
        ck.fail("measure.matrix", "is required and must be an array of rows");
        return std::nullopt;
      }
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < sec["matrix"].size(); ++i) {
        auto row = ck.numbers(sec["matrix"][i], "measure.matrix[" + std::to_string(i) + "]");
        if (!row) return std::nullopt;
        rows.push_back(std::move(*row));
      }
      if (!sft) return std::nullopt;
      return ErgodicMeasure::markov(*sft, std::move(rows));
    }
  } catch (const Error& e) {
    ck.fail("measure", e.what());
    return std::nullopt;
  }
  ck.fail("measure.kind", "must be 'bernoulli' or 'markov'");
  return std::nullopt;
}

// Command defaults written into the resolved document so results record the
// values actually used.
void fill_defaults(json& params, const std::string& command, const std::string& family, int window_length) {
  auto dflt = [&](const char* key, json value) {
    if (!params.contains(key)) params[key] = std::move(value);
  };
  // Exact arithmetic families get the tight obstruction tolerance.
  const double tol = (family == "rotation-by-symbol" || family == "coboundary-from-P") ? 1e-6 : 1e-9;
  if (command == "spectrum") {
    dflt("steps", 100000);
    dflt("exterior", 1);
  } else if (command == "periodic-scan") {
    dflt("max_period", 6);
  } else if (command == "certify") {
    dflt("c", 2.0);
    dflt("max_period", 6);
    dflt("ground_truth", true);
  } else if (command == "growth-bound") {
    dflt("tau", 0.0);
    dflt("c", 2.0);
    dflt("n_max", 16);
    dflt("verify_n", 25);
  } else if (command == "shadow") {
    dflt("centered", false);
    dflt("point_start", 0);
  } else if (command == "livsic-check") {
    dflt("max_period", 6);
    dflt("tol", tol);
  } else if (command == "livsic-solve" || command == "livsic-verify") {
    dflt("depth", window_length);
    dflt("orbit_budget", 1000000);
    dflt("obstruction_period", 6);
    dflt("tol", tol);
    if (command == "livsic-verify") {
      dflt("samples", 1000);
      dflt("defect_tol", 1e-8);
      dflt("max_period", 6);
    }
  } else if (command == "contradiction") {
    dflt("c", 2.0);
    dflt("n_max", 10);
    dflt("growth_n_max", 16);
    dflt("determinant", false);
  }
}

Params read_params(Checker& ck, const json& p) {
  const std::string path = "params";
  Params out;
  ck.known_keys(p, kParamKeys, path);
  auto as_int = [](const std::optional<long long>& v) -> std::optional<int> {
    if (!v) return std::nullopt;
    return static_cast<int>(*v);
  };
  out.steps = ck.unsigned_integer(p, "steps", path, 1);
  out.seed = ck.unsigned_integer(p, "seed", path, 0);
  out.orbit_budget = ck.unsigned_integer(p, "orbit_budget", path, 1);
  out.samples = ck.unsigned_integer(p, "samples", path, 0);
  out.budget = ck.unsigned_integer(p, "budget", path, 1).value_or(kDefaultBudget);
  out.max_period = as_int(ck.integer(p, "max_period", path, 1));
  out.depth = as_int(ck.integer(p, "depth", path, 1));
  out.n_max = as_int(ck.integer(p, "n_max", path, 1));
  out.growth_n_max = as_int(ck.integer(p, "growth_n_max", path, 1));
  out.verify_n = as_int(ck.integer(p, "verify_n", path, 0));
  out.n = as_int(ck.integer(p, "n", path, 0));
  out.point_start = as_int(ck.integer(p, "point_start", path, std::numeric_limits<int>::min()));
  out.exterior = as_int(ck.integer(p, "exterior", path, 1));
  out.obstruction_period = as_int(ck.integer(p, "obstruction_period", path, 1));
  out.rho = ck.number(p, "rho", path);
  out.tau = ck.number(p, "tau", path);
  out.eps = ck.number(p, "eps", path);
  out.c = ck.number(p, "c", path);
  out.tol = ck.number(p, "tol", path);
  out.defect_tol = ck.number(p, "defect_tol", path);
  const std::pair<const char*, const std::optional<double>*> nonnegative[] = {
      {"rho", &out.rho}, {"tau", &out.tau}, {"tol", &out.tol}, {"defect_tol", &out.defect_tol}};
  for (const auto& [key, value] : nonnegative) {
    if (*value && **value < 0.0) ck.fail(path + "." + key, "must be >= 0");
  }
  if (out.eps && !(*out.eps > 0.0)) ck.fail(path + ".eps", "must be > 0");
  if (out.c && *out.c < 1.0) ck.fail(path + ".c", "must be >= 1");
  out.centered = ck.boolean(p, "centered", path);
  out.determinant = ck.boolean(p, "determinant", path);
  out.ground_truth = ck.boolean(p, "ground_truth", path);
  out.point = ck.string(p, "point", path);
  out.word = ck.string(p, "word", path);
  out.window = ck.string(p, "window", path);
  out.table_path = ck.string(p, "table_path", path);
  for (const auto* key : {"rho_grid", "tau_grid"}) {
    if (!p.contains(key)) continue;
    if (auto v = ck.numbers(p[key], path + "." + key)) {
      for (double x : *v) {
        if (x < 0.0) ck.fail(path + "." + key, "entries must be >= 0");
      }
      (std::string(key) == "rho_grid" ? out.rho_grid : out.tau_grid) = std::move(*v);
    }
  }
  if (p.contains("gauge")) out.gauge = ck.matrix(p["gauge"], -1, path + ".gauge");
  return out;
}

void require_for_command(Checker& ck, const std::string& command, const Params& p,
                         bool has_measure) {
  auto need = [&](bool present, const std::string& key) {
    if (!present) ck.fail("params." + key, "required for '" + command + "'");
  };
  if (is_stochastic(command) && !p.seed) ck.fail("params.seed", "seed required");
  if (command == "spectrum") {
    if (!has_measure) ck.fail("measure", "section required for 'spectrum'");
  } else if (command == "certify") {
    need(p.rho.has_value(), "rho");
    need(p.tau.has_value(), "tau");
  } else if (command == "growth-bound") {
    need(p.rho.has_value(), "rho");
  } else if (command == "shadow") {
    if (!p.point && !p.word) ck.fail("params", "'shadow' needs 'point' and n, or 'word'");
    if (p.point) need(p.n.has_value(), "n");
  } else if (command == "contradiction") {
    need(p.rho.has_value(), "rho");
    need(p.tau.has_value(), "tau");
  }
}

}  // namespace

bool is_stochastic(const std::string& command) {
  return command == "spectrum" || command == "livsic-verify";
}

std::optional<std::uint64_t> budget_from_env() {
  const char* raw = std::getenv("COCYCLELAB_BUDGET");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0' || v == 0) return std::nullopt;
  return v;
}

ExperimentConfig parse_config_json(json doc, const std::string& command, const Overrides& overrides,
                                   const std::optional<std::string>& out_dir) {
  Checker ck;
  bool known_command = false;
  for (const auto& c : command_names()) known_command |= c == command;
  if (!known_command) ck.fail("command", "unknown command '" + command + "'");
  if (!doc.is_object()) throw SchemaError({"config: top level must be an object"});
  apply_overrides(doc, overrides);
  ck.known_keys(doc, {"sft", "generator", "measure", "params", "output"}, "config");

  std::string family;
  auto sft = build_sft(ck, doc);
  auto gen = build_generator(ck, doc, sft ? &*sft : nullptr, family);
  auto measure = build_measure(ck, doc, sft ? &*sft : nullptr);

  json params = doc.value("params", json::object());
  if (!params.is_object()) {
    ck.fail("params", "must be an object");
    params = json::object();
  }
  fill_defaults(params, command, family, gen ? gen->window_length() : 1);
  Params p = read_params(ck, params);
  require_for_command(ck, command, p, doc.contains("measure"));
  if (gen && p.exterior && *p.exterior > gen->dim()) {
    ck.fail("params.exterior", "must not exceed the generator dimension");
  }

  std::string dir = out_dir.value_or(".");
  bool csv = false;
  if (doc.contains("output")) {
    const json& out = doc["output"];
    if (ck.object(out, "output")) {
      ck.known_keys(out, {"dir", "csv"}, "output");
      if (auto d = ck.string(out, "dir", "output"); d && !out_dir) dir = *d;
      csv = ck.boolean(out, "csv", "output").value_or(false);
    }
  }
  if (!ck.errors.empty()) throw SchemaError(std::move(ck.errors));

  if (auto cap = budget_from_env(); cap && *cap < p.budget) p.budget = *cap;
  doc["params"] = params;
  // The output location is not part of the experiment; leaving it out keeps
  // result documents identical across output directories.
  if (doc.contains("output")) doc["output"].erase("dir");
  return ExperimentConfig{command, std::move(doc),    std::move(*sft), std::move(*gen),
                          family,  std::move(measure), std::move(p),   dir, csv};
}

ExperimentConfig parse_config(const std::string& path, const std::string& command,
                              const Overrides& overrides, const std::optional<std::string>& out_dir) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError({std::string("config: invalid JSON: ") + e.what()});
  }
  return parse_config_json(std::move(doc), command, overrides, out_dir);
}

}  // namespace cocyclelab::app
