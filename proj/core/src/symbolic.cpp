#include "cocyclelab/symbolic.hpp"

#include "cocyclelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>

namespace cocyclelab {

namespace {

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, msg);
}

using BoolMatrix = std::vector<std::vector<char>>;

BoolMatrix bool_product(const BoolMatrix& a, const BoolMatrix& b) {
  const std::size_t k = a.size();
  BoolMatrix c(k, std::vector<char>(k, 0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t l = 0; l < k; ++l) {
      if (!a[i][l]) continue;
      for (std::size_t j = 0; j < k; ++j) c[i][j] |= b[l][j];
    }
  }
  return c;
}

bool all_positive(const BoolMatrix& m) {
  for (const auto& row : m) {
    if (std::find(row.begin(), row.end(), 0) != row.end()) return false;
  }
  return true;
}

// Greedy walk taking the smallest successor (forward) or predecessor
// (backward) of `start`. Returns the symbols strictly after `start` split into
// a transient prefix and the cycle it falls into, both in walk order.
std::pair<Word, Word> greedy_walk(const Sft& s, Symbol start, bool forward) {
  const int k = s.alphabet_size();
  auto step = [&](Symbol a) {
    for (Symbol b = 0; b < k; ++b) {
      if (forward ? s.allowed(a, b) : s.allowed(b, a)) return b;
    }
    return Symbol{-1};  // unreachable: no empty rows or columns
  };
  Word seq;
  std::map<Symbol, std::size_t> seen;
  Symbol cur = step(start);
  while (!seen.contains(cur)) {
    seen.emplace(cur, seq.size());
    seq.push_back(cur);
    cur = step(cur);
  }
  const std::size_t i = seen.at(cur);
  return {Word(seq.begin(), seq.begin() + static_cast<long>(i)),
          Word(seq.begin() + static_cast<long>(i), seq.end())};
}

}  // namespace

std::string format_word(const Word& w) {
  const bool digits = std::all_of(w.begin(), w.end(), [](Symbol a) { return a >= 0 && a < 10; });
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (digits) {
      out.push_back(static_cast<char>('0' + w[i]));
    } else {
      if (i > 0) out.push_back(',');
      out += std::to_string(w[i]);
    }
  }
  return out;
}

Word parse_word(std::string_view text) {
  Word w;
  if (text.find(',') != std::string_view::npos) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t next = std::min(text.find(',', pos), text.size());
      const std::string_view tok = text.substr(pos, next - pos);
      if (tok.empty()) invalid("empty symbol in word '" + std::string(text) + "'");
      Symbol v = 0;
      for (char ch : tok) {
        if (ch < '0' || ch > '9') invalid("bad symbol in word '" + std::string(text) + "'");
        v = v * 10 + (ch - '0');
      }
      w.push_back(v);
      pos = next + 1;
    }
    return w;
  }
  for (char ch : text) {
    if (ch < '0' || ch > '9') invalid("bad symbol in word '" + std::string(text) + "'");
    w.push_back(ch - '0');
  }
  return w;
}

int mixing_constant(const TransitionMatrix& transitions) {
  const std::size_t k = transitions.size();
  if (k == 0) invalid("empty transition matrix");
  BoolMatrix t(k, std::vector<char>(k, 0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) t[i][j] = transitions[i][j] != 0;
  }
  BoolMatrix power = t;
  const std::size_t limit = k * k;
  for (std::size_t n = 1; n <= limit; ++n) {
    if (all_positive(power)) return static_cast<int>(n);
    power = bool_product(power, t);
  }
  throw Error(ErrorCode::kNotPrimitive, "transition matrix is not primitive");
}

Sft::Sft(TransitionMatrix transitions, double metric_base)
    : transitions_(std::move(transitions)), metric_base_(metric_base) {
  const std::size_t k = transitions_.size();
  if (k == 0) invalid("alphabet must be nonempty");
  if (!(metric_base_ > 1.0) || !std::isfinite(metric_base_)) {
    invalid("metric_base must be a finite number > 1");
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (transitions_[i].size() != k) {
      invalid("transition row " + std::to_string(i) + " has length " +
              std::to_string(transitions_[i].size()) + ", expected " + std::to_string(k));
    }
    for (int v : transitions_[i]) {
      if (v != 0 && v != 1) invalid("transition entries must be 0 or 1");
    }
  }
  for (std::size_t i = 0; i < k; ++i) {
    bool row = false;
    bool col = false;
    for (std::size_t j = 0; j < k; ++j) {
      row |= transitions_[i][j] != 0;
      col |= transitions_[j][i] != 0;
    }
    if (!row) invalid("symbol " + std::to_string(i) + " has no successor");
    if (!col) invalid("symbol " + std::to_string(i) + " has no predecessor");
  }
  mixing_constant_ = cocyclelab::mixing_constant(transitions_);
}

Sft Sft::full_shift(int alphabet_size, double metric_base) {
  if (alphabet_size < 1) invalid("alphabet must be nonempty");
  return Sft(TransitionMatrix(alphabet_size, std::vector<int>(alphabet_size, 1)), metric_base);
}

double Sft::theta() const noexcept { return std::log(metric_base_); }

bool Sft::is_admissible(const Word& w) const noexcept {
  for (Symbol a : w) {
    if (!is_symbol(a)) return false;
  }
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (!allowed(w[i - 1], w[i])) return false;
  }
  return true;
}

bool Sft::is_cyclically_admissible(const Word& w) const noexcept {
  return !w.empty() && is_admissible(w) && allowed(w.back(), w.front());
}

std::optional<Word> Sft::connector(Symbol from, Symbol to, int length) const {
  if (length < 0 || !is_symbol(from) || !is_symbol(to)) return std::nullopt;
  const int k = alphabet_size();
  if (length == 0) {
    return allowed(from, to) ? std::optional<Word>(Word{}) : std::nullopt;
  }
  // reach[i][a]: symbol a at position i can still complete the path to `to`.
  std::vector<std::vector<char>> reach(length, std::vector<char>(k, 0));
  for (Symbol a = 0; a < k; ++a) reach[length - 1][a] = allowed(a, to);
  for (int i = length - 2; i >= 0; --i) {
    for (Symbol a = 0; a < k; ++a) {
      for (Symbol b = 0; b < k && !reach[i][a]; ++b) {
        reach[i][a] = allowed(a, b) && reach[i + 1][b];
      }
    }
  }
  Word out;
  Symbol prev = from;
  for (int i = 0; i < length; ++i) {
    Symbol pick = -1;
    for (Symbol a = 0; a < k; ++a) {
      if (allowed(prev, a) && reach[i][a]) {
        pick = a;
        break;
      }
    }
    if (pick < 0) return std::nullopt;
    out.push_back(pick);
    prev = pick;
  }
  return out;
}

std::optional<Word> Sft::shortest_connector(Symbol from, Symbol to) const {
  for (int len = 0; len <= alphabet_size(); ++len) {
    if (auto c = connector(from, to, len)) return c;
  }
  return std::nullopt;
}

std::uint64_t Sft::count_words(int length) const {
  if (length <= 0) return 1;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  const int k = alphabet_size();
  std::vector<std::uint64_t> v(k, 1);
  for (int step = 1; step < length; ++step) {
    std::vector<std::uint64_t> next(k, 0);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        if (!allowed(a, b)) continue;
        next[a] = (next[a] > kMax - v[b]) ? kMax : next[a] + v[b];
      }
    }
    v = std::move(next);
  }
  std::uint64_t total = 0;
  for (auto x : v) total = (total > kMax - x) ? kMax : total + x;
  return total;
}

void for_each_word(const Sft& s, int length, const std::function<void(const Word&)>& visit,
                   std::size_t budget) {
  if (length < 0) invalid("word length must be nonnegative");
  if (s.count_words(length) > budget) {
    throw Error(ErrorCode::kBudgetExceeded,
                "admissible words of length " + std::to_string(length) + " exceed budget " +
                    std::to_string(budget));
  }
  if (length == 0) {
    visit(Word{});
    return;
  }
  Word w;
  w.reserve(static_cast<std::size_t>(length));
  const int k = s.alphabet_size();
  std::function<void()> grow = [&] {
    if (static_cast<int>(w.size()) == length) {
      visit(w);
      return;
    }
    for (Symbol a = 0; a < k; ++a) {
      if (!w.empty() && !s.allowed(w.back(), a)) continue;
      w.push_back(a);
      grow();
      w.pop_back();
    }
  };
  grow();
}

std::vector<Word> admissible_words(const Sft& s, int length, std::size_t budget) {
  std::vector<Word> out;
  for_each_word(s, length, [&](const Word& w) { out.push_back(w); }, budget);
  return out;
}

// SymbolicPoint

SymbolicPoint::SymbolicPoint(const Sft& s, Word left_cycle, Word core, long core_start,
                             Word right_cycle)
    : left_(std::move(left_cycle)),
      core_(std::move(core)),
      core_start_(core_start),
      right_(std::move(right_cycle)) {
  if (left_.empty() || right_.empty()) invalid("point cycles must be nonempty");
  if (!s.is_cyclically_admissible(left_)) invalid("left cycle is not cyclically admissible");
  if (!s.is_cyclically_admissible(right_)) invalid("right cycle is not cyclically admissible");
  if (!s.is_admissible(core_)) invalid("core word is not admissible");
  const Symbol after_left = core_.empty() ? right_.front() : core_.front();
  if (!s.allowed(left_.back(), after_left)) invalid("left junction is not admissible");
  if (!core_.empty() && !s.allowed(core_.back(), right_.front())) {
    invalid("right junction is not admissible");
  }
}

SymbolicPoint SymbolicPoint::periodic(const Sft& s, const Word& cycle, long phase) {
  if (!s.is_cyclically_admissible(cycle)) {
    throw Error(ErrorCode::kInadmissibleOrbit,
                "word '" + format_word(cycle) + "' is not cyclically admissible");
  }
  return SymbolicPoint(s, cycle, Word{}, phase, cycle);
}

SymbolicPoint SymbolicPoint::extend(const Sft& s, Word core, long core_start) {
  if (core.empty()) invalid("extend needs a nonempty core");
  if (!s.is_admissible(core)) invalid("core word '" + format_word(core) + "' is not admissible");
  auto [left_prefix, left_cycle_rev] = greedy_walk(s, core.front(), false);
  auto [right_prefix, right_cycle] = greedy_walk(s, core.back(), true);
  // Backward walk order runs away from the core; flip to index order.
  std::reverse(left_prefix.begin(), left_prefix.end());
  std::reverse(left_cycle_rev.begin(), left_cycle_rev.end());
  Word full = left_prefix;
  full.insert(full.end(), core.begin(), core.end());
  full.insert(full.end(), right_prefix.begin(), right_prefix.end());
  const long start = core_start - static_cast<long>(left_prefix.size());
  return SymbolicPoint(s, std::move(left_cycle_rev), std::move(full), start,
                       std::move(right_cycle));
}

Symbol SymbolicPoint::symbol_at(long n) const {
  const long ce = core_end();
  if (n >= core_start_ && n < ce) return core_[static_cast<std::size_t>(n - core_start_)];
  if (n >= ce) {
    return right_[static_cast<std::size_t>((n - ce) % static_cast<long>(right_.size()))];
  }
  const long len = static_cast<long>(left_.size());
  const long m = core_start_ - 1 - n;
  return left_[static_cast<std::size_t>(len - 1 - (m % len))];
}

Word SymbolicPoint::window(long from, long length) const {
  Word w(static_cast<std::size_t>(std::max(0L, length)));
  for (long i = 0; i < length; ++i) w[static_cast<std::size_t>(i)] = symbol_at(from + i);
  return w;
}

namespace {

// Indices outside [lo, hi] lie in the periodic tails of both points, so
// agreement on [lo, hi] forces agreement everywhere.
std::pair<long, long> resolving_range(const SymbolicPoint& a, const SymbolicPoint& b) {
  const long lo = std::min(a.core_start(), b.core_start()) -
                  static_cast<long>(a.left_cycle().size() * b.left_cycle().size());
  const long hi = std::max(a.core_end(), b.core_end()) +
                  static_cast<long>(a.right_cycle().size() * b.right_cycle().size());
  return {lo, hi};
}

}  // namespace

bool operator==(const SymbolicPoint& a, const SymbolicPoint& b) {
  const auto [lo, hi] = resolving_range(a, b);
  for (long n = lo; n <= hi; ++n) {
    if (a.symbol_at(n) != b.symbol_at(n)) return false;
  }
  return true;
}

SymbolicPoint shift(const SymbolicPoint& x, long k) {
  SymbolicPoint y = x;
  y.core_start_ -= k;
  return y;
}

Distance metric(const Sft& s, const SymbolicPoint& x, const SymbolicPoint& y, long horizon) {
  for (long m = 0; m <= horizon; ++m) {
    if (x.symbol_at(m) != y.symbol_at(m) || x.symbol_at(-m) != y.symbol_at(-m)) {
      return {std::pow(s.metric_base(), -static_cast<double>(m)), m, false};
    }
  }
  return {0.0, std::nullopt, true};
}

Distance distance(const Sft& s, const SymbolicPoint& x, const SymbolicPoint& y) {
  const auto [lo, hi] = resolving_range(x, y);
  return metric(s, x, y, std::max(std::abs(lo), std::abs(hi)) + 1);
}

Word least_rotation(const Word& w) {
  Word best = w;
  Word rot = w;
  for (std::size_t i = 1; i < w.size(); ++i) {
    std::rotate(rot.begin(), rot.begin() + 1, rot.end());
    if (rot < best) best = rot;
  }
  return best;
}

Word primitive_root(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i) ok = w[i] == w[i - p];
    if (ok) return Word(w.begin(), w.begin() + static_cast<long>(p));
  }
  return w;
}

bool is_lyndon(const Word& w) {
  // First step of Duval's factorization: w is Lyndon iff the scan reaches the
  // end with the comparison pointer reset to the start.
  const std::size_t n = w.size();
  if (n == 0) return false;
  std::size_t j = 1;
  std::size_t k = 0;
  while (j < n && w[k] <= w[j]) {
    k = (w[k] < w[j]) ? 0 : k + 1;
    ++j;
  }
  return j == n && k == 0;
}

PeriodicOrbit PeriodicOrbit::from_word(const Sft& s, const Word& w) {
  if (!s.is_cyclically_admissible(w)) {
    throw Error(ErrorCode::kInadmissibleOrbit,
                "word '" + format_word(w) + "' is not cyclically admissible");
  }
  return PeriodicOrbit(least_rotation(primitive_root(w)));
}

std::vector<PeriodicOrbit> enumerate_periodic_orbits(const Sft& s, int max_period,
                                                     std::size_t budget) {
  if (max_period < 1) invalid("max_period must be >= 1");
  std::uint64_t total = 0;
  for (int n = 1; n <= max_period; ++n) {
    const auto c = s.count_words(n);
    total = (total > std::numeric_limits<std::uint64_t>::max() - c) ? c : total + c;
    if (c > budget || total > budget) {
      throw Error(ErrorCode::kBudgetExceeded,
                  "periodic orbit enumeration up to period " + std::to_string(max_period) +
                      " exceeds budget " + std::to_string(budget));
    }
  }
  std::vector<PeriodicOrbit> out;
  for (int n = 1; n <= max_period; ++n) {
    for_each_word(
        s, n,
        [&](const Word& w) {
          if (s.allowed(w.back(), w.front()) && is_lyndon(w)) {
            out.push_back(PeriodicOrbit::from_word(s, w));
          }
        },
        budget);
  }
  return out;
}

Shadow shadow_segment(const Sft& s, const SymbolicPoint& x, int n, bool centered) {
  if (n < 0) invalid("segment length must be nonnegative");
  const int segment = centered ? 2 * n : n;
  const long start = centered ? -static_cast<long>(n) : 0;
  Word block = x.window(start, segment + 1);
  const int S = s.mixing_constant();
  // T^S > 0 guarantees a path of S steps from the last copied symbol back to
  // the first.
  const auto link = s.connector(block.back(), block.front(), S - 1);
  if (!link) throw Error(ErrorCode::kNotPrimitive, "no connector of length S-1");
  block.insert(block.end(), link->begin(), link->end());
  SymbolicPoint p = SymbolicPoint::periodic(s, block, start);
  PeriodicOrbit orbit = PeriodicOrbit::from_word(s, block);
  const int ret = static_cast<int>(block.size());
  return Shadow{std::move(p), std::move(block), start, segment, ret, std::move(orbit)};
}

ShadowCheck check_shadowing(const Sft& s, const Shadow& shadow, const SymbolicPoint& x) {
  ShadowCheck out;
  const int N = shadow.segment_length;
  out.mismatch.reserve(static_cast<std::size_t>(N) + 1);
  for (int j = 0; j <= N; ++j) {
    const long k = shadow.block_start + j;
    const Distance d = distance(s, shift(shadow.point, k), shift(x, k));
    out.mismatch.push_back(d.mismatch);
    // d < b^{-e}  <=>  mismatch exponent > e.
    const long e = std::min(j, N - j);
    if (d.mismatch && *d.mismatch <= e) out.holds = false;
  }
  return out;
}

Closing anosov_close(const Sft& s, const Word& w, bool check) {
  if (w.empty() || !s.is_admissible(w)) {
    invalid("word '" + format_word(w) + "' is not admissible");
  }
  if (!s.allowed(w.back(), w.front())) {
    throw Error(ErrorCode::kNotClosable,
                "word '" + format_word(w) + "' cannot be closed: T[last][first] = 0");
  }
  Closing out{PeriodicOrbit::from_word(s, w), SymbolicPoint::periodic(s, w), std::nullopt};
  if (!check) return out;

  const long n = static_cast<long>(w.size());
  Word zcore = w;
  zcore.push_back(w.front());
  SymbolicPoint z = SymbolicPoint::extend(s, zcore, 0);
  // y follows z for negative indices and p from index 0 on.
  Word ycore = z.window(z.core_start(), -z.core_start());
  ycore.insert(ycore.end(), w.begin(), w.end());
  SymbolicPoint y(s, z.left_cycle(), ycore, z.core_start(), w);

  const double b = s.metric_base();
  const double dz = distance(s, shift(z, n), z).value;
  auto ratio = [&](double num, double scale) {
    if (num == 0.0) return 0.0;
    const double den = scale * dz;
    return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
  };
  double c2 = 0.0;
  const SymbolicPoint& p = out.point;
  for (long j = 0; j <= n; ++j) {
    const auto zj = shift(z, j);
    const auto pj = shift(p, j);
    const auto yj = shift(y, j);
    c2 = std::max(c2, ratio(distance(s, zj, pj).value,
                            std::pow(b, -static_cast<double>(std::min(j, n - j)))));
    c2 = std::max(c2, ratio(distance(s, yj, pj).value, std::pow(b, -static_cast<double>(j))));
    c2 = std::max(c2, ratio(distance(s, zj, yj).value, std::pow(b, -static_cast<double>(n - j))));
  }
  out.report = ClosingReport{std::move(z), std::move(y), dz, c2};
  return out;
}

SymbolicPoint transitive_point(const Sft& s, int depth, std::size_t budget) {
  if (depth < 1) invalid("depth must be >= 1");
  const auto words = admissible_words(s, depth, budget);
  Word cycle;
  auto append = [&](const Word& u) {
    if (!cycle.empty()) {
      const auto link = s.shortest_connector(cycle.back(), u.front());
      cycle.insert(cycle.end(), link->begin(), link->end());
    }
    cycle.insert(cycle.end(), u.begin(), u.end());
    if (cycle.size() > budget) {
      throw Error(ErrorCode::kBudgetExceeded, "transitive point exceeds budget");
    }
  };
  for (const auto& u : words) append(u);
  const auto closing = s.shortest_connector(cycle.back(), cycle.front());
  cycle.insert(cycle.end(), closing->begin(), closing->end());
  return SymbolicPoint(s, cycle, cycle, 0, cycle);
}

}  // namespace cocyclelab
