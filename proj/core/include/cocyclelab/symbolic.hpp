#pragma once

// Two-sided subshifts of finite type: points, shift, metric, periodic orbits,
// and the constructive shadowing and closing maps.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cocyclelab {

using Symbol = int;
using Word = std::vector<Symbol>;

// Upper bound on enumeration sizes (words visited, cylinder counts) unless a
// caller passes its own.
inline constexpr std::size_t kDefaultBudget = std::size_t{1} << 26;

// Digits when every symbol is < 10 ("0110"), comma separated otherwise.
std::string format_word(const Word& w);
// Inverse of format_word. Throws Error(kInvalidArgument) on malformed input.
Word parse_word(std::string_view text);

using TransitionMatrix = std::vector<std::vector<int>>;

// Least S with T^S entrywise positive. Throws NotPrimitive when no power up to
// k^2 is positive (Wielandt's bound makes that search exhaustive).
int mixing_constant(const TransitionMatrix& transitions);

class Sft {
 public:
  // Validates shape, 0/1 entries, no empty row or column, primitivity and
  // metric_base > 1.
  Sft(TransitionMatrix transitions, double metric_base = 2.0);

  static Sft full_shift(int alphabet_size, double metric_base = 2.0);

  int alphabet_size() const noexcept { return static_cast<int>(transitions_.size()); }
  const TransitionMatrix& transitions() const noexcept { return transitions_; }
  double metric_base() const noexcept { return metric_base_; }
  // Expansion rate of the shift for this metric: log(metric_base).
  double theta() const noexcept;
  int mixing_constant() const noexcept { return mixing_constant_; }

  bool allowed(Symbol from, Symbol to) const noexcept {
    return transitions_[from][to] != 0;
  }
  bool is_symbol(Symbol a) const noexcept { return a >= 0 && a < alphabet_size(); }
  bool is_admissible(const Word& w) const noexcept;
  // Admissible and closes up: T[w_last][w_0] = 1.
  bool is_cyclically_admissible(const Word& w) const noexcept;

  // Lexicographically smallest word c of exactly `length` symbols such that
  // from, c_0, ..., c_{length-1}, to is admissible.
  std::optional<Word> connector(Symbol from, Symbol to, int length) const;
  // Lexicographically smallest among the shortest such words.
  std::optional<Word> shortest_connector(Symbol from, Symbol to) const;

  // Number of admissible words of the given length (saturates at UINT64_MAX).
  std::uint64_t count_words(int length) const;

  friend bool operator==(const Sft&, const Sft&) = default;

 private:
  TransitionMatrix transitions_;
  double metric_base_ = 2.0;
  int mixing_constant_ = 1;
};

// Visits admissible words of `length` in lexicographic order. Throws
// BudgetExceeded before visiting anything if the count exceeds `budget`.
void for_each_word(const Sft& s, int length,
                   const std::function<void(const Word&)>& visit,
                   std::size_t budget = kDefaultBudget);
std::vector<Word> admissible_words(const Sft& s, int length,
                                   std::size_t budget = kDefaultBudget);

// An eventually periodic bi-infinite sequence:
//   ... left left left | core (indices [core_start, core_end)) | right right ...
class SymbolicPoint {
 public:
  // Validates nonempty cycles, symbols in range and every junction.
  SymbolicPoint(const Sft& s, Word left_cycle, Word core, long core_start,
                Word right_cycle);

  // symbol_at(n) = cycle[(n - phase) mod |cycle|].
  static SymbolicPoint periodic(const Sft& s, const Word& cycle, long phase = 0);

  // Point whose symbols on [start, start + |core|) are `core`, extended on each
  // side by repeatedly taking the smallest admissible neighbour.
  static SymbolicPoint extend(const Sft& s, Word core, long core_start);

  Symbol symbol_at(long n) const;
  // Symbols at indices [from, from + length).
  Word window(long from, long length) const;

  const Word& left_cycle() const noexcept { return left_; }
  const Word& core() const noexcept { return core_; }
  const Word& right_cycle() const noexcept { return right_; }
  long core_start() const noexcept { return core_start_; }
  long core_end() const noexcept { return core_start_ + static_cast<long>(core_.size()); }

  // Sequence equality (different representations of the same point compare
  // equal).
  friend bool operator==(const SymbolicPoint& a, const SymbolicPoint& b);

 private:
  SymbolicPoint() = default;
  friend SymbolicPoint shift(const SymbolicPoint& x, long k);

  Word left_;
  Word core_;
  long core_start_ = 0;
  Word right_;
};

// f^k: shift(x, k).symbol_at(n) == x.symbol_at(n + k).
SymbolicPoint shift(const SymbolicPoint& x, long k);

struct Distance {
  double value = 0.0;
  // min{|n| : x_n != y_n}, absent when no disagreement was found.
  std::optional<long> mismatch;
  // True when x and y agree on every |n| <= horizon.
  bool agrees_to_horizon = false;
};

// d(x, y) = b^{-m}, m = min{|n| : x_n != y_n}, scanning |n| <= horizon.
Distance metric(const Sft& s, const SymbolicPoint& x, const SymbolicPoint& y,
                long horizon);
// Exact distance: the horizon is chosen large enough that agreement up to it
// implies x == y.
Distance distance(const Sft& s, const SymbolicPoint& x, const SymbolicPoint& y);

Word least_rotation(const Word& w);
// Shortest u with w = u^k.
Word primitive_root(const Word& w);
// Strictly smaller than all of its proper rotations.
bool is_lyndon(const Word& w);

class PeriodicOrbit {
 public:
  // Reduces w to its primitive root and least rotation. Throws
  // InadmissibleOrbit unless w is cyclically admissible.
  static PeriodicOrbit from_word(const Sft& s, const Word& w);

  const Word& word() const noexcept { return word_; }
  int period() const noexcept { return static_cast<int>(word_.size()); }
  std::string to_string() const { return format_word(word_); }

  // The orbit point with symbol_at(0) == word()[0].
  SymbolicPoint point(const Sft& s) const { return SymbolicPoint::periodic(s, word_); }

  friend bool operator==(const PeriodicOrbit&, const PeriodicOrbit&) = default;
  friend std::strong_ordering operator<=>(const PeriodicOrbit& a,
                                          const PeriodicOrbit& b) {
    if (auto c = a.word_.size() <=> b.word_.size(); c != 0) return c;
    return a.word_ <=> b.word_;
  }

 private:
  explicit PeriodicOrbit(Word w) : word_(std::move(w)) {}
  Word word_;
};

// One canonical representative per orbit of least period <= max_period,
// sorted by (period, word). Throws BudgetExceeded when more than `budget`
// words would be visited.
std::vector<PeriodicOrbit> enumerate_periodic_orbits(
    const Sft& s, int max_period, std::size_t budget = kDefaultBudget);

// Periodic point shadowing an orbit segment of x.
struct Shadow {
  SymbolicPoint point;    // aligned with x: agrees on the shadowed indices
  Word block;             // repeated block, occupying [block_start, block_start + return_time)
  long block_start = 0;   // 0, or -n when centered
  int segment_length = 0; // N: indices block_start .. block_start + N are copied
  int return_time = 0;    // N + S, so f^{return_time}(point) == point
  PeriodicOrbit orbit;
};

// Copies x on [0, n] (or [-n, n] when centered) and closes the block with the
// smallest connector of length S - 1.
Shadow shadow_segment(const Sft& s, const SymbolicPoint& x, int n, bool centered);

struct ShadowCheck {
  bool holds = true;
  // Per j in 0..N: mismatch exponent of d(f^j p, f^j x) on the shifted
  // segment, absent when the two shifted points coincide.
  std::vector<std::optional<long>> mismatch;
};

// Exact verification of d(f^j p, f^j x) < b^{-min(j, N - j)} for j = 0..N
// (delta = 1, theta = log b), by integer comparison of mismatch exponents.
ShadowCheck check_shadowing(const Sft& s, const Shadow& shadow, const SymbolicPoint& x);

struct ClosingReport {
  SymbolicPoint z;            // extends w and returns close: z_n = w_0
  SymbolicPoint y;            // past of z, future of p
  double closing_distance = 0.0;  // d(f^n z, z)
  double c2 = 0.0;            // smallest constant making all three bounds hold
};

struct Closing {
  PeriodicOrbit orbit;
  SymbolicPoint point;  // periodization of w with point_0 = w_0
  std::optional<ClosingReport> report;
};

// Throws NotClosable when T[w_{n-1}][w_0] = 0.
Closing anosov_close(const Sft& s, const Word& w, bool check);

// Periodic point whose cycle (also stored as the core at [0, |cycle|))
// contains every admissible word of length `depth`.
SymbolicPoint transitive_point(const Sft& s, int depth,
                               std::size_t budget = kDefaultBudget);

}  // namespace cocyclelab
