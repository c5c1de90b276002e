#include "testing.hpp"

#include <cocyclelab/errors.hpp>
#include <cocyclelab/symbolic.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace cocyclelab;
using testing_support::brute_words;
using testing_support::Gen;
using testing_support::golden_mean;

namespace {

// Least S with T^S > 0 by repeated boolean products.
int brute_mixing(const TransitionMatrix& t) {
  const auto k = t.size();
  Eigen::MatrixXi m(k, k), p(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) m(i, j) = t[i][j];
  p = m;
  for (int s = 1; s <= 100; ++s) {
    if ((p.array() > 0).all()) return s;
    p = ((p * m).array() > 0).cast<int>();
  }
  return -1;
}

long trace_of_power(const TransitionMatrix& t, int n) {
  const auto k = t.size();
  Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic> m(k, k), p;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) m(i, j) = t[i][j];
  p = m;
  for (int i = 1; i < n; ++i) p = p * m;
  return p.trace();
}

Word brute_least_rotation(const Word& w) {
  Word best = w;
  for (std::size_t i = 1; i < w.size(); ++i) {
    Word r(w.begin() + static_cast<long>(i), w.end());
    r.insert(r.end(), w.begin(), w.begin() + static_cast<long>(i));
    best = std::min(best, r);
  }
  return best;
}

Sft random_primitive(Gen& gen) {
  while (true) {
    const int k = gen.integer(2, 4);
    TransitionMatrix t(k, std::vector<int>(k));
    for (auto& row : t)
      for (auto& e : row) e = gen.uniform(0, 1) < 0.6 ? 1 : 0;
    if (brute_mixing(t) < 0) continue;
    return Sft(t);
  }
}

}  // namespace

TEST(Sft, MixingConstantMatchesBooleanPowers) {
  EXPECT_EQ(Sft::full_shift(3).mixing_constant(), 1);
  EXPECT_EQ(golden_mean().mixing_constant(), 2);
  Gen gen(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Sft s = random_primitive(gen);
    EXPECT_EQ(s.mixing_constant(), brute_mixing(s.transitions()));
  }
}

TEST(Sft, RejectsNonPrimitiveAndMalformedMatrices) {
  try {
    Sft({{0, 1}, {1, 0}});
    FAIL() << "periodic permutation accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotPrimitive);
  }
  EXPECT_THROW(Sft({{1, 1}, {1}}), Error);
  EXPECT_THROW(Sft({{1, 2}, {1, 1}}), Error);
  EXPECT_THROW(Sft({{1, 1}, {1, 1}}, 1.0), Error);
  EXPECT_THROW(mixing_constant({{1, 0}, {0, 1}}), Error);
}

TEST(Sft, CountWordsAgreesWithEnumeration) {
  Gen gen(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Sft s = random_primitive(gen);
    for (int len = 0; len <= 6; ++len) {
      EXPECT_EQ(s.count_words(len), brute_words(s, len).size());
      if (len > 0) EXPECT_EQ(admissible_words(s, len), brute_words(s, len));
    }
  }
}

TEST(Sft, ConnectorIsLexicographicallySmallest) {
  const Sft s = golden_mean();
  for (Symbol a = 0; a < 2; ++a)
    for (Symbol b = 0; b < 2; ++b)
      for (int len = 0; len <= 4; ++len) {
        std::optional<Word> best;
        for (const auto& w : len == 0 ? std::vector<Word>{Word{}} : brute_words(s, len)) {
          Word full{a};
          full.insert(full.end(), w.begin(), w.end());
          full.push_back(b);
          if (s.is_admissible(full) && (!best || w < *best)) best = w;
        }
        EXPECT_EQ(s.connector(a, b, len), best) << a << "->" << b << " len " << len;
      }
  EXPECT_EQ(s.shortest_connector(1, 1), Word{0});
}

TEST(Words, FormatAndParseRoundTrip) {
  EXPECT_EQ(format_word({0, 1, 1}), "011");
  EXPECT_EQ(format_word({3, 10, 0}), "3,10,0");
  EXPECT_EQ(parse_word("3,10,0"), (Word{3, 10, 0}));
  EXPECT_EQ(parse_word("0110"), (Word{0, 1, 1, 0}));
  EXPECT_THROW(parse_word("0a1"), Error);
  EXPECT_THROW(parse_word("1,,2"), Error);
}

TEST(PeriodicOrbits, CanonicalFormIsLeastPrimitiveRotation) {
  const Sft s = Sft::full_shift(3);
  EXPECT_EQ(PeriodicOrbit::from_word(s, {1, 0, 1, 0}).word(), (Word{0, 1}));
  EXPECT_EQ(PeriodicOrbit::from_word(s, {2, 1, 0}).word(), (Word{0, 2, 1}));
  EXPECT_THROW(PeriodicOrbit::from_word(golden_mean(), {1, 1}), Error);
  Gen gen(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Word w = gen.admissible_word(s, gen.integer(1, 8));
    const auto orbit = PeriodicOrbit::from_word(s, w);
    EXPECT_TRUE(is_lyndon(orbit.word()));
    EXPECT_EQ(least_rotation(w), brute_least_rotation(w));
    const Word root = primitive_root(w);
    Word rebuilt;
    while (rebuilt.size() < w.size()) rebuilt.insert(rebuilt.end(), root.begin(), root.end());
    EXPECT_EQ(rebuilt, w);
    EXPECT_EQ(orbit.word(), brute_least_rotation(root));
  }
}

TEST(PeriodicOrbits, CountsSatisfyTraceFormula) {
  Gen gen(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Sft s = trial == 0 ? golden_mean() : random_primitive(gen);
    const int max_period = 7;
    const auto orbits = enumerate_periodic_orbits(s, max_period);
    std::vector<long> by_period(max_period + 1, 0);
    for (const auto& o : orbits) ++by_period[static_cast<std::size_t>(o.period())];
    for (int n = 1; n <= max_period; ++n) {
      long points = 0;
      for (int d = 1; d <= n; ++d)
        if (n % d == 0) points += d * by_period[static_cast<std::size_t>(d)];
      EXPECT_EQ(points, trace_of_power(s.transitions(), n)) << "period " << n;
    }
    EXPECT_TRUE(std::is_sorted(orbits.begin(), orbits.end()));
    std::set<Word> distinct;
    for (const auto& o : orbits) distinct.insert(o.word());
    EXPECT_EQ(distinct.size(), orbits.size());
  }
}

TEST(PeriodicOrbits, BudgetIsEnforced) {
  try {
    enumerate_periodic_orbits(Sft::full_shift(2), 20, 1000);
    FAIL() << "budget ignored";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetExceeded);
  }
}

TEST(Points, ShiftWindowAndEquality) {
  const Sft s = golden_mean();
  const SymbolicPoint x = SymbolicPoint::extend(s, {1, 0, 0, 1}, -2);
  EXPECT_EQ(x.window(-2, 4), (Word{1, 0, 0, 1}));
  EXPECT_TRUE(s.is_admissible(x.window(-20, 40)));
  const SymbolicPoint y = shift(x, 3);
  for (long n = -15; n < 15; ++n) EXPECT_EQ(y.symbol_at(n), x.symbol_at(n + 3));
  EXPECT_EQ(shift(shift(x, 2), -2), x);
  EXPECT_EQ(SymbolicPoint::periodic(s, {0, 1}), SymbolicPoint::periodic(s, {0, 1, 0, 1}));
  EXPECT_FALSE(SymbolicPoint::periodic(s, {0, 1}) == SymbolicPoint::periodic(s, {0, 1}, 1));
  EXPECT_THROW(SymbolicPoint(s, {0}, {1, 1}, 0, {0}), Error);
}

TEST(Points, DistanceIsAnUltrametric) {
  const Sft s = Sft::full_shift(2);
  Gen gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = gen.point(s, -4, 9);
    const auto y = gen.point(s, -4, 9);
    const auto z = gen.point(s, -4, 9);
    const double dxy = distance(s, x, y).value;
    EXPECT_EQ(dxy, distance(s, y, x).value);
    EXPECT_EQ(distance(s, x, x).value, 0.0);
    EXPECT_LE(distance(s, x, z).value,
              std::max(dxy, distance(s, y, z).value));
    // Direct oracle: first |n| with a disagreement.
    long m = -1;
    for (long k = 0; k < 40 && m < 0; ++k)
      if (x.symbol_at(k) != y.symbol_at(k) || x.symbol_at(-k) != y.symbol_at(-k)) m = k;
    if (m >= 0) EXPECT_DOUBLE_EQ(dxy, std::pow(2.0, -static_cast<double>(m)));
  }
}

TEST(Shadowing, AgreesSymbolwiseAndCloses) {
  Gen gen(6);
  for (const Sft& s : {Sft::full_shift(2), golden_mean(), Sft::full_shift(3)}) {
    for (int trial = 0; trial < 60; ++trial) {
      const int n = gen.integer(0, 30);
      const bool centered = gen.coin();
      const auto x = gen.point(s, -40, 81);
      const Shadow sh = shadow_segment(s, x, n, centered);
      const int N = sh.segment_length;
      EXPECT_EQ(sh.return_time, N + 1 + s.mixing_constant() - 1);
      EXPECT_EQ(shift(sh.point, sh.return_time), sh.point);
      // d(f^j p, f^j x) < b^{-min(j, N-j)}: agreement on |i| <= min(j, N-j).
      for (int j = 0; j <= N; ++j) {
        const long e = std::min(j, N - j);
        for (long i = -e; i <= e; ++i) {
          const long idx = sh.block_start + j + i;
          ASSERT_EQ(sh.point.symbol_at(idx), x.symbol_at(idx));
        }
      }
      EXPECT_TRUE(check_shadowing(s, sh, x).holds);
      EXPECT_EQ(sh.orbit, PeriodicOrbit::from_word(s, sh.block));
    }
  }
}

TEST(Closing, ReportsFiniteConstantAndRejectsOpenWords) {
  const Sft s = golden_mean();
  const Closing c = anosov_close(s, {0, 1, 0, 0}, true);
  ASSERT_TRUE(c.report);
  EXPECT_EQ(c.orbit.word(), (Word{0, 0, 0, 1}));
  EXPECT_TRUE(std::isfinite(c.report->c2));
  EXPECT_GT(c.report->closing_distance, 0.0);
  EXPECT_EQ(c.report->z.window(0, 5), (Word{0, 1, 0, 0, 0}));
  try {
    anosov_close(s, {1, 0, 1}, false);
    FAIL() << "closed an open word";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotClosable);
  }
}

TEST(TransitivePoint, ContainsEveryWordOfTheDepth) {
  for (const Sft& s : {Sft::full_shift(2), golden_mean(), Sft::full_shift(3)}) {
    for (int depth = 1; depth <= 4; ++depth) {
      const SymbolicPoint x = transitive_point(s, depth);
      const Word& cycle = x.core();
      EXPECT_TRUE(s.is_cyclically_admissible(cycle));
      for (const auto& w : brute_words(s, depth)) {
        bool found = false;
        for (std::size_t i = 0; i + w.size() <= cycle.size() && !found; ++i)
          found = std::equal(w.begin(), w.end(), cycle.begin() + static_cast<long>(i));
        EXPECT_TRUE(found) << format_word(w) << " missing at depth " << depth;
      }
    }
  }
}
