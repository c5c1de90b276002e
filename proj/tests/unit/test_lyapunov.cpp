#include "testing.hpp"

#include <cocyclelab/errors.hpp>
#include <cocyclelab/families.hpp>
#include <cocyclelab/lyapunov.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <complex>

using namespace cocyclelab;
using testing_support::brute_sup_log_norm;
using testing_support::brute_words;
using testing_support::Gen;
using testing_support::golden_mean;
using testing_support::random_generator;
using testing_support::rotation;

namespace {

Matrix diag(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

// (1/k) log |eigenvalues| of the product along the word, computed with a
// direct product in whatever rotation of the word is given.
std::vector<double> eigen_rates(const MatrixGenerator& g, const Word& cycle) {
  const auto table = g.table();
  const int r = g.radius();
  const long k = static_cast<long>(cycle.size());
  auto at = [&](long i) { return cycle[static_cast<std::size_t>(((i % k) + k) % k)]; };
  Matrix acc = Matrix::Identity(g.dim(), g.dim());
  for (long i = 0; i < k; ++i) {
    Word w;
    for (long j = i - r; j <= i + r; ++j) w.push_back(at(j));
    acc = table.at(w) * acc;
  }
  Eigen::EigenSolver<Matrix> es(acc);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    out.push_back(std::log(std::abs(es.eigenvalues()(i))) / static_cast<double>(k));
  std::sort(out.rbegin(), out.rend());
  return out;
}

}  // namespace

TEST(Measures, BernoulliAndMarkovValidation) {
  const Sft g = golden_mean();
  EXPECT_THROW(ErgodicMeasure::bernoulli(g, {0.5, 0.5}), Error);  // charges "11"
  EXPECT_NO_THROW(ErgodicMeasure::bernoulli(g, {1.0, 0.0}));
  EXPECT_THROW(ErgodicMeasure::bernoulli(Sft::full_shift(2), {0.7, 0.7}), Error);
  const auto mu = ErgodicMeasure::markov(g, {{0.5, 0.5}, {1.0, 0.0}});
  // Stationary vector of [[1/2, 1/2], [1, 0]] is (2/3, 1/3).
  EXPECT_NEAR(mu.stationary()[0], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(mu.cylinder({0, 1, 0}), 2.0 / 3.0 * 0.5 * 1.0, 1e-12);
  EXPECT_EQ(mu.cylinder({1, 1}), 0.0);
  EXPECT_THROW(ErgodicMeasure::markov(g, {{0.5, 0.5}, {0.5, 0.5}}), Error);
  // Reducible chain: no unique stationary vector.
  EXPECT_THROW(ErgodicMeasure::markov(Sft::full_shift(2), {{1.0, 0.0}, {0.0, 1.0}}), Error);
}

TEST(Measures, SamplesAreAdmissibleAndDeterministic) {
  const Sft g = golden_mean();
  const auto mu = ErgodicMeasure::markov(g, {{0.5, 0.5}, {1.0, 0.0}});
  Rng a(9), b(9);
  const Word x = mu.sample(5000, a);
  EXPECT_EQ(x, mu.sample(5000, b));
  EXPECT_TRUE(g.is_admissible(x));
  const double ones = static_cast<double>(std::count(x.begin(), x.end(), 1)) / x.size();
  EXPECT_NEAR(ones, 1.0 / 3.0, 0.03);
}

TEST(Spectrum, IdentityIsExactlyZero) {
  const Sft s = Sft::full_shift(2);
  const auto mu = ErgodicMeasure::bernoulli(s, {0.5, 0.5});
  const auto spec = estimate_spectrum(identity_generator(s, 3), mu, 1000, 1);
  for (double v : spec.values) EXPECT_EQ(v, 0.0);
  const auto levels = spec.levels();
  ASSERT_EQ(levels.size(), 1u);
  EXPECT_EQ(levels[0].multiplicity, 3);
}

TEST(Spectrum, ConstantDiagonal) {
  const Sft s = Sft::full_shift(2);
  const auto mu = ErgodicMeasure::bernoulli(s, {0.5, 0.5});
  const auto spec = estimate_spectrum(constant_generator(s, diag(std::exp(-1.0), std::exp(1.0))), mu, 2000, 3);
  EXPECT_NEAR(spec.values[0], 1.0, 1e-9);
  EXPECT_NEAR(spec.values[1], -1.0, 1e-9);
}

TEST(Spectrum, BernoulliDiagonalExample) {
  const Sft s = Sft::full_shift(2);
  const auto mu = ErgodicMeasure::bernoulli(s, {0.5, 0.5});
  const auto g = diagonal_by_symbol(s, {{2, 1}, {1, 2}});
  const auto spec = estimate_spectrum(g, mu, 100000, 42);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(spec.values[static_cast<std::size_t>(i)], 0.5 * std::log(2.0), 3 * spec.error(i));
    EXPECT_GT(spec.error(i), 0.0);
  }
  EXPECT_NEAR(spec.partial_sum(2), std::log(2.0), 1e-12);
}

TEST(Spectrum, NilpotentIsMinusInfinity) {
  const Sft s = Sft::full_shift(2);
  const auto mu = ErgodicMeasure::bernoulli(s, {0.5, 0.5});
  Matrix n = Matrix::Zero(2, 2);
  n(0, 1) = 1.0;
  const auto spec = estimate_spectrum(constant_generator(s, n), mu, 500, 1);
  EXPECT_EQ(spec.values[0], -INFINITY);
  EXPECT_EQ(spec.values[1], -INFINITY);
  ASSERT_EQ(spec.levels().size(), 1u);
}

TEST(Spectrum, RankOneKeepsTopExponent) {
  const Sft s = Sft::full_shift(2);
  const auto mu = ErgodicMeasure::bernoulli(s, {0.5, 0.5});
  const auto spec = estimate_spectrum(constant_generator(s, diag(3.0, 0.0)), mu, 500, 1);
  EXPECT_NEAR(spec.values[0], std::log(3.0), 1e-12);
  EXPECT_EQ(spec.values[1], -INFINITY);
}

TEST(Spectrum, DeterministicPerSeed) {
  Gen gen(20);
  const Sft s = golden_mean();
  const auto g = random_generator(gen, s, 3, 1);
  const auto mu = ErgodicMeasure::markov(s, {{0.4, 0.6}, {1.0, 0.0}});
  const auto a = estimate_spectrum(g, mu, 3000, 77);
  const auto b = estimate_spectrum(g, mu, 3000, 77);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, estimate_spectrum(g, mu, 3000, 78).values);
}

TEST(Spectrum, SumMatchesExactDeterminantIntegral) {
  Gen gen(21);
  for (int trial = 0; trial < 5; ++trial) {
    const Sft s = Sft::full_shift(2);
    const double p0 = gen.uniform(0.2, 0.8);
    const auto mu = ErgodicMeasure::bernoulli(s, {p0, 1 - p0});
    const auto g = random_generator(gen, s, 3, 0);
    const double oracle = p0 * std::log(std::abs(g.at({0}).determinant())) +
                          (1 - p0) * std::log(std::abs(g.at({1}).determinant()));
    EXPECT_NEAR(sum_exponents(g, mu), oracle, 1e-9);
    const auto spec = estimate_spectrum(g, mu, 20000, trial);
    double se = 0.0;
    for (int i = 0; i < 3; ++i) se += spec.error(i);
    EXPECT_NEAR(spec.partial_sum(3), oracle, 5 * se + 1e-9);
    const auto birkhoff = sum_exponents_birkhoff(g, mu, 20000, trial);
    EXPECT_NEAR(birkhoff.value, spec.partial_sum(3), 1e-8);
  }
}

TEST(PeriodicSpectrum, MatchesEigenvaluesOfEveryRotation) {
  Gen gen(22);
  for (int trial = 0; trial < 30; ++trial) {
    const Sft s = trial % 2 ? golden_mean() : Sft::full_shift(2);
    const auto g = random_generator(gen, s, gen.integer(1, 3), gen.integer(0, 1));
    Word w = gen.admissible_word(s, gen.integer(1, 6));
    if (!s.is_cyclically_admissible(w)) continue;
    const auto orbit = PeriodicOrbit::from_word(s, w);
    const auto spec = periodic_spectrum(g, orbit);
    for (std::size_t rot = 0; rot < w.size(); ++rot) {
      std::rotate(w.begin(), w.begin() + 1, w.end());
      // Rotations of a non-primitive word have the same rates too.
      const auto rates = eigen_rates(g, w);
      for (std::size_t i = 0; i < rates.size(); ++i)
        EXPECT_NEAR(spec.values[i], rates[i], 1e-8) << "orbit " << orbit.to_string();
    }
  }
}

TEST(PeriodicSpectrum, ZeroEigenvaluesOnlyFromSingularFactors) {
  const Sft s = Sft::full_shift(2);
  const auto g = diagonal_by_symbol(s, {{1, 0}, {2, 1}});
  const auto fixed = periodic_spectrum(g, PeriodicOrbit::from_word(s, {0}));
  EXPECT_EQ(fixed.values[0], 0.0);
  EXPECT_EQ(fixed.values[1], -INFINITY);
  const auto two = periodic_spectrum(g, PeriodicOrbit::from_word(s, {0, 1}));
  EXPECT_NEAR(two.values[0], 0.5 * std::log(2.0), 1e-12);
  EXPECT_EQ(two.values[1], -INFINITY);
  EXPECT_EQ(sum_exponents(g, PeriodicOrbit::from_word(s, {0, 1})), -INFINITY);
  const auto one = periodic_spectrum(g, PeriodicOrbit::from_word(s, {1}));
  EXPECT_NEAR(one.values[0], std::log(2.0), 1e-12);
  EXPECT_NEAR(one.values[1], 0.0, 1e-12);
}

TEST(GrowthProfile, MatchesBruteForce) {
  Gen gen(23);
  for (int trial = 0; trial < 12; ++trial) {
    const Sft s = trial % 2 ? golden_mean() : Sft::full_shift(2);
    const auto g = random_generator(gen, s, gen.integer(1, 3), gen.integer(0, 1));
    const auto profile = sup_log_norm_profile(g, 6);
    for (int n = 0; n <= 6; ++n)
      EXPECT_NEAR(profile[static_cast<std::size_t>(n)], brute_sup_log_norm(g, n), 1e-10);
  }
  const auto d = diagonal_by_symbol(Sft::full_shift(2), {{2, 1}, {1, 2}});
  EXPECT_NEAR(exact_sup_log_norm(d, 3), std::log(8.0), 1e-12);
  EXPECT_THROW(sup_log_norm_profile(d, 30, 1000), Error);
}

TEST(GrowthBound, ClosedFormExamples) {
  const Sft s = Sft::full_shift(2);
  EXPECT_EQ(find_uniform_N(identity_generator(s, 2), 0.0, 0.1, 10), 1);
  const auto hyperbolic = constant_generator(s, diag(std::exp(1.0), std::exp(-1.0)));
  EXPECT_EQ(find_uniform_N(hyperbolic, 1.0, 0.1, 10), 1);
  const auto bound = growth_constant(hyperbolic, 1.0, 0.1, 10);
  EXPECT_NEAR(bound.c_eps, std::exp(1.0), 1e-12);
  EXPECT_EQ(growth_constant(identity_generator(s, 2), 0.3, 0.1, 10).c_eps, 1.0);
  try {
    find_uniform_N(constant_generator(s, 2.0 * Matrix::Identity(2, 2)), 0.0, 0.1, 12);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
}

TEST(GrowthBound, HoldsExhaustivelyAndNIsMonotoneInEps) {
  Gen gen(24);
  const Sft s = golden_mean();
  for (int trial = 0; trial < 6; ++trial) {
    MatrixGenerator::Table t;
    for (const auto& w : brute_words(s, 3)) t.emplace(w, rotation(gen.uniform(0, 3)) * gen.near_identity(2, 0.4));
    const MatrixGenerator g(s, 2, 1, t);
    const auto profile = sup_log_norm_profile(g, 10);
    double rho = INFINITY;
    for (int n = 1; n <= 10; ++n) rho = std::min(rho, profile[static_cast<std::size_t>(n)] / n);
    rho = std::max(rho, 0.0);
    std::vector<double> brute;
    for (int n = 0; n <= 16; ++n) brute.push_back(brute_sup_log_norm(g, n));
    int previous = 1 << 30;
    for (double eps : {0.02, 0.05, 0.1, 0.3}) {
      const int N = find_uniform_N(g, rho, eps, 16);
      EXPECT_LE(N, previous);
      previous = N;
      const auto bound = growth_constant(g, rho, eps, 16);
      const auto check = verify_growth_bound(g, bound, 16);
      EXPECT_TRUE(check.holds) << "margin " << check.worst_margin << " at " << check.worst_n;
      for (int n = 0; n <= 16; ++n)
        EXPECT_LE(brute[static_cast<std::size_t>(n)] - 1e-9, bound.log_c_eps + (rho + eps) * n) << n;
    }
  }
}
