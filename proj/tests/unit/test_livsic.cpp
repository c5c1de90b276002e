#include "testing.hpp"

#include <cocyclelab/errors.hpp>
#include <cocyclelab/families.hpp>
#include <cocyclelab/livsic.hpp>

#include <gtest/gtest.h>

using namespace cocyclelab;
using testing_support::brute_words;
using testing_support::Gen;
using testing_support::golden_mean;
using testing_support::svd_norm;

namespace {

std::map<Word, Matrix> random_transfer(Gen& gen, const Sft& s, int radius, int d) {
  std::map<Word, Matrix> p;
  for (const auto& w : brute_words(s, 2 * radius + 1)) p.emplace(w, gen.invertible(d));
  return p;
}

// P at a point from the radius-q table, read directly off the symbols.
Matrix transfer_at(const std::map<Word, Matrix>& p, int q, const SymbolicPoint& x) {
  Word w;
  for (long j = -q; j <= q; ++j) w.push_back(x.symbol_at(j));
  return p.at(w);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST(Obstruction, IdentityAndFixedPointWitness) {
  const Sft s = Sft::full_shift(2);
  const auto id = check_periodic_obstruction(identity_generator(s, 2), 6, 1e-9);
  EXPECT_TRUE(id.holds);
  EXPECT_EQ(id.worst_defect, 0.0);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 0.5;
  const auto bad = check_periodic_obstruction(symbol_generator(s, {d, Matrix::Identity(2, 2)}), 6, 1e-9);
  EXPECT_FALSE(bad.holds);
  ASSERT_TRUE(bad.witness);
  EXPECT_EQ(bad.witness->to_string(), "0");
  EXPECT_NEAR(bad.witness_defect, 1.0, 1e-15);
  // diag(2^5, 2^-5) on "000001" is the largest defect up to period 6.
  EXPECT_NEAR(bad.worst_defect, 31.0, 1e-12);
  EXPECT_EQ(bad.worst_orbit->to_string(), "000001");
  EXPECT_EQ(code_of([&] { solve_coboundary(symbol_generator(s, {d, Matrix::Identity(2, 2)}), 1, 1000); }),
            ErrorCode::kObstructionFailed);
}

TEST(Solve, IdentityGivesIdentityTable) {
  const auto g = identity_generator(golden_mean(), 3);
  const auto t = solve_coboundary(g, 3, 100000);
  EXPECT_EQ(t.entries.size(), brute_words(golden_mean(), 3).size());
  for (const auto& [w, m] : t.entries) EXPECT_EQ(m, Matrix::Identity(3, 3));
  EXPECT_EQ(t.oscillation, 0.0);
}

TEST(Solve, RecoversTransferUpToBaseFactor) {
  Gen gen(41);
  for (int trial = 0; trial < 10; ++trial) {
    const Sft s = trial % 2 ? golden_mean() : Sft::full_shift(3);
    const int d = gen.integer(1, 3);
    const auto p = random_transfer(gen, s, 0, d);
    const auto g = coboundary_generator(s, 0, p);
    ASSERT_TRUE(check_periodic_obstruction(g, 5, 1e-8).holds);
    const int depth = g.window_length();
    const auto t = solve_coboundary(g, depth, 1000000, {.tol = 1e-8});
    const auto base = transitive_point(s, depth);
    const Matrix base_inv = transfer_at(p, 0, base).inverse();
    for (const auto& [w, m] : t.entries) {
      const Word centre{w[static_cast<std::size_t>(t.offset())]};
      EXPECT_LE((m - p.at(centre) * base_inv).norm(), 1e-9 * (1 + m.norm()));
    }
    const auto check = verify_coboundary(g, t, 200, trial);
    EXPECT_LE(check.max_defect, 1e-8);
    EXPECT_GT(check.windows_checked, 0u);
  }
}

TEST(Solve, RoundTripWithWiderTransfer) {
  Gen gen(42);
  for (int trial = 0; trial < 5; ++trial) {
    const Sft s = golden_mean();
    const auto p = random_transfer(gen, s, 1, 2);
    const auto g = coboundary_generator(s, 1, p);
    EXPECT_EQ(g.radius(), 2);
    const auto t = solve_coboundary(g, 5, 1000000, {.tol = 1e-7});
    EXPECT_LE(verify_coboundary(g, t, 200, 7).max_defect, 1e-8);
  }
}

TEST(Solve, GaugeCovariance) {
  Gen gen(43);
  for (int trial = 0; trial < 8; ++trial) {
    const Sft s = Sft::full_shift(2);
    const int d = gen.integer(2, 3);
    const auto g = coboundary_generator(s, 0, random_transfer(gen, s, 0, d));
    const Matrix gauge = gen.invertible(d);
    const auto plain = solve_coboundary(g, 3, 100000, {.tol = 1e-8});
    const auto gauged = solve_coboundary(g, 3, 100000, {.tol = 1e-8, .gauge = gauge});
    for (const auto& [w, m] : plain.entries) {
      const Matrix expected = m * gauge;
      EXPECT_LE((gauged.entries.at(w) - expected).norm(), 1e-10 * (1 + expected.norm()));
    }
    const double a = verify_coboundary(g, plain, 100, 1).max_defect;
    const double b = verify_coboundary(g, gauged, 100, 1).max_defect;
    EXPECT_NEAR(a, b, 1e-10);
  }
}

TEST(Solve, SingularWindowAndCoverage) {
  const Sft s = Sft::full_shift(2);
  Matrix z = Matrix::Identity(2, 2);
  z(1, 1) = 0.0;
  // Every periodic defect of the idempotent is 1, so a loose tolerance lets
  // the solver reach its singularity check.
  const auto singular = symbol_generator(s, {z, Matrix::Identity(2, 2)});
  EXPECT_EQ(code_of([&] { solve_coboundary(singular, 1, 1000, {.tol = 10.0}); }), ErrorCode::kSingularWindow);
  const auto id = identity_generator(s, 2);
  EXPECT_EQ(code_of([&] { solve_coboundary(id, 6, 10); }), ErrorCode::kCoverageIncomplete);
}

TEST(Verify, CorruptedEntryIsDetected) {
  const Sft s = Sft::full_shift(2);
  const auto id = identity_generator(s, 2);
  auto flat = solve_coboundary(id, 1, 1000);
  EXPECT_EQ(verify_coboundary(id, flat, 50, 1).max_defect, 0.0);
  const double size = 1e-3;
  flat.entries.at({1})(0, 1) += size;
  // On x with x_0 = 0, x_1 = 1 the defect is exactly the injected entry.
  EXPECT_GE(verify_coboundary(id, flat, 50, 1).max_defect, size * (1 - 1e-12));

  Gen gen(44);
  const auto g = coboundary_generator(s, 0, random_transfer(gen, s, 0, 2));
  auto t = solve_coboundary(g, 1, 10000, {.tol = 1e-8});
  t.entries.at({0})(1, 0) += size;
  double oracle = 0.0;
  for (const auto& w : g.windows()) {
    const Matrix d = g.at(w) - t.entries.at({w[2]}) * t.entries.at({w[1]}).inverse();
    oracle = std::max(oracle, svd_norm(d));
  }
  const auto check = verify_coboundary(g, t, 0, 1);
  EXPECT_NEAR(check.max_defect, oracle, 1e-12);
  EXPECT_GE(check.max_defect, size / svd_norm(t.entries.at({1})) * (1 - 1e-9));
}

TEST(InverseHolder, ClosedFormExample) {
  const Sft s = Sft::full_shift(2);
  const auto g = symbol_generator(s, {2.0 * Matrix::Identity(2, 2), 0.5 * Matrix::Identity(2, 2)});
  const auto rep = inverse_holder_bound(g);
  EXPECT_NEAR(rep.c, 2.0, 1e-15);
  EXPECT_NEAR(rep.c_literal, 2.0, 1e-15);
  EXPECT_NEAR(rep.c1, 1.5, 1e-15);
  EXPECT_NEAR(rep.bound, 6.0, 1e-14);
  EXPECT_EQ(rep.pairs_checked, 1u);
  // ||1/2 - 2|| / (6 * 1) = 0.25
  EXPECT_NEAR(rep.max_ratio, 0.25, 1e-15);
  EXPECT_TRUE(rep.holds);
  const auto id = inverse_holder_bound(identity_generator(s, 2));
  EXPECT_EQ(id.c, 1.0);
  EXPECT_EQ(id.c1, 0.0);
  EXPECT_EQ(id.bound, 0.0);
  EXPECT_TRUE(id.holds);
}

TEST(InverseHolder, HoldsForRandomInvertibleGenerators) {
  Gen gen(45);
  for (int trial = 0; trial < 15; ++trial) {
    const Sft s = trial % 2 ? golden_mean() : Sft::full_shift(2);
    MatrixGenerator::Table t;
    for (const auto& w : brute_words(s, 3)) t.emplace(w, gen.invertible(2));
    const auto rep = inverse_holder_bound(MatrixGenerator(s, 2, 1, t));
    EXPECT_TRUE(rep.holds) << rep.max_ratio;
    EXPECT_LE(rep.c_literal, rep.c);
  }
}

TEST(DefectBound, TelescopedBoundCoversPeriodicDefects) {
  Gen gen(46);
  const Sft s = Sft::full_shift(2);
  const auto g = coboundary_generator(s, 0, random_transfer(gen, s, 0, 2));
  auto t = solve_coboundary(g, 1, 10000, {.tol = 1e-8});
  t.entries.begin()->second(0, 0) += 1e-4;
  const double delta0 = verify_coboundary(g, t, 0, 1).max_defect;
  for (int k = 1; k <= 5; ++k) {
    const double bound = periodic_defect_bound(t, delta0, k);
    for (const auto& orbit : enumerate_periodic_orbits(s, k)) {
      if (orbit.period() != k) continue;
      const auto x = orbit.point(s);
      const Matrix prod = testing_support::naive_product(g, x, k);
      EXPECT_LE(svd_norm(prod - Matrix::Identity(2, 2)), bound * (1 + 1e-9));
    }
  }
}

TEST(TransferJson, RoundTripAndSchemaErrors) {
  Gen gen(47);
  const Sft s = golden_mean();
  const auto g = coboundary_generator(s, 0, random_transfer(gen, s, 0, 2));
  const auto t = solve_coboundary(g, 3, 100000, {.tol = 1e-8});
  const auto back = transfer_table_from_json(nlohmann::json::parse(to_json(t).dump()));
  EXPECT_EQ(back.depth, t.depth);
  EXPECT_EQ(back.dim, t.dim);
  EXPECT_EQ(back.oscillation, t.oscillation);
  ASSERT_EQ(back.entries.size(), t.entries.size());
  for (const auto& [w, m] : t.entries) EXPECT_EQ(back.entries.at(w), m);
  auto broken = to_json(t);
  broken.erase("depth");
  broken["dim"] = "two";
  try {
    transfer_table_from_json(broken);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_GE(e.violations().size(), 2u);
  }
}
