#pragma once

// Cohomological equation A(x) = P(f x) P(x)^{-1}: periodic obstruction,
// a cylinder-wise solver along a transitive orbit, verification and the
// Hoelder estimate for the inverse cocycle.

#include "cocyclelab/cocycle.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>

namespace cocyclelab {

// P approximated on depth-L cylinders: entries[w] for the window of x at
// indices [-h, L - 1 - h], h = (L - 1) / 2.
struct TransferTable {
  int depth = 1;
  int dim = 1;
  std::map<Word, Matrix> entries;
  // Largest distance between the first assignment to a cylinder and any later
  // one seen along the orbit.
  double oscillation = 0.0;
  std::size_t steps_walked = 0;

  int offset() const noexcept { return (depth - 1) / 2; }
  // Entry for the cylinder containing x. Throws CoverageIncomplete when
  // missing.
  const Matrix& at(const SymbolicPoint& x) const;
};

nlohmann::json to_json(const TransferTable& t);
// Throws SchemaError listing every problem found.
TransferTable transfer_table_from_json(const nlohmann::json& j);

struct ObstructionCheck {
  bool holds = true;
  double worst_defect = 0.0;  // max ||A^k(p) - Id||
  std::optional<PeriodicOrbit> worst_orbit;
  // First orbit in (period, word) order whose defect exceeds tol.
  std::optional<PeriodicOrbit> witness;
  double witness_defect = 0.0;
  std::size_t orbits_checked = 0;
};

ObstructionCheck check_periodic_obstruction(const MatrixGenerator& g, int max_period, double tol,
                                            std::size_t budget = kDefaultBudget);

struct SolveOptions {
  double tol = 1e-9;        // obstruction tolerance
  int obstruction_period = 6;
  std::optional<Matrix> gauge;  // value at the base point, identity by default
  // Base point of the walk; the transitive point for `depth` by default. A
  // custom start must still visit every cylinder within the budget.
  std::optional<SymbolicPoint> start;
  std::size_t budget = kDefaultBudget;
};

// Walks the forward orbit of the base point x0 for at most orbit_budget steps
// with P(f^{k+1} x0) = A(f^k x0) P(f^k x0), assigning each depth-L cylinder
// on first visit. Throws ObstructionFailed, SingularWindow (some window matrix
// singular) or CoverageIncomplete.
TransferTable solve_coboundary(const MatrixGenerator& g, int depth, std::size_t orbit_budget,
                               const SolveOptions& opts = {});

struct CoboundaryCheck {
  double max_defect = 0.0;  // max ||A(x) - P(f x) P(x)^{-1}||
  Word worst_window;        // symbols of x on [window_start, window_start + |word|)
  long window_start = 0;
  std::size_t windows_checked = 0;
  std::size_t samples_checked = 0;
};

// Exhaustive over every admissible word on the index range that determines
// A(x), P(x) and P(f x), plus `samples` random points drawn with `seed`.
// Throws CoverageIncomplete when the table misses a cylinder.
CoboundaryCheck verify_coboundary(const MatrixGenerator& g, const TransferTable& t,
                                  std::size_t samples, std::uint64_t seed,
                                  std::size_t budget = kDefaultBudget);

struct InverseHolderReport {
  double c = 1.0;          // max over windows of ||A||, ||A^{-1}||
  double c_literal = 1.0;  // max over windows of ||A||, 1 / ||A||
  double c1 = 0.0;
  double bound = 0.0;      // c^2 c1
  std::size_t pairs_checked = 0;
  double max_ratio = 0.0;  // max ||A^{-1}(x) - A^{-1}(y)|| / (bound d(x, y)^alpha)
  bool holds = true;
};

// ||A(x)^{-1} - A(y)^{-1}|| <= C^2 C_1 d(x, y)^alpha, checked over all window
// pairs at their closest distance b^{-m}, m the first mismatch from the
// centre. Throws SingularWindow.
InverseHolderReport inverse_holder_bound(const MatrixGenerator& g);

// Upper bound on ||A^k(p) - Id|| over period-k points when the table solves
// the equation up to defect delta0: kappa ((1 + kappa delta0)^k - 1) with
// kappa = max ||P|| * max ||P^{-1}||.
double periodic_defect_bound(const TransferTable& t, double delta0, int k);

}  // namespace cocyclelab
