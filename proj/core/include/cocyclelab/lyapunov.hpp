#pragma once

// Lyapunov spectra (with -inf exponents), periodic-orbit spectra, and the
// uniform growth bound ||A^n(x)|| <= C e^{(rho + eps) n}.

#include "cocyclelab/cocycle.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace cocyclelab {

// Seeded source of uniforms in [0, 1) built directly on mt19937_64 output so
// sampled orbits do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Index drawn from unnormalized nonnegative weights.
  std::size_t categorical(const std::vector<double>& weights);

 private:
  std::mt19937_64 engine_;
};

// Shift-invariant Bernoulli or stationary Markov measure on an SFT.
class ErgodicMeasure {
 public:
  enum class Kind { kBernoulli, kMarkov };

  // Probabilities over symbols (sum 1 within 1e-12) whose support respects
  // the transitions.
  static ErgodicMeasure bernoulli(const Sft& s, std::vector<double> probabilities);
  // Row-stochastic matrix vanishing on forbidden transitions; the stationary
  // vector is computed and must be unique.
  static ErgodicMeasure markov(const Sft& s, std::vector<std::vector<double>> stochastic);

  Kind kind() const noexcept { return kind_; }
  const std::vector<double>& stationary() const noexcept { return stationary_; }
  double transition(Symbol a, Symbol b) const;

  // Measure of the cylinder {x : x_0 .. x_{n-1} = w}.
  double cylinder(const Word& w) const;

  // Symbols x_0 .. x_{n-1} of a typical point.
  Word sample(std::size_t n, Rng& rng) const;

 private:
  ErgodicMeasure() = default;
  Kind kind_ = Kind::kBernoulli;
  int alphabet_ = 0;
  std::vector<double> stationary_;
  std::vector<std::vector<double>> transition_;  // empty for Bernoulli
};

struct LyapunovLevel {
  double value = 0.0;
  int multiplicity = 0;
};

// gamma_1 >= ... >= gamma_d counted with multiplicity.
struct LyapunovSpectrum {
  std::vector<double> values;
  // Standard error per value; empty for exact spectra.
  std::vector<double> standard_error;

  int dim() const noexcept { return static_cast<int>(values.size()); }
  double top() const { return values.front(); }
  // gamma_1 + ... + gamma_i (-inf if any term is).
  double partial_sum(int i) const;
  double error(int i) const {
    return standard_error.empty() ? 0.0 : standard_error[static_cast<std::size_t>(i)];
  }

  // Distinct exponents lambda_1 > ... > lambda_l with multiplicities.
  // Neighbours merge when both are -inf or they differ by at most
  // abs_tol + se_factor * (se_i + se_j).
  std::vector<LyapunovLevel> levels(double abs_tol = 1e-9, double se_factor = 3.0) const;
};

// Sorts values non-increasingly, carrying standard errors along.
LyapunovSpectrum make_spectrum(std::vector<double> values, std::vector<double> standard_error = {});

inline constexpr std::size_t kBatchLength = 100;

// Orthonormal frame propagation along a mu-typical orbit of `steps` steps:
// QR re-orthogonalization each step; a frame direction whose image falls
// below the singularity threshold is frozen at -inf. Standard errors come from
// batch means over batches of kBatchLength steps (NaN with fewer than two
// full batches). Deterministic given seed.
LyapunovSpectrum estimate_spectrum(const MatrixGenerator& g, const ErgodicMeasure& mu,
                                   std::size_t steps, std::uint64_t seed);

// Exact spectrum of the measure on a periodic orbit: (1/k) log of the
// eigenvalue moduli of A^k(p). Zero eigenvalues (only possible when some
// factor is singular) give -inf. Throws InadmissibleOrbit.
LyapunovSpectrum periodic_spectrum(const MatrixGenerator& g, const PeriodicOrbit& p);

// gamma_1 + ... + gamma_d through the determinant cocycle.
// Periodic orbit: (1/k) log |det A^k(p)|.
double sum_exponents(const MatrixGenerator& g, const PeriodicOrbit& p);
// Measure: the exact integral sum_w mu[w] log |det table[w]| over windows.
double sum_exponents(const MatrixGenerator& g, const ErgodicMeasure& mu);

struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};
// Birkhoff average of log |det A| along the same sampled orbit that
// estimate_spectrum uses for this seed; -inf if a singular window is visited.
Estimate sum_exponents_birkhoff(const MatrixGenerator& g, const ErgodicMeasure& mu,
                                std::size_t steps, std::uint64_t seed);

// profile[n] = max over admissible windows of log ||A^n||, n = 0..n_max.
// Exhaustive. Throws BudgetExceeded when the windows of length n_max + 2r
// exceed the budget.
std::vector<double> sup_log_norm_profile(const MatrixGenerator& g, int n_max,
                                         std::size_t budget = kDefaultBudget);
double exact_sup_log_norm(const MatrixGenerator& g, int n, std::size_t budget = kDefaultBudget);

// Smallest N <= n_max with sup_x log ||A~^N(x)|| < (rho + eps) N, using
// ||A~^n|| = max(1, ||A^n||) for the augmented cocycle A~ = diag(1, A).
// Throws NotFound when no such N exists up to n_max.
int find_uniform_N(const MatrixGenerator& g, double rho, double eps, int n_max,
                   std::size_t budget = kDefaultBudget);

struct GrowthBound {
  double rho = 0.0;
  double eps = 0.0;
  int N = 0;
  double log_c_eps = 0.0;  // log C_eps
  double c_eps = 1.0;      // max over j <= N of sup_x ||A~^j(x)||
};

GrowthBound growth_constant(const MatrixGenerator& g, double rho, double eps, int n_max,
                            std::size_t budget = kDefaultBudget);

struct GrowthCheck {
  bool holds = true;
  int checked_up_to = 0;
  // min over n of (log C + (rho + eps) n) - sup log ||A^n||.
  double worst_margin = 0.0;
  int worst_n = 0;
};

// Exhaustive check of sup log ||A^n|| <= log C_eps + (rho + eps) n for
// n = 0..n_max, with a relative tolerance on the right-hand side.
GrowthCheck check_growth_profile(const std::vector<double>& profile, const GrowthBound& bound,
                                 double rel_tol = 1e-9);
GrowthCheck verify_growth_bound(const MatrixGenerator& g, const GrowthBound& bound, int n_max,
                                double rel_tol = 1e-9, std::size_t budget = kDefaultBudget);

}  // namespace cocyclelab
