#pragma once

// Invertibility certificate for locally constant cocycles: scan of exponent
// sums over periodic measures, the bound rho + tau < alpha theta / c, an
// exhaustive determinant ground truth, and the replay of the contradiction
// argument that rules out zero values of A.

#include "cocyclelab/lyapunov.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cocyclelab {

struct CertificateInput {
  double rho = 0.0;
  double tau = 0.0;
  double c = 2.0;  // period growth factor of the shadowing: k_n <= c n + S
  int max_period = 6;
  std::optional<double> eps;  // defaults to half the remaining slack

  // Throws InvalidArgument unless rho, tau >= 0 are finite, c >= 1 and
  // max_period >= 1.
  void validate() const;
};

// alpha * theta / c for the generator's Hoelder exponent and metric.
double bound_limit(const MatrixGenerator& g, const CertificateInput& in);

// (alpha theta / c - rho - tau) / 2, or in.eps when given.
double resolve_eps(const MatrixGenerator& g, const CertificateInput& in);

struct ScanRecord {
  PeriodicOrbit orbit;
  double sum = 0.0;  // (1/k) log |det A^k(p)|, -inf when a factor is singular
};

struct PeriodicScan {
  std::vector<ScanRecord> records;  // in (period, word) order
  double min = 0.0;
  double max = 0.0;
};

PeriodicScan periodic_exponent_scan(const MatrixGenerator& g, int max_period,
                                    std::size_t budget = kDefaultBudget);

struct GroundTruth {
  bool invertible = true;
  std::vector<Word> singular_windows;
};

// Exhaustive over the table: every window matrix must be nonsingular.
GroundTruth verify_invertibility_ground_truth(const MatrixGenerator& g);

enum class Verdict { kCertified, kRejected };
enum class RejectReason { kNone, kBound, kOrbit };

std::string_view verdict_name(Verdict v) noexcept;
std::string_view reason_name(RejectReason r) noexcept;

struct InvertibilityCertificate {
  CertificateInput input;
  double alpha = 1.0;
  double theta = 0.0;
  double limit = 0.0;  // alpha theta / c
  bool bound_ok = false;
  PeriodicScan scan;
  Verdict verdict = Verdict::kRejected;
  RejectReason reason = RejectReason::kNone;
  // First orbit, in scan order, whose sum leaves [-tau, rho]. Reported even
  // when the bound already failed.
  std::optional<ScanRecord> witness;
  std::optional<GroundTruth> ground_truth;
};

// Certified iff the bound holds and every scanned sum lies in [-tau, rho].
// Certification is a sufficient condition evaluated on periodic measures up
// to max_period. The ground truth is attached when requested.
InvertibilityCertificate certify_invertibility(const MatrixGenerator& g,
                                               const CertificateInput& in,
                                               bool with_ground_truth = true,
                                               std::size_t budget = kDefaultBudget);

struct ContradictionStep {
  int n = 0;
  int period = 0;                 // 2n + S
  double log_norm = 0.0;          // log ||A^period(p_n)||, -inf for a zero product
  double measured_rate = 0.0;     // log_norm / period, bounds gamma_1(mu_{p_n}) above
  double chain_rate = 0.0;        // rho + eps - theta alpha / 2 + log C_hat / period
  double corrected_rate = 0.0;    // same chain keeping the ||A(x)|| term
  bool measured_violation = false;  // measured_rate < -tau
  bool chain_violation = false;     // chain_rate < -tau
};

enum class Premise { kZero, kSingular, kSmall, kNone };
std::string_view premise_name(Premise p) noexcept;

struct ContradictionReport {
  Word window;
  Premise premise = Premise::kNone;
  double window_norm = 0.0;
  double rho = 0.0;
  double tau = 0.0;
  double eps = 0.0;
  double alpha = 1.0;
  double theta = 0.0;
  int mixing = 1;
  double delta = 1.0;
  GrowthBound growth;
  double c1 = 0.0;
  double log_c_hat = 0.0;  // log(C_eps C_1 delta^alpha e^{theta alpha S})
  // Smallest n with (rho + eps - theta alpha / 2)(2n + S) + log C_hat
  // < -tau (2n + S); absent when the slack is not positive.
  std::optional<int> threshold_n;
  // First replayed n whose shadow orbit already violates the lower bound.
  std::optional<int> contradiction_n;
  bool derivable = false;
  std::vector<ContradictionStep> steps;
};

struct ContradictionOptions {
  int n_max = 10;           // replay n = 1..n_max
  int growth_n_max = 16;    // search depth for the uniform growth N
  double small_norm = 1e-3; // relative to the largest window norm
  std::size_t budget = kDefaultBudget;
};

// Replays the argument at the point extending `window` (placed at indices
// -r..r): centered shadows p_n of period 2n + S, the Hoelder perturbation
// chain and the measured periodic norms. Throws HypothesisUnavailable when the
// uniform growth N cannot be found, InadmissibleWindow for unknown windows.
ContradictionReport singularity_contradiction(const MatrixGenerator& g, const Word& window,
                                              const CertificateInput& in,
                                              const ContradictionOptions& opts = {});

}  // namespace cocyclelab
