#include "cocyclelab/certify.hpp"

#include "cocyclelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cocyclelab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, msg);
}

}  // namespace

void CertificateInput::validate() const {
  if (!std::isfinite(rho) || rho < 0.0) invalid("rho must be finite and >= 0");
  if (!std::isfinite(tau) || tau < 0.0) invalid("tau must be finite and >= 0");
  if (!std::isfinite(c) || c < 1.0) invalid("c must be >= 1");
  if (max_period < 1) invalid("max_period must be >= 1");
  if (eps && !(*eps > 0.0 && std::isfinite(*eps))) invalid("eps must be finite and > 0");
}

double bound_limit(const MatrixGenerator& g, const CertificateInput& in) {
  return g.alpha() * g.sft().theta() / in.c;
}

double resolve_eps(const MatrixGenerator& g, const CertificateInput& in) {
  if (in.eps) return *in.eps;
  return (bound_limit(g, in) - in.rho - in.tau) / 2.0;
}

PeriodicScan periodic_exponent_scan(const MatrixGenerator& g, int max_period,
                                    std::size_t budget) {
  if (max_period < 1) invalid("max_period must be >= 1");
  std::vector<double> per_slot(g.window_count());
  for (std::size_t s = 0; s < g.window_count(); ++s) per_slot[s] = log_abs_det(g.matrices()[s]);

  PeriodicScan out;
  out.min = std::numeric_limits<double>::infinity();
  out.max = kNegInf;
  const int r = g.radius();
  for (auto& orbit : enumerate_periodic_orbits(g.sft(), max_period, budget)) {
    const SymbolicPoint p = orbit.point(g.sft());
    const int k = orbit.period();
    double acc = 0.0;
    for (std::size_t s : g.slots_along(p.window(-r, k + 2L * r))) {
      if (per_slot[s] == kNegInf) {
        acc = kNegInf;
        break;
      }
      acc += per_slot[s];
    }
    const double sum = acc == kNegInf ? kNegInf : acc / k;
    out.min = std::min(out.min, sum);
    out.max = std::max(out.max, sum);
    out.records.push_back({std::move(orbit), sum});
  }
  return out;
}

GroundTruth verify_invertibility_ground_truth(const MatrixGenerator& g) {
  GroundTruth out;
  for (std::size_t s = 0; s < g.window_count(); ++s) {
    if (is_numerically_singular(g.matrices()[s])) {
      out.invertible = false;
      out.singular_windows.push_back(g.windows()[s]);
    }
  }
  return out;
}

std::string_view verdict_name(Verdict v) noexcept {
  return v == Verdict::kCertified ? "Certified" : "Rejected";
}

std::string_view reason_name(RejectReason r) noexcept {
  switch (r) {
    case RejectReason::kNone: return "none";
    case RejectReason::kBound: return "bound";
    case RejectReason::kOrbit: return "orbit";
  }
  return "none";
}

InvertibilityCertificate certify_invertibility(const MatrixGenerator& g,
                                               const CertificateInput& in,
                                               bool with_ground_truth, std::size_t budget) {
  in.validate();
  InvertibilityCertificate cert;
  cert.input = in;
  cert.alpha = g.alpha();
  cert.theta = g.sft().theta();
  cert.limit = bound_limit(g, in);
  cert.bound_ok = in.rho + in.tau < cert.limit;
  cert.scan = periodic_exponent_scan(g, in.max_period, budget);
  for (const auto& rec : cert.scan.records) {
    if (rec.sum < -in.tau || rec.sum > in.rho) {
      cert.witness = rec;
      break;
    }
  }
  if (!cert.bound_ok) {
    cert.verdict = Verdict::kRejected;
    cert.reason = RejectReason::kBound;
  } else if (cert.witness) {
    cert.verdict = Verdict::kRejected;
    cert.reason = RejectReason::kOrbit;
  } else {
    cert.verdict = Verdict::kCertified;
  }
  if (with_ground_truth) cert.ground_truth = verify_invertibility_ground_truth(g);
  return cert;
}

std::string_view premise_name(Premise p) noexcept {
  switch (p) {
    case Premise::kZero: return "zero";
    case Premise::kSingular: return "singular";
    case Premise::kSmall: return "small";
    case Premise::kNone: return "none";
  }
  return "none";
}

ContradictionReport singularity_contradiction(const MatrixGenerator& g, const Word& window,
                                              const CertificateInput& in,
                                              const ContradictionOptions& opts) {
  in.validate();
  if (opts.n_max < 1) invalid("n_max must be >= 1");
  const Sft& s = g.sft();
  const Matrix& a = g.at(window);

  ContradictionReport rep;
  rep.window = window;
  rep.rho = in.rho;
  rep.tau = in.tau;
  rep.eps = resolve_eps(g, in);
  rep.alpha = g.alpha();
  rep.theta = s.theta();
  rep.mixing = s.mixing_constant();
  rep.window_norm = spectral_norm(a);
  if (!(rep.eps > 0.0)) {
    throw Error(ErrorCode::kHypothesisUnavailable,
                "no eps > 0 fits: rho + tau leaves no slack below alpha theta / c");
  }

  double largest = 0.0;
  for (const auto& m : g.matrices()) largest = std::max(largest, spectral_norm(m));
  if (is_exact_zero(a)) {
    rep.premise = Premise::kZero;
  } else if (is_numerically_singular(a)) {
    rep.premise = Premise::kSingular;
  } else if (rep.window_norm <= opts.small_norm * largest) {
    rep.premise = Premise::kSmall;
  }

  try {
    rep.growth = growth_constant(g, in.rho, rep.eps, opts.growth_n_max, opts.budget);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNotFound) throw;
    throw Error(ErrorCode::kHypothesisUnavailable,
                std::string("growth hypothesis unavailable: ") + e.what());
  }
  rep.c1 = holder_constant(g);
  const double slope = rep.rho + rep.eps - rep.theta * rep.alpha / 2.0;
  rep.log_c_hat = rep.growth.log_c_eps + std::log(rep.c1) + rep.alpha * std::log(rep.delta) +
                  rep.theta * rep.alpha * rep.mixing;

  auto chain_violated = [&](int n) {
    const double period = 2.0 * n + rep.mixing;
    return slope * period + rep.log_c_hat < -rep.tau * period;
  };
  const double gap = -(slope + rep.tau);  // theta alpha / 2 - rho - tau - eps
  if (gap > 0.0) {
    int n = 1;
    if (std::isfinite(rep.log_c_hat)) {
      n = std::max(1, static_cast<int>(std::ceil((rep.log_c_hat / gap - rep.mixing) / 2.0)));
      while (n > 1 && chain_violated(n - 1)) --n;
      while (!chain_violated(n)) ++n;
    }
    rep.threshold_n = n;
  }

  const int r = g.radius();
  const SymbolicPoint x = SymbolicPoint::extend(s, window, -r);
  for (int n = 1; n <= opts.n_max; ++n) {
    const Shadow shadow = shadow_segment(s, x, n, true);
    ContradictionStep step;
    step.n = n;
    step.period = shadow.return_time;
    step.log_norm = cocycle_product(g, shadow.point, step.period, opts.budget).log_norm();
    step.measured_rate = step.log_norm / step.period;
    step.chain_rate = slope + rep.log_c_hat / step.period;
    // ||A(p_n)|| <= C_1 d(p_n, x)^alpha + ||A(x)|| with d(p_n, x) < delta e^{-theta n}.
    const double perturbation = std::exp(std::log(rep.c1) + rep.alpha * std::log(rep.delta) -
                                         rep.theta * rep.alpha * n);
    step.corrected_rate = (rep.growth.log_c_eps + (rep.rho + rep.eps) * (step.period - 1) +
                           std::log(perturbation + rep.window_norm)) /
                          step.period;
    step.measured_violation = step.measured_rate < -rep.tau;
    step.chain_violation = step.chain_rate < -rep.tau;
    if (step.measured_violation && !rep.contradiction_n) rep.contradiction_n = n;
    rep.steps.push_back(step);
  }
  rep.derivable = rep.premise != Premise::kNone && rep.contradiction_n.has_value();
  return rep;
}

}  // namespace cocyclelab
