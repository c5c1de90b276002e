#include "commands.hpp"

#include "output.hpp"

#include <cocyclelab/certify.hpp>
#include <cocyclelab/errors.hpp>
#include <cocyclelab/livsic.hpp>
#include <cocyclelab/lyapunov.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

namespace cocyclelab::app {

using nlohmann::json;

namespace {

struct Outcome {
  int exit_code = kExitSuccess;
  json result;
  std::string csv;
};

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return json(v).dump();
}

json numbers(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

json spectrum_json(const LyapunovSpectrum& s) {
  json levels = json::array();
  json multiplicities = json::array();
  for (const auto& l : s.levels()) {
    levels.push_back({{"value", number(l.value)}, {"multiplicity", l.multiplicity}});
    multiplicities.push_back(l.multiplicity);
  }
  json out = {{"values", numbers(s.values)}, {"levels", levels}, {"multiplicities", multiplicities}};
  if (!s.standard_error.empty()) out["standard_error"] = numbers(s.standard_error);
  return out;
}

CertificateInput certificate_input(const Params& p) {
  CertificateInput in;
  in.rho = p.rho.value_or(0.0);
  in.tau = p.tau.value_or(0.0);
  in.c = p.c.value_or(2.0);
  in.max_period = p.max_period.value_or(6);
  in.eps = p.eps;
  return in;
}

Outcome run_spectrum(const ExperimentConfig& cfg) {
  const Params& p = cfg.params;
  const int i = p.exterior.value_or(1);
  const MatrixGenerator g = i > 1 ? exterior_generator(cfg.generator, i) : cfg.generator;
  const auto steps = static_cast<std::size_t>(*p.steps);
  const auto spec = estimate_spectrum(g, *cfg.measure, steps, *p.seed);
  const auto birkhoff = sum_exponents_birkhoff(g, *cfg.measure, steps, *p.seed);
  Outcome out;
  out.result = spectrum_json(spec);
  out.result["steps"] = *p.steps;
  out.result["seed"] = *p.seed;
  out.result["exterior"] = i;
  out.result["dim"] = g.dim();
  out.result["sum_exact"] = number(sum_exponents(g, *cfg.measure));
  out.result["sum_birkhoff"] = {{"value", number(birkhoff.value)},
                                {"standard_error", number(birkhoff.standard_error)}};
  std::ostringstream csv;
  csv << "index,value,standard_error\n";
  for (int k = 0; k < spec.dim(); ++k) {
    csv << k + 1 << ',' << csv_number(spec.values[static_cast<std::size_t>(k)]) << ','
        << csv_number(spec.error(k)) << '\n';
  }
  out.csv = csv.str();
  return out;
}

Outcome run_periodic_scan(const ExperimentConfig& cfg) {
  const int max_period = *cfg.params.max_period;
  const auto scan = periodic_exponent_scan(cfg.generator, max_period, cfg.params.budget);
  Outcome out;
  json records = json::array();
  std::ostringstream csv;
  csv << "orbit,period,sum,top\n";
  for (const auto& rec : scan.records) {
    const auto spec = periodic_spectrum(cfg.generator, rec.orbit);
    records.push_back({{"orbit", rec.orbit.to_string()},
                       {"period", rec.orbit.period()},
                       {"sum", number(rec.sum)},
                       {"spectrum", numbers(spec.values)}});
    csv << rec.orbit.to_string() << ',' << rec.orbit.period() << ',' << csv_number(rec.sum) << ','
        << csv_number(spec.top()) << '\n';
  }
  out.result = {{"max_period", max_period},
                {"orbits", scan.records.size()},
                {"min", number(scan.min)},
                {"max", number(scan.max)},
                {"records", std::move(records)}};
  out.csv = csv.str();
  return out;
}

json certificate_json(const InvertibilityCertificate& cert, const MatrixGenerator& g) {
  json witness = nullptr;
  if (cert.witness) {
    witness = {{"orbit", cert.witness->orbit.to_string()},
               {"period", cert.witness->orbit.period()},
               {"sum", number(cert.witness->sum)}};
  }
  json out = {
      {"verdict", std::string(verdict_name(cert.verdict))},
      {"reason", std::string(reason_name(cert.reason))},
      {"bound",
       {{"rho", cert.input.rho},
        {"tau", cert.input.tau},
        {"alpha", cert.alpha},
        {"theta", cert.theta},
        {"c", cert.input.c},
        {"rho_plus_tau", cert.input.rho + cert.input.tau},
        {"alpha_theta_over_c", cert.limit},
        {"ok", cert.bound_ok}}},
      {"eps", number(resolve_eps(g, cert.input))},
      {"scan",
       {{"max_period", cert.input.max_period},
        {"orbits", cert.scan.records.size()},
        {"min", number(cert.scan.min)},
        {"max", number(cert.scan.max)}}},
      {"witness", witness},
      {"scope", "sufficient condition checked on periodic measures of period <= max_period"}};
  if (cert.ground_truth) {
    json singular = json::array();
    for (const auto& w : cert.ground_truth->singular_windows) singular.push_back(format_word(w));
    out["ground_truth"] = {{"invertible", cert.ground_truth->invertible},
                           {"singular_windows", singular}};
  } else {
    out["ground_truth"] = nullptr;
  }
  return out;
}

Outcome run_certify(const ExperimentConfig& cfg) {
  const Params& p = cfg.params;
  const CertificateInput in = certificate_input(p);
  const auto cert = certify_invertibility(cfg.generator, in, p.ground_truth.value_or(true), p.budget);
  Outcome out;
  out.result = certificate_json(cert, cfg.generator);
  out.exit_code = cert.verdict == Verdict::kCertified ? kExitSuccess : kExitNegative;

  std::ostringstream csv;
  csv << "rho,tau,bound_ok,verdict,reason,witness\n";
  const std::vector<double> rhos = p.rho_grid.empty() ? std::vector<double>{in.rho} : p.rho_grid;
  const std::vector<double> taus = p.tau_grid.empty() ? std::vector<double>{in.tau} : p.tau_grid;
  json sweep = json::array();
  for (double rho : rhos) {
    for (double tau : taus) {
      CertificateInput point = in;
      point.rho = rho;
      point.tau = tau;
      point.eps.reset();
      const auto c = certify_invertibility(cfg.generator, point, false, p.budget);
      const std::string witness = c.witness ? c.witness->orbit.to_string() : "";
      sweep.push_back({{"rho", rho},
                       {"tau", tau},
                       {"bound_ok", c.bound_ok},
                       {"verdict", std::string(verdict_name(c.verdict))},
                       {"reason", std::string(reason_name(c.reason))},
                       {"witness", witness}});
      csv << csv_number(rho) << ',' << csv_number(tau) << ',' << (c.bound_ok ? "true" : "false")
          << ',' << verdict_name(c.verdict) << ',' << reason_name(c.reason) << ',' << witness << '\n';
    }
  }
  if (!p.rho_grid.empty() || !p.tau_grid.empty()) out.result["sweep"] = std::move(sweep);
  out.csv = csv.str();
  return out;
}

Outcome run_growth_bound(const ExperimentConfig& cfg) {
  const Params& p = cfg.params;
  const CertificateInput in = certificate_input(p);
  const double eps = resolve_eps(cfg.generator, in);
  Outcome out;
  out.result = {{"rho", in.rho}, {"eps", number(eps)}, {"n_max", *p.n_max}};
  if (!(eps > 0.0)) {
    out.result["found"] = false;
    out.result["message"] = "eps resolves to a nonpositive value; pass params.eps";
    out.exit_code = kExitNegative;
    return out;
  }
  GrowthBound bound;
  try {
    bound = growth_constant(cfg.generator, in.rho, eps, *p.n_max, p.budget);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNotFound) throw;
    out.result["found"] = false;
    out.result["message"] = e.what();
    out.exit_code = kExitNegative;
    return out;
  }
  const int verify_n = *p.verify_n;
  const auto profile = sup_log_norm_profile(cfg.generator, verify_n, p.budget);
  const auto check = check_growth_profile(profile, bound);
  out.result["found"] = true;
  out.result["N"] = bound.N;
  out.result["c_eps"] = number(bound.c_eps);
  out.result["log_c_eps"] = number(bound.log_c_eps);
  out.result["check"] = {{"holds", check.holds},
                         {"checked_up_to", check.checked_up_to},
                         {"worst_margin", number(check.worst_margin)},
                         {"worst_n", check.worst_n}};
  out.result["sup_log_norm"] = numbers(profile);
  out.exit_code = check.holds ? kExitSuccess : kExitNegative;
  std::ostringstream csv;
  csv << "n,sup_log_norm,log_bound\n";
  for (int n = 0; n <= verify_n; ++n) {
    csv << n << ',' << csv_number(profile[static_cast<std::size_t>(n)]) << ','
        << csv_number(bound.log_c_eps + (bound.rho + bound.eps) * n) << '\n';
  }
  out.csv = csv.str();
  return out;
}

Outcome run_shadow(const ExperimentConfig& cfg) {
  const Params& p = cfg.params;
  const Sft& s = cfg.sft;
  Outcome out;
  out.result = json::object();
  bool ok = true;
  if (p.point) {
    const SymbolicPoint x = SymbolicPoint::extend(s, parse_word(*p.point), *p.point_start);
    const Shadow sh = shadow_segment(s, x, *p.n, p.centered.value_or(false));
    const ShadowCheck check = check_shadowing(s, sh, x);
    json mismatch = json::array();
    for (const auto& m : check.mismatch) mismatch.push_back(m ? json(*m) : json(nullptr));
    out.result["shadow"] = {{"x", point_json(x)},
                            {"n", *p.n},
                            {"centered", p.centered.value_or(false)},
                            {"block", format_word(sh.block)},
                            {"block_start", sh.block_start},
                            {"segment_length", sh.segment_length},
                            {"return_time", sh.return_time},
                            {"mixing_constant", s.mixing_constant()},
                            {"orbit", sh.orbit.to_string()},
                            {"holds", check.holds},
                            {"mismatch", mismatch}};
    ok = ok && check.holds;
  }
  if (p.word) {
    const Closing c = anosov_close(s, parse_word(*p.word), true);
    out.result["closing"] = {{"word", *p.word},
                             {"orbit", c.orbit.to_string()},
                             {"point", point_json(c.point)},
                             {"z", point_json(c.report->z)},
                             {"y", point_json(c.report->y)},
                             {"closing_distance", number(c.report->closing_distance)},
                             {"c2", number(c.report->c2)}};
  }
  out.exit_code = ok ? kExitSuccess : kExitNegative;
  return out;
}

Outcome run_livsic_check(const ExperimentConfig& cfg) {
  const Params& p = cfg.params;
  const auto check = check_periodic_obstruction(cfg.generator, *p.max_period, *p.tol, p.budget);
  Outcome out;
  out.result = {{"holds", check.holds},
                {"worst_defect", number(check.worst_defect)},
                {"worst_orbit", check.worst_orbit ? json(check.worst_orbit->to_string()) : json(nullptr)},
                {"witness", check.witness ? json(check.witness->to_string()) : json(nullptr)},
                {"witness_defect", check.witness ? number(check.witness_defect) : json(nullptr)},
                {"orbits_checked", check.orbits_checked},
                {"tol", *p.tol},
                {"max_period", *p.max_period}};
  out.exit_code = check.holds ? kExitSuccess : kExitNegative;
  return out;
}

SolveOptions solve_options(const Params& p) {
  SolveOptions opts;
  opts.tol = *p.tol;
  opts.obstruction_period = *p.obstruction_period;
  opts.gauge = p.gauge;
  opts.budget = p.budget;
  return opts;
}

// Obstruction failures are the expected negative answer; coverage gaps mean
// the walk budget was too small.
std::optional<Outcome> solve_failure(const Error& e) {
  Outcome out;
  if (e.code() == ErrorCode::kObstructionFailed) {
    out.exit_code = kExitNegative;
  } else if (e.code() == ErrorCode::kCoverageIncomplete) {
    out.exit_code = kExitInconclusive;
  } else {
    return std::nullopt;
  }
  out.result = {{"solved", false},
                {"error", {{"code", std::string(error_name(e.code()))}, {"message", e.what()}}}};
  return out;
}

Outcome run_livsic_solve(const ExperimentConfig& cfg) {
  const Params& p = cfg.params;
  try {
    const auto table = solve_coboundary(cfg.generator, *p.depth,
                                        static_cast<std::size_t>(*p.orbit_budget), solve_options(p));
    Outcome out;
    out.result = {{"solved", true}, {"entries", table.entries.size()}, {"table", to_json(table)}};
    return out;
  } catch (const Error& e) {
    if (auto failed = solve_failure(e)) return *failed;
    throw;
  }
}

TransferTable load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open transfer table '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError({"transfer table: invalid JSON: " + std::string(e.what())});
  }
  // Accept a livsic-solve result document as well as a bare table.
  if (j.contains("result") && j["result"].contains("table")) return transfer_table_from_json(j["result"]["table"]);
  return transfer_table_from_json(j);
}

Outcome run_livsic_verify(const ExperimentConfig& cfg) {
  const Params& p = cfg.params;
  TransferTable table;
  if (p.table_path) {
    table = load_table(*p.table_path);
  } else {
    try {
      table = solve_coboundary(cfg.generator, *p.depth, static_cast<std::size_t>(*p.orbit_budget),
                               solve_options(p));
    } catch (const Error& e) {
      if (auto failed = solve_failure(e)) return *failed;
      throw;
    }
  }
  const auto check = verify_coboundary(cfg.generator, table, static_cast<std::size_t>(*p.samples),
                                       *p.seed, p.budget);
  Outcome out;
  out.result = {{"table_source", p.table_path ? "file" : "solved"},
                {"depth", table.depth},
                {"oscillation", number(table.oscillation)},
                {"max_defect", number(check.max_defect)},
                {"worst_window", format_word(check.worst_window)},
                {"window_start", check.window_start},
                {"windows_checked", check.windows_checked},
                {"samples_checked", check.samples_checked},
                {"defect_tol", *p.defect_tol}};
  try {
    const auto h = inverse_holder_bound(cfg.generator);
    out.result["inverse_holder"] = {{"c", number(h.c)},
                                    {"c_literal", number(h.c_literal)},
                                    {"c1", number(h.c1)},
                                    {"bound", number(h.bound)},
                                    {"pairs_checked", h.pairs_checked},
                                    {"max_ratio", number(h.max_ratio)},
                                    {"holds", h.holds}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingularWindow) throw;
    out.result["inverse_holder"] = {{"error", e.what()}};
  }
  const int k = *p.max_period;
  const auto periodic = check_periodic_obstruction(cfg.generator, k, *p.tol, p.budget);
  out.result["periodic"] = {{"max_period", k},
                            {"observed_worst_defect", number(periodic.worst_defect)},
                            {"telescoped_bound", number(periodic_defect_bound(table, check.max_defect, k))}};
  out.exit_code = check.max_defect <= *p.defect_tol ? kExitSuccess : kExitNegative;
  return out;
}

Outcome run_contradiction(const ExperimentConfig& cfg) {
  const Params& p = cfg.params;
  const bool det = p.determinant.value_or(false);
  const MatrixGenerator g = det ? exterior_generator(cfg.generator, cfg.generator.dim()) : cfg.generator;
  Word window;
  if (p.window) {
    window = parse_word(*p.window);
  } else {
    // Smallest-norm window, first in table order on ties.
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < g.window_count(); ++s) {
      const double n = spectral_norm(g.matrices()[s]);
      if (n < best) {
        best = n;
        window = g.windows()[s];
      }
    }
  }
  ContradictionOptions opts;
  opts.n_max = *p.n_max;
  opts.growth_n_max = *p.growth_n_max;
  opts.budget = p.budget;
  Outcome out;
  ContradictionReport rep;
  try {
    rep = singularity_contradiction(g, window, certificate_input(p), opts);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kHypothesisUnavailable) throw;
    out.exit_code = kExitInconclusive;
    out.result = {{"window", format_word(window)},
                  {"determinant", det},
                  {"status", "hypothesis unavailable"},
                  {"message", e.what()}};
    return out;
  }
  json steps = json::array();
  for (const auto& st : rep.steps) {
    steps.push_back({{"n", st.n},
                     {"period", st.period},
                     {"log_norm", number(st.log_norm)},
                     {"measured_rate", number(st.measured_rate)},
                     {"chain_rate", number(st.chain_rate)},
                     {"corrected_rate", number(st.corrected_rate)},
                     {"measured_violation", st.measured_violation},
                     {"chain_violation", st.chain_violation}});
  }
  out.result = {
      {"window", format_word(rep.window)},
      {"determinant", det},
      {"premise", std::string(premise_name(rep.premise))},
      {"window_norm", number(rep.window_norm)},
      {"status", rep.derivable ? "contradiction" : "no contradiction derivable"},
      {"rho", rep.rho},
      {"tau", rep.tau},
      {"eps", number(rep.eps)},
      {"alpha", rep.alpha},
      {"theta", rep.theta},
      {"mixing_constant", rep.mixing},
      {"delta", rep.delta},
      {"growth", {{"N", rep.growth.N}, {"c_eps", number(rep.growth.c_eps)}}},
      {"c1", number(rep.c1)},
      {"log_c_hat", number(rep.log_c_hat)},
      {"threshold_n", rep.threshold_n ? json(*rep.threshold_n) : json(nullptr)},
      {"contradiction_n", rep.contradiction_n ? json(*rep.contradiction_n) : json(nullptr)},
      {"steps", steps}};
  return out;
}

Outcome dispatch(const ExperimentConfig& cfg) {
  const std::string& c = cfg.command;
  if (c == "spectrum") return run_spectrum(cfg);
  if (c == "periodic-scan") return run_periodic_scan(cfg);
  if (c == "certify") return run_certify(cfg);
  if (c == "growth-bound") return run_growth_bound(cfg);
  if (c == "shadow") return run_shadow(cfg);
  if (c == "livsic-check") return run_livsic_check(cfg);
  if (c == "livsic-solve") return run_livsic_solve(cfg);
  if (c == "livsic-verify") return run_livsic_verify(cfg);
  if (c == "contradiction") return run_contradiction(cfg);
  throw Error(ErrorCode::kInvalidArgument, "unknown command '" + c + "'");
}

std::string status_of(int code) {
  switch (code) {
    case kExitSuccess: return "ok";
    case kExitNegative: return "negative";
    case kExitInconclusive: return "inconclusive";
    default: return "error";
  }
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

json error_document(const std::string& command, const json& config, const std::exception& e) {
  json error = {{"message", e.what()}};
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    error["code"] = std::string(error_name(err->code()));
  } else {
    error["code"] = "Internal";
  }
  if (const auto* schema = dynamic_cast<const SchemaError*>(&e)) error["violations"] = schema->violations();
  return {{"command", command},
          {"version", version_string()},
          {"config", config},
          {"status", "error"},
          {"error", error}};
}

CommandOutput execute(const ExperimentConfig& cfg) {
  CommandOutput out;
  try {
    Outcome o = dispatch(cfg);
    out.exit_code = o.exit_code;
    out.csv = std::move(o.csv);
    out.document = {{"command", cfg.command},
                    {"version", version_string()},
                    {"config", cfg.resolved},
                    {"status", status_of(o.exit_code)},
                    {"result", std::move(o.result)}};
  } catch (const Error& e) {
    out.document = error_document(cfg.command, cfg.resolved, e);
    out.exit_code = e.code() == ErrorCode::kBudgetExceeded ? kExitInconclusive : kExitError;
    out.document["status"] = status_of(out.exit_code);
  } catch (const std::exception& e) {
    out.document = error_document(cfg.command, cfg.resolved, e);
    out.exit_code = kExitError;
  }
  return out;
}

int run(const ExperimentConfig& cfg) {
  const std::string started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  CommandOutput out = execute(cfg);
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const std::filesystem::path dir(cfg.out_dir);
  write_atomic(dir / (cfg.command + ".json"), dump(out.document));
  if (cfg.csv && !out.csv.empty()) write_atomic(dir / (cfg.command + ".csv"), out.csv);
  const json meta = {{"command", cfg.command},
                     {"version", version_string()},
                     {"started_at", started},
                     {"finished_at", utc_now()},
                     {"elapsed_seconds", elapsed},
                     {"exit_code", out.exit_code}};
  write_atomic(dir / (cfg.command + ".meta.json"), dump(meta));
  return out.exit_code;
}

}  // namespace cocyclelab::app
