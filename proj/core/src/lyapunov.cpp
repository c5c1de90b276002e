#include "cocyclelab/lyapunov.hpp"

#include "cocyclelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace cocyclelab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kProbabilityTolerance = 1e-12;

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, msg);
}

void check_distribution(const std::vector<double>& p, const std::string& what) {
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) invalid(what + " has a negative or non-finite entry");
    total += v;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) invalid(what + " does not sum to 1");
}

double standard_error_of(const std::vector<double>& batch_means) {
  const std::size_t nb = batch_means.size();
  if (nb < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mean = std::accumulate(batch_means.begin(), batch_means.end(), 0.0) /
                      static_cast<double>(nb);
  double ss = 0.0;
  for (double b : batch_means) ss += (b - mean) * (b - mean);
  return std::sqrt(ss / static_cast<double>(nb - 1)) / std::sqrt(static_cast<double>(nb));
}

std::vector<std::size_t> sampled_slots(const MatrixGenerator& g, const ErgodicMeasure& mu,
                                       std::size_t steps, std::uint64_t seed) {
  Rng rng(seed);
  const Word symbols = mu.sample(steps + 2 * static_cast<std::size_t>(g.radius()), rng);
  return g.slots_along(symbols);
}

}  // namespace

std::size_t Rng::categorical(const std::vector<double>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double u = uniform() * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

ErgodicMeasure ErgodicMeasure::bernoulli(const Sft& s, std::vector<double> probabilities) {
  if (static_cast<int>(probabilities.size()) != s.alphabet_size()) {
    invalid("Bernoulli measure needs one probability per symbol");
  }
  check_distribution(probabilities, "Bernoulli probability vector");
  for (Symbol a = 0; a < s.alphabet_size(); ++a) {
    for (Symbol b = 0; b < s.alphabet_size(); ++b) {
      if (probabilities[a] > 0.0 && probabilities[b] > 0.0 && !s.allowed(a, b)) {
        invalid("Bernoulli support contains forbidden transition " + std::to_string(a) + "->" +
                std::to_string(b));
      }
    }
  }
  ErgodicMeasure mu;
  mu.kind_ = Kind::kBernoulli;
  mu.alphabet_ = s.alphabet_size();
  mu.stationary_ = std::move(probabilities);
  return mu;
}

ErgodicMeasure ErgodicMeasure::markov(const Sft& s, std::vector<std::vector<double>> stochastic) {
  const int k = s.alphabet_size();
  if (static_cast<int>(stochastic.size()) != k) invalid("Markov matrix must be k x k");
  for (int a = 0; a < k; ++a) {
    if (static_cast<int>(stochastic[a].size()) != k) invalid("Markov matrix must be k x k");
    check_distribution(stochastic[a], "Markov row " + std::to_string(a));
    for (int b = 0; b < k; ++b) {
      if (stochastic[a][b] > 0.0 && !s.allowed(a, b)) {
        invalid("Markov matrix charges forbidden transition " + std::to_string(a) + "->" +
                std::to_string(b));
      }
    }
  }
  // pi (P - I) = 0 with one equation replaced by sum(pi) = 1.
  Matrix lhs(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) lhs(b, a) = stochastic[a][b] - (a == b ? 1.0 : 0.0);
  }
  lhs.row(k - 1).setOnes();
  Vector rhs = Vector::Zero(k);
  rhs(k - 1) = 1.0;
  Eigen::FullPivLU<Matrix> lu(lhs);
  if (lu.rank() < k) invalid("Markov chain has no unique stationary vector");
  Vector pi = lu.solve(rhs);
  std::vector<double> stationary(static_cast<std::size_t>(k));
  for (int a = 0; a < k; ++a) {
    if (pi(a) < -kProbabilityTolerance) invalid("Markov stationary vector is not nonnegative");
    stationary[static_cast<std::size_t>(a)] = std::max(0.0, pi(a));
  }
  ErgodicMeasure mu;
  mu.kind_ = Kind::kMarkov;
  mu.alphabet_ = k;
  mu.stationary_ = std::move(stationary);
  mu.transition_ = std::move(stochastic);
  return mu;
}

double ErgodicMeasure::transition(Symbol a, Symbol b) const {
  if (kind_ == Kind::kBernoulli) return stationary_[static_cast<std::size_t>(b)];
  return transition_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
}

double ErgodicMeasure::cylinder(const Word& w) const {
  if (w.empty()) return 1.0;
  double m = stationary_[static_cast<std::size_t>(w.front())];
  for (std::size_t i = 1; i < w.size() && m > 0.0; ++i) m *= transition(w[i - 1], w[i]);
  return m;
}

Word ErgodicMeasure::sample(std::size_t n, Rng& rng) const {
  Word out;
  out.reserve(n);
  if (n == 0) return out;
  out.push_back(static_cast<Symbol>(rng.categorical(stationary_)));
  if (kind_ == Kind::kBernoulli) {
    for (std::size_t i = 1; i < n; ++i) out.push_back(static_cast<Symbol>(rng.categorical(stationary_)));
    return out;
  }
  for (std::size_t i = 1; i < n; ++i) {
    out.push_back(static_cast<Symbol>(
        rng.categorical(transition_[static_cast<std::size_t>(out.back())])));
  }
  return out;
}

// Spectrum containers

double LyapunovSpectrum::partial_sum(int i) const {
  double acc = 0.0;
  for (int j = 0; j < i; ++j) acc += values[static_cast<std::size_t>(j)];
  return acc;
}

std::vector<LyapunovLevel> LyapunovSpectrum::levels(double abs_tol, double se_factor) const {
  std::vector<LyapunovLevel> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!out.empty()) {
      const std::size_t prev = i - 1;
      const double u = values[prev];
      bool merge = false;
      if (std::isinf(u) || std::isinf(v)) {
        merge = u == v;
      } else {
        double se = 0.0;
        if (!standard_error.empty()) {
          const double a = standard_error[prev];
          const double b = standard_error[i];
          se = (std::isfinite(a) ? a : 0.0) + (std::isfinite(b) ? b : 0.0);
        }
        merge = std::abs(u - v) <= abs_tol + se_factor * se;
      }
      if (merge) {
        // Level value is the mean of its members.
        auto& level = out.back();
        if (std::isfinite(level.value)) {
          level.value = (level.value * level.multiplicity + v) / (level.multiplicity + 1);
        }
        ++level.multiplicity;
        continue;
      }
    }
    out.push_back({v, 1});
  }
  return out;
}

LyapunovSpectrum make_spectrum(std::vector<double> values, std::vector<double> standard_error) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  LyapunovSpectrum out;
  for (std::size_t i : order) {
    out.values.push_back(values[i]);
    if (!standard_error.empty()) out.standard_error.push_back(standard_error[i]);
  }
  return out;
}

LyapunovSpectrum estimate_spectrum(const MatrixGenerator& g, const ErgodicMeasure& mu,
                                   std::size_t steps, std::uint64_t seed) {
  if (steps < 1) invalid("steps must be >= 1");
  const int d = g.dim();
  const auto slots = sampled_slots(g, mu, steps, seed);
  const auto& mats = g.matrices();

  Matrix frame = Matrix::Identity(d, d);
  int live = d;
  std::vector<double> sums(static_cast<std::size_t>(d), 0.0);
  std::vector<double> batch(static_cast<std::size_t>(d), 0.0);
  std::vector<std::vector<double>> batch_means(static_cast<std::size_t>(d));
  std::vector<double> stretch(static_cast<std::size_t>(d), 0.0);

  for (std::size_t step = 0; step < steps; ++step) {
    if (live > 0) {
      const Matrix image = mats[slots[step]] * frame;
      Eigen::HouseholderQR<Matrix> qr(image);
      const Matrix& packed = qr.matrixQR();
      double rmin = std::numeric_limits<double>::infinity();
      double rmax = 0.0;
      for (int i = 0; i < live; ++i) {
        const double r = std::abs(packed(i, i));
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
      }
      bool reduced = false;
      // Cheap trigger, then a singular-value decision on the image.
      if (rmax == 0.0 || rmin < 1e-6 * rmax) {
        Eigen::JacobiSVD<Matrix> svd(image, Eigen::ComputeThinU);
        const Vector& sv = svd.singularValues();
        int rank = 0;
        for (int i = 0; i < live; ++i) {
          if (sv(i) > 0.0 && sv(i) >= kSingularityThreshold * sv(0)) ++rank;
        }
        if (rank < live) {
          // Rotate the frame so the collapsing directions come last and
          // freeze them at -inf.
          frame = svd.matrixU().leftCols(rank);
          for (int i = 0; i < rank; ++i) stretch[static_cast<std::size_t>(i)] = std::log(sv(i));
          live = rank;
          reduced = true;
        }
      }
      if (!reduced) {
        frame = qr.householderQ() * Matrix::Identity(d, live);
        for (int i = 0; i < live; ++i) {
          stretch[static_cast<std::size_t>(i)] = std::log(std::abs(packed(i, i)));
        }
      }
      for (int i = 0; i < live; ++i) {
        sums[static_cast<std::size_t>(i)] += stretch[static_cast<std::size_t>(i)];
        batch[static_cast<std::size_t>(i)] += stretch[static_cast<std::size_t>(i)];
      }
    }
    if ((step + 1) % kBatchLength == 0) {
      for (int i = 0; i < live; ++i) {
        batch_means[static_cast<std::size_t>(i)].push_back(batch[static_cast<std::size_t>(i)] /
                                                           static_cast<double>(kBatchLength));
      }
      std::fill(batch.begin(), batch.end(), 0.0);
    }
  }

  std::vector<double> values(static_cast<std::size_t>(d), kNegInf);
  std::vector<double> errors(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < live; ++i) {
    values[static_cast<std::size_t>(i)] = sums[static_cast<std::size_t>(i)] / static_cast<double>(steps);
    errors[static_cast<std::size_t>(i)] = standard_error_of(batch_means[static_cast<std::size_t>(i)]);
  }
  return make_spectrum(std::move(values), std::move(errors));
}

LyapunovSpectrum periodic_spectrum(const MatrixGenerator& g, const PeriodicOrbit& p) {
  const SymbolicPoint x = p.point(g.sft());
  const long k = p.period();
  const Word symbols = x.window(-g.radius(), k + 2L * g.radius());
  const auto slots = g.slots_along(symbols);
  bool singular_factor = false;
  ScaledMatrix product = ScaledMatrix::identity(g.dim());
  for (std::size_t s : slots) {
    singular_factor |= is_numerically_singular(g.matrices()[s]);
    product.left_multiply(g.matrices()[s]);
  }
  const int d = g.dim();
  std::vector<double> values(static_cast<std::size_t>(d), kNegInf);
  if (product.is_zero()) return make_spectrum(std::move(values));

  Eigen::EigenSolver<Matrix> eig(product.body(), false);
  std::vector<double> moduli;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    moduli.push_back(std::abs(eig.eigenvalues()(i)));
  }
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  int zeros = 0;
  if (singular_factor) {
    // Algebraic multiplicity of 0 is d - rank(M^d).
    ScaledMatrix power = ScaledMatrix::identity(d);
    for (int i = 0; i < d; ++i) power.left_multiply(product.body());
    if (power.is_zero()) {
      zeros = d;
    } else {
      Eigen::JacobiSVD<Matrix> svd(power.body());
      const Vector& sv = svd.singularValues();
      int rank = 0;
      for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) >= kSingularityThreshold * sv(0)) ++rank;
      }
      zeros = d - rank;
    }
  }
  for (int i = 0; i < d - zeros; ++i) {
    const double m = moduli[static_cast<std::size_t>(i)];
    values[static_cast<std::size_t>(i)] =
        m > 0.0 ? (product.log_scale() + std::log(m)) / static_cast<double>(k) : kNegInf;
  }
  return make_spectrum(std::move(values));
}

double sum_exponents(const MatrixGenerator& g, const PeriodicOrbit& p) {
  const SymbolicPoint x = p.point(g.sft());
  const long k = p.period();
  const auto slots = g.slots_along(x.window(-g.radius(), k + 2L * g.radius()));
  double acc = 0.0;
  for (std::size_t s : slots) {
    const double l = log_abs_det(g.matrices()[s]);
    if (l == kNegInf) return kNegInf;
    acc += l;
  }
  return acc / static_cast<double>(k);
}

double sum_exponents(const MatrixGenerator& g, const ErgodicMeasure& mu) {
  double acc = 0.0;
  for (std::size_t s = 0; s < g.window_count(); ++s) {
    const double weight = mu.cylinder(g.windows()[s]);
    if (weight == 0.0) continue;
    const double l = log_abs_det(g.matrices()[s]);
    if (l == kNegInf) return kNegInf;
    acc += weight * l;
  }
  return acc;
}

Estimate sum_exponents_birkhoff(const MatrixGenerator& g, const ErgodicMeasure& mu,
                                std::size_t steps, std::uint64_t seed) {
  if (steps < 1) invalid("steps must be >= 1");
  std::vector<double> per_slot(g.window_count());
  for (std::size_t s = 0; s < g.window_count(); ++s) per_slot[s] = log_abs_det(g.matrices()[s]);
  const auto slots = sampled_slots(g, mu, steps, seed);
  double total = 0.0;
  double batch = 0.0;
  std::vector<double> means;
  for (std::size_t step = 0; step < steps; ++step) {
    const double l = per_slot[slots[step]];
    if (l == kNegInf) return {kNegInf, 0.0};
    total += l;
    batch += l;
    if ((step + 1) % kBatchLength == 0) {
      means.push_back(batch / static_cast<double>(kBatchLength));
      batch = 0.0;
    }
  }
  return {total / static_cast<double>(steps), standard_error_of(means)};
}

namespace {

// Depth-first walk over admissible words keeping A^n / ||A^n|| for every
// prefix on a stack. Fixed-size matrices for small dimensions make the inner
// loop allocation free.
template <int D>
class ProfileWalker {
 public:
  using Mat = Eigen::Matrix<double, D, D>;

  ProfileWalker(const MatrixGenerator& g, int n_max, std::vector<double>& profile)
      : s_(g.sft()), k_(g.sft().alphabet_size()), window_(g.window_length()),
        radius_(g.radius()), total_(n_max + 2 * g.radius()), profile_(profile) {
    const Mat id = Mat::Identity(g.dim(), g.dim());
    bodies_.assign(static_cast<std::size_t>(n_max) + 1, id);
    logs_.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    modulus_ = 1;
    for (int i = 0; i < window_; ++i) modulus_ *= static_cast<std::size_t>(k_);
    factors_.resize(modulus_, id);
    for (std::size_t i = 0; i < g.window_count(); ++i) {
      std::size_t code = 0;
      for (Symbol a : g.windows()[i]) code = code * static_cast<std::size_t>(k_) + static_cast<std::size_t>(a);
      factors_[code] = g.matrices()[i];
    }
  }

  void run() { grow(0, 0, 0); }

 private:
  static double norm_of(const Mat& m) {
    if constexpr (D == 1) {
      return std::abs(m(0, 0));
    } else if constexpr (D == 2) {
      const double f = m.squaredNorm();
      const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
      return std::sqrt(0.5 * (f + std::sqrt(std::max(0.0, f * f - 4.0 * det * det))));
    } else {
      return spectral_norm(m);
    }
  }

  void grow(int length, Symbol last, std::size_t code) {
    const int next_length = length + 1;
    for (Symbol a = 0; a < k_; ++a) {
      if (length > 0 && !s_.allowed(last, a)) continue;
      const std::size_t next_code =
          (code * static_cast<std::size_t>(k_) + static_cast<std::size_t>(a)) % modulus_;
      if (next_length >= window_) {
        const auto n = static_cast<std::size_t>(next_length - 2 * radius_);
        Mat& body = bodies_[n];
        body.noalias() = factors_[next_code] * bodies_[n - 1];
        const double norm = norm_of(body);
        if (norm == 0.0) continue;  // zero product: the whole branch is -inf
        body /= norm;
        logs_[n] = logs_[n - 1] + std::log(norm);
        if (logs_[n] > profile_[n]) profile_[n] = logs_[n];
      }
      if (next_length < total_) grow(next_length, a, next_code);
    }
  }

  const Sft& s_;
  int k_;
  int window_;
  int radius_;
  int total_;
  std::size_t modulus_ = 1;
  std::vector<Mat> factors_;  // by base-k window code
  std::vector<Mat> bodies_;
  std::vector<double> logs_;
  std::vector<double>& profile_;
};

}  // namespace

std::vector<double> sup_log_norm_profile(const MatrixGenerator& g, int n_max, std::size_t budget) {
  if (n_max < 0) invalid("n_max must be >= 0");
  std::vector<double> profile(static_cast<std::size_t>(n_max) + 1, kNegInf);
  profile[0] = 0.0;
  if (n_max == 0) return profile;

  const int total_length = n_max + 2 * g.radius();
  if (g.sft().count_words(total_length) > budget) {
    throw Error(ErrorCode::kBudgetExceeded,
                "windows of length " + std::to_string(total_length) + " exceed budget " +
                    std::to_string(budget));
  }
  std::size_t codes = 1;
  for (int i = 0; i < g.window_length(); ++i) {
    codes *= static_cast<std::size_t>(g.sft().alphabet_size());
    if (codes > (std::size_t{1} << 22)) invalid("window code space too large for exhaustive search");
  }
  switch (g.dim()) {
    case 1: ProfileWalker<1>(g, n_max, profile).run(); break;
    case 2: ProfileWalker<2>(g, n_max, profile).run(); break;
    case 3: ProfileWalker<3>(g, n_max, profile).run(); break;
    case 4: ProfileWalker<4>(g, n_max, profile).run(); break;
    default: ProfileWalker<Eigen::Dynamic>(g, n_max, profile).run(); break;
  }
  return profile;
}

double exact_sup_log_norm(const MatrixGenerator& g, int n, std::size_t budget) {
  return sup_log_norm_profile(g, n, budget).back();
}

int find_uniform_N(const MatrixGenerator& g, double rho, double eps, int n_max, std::size_t budget) {
  if (!(eps > 0.0)) invalid("eps must be > 0");
  if (n_max < 1) invalid("n_max must be >= 1");
  const double rate = rho + eps;
  int depth = std::min(n_max, 8);
  while (true) {
    const auto profile = sup_log_norm_profile(g, depth, budget);
    for (int n = 1; n <= depth; ++n) {
      if (std::max(0.0, profile[static_cast<std::size_t>(n)]) < rate * n) return n;
    }
    if (depth == n_max) break;
    depth = std::min(n_max, 2 * depth);
  }
  throw Error(ErrorCode::kNotFound,
              "no N <= " + std::to_string(n_max) +
                  " with sup log||A~^N|| < (rho + eps) N; the top exponent likely exceeds rho");
}

GrowthBound growth_constant(const MatrixGenerator& g, double rho, double eps, int n_max,
                            std::size_t budget) {
  GrowthBound out;
  out.rho = rho;
  out.eps = eps;
  out.N = find_uniform_N(g, rho, eps, n_max, budget);
  const auto profile = sup_log_norm_profile(g, out.N, budget);
  double log_c = 0.0;  // j = 0 term: ||A~^0|| = 1
  for (double v : profile) log_c = std::max(log_c, v);
  out.log_c_eps = log_c;
  out.c_eps = std::exp(log_c);
  return out;
}

GrowthCheck check_growth_profile(const std::vector<double>& profile, const GrowthBound& bound,
                                 double rel_tol) {
  GrowthCheck out;
  out.checked_up_to = static_cast<int>(profile.size()) - 1;
  out.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < profile.size(); ++n) {
    const double rhs = bound.log_c_eps + (bound.rho + bound.eps) * static_cast<double>(n);
    const double margin = rhs - profile[n];
    if (margin < out.worst_margin) {
      out.worst_margin = margin;
      out.worst_n = static_cast<int>(n);
    }
    // ||A^n|| <= (1 + rel_tol) C e^{(rho + eps) n}, in logs.
    if (margin < -std::log1p(rel_tol)) out.holds = false;
  }
  return out;
}

GrowthCheck verify_growth_bound(const MatrixGenerator& g, const GrowthBound& bound, int n_max,
                                double rel_tol, std::size_t budget) {
  return check_growth_profile(sup_log_norm_profile(g, n_max, budget), bound, rel_tol);
}

}  // namespace cocyclelab
