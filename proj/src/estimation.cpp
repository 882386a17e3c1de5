#include <seqmet/estimation.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <seqmet/numeric.hpp>

namespace seqmet {

namespace {

constexpr double kProbFloor = 1e-12;

double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

double clamped_log_prob(double p) {
  const double c = std::min(1.0 - kProbFloor, std::max(kProbFloor, p));
  return std::log(c);
}

double joint_log_likelihood(const std::vector<MeasurementBatch>& batches,
                            const ProbabilityModel& model, double x) {
  double ll = 0;
  for (const auto& b : batches) {
    const double p = model(x, b.protocol);
    ll += static_cast<double>(b.n_plus) * clamped_log_prob(p) +
          static_cast<double>(b.n_total - b.n_plus) * clamped_log_prob(1.0 - p);
  }
  return ll;
}

// Scans an inclusive uniform grid, keeping the smallest argmax.
void scan_grid(const std::vector<MeasurementBatch>& batches,
               const ProbabilityModel& model, double lo, double hi, int points,
               double* best_x, double* best_ll, double* min_ll) {
  for (int i = 0; i < points; ++i) {
    const double x =
        lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    const double ll = joint_log_likelihood(batches, model, x);
    if (ll > *best_ll) {
      *best_ll = ll;
      *best_x = x;
    }
    if (min_ll != nullptr && ll < *min_ll) *min_ll = ll;
  }
}

void require_interval(double lo, double hi, const char* where) {
  if (!(hi > lo))
    throw std::invalid_argument(std::string(where) +
                                ": interval must satisfy lo < hi");
}

// Inverse CDF by bisection; the prior cdf is monotone with cdf(lo)=0,
// cdf(hi)=1.
double invert_cdf(const PriorDistribution& prior, double u) {
  double lo = prior.lo;
  double hi = prior.hi;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * (prior.hi - prior.lo); ++i) {
    const double mid = 0.5 * (lo + hi);
    (prior.cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

PrecisionStats stats_from_samples(const std::vector<double>& samples,
                                  long long n, bool about_mean) {
  PrecisionStats s;
  s.K = static_cast<int>(samples.size());
  s.n = n;
  double sum = 0;
  for (double v : samples) sum += v;
  s.mean = sum / static_cast<double>(s.K);
  double ss = 0;
  if (about_mean) {
    for (double v : samples) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.K - 1));
  } else {
    for (double v : samples) ss += v * v;
    s.std = std::sqrt(ss / static_cast<double>(s.K));
  }
  s.std_err = s.std / std::sqrt(2.0 * static_cast<double>(s.K - 1));
  s.sqrt_fisher_emp =
      s.std > 0 ? 1.0 / (s.std * std::sqrt(static_cast<double>(n)))
                : std::numeric_limits<double>::infinity();
  return s;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + (k + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

MeasurementBatch sample_batch(double p_plus, long long n,
                              std::uint64_t rng_seed) {
  if (n < 1) throw std::invalid_argument("sample_batch: n must be at least 1");
  if (p_plus < -tol::prob_guard || p_plus > 1.0 + tol::prob_guard)
    throw std::invalid_argument("sample_batch: probability outside [0, 1]");
  const double p = std::min(1.0, std::max(0.0, p_plus));
  std::mt19937_64 eng(rng_seed);
  MeasurementBatch b;
  b.n_total = n;
  for (long long i = 0; i < n; ++i) {
    if (uniform01(eng) < p) ++b.n_plus;
  }
  return b;
}

ProbabilityModel standard_model() {
  return [](double x, const ProtocolConfig& pc) {
    return model_probability(x, pc);
  };
}

MleResult mle_estimate(const std::vector<MeasurementBatch>& batches,
                       const ProbabilityModel& model, double lo, double hi,
                       int grid_size) {
  if (batches.empty())
    throw std::invalid_argument("mle_estimate: need at least one batch");
  require_interval(lo, hi, "mle_estimate");
  if (grid_size < 2)
    throw std::invalid_argument("mle_estimate: grid needs at least 2 points");

  double best_x = lo;
  double best_ll = -std::numeric_limits<double>::infinity();
  double min_ll = std::numeric_limits<double>::infinity();
  scan_grid(batches, model, lo, hi, grid_size, &best_x, &best_ll, &min_ll);

  MleResult r;
  if (best_ll - min_ll <= 1e-11 * (1.0 + std::abs(best_ll))) {
    r.estimate = 0.5 * (lo + hi);
    r.degenerate = true;
    return r;
  }

  const double step = (hi - lo) / static_cast<double>(grid_size - 1);
  const double rlo = std::max(lo, best_x - step);
  const double rhi = std::min(hi, best_x + step);
  scan_grid(batches, model, rlo, rhi, 64, &best_x, &best_ll, nullptr);
  r.estimate = best_x;
  return r;
}

EstimationRun adaptive_run(double x_true, int blocks, double t, int iterations,
                           long long batch_size, std::uint64_t seed, double lo,
                           double hi) {
  if (iterations < 1)
    throw std::invalid_argument("adaptive_run: iterations must be at least 1");
  if (batch_size < 1)
    throw std::invalid_argument("adaptive_run: batch size must be at least 1");
  require_interval(lo, hi, "adaptive_run");

  const ProbabilityModel model = standard_model();
  EstimationRun run;
  run.x_true = x_true;
  run.seed = seed;
  run.batches.reserve(iterations);
  run.estimates.reserve(iterations);

  const double mid = 0.5 * (lo + hi);
  double xhat = mid;
  for (int i = 0; i < iterations; ++i) {
    // the first two batches read both quadratures at the fixed midpoint:
    // either fringe alone leaves a mirror root with identical likelihood,
    // and pinning the phase before the loop trusts its own estimates keeps
    // one unlucky batch from steering the design onto a self-consistent
    // wrong branch. later batches stay on the quadrature fringe, which is
    // steepest at the design point and so loses nothing at small samples
    const double beta = i == 1 ? 0.0 : half_pi;
    const double design = i <= 1 ? mid : xhat;
    const ProtocolConfig pc = build_protocol(design, blocks, t, 0.0, beta);
    MeasurementBatch b =
        sample_batch(model(x_true, pc), batch_size, derive_seed(seed, i));
    b.protocol = pc;
    run.batches.push_back(std::move(b));

    xhat = mle_estimate(run.batches, model, lo, hi).estimate;
    run.estimates.push_back(xhat);
  }
  run.final_estimate = xhat;
  return run;
}

PrecisionStats precision_study(double x_true, const ProtocolBuilder& builder,
                               long long n, int K, std::uint64_t seed,
                               double lo, double hi) {
  if (n < 2) throw std::invalid_argument("precision_study: n must be >= 2");
  if (K < 2) throw std::invalid_argument("precision_study: K must be >= 2");
  require_interval(lo, hi, "precision_study");

  const ProbabilityModel model = standard_model();
  const ProtocolConfig pc = builder(x_true);
  const double p = model(x_true, pc);

  std::vector<double> estimates(K);
  std::vector<MeasurementBatch> one(1);
  for (int k = 0; k < K; ++k) {
    one[0] = sample_batch(p, n, derive_seed(seed, static_cast<std::uint64_t>(k)));
    one[0].protocol = pc;
    estimates[k] = mle_estimate(one, model, lo, hi).estimate;
  }
  return stats_from_samples(estimates, n, /*about_mean=*/true);
}

PrecisionStats bayes_precision_study(const PriorDistribution& prior,
                                     const ProtocolBuilder& builder,
                                     long long n, int K, std::uint64_t seed) {
  if (n < 1)
    throw std::invalid_argument("bayes_precision_study: n must be >= 1");
  if (K < 2)
    throw std::invalid_argument("bayes_precision_study: K must be >= 2");

  const ProbabilityModel model = standard_model();
  const ProtocolConfig pc = builder(0.5 * (prior.lo + prior.hi));

  std::vector<double> errors(K);
  std::vector<MeasurementBatch> one(1);
  for (int k = 0; k < K; ++k) {
    const std::uint64_t run_seed = derive_seed(seed, static_cast<std::uint64_t>(k));
    std::mt19937_64 eng(run_seed);
    const double x_true = invert_cdf(prior, uniform01(eng));
    one[0] = sample_batch(model(x_true, pc), n, derive_seed(run_seed, 1));
    one[0].protocol = pc;
    errors[k] = mle_estimate(one, model, prior.lo, prior.hi).estimate - x_true;
  }
  return stats_from_samples(errors, n, /*about_mean=*/false);
}

PrecisionStats adaptive_precision_study(int blocks, double t, int iterations,
                                        long long batch_size, int runs,
                                        std::uint64_t seed, double lo,
                                        double hi) {
  if (runs < 2)
    throw std::invalid_argument("adaptive_precision_study: need >= 2 runs");
  require_interval(lo, hi, "adaptive_precision_study");

  std::vector<double> errors(runs);
  for (int k = 0; k < runs; ++k) {
    const std::uint64_t run_seed = derive_seed(seed, static_cast<std::uint64_t>(k));
    std::mt19937_64 eng(run_seed);
    const double x_true = lo + (0.1 + 0.8 * uniform01(eng)) * (hi - lo);
    const EstimationRun run = adaptive_run(x_true, blocks, t, iterations,
                                           batch_size, derive_seed(run_seed, 1),
                                           lo, hi);
    errors[k] = run.final_estimate - x_true;
  }
  return stats_from_samples(errors, iterations * batch_size,
                            /*about_mean=*/false);
}

}  // namespace seqmet
