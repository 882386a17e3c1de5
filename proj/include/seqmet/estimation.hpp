#pragma once
// Monte Carlo estimation layer: seeded outcome sampling, grid maximum
// likelihood, the sequential analyzer-update loop, and precision studies.

#include <cstdint>
#include <functional>
#include <vector>

#include <seqmet/baselines.hpp>
#include <seqmet/fisher.hpp>
#include <seqmet/protocol.hpp>

namespace seqmet {

// Counter-based stream split: child k of seed gives an independent engine
// seed, so runs are order-insensitive.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k);

struct MeasurementBatch {
  long long n_plus = 0;   // successes
  long long n_total = 0;  // trials, n_plus <= n_total
  ProtocolConfig protocol;
};

// n Bernoulli(p_plus) draws; deterministic in (p_plus, n, rng_seed).
// The caller fills in the protocol the batch was taken under.
// Throws if p_plus leaves [0,1] by more than tol::prob_guard or n < 1.
MeasurementBatch sample_batch(double p_plus, long long n,
                              std::uint64_t rng_seed);

// Two-outcome probability as a function of the parameter and the protocol the
// batch was taken under.
using ProbabilityModel = std::function<double(double, const ProtocolConfig&)>;

// The exact closed propagation of a ProtocolConfig.
ProbabilityModel standard_model();

struct MleResult {
  double estimate = 0;
  bool degenerate = false;  // likelihood flat over the whole interval
};

// Argmax of the joint log likelihood over a uniform grid on [lo, hi], with one
// refinement pass around the coarse maximum. Probabilities are clamped to
// [1e-12, 1-1e-12] before the log. Ties resolve to the smallest x. A flat
// landscape returns the interval midpoint with the degenerate flag set.
MleResult mle_estimate(const std::vector<MeasurementBatch>& batches,
                       const ProbabilityModel& model, double lo, double hi,
                       int grid_size = 2048);

struct EstimationRun {
  double x_true = 0;
  std::vector<MeasurementBatch> batches;
  std::vector<double> estimates;  // cumulative MLE after each batch
  double final_estimate = 0;
  std::uint64_t seed = 0;
};

// Sequential loop: batch 1 is designed for the interval midpoint with the
// analyzer in quadrature (beta = pi/2); batch 2 moves the analyzer onto the
// fringe extremum (beta = 0), which separates the mirror root the quadrature
// fringe cannot; later batches re-center the quadrature analyzer on the
// running estimate. Each update maximizes over all batches so far.
EstimationRun adaptive_run(double x_true, int blocks, double t, int iterations,
                           long long batch_size, std::uint64_t seed,
                           double lo = 0.0, double hi = half_pi);

struct PrecisionStats {
  int K = 0;          // runs
  long long n = 0;    // measurements per run
  double mean = 0;    // mean estimate (or mean error for truth-relative stats)
  double std = 0;     // dispersion of the estimate
  double std_err = 0;          // std / sqrt(2(K-1))
  double sqrt_fisher_emp = 0;  // 1 / (std * sqrt(n))
};

// Protocol for a given working point.
using ProtocolBuilder = std::function<ProtocolConfig(double)>;

// K repetitions of an n-shot experiment at fixed x_true under
// builder(x_true); estimator is a single-batch MLE over [lo, hi]. std is the
// sample deviation of the K estimates about their mean.
PrecisionStats precision_study(double x_true, const ProtocolBuilder& builder,
                               long long n, int K, std::uint64_t seed,
                               double lo = 0.0, double hi = half_pi);

// Same loop with x_true drawn from the prior each run and the protocol built
// once at the prior midpoint; std is the root mean square error about the
// truth, the dispersion the prior-information bound constrains.
PrecisionStats bayes_precision_study(const PriorDistribution& prior,
                                     const ProtocolBuilder& builder,
                                     long long n, int K, std::uint64_t seed);

// Full adaptive loops with x_true drawn uniformly from the middle 80% of
// [lo, hi]; std is the root mean square error of the final estimates.
PrecisionStats adaptive_precision_study(int blocks, double t, int iterations,
                                        long long batch_size, int runs,
                                        std::uint64_t seed, double lo = 0.0,
                                        double hi = half_pi);

}  // namespace seqmet
