#pragma once

#include <functional>

#include "seqmet/numeric.hpp"

namespace seqmet {

// asymptotic (block-count -> infinity) information ceiling 16 T^2
double heisenberg_qfi(double T);

// root of sin t = 2t cos t in (pi/4, pi/2), bisected to 1e-10: the slice
// length that maximizes 16 N sin^2(T/N) over real N
double solve_t0();

struct ShotNoisePoint {
  double qfi = 0;
  int blocks = 1;
};

// max_N 16 N sin^2(T/N), taken over the two integers bracketing T / t0
ShotNoisePoint shot_noise_limit(double T);

// differentiable prior on a closed interval; the Fisher integrand is the
// closed-form p(x) (d ln p / dx)^2 so no numerical log-derivatives are needed
struct PriorDistribution {
  double lo = 0;
  double hi = 1;
  std::function<double(double)> density;
  std::function<double(double)> cdf;
  std::function<double(double)> fisher_integrand;
};

// (1 + cos u)/(hi - lo) with u sweeping a full period across the interval;
// vanishes smoothly at both ends, prior information (2 pi / (hi - lo))^2
PriorDistribution raised_cosine_prior(double lo, double hi);

// Gaussian restricted to [lo, hi] and renormalized
PriorDistribution truncated_gaussian_prior(double mean, double sigma,
                                           double lo, double hi);

// integral of the Fisher integrand; checks the density mass is 1 within 1e-8
double prior_fisher_information(const PriorDistribution& prior);

// 1 / sqrt(n * int p J + F_p): precision floor combining n measurements of
// pointwise information J(x) with the prior's own information
double van_trees_bound(const PriorDistribution& prior, long long n,
                       const std::function<double(double)>& J);

}  // namespace seqmet
