#include "seqmet/baselines.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace seqmet {

namespace {

double simpson(const std::function<double(double)>& f, double lo, double hi,
               int intervals) {
  const double h = (hi - lo) / intervals;
  double s = f(lo) + f(hi);
  for (int k = 1; k < intervals; ++k) {
    s += f(lo + k * h) * ((k % 2) ? 4.0 : 2.0);
  }
  return s * h / 3.0;
}

// composite Simpson from 1024 intervals, doubled until the estimate settles
double integrate(const std::function<double(double)>& f, double lo,
                 double hi) {
  int n = 1024;
  double prev = simpson(f, lo, hi, n);
  for (int iter = 0; iter < 12; ++iter) {
    n *= 2;
    const double cur = simpson(f, lo, hi, n);
    if (std::abs(cur - prev) <= 1e-6 * std::abs(cur) + 1e-14) return cur;
    prev = cur;
  }
  return prev;
}

void require_unit_mass(const PriorDistribution& prior, const char* who) {
  const double mass = integrate(prior.density, prior.lo, prior.hi);
  if (!(std::abs(mass - 1.0) <= 1e-8)) {
    throw std::invalid_argument(std::string(who) + ": prior mass " +
                                std::to_string(mass) +
                                " differs from 1 by more than 1e-8");
  }
}

}  // namespace

double heisenberg_qfi(double T) { return 16.0 * T * T; }

double solve_t0() {
  const auto g = [](double t) { return std::sin(t) - 2.0 * t * std::cos(t); };
  double lo = pi / 4;  // g < 0 here
  double hi = half_pi;  // g = 1 here
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ShotNoisePoint shot_noise_limit(double T) {
  if (!(T > 0.0)) {
    throw std::invalid_argument("shot_noise_limit: T must be positive");
  }
  const double t0 = solve_t0();
  const auto J = [T](int N) {
    const double s = std::sin(T / N);
    return 16.0 * N * s * s;
  };
  const int n_lo = std::max(1, static_cast<int>(std::floor(T / t0)));
  const int n_hi = std::max(1, static_cast<int>(std::ceil(T / t0)));
  ShotNoisePoint out;
  out.blocks = J(n_lo) >= J(n_hi) ? n_lo : n_hi;
  out.qfi = J(out.blocks);
  return out;
}

PriorDistribution raised_cosine_prior(double lo, double hi) {
  if (!(hi > lo)) {
    throw std::invalid_argument("raised_cosine_prior: interval is empty");
  }
  const double width = hi - lo;
  const double mid = 0.5 * (lo + hi);
  const double rate = two_pi / width;
  PriorDistribution prior;
  prior.lo = lo;
  prior.hi = hi;
  prior.density = [=](double x) {
    if (x < lo || x > hi) return 0.0;
    return (1.0 + std::cos(rate * (x - mid))) / width;
  };
  prior.cdf = [=](double x) {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    const double u = rate * (x - mid);
    return (u + pi + std::sin(u)) / two_pi;
  };
  // p (d ln p / dx)^2 = rate^2 (1 - cos u) / width, finite at the ends
  prior.fisher_integrand = [=](double x) {
    if (x < lo || x > hi) return 0.0;
    return rate * rate * (1.0 - std::cos(rate * (x - mid))) / width;
  };
  return prior;
}

PriorDistribution truncated_gaussian_prior(double mean, double sigma,
                                           double lo, double hi) {
  if (!(hi > lo) || !(sigma > 0.0)) {
    throw std::invalid_argument(
        "truncated_gaussian_prior: need lo < hi and sigma > 0");
  }
  const auto std_cdf = [](double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
  };
  const double z_lo = (lo - mean) / sigma;
  const double z_hi = (hi - mean) / sigma;
  const double mass = std_cdf(z_hi) - std_cdf(z_lo);
  if (!(mass > 1e-12)) {
    throw std::invalid_argument(
        "truncated_gaussian_prior: interval carries no mass");
  }
  const double norm = 1.0 / (mass * sigma * std::sqrt(two_pi));
  PriorDistribution prior;
  prior.lo = lo;
  prior.hi = hi;
  prior.density = [=](double x) {
    if (x < lo || x > hi) return 0.0;
    const double z = (x - mean) / sigma;
    return norm * std::exp(-0.5 * z * z);
  };
  prior.cdf = [=](double x) {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    return (std_cdf((x - mean) / sigma) - std_cdf(z_lo)) / mass;
  };
  prior.fisher_integrand = [=](double x) {
    if (x < lo || x > hi) return 0.0;
    const double z = (x - mean) / sigma;
    return norm * std::exp(-0.5 * z * z) * z * z / (sigma * sigma);
  };
  return prior;
}

double prior_fisher_information(const PriorDistribution& prior) {
  require_unit_mass(prior, "prior_fisher_information");
  const double fp = integrate(prior.fisher_integrand, prior.lo, prior.hi);
  if (!std::isfinite(fp)) {
    throw std::invalid_argument(
        "prior_fisher_information: integrand diverges on the interval");
  }
  return fp;
}

double van_trees_bound(const PriorDistribution& prior, long long n,
                       const std::function<double(double)>& J) {
  if (n < 0) {
    throw std::invalid_argument("van_trees_bound: n must be nonnegative");
  }
  const double fp = prior_fisher_information(prior);
  double pj = 0.0;
  if (n > 0) {
    pj = integrate([&](double x) { return prior.density(x) * J(x); },
                   prior.lo, prior.hi);
    if (!std::isfinite(pj) || pj < -1e-12) {
      throw std::invalid_argument(
          "van_trees_bound: information integral is not finite and "
          "nonnegative");
    }
  }
  return 1.0 / std::sqrt(static_cast<double>(n) * pj + fp);
}

}  // namespace seqmet
