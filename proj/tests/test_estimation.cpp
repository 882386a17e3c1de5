#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "seqmet/estimation.hpp"
#include "seqmet/fisher.hpp"
#include "seqmet/protocol.hpp"

using namespace seqmet;

namespace {

// width of the likelihood peak set {ll > max - 2} on a shared grid
int peak_width(const std::vector<MeasurementBatch>& batches, double lo,
               double hi, int points) {
  const ProbabilityModel model = standard_model();
  std::vector<double> ll(points);
  double best = -1e300;
  for (int i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * i / double(points - 1);
    double v = 0;
    for (const auto& b : batches) {
      double p = model(x, b.protocol);
      p = std::min(1.0 - 1e-12, std::max(1e-12, p));
      v += b.n_plus * std::log(p) + (b.n_total - b.n_plus) * std::log(1.0 - p);
    }
    ll[i] = v;
    best = std::max(best, v);
  }
  int w = 0;
  for (double v : ll)
    if (v > best - 2.0) ++w;
  return w;
}

}  // namespace

TEST_CASE("derived seeds are distinct and stable") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t k = 0; k < 200; ++k) seen.insert(derive_seed(42, k));
  CHECK(seen.size() == 200);
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
  CHECK(derive_seed(7, 3) != derive_seed(7, 4));
  CHECK(derive_seed(7, 3) != derive_seed(8, 3));
}

TEST_CASE("sample_batch degenerate probabilities") {
  const MeasurementBatch all = sample_batch(1.0, 137, 5);
  CHECK(all.n_plus == 137);
  CHECK(all.n_total == 137);
  const MeasurementBatch none = sample_batch(0.0, 137, 5);
  CHECK(none.n_plus == 0);
  // guard tolerance: tiny excursions clamp, larger ones throw
  CHECK(sample_batch(1.0 + 5e-13, 10, 1).n_plus == 10);
  CHECK(sample_batch(-5e-13, 10, 1).n_plus == 0);
  CHECK_THROWS_AS(sample_batch(-1e-9, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_batch(1.0 + 1e-9, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_batch(0.5, 0, 1), std::invalid_argument);
}

TEST_CASE("sample_batch is deterministic and concentrates") {
  const MeasurementBatch a = sample_batch(0.37, 10000, 99);
  const MeasurementBatch b = sample_batch(0.37, 10000, 99);
  CHECK(a.n_plus == b.n_plus);
  const MeasurementBatch c = sample_batch(0.37, 10000, 100);
  CHECK(a.n_plus != c.n_plus);  // different stream

  const MeasurementBatch big = sample_batch(0.5, 1000000, 2024);
  const double phat = double(big.n_plus) / double(big.n_total);
  CHECK(std::abs(phat - 0.5) < 0.002);  // 4 sigma = 0.002
}

TEST_CASE("mle inverts a fringe batch analytically") {
  // analyzer on the fringe extremum: P = (1 + cos 4x) / 2
  const ProtocolConfig pc = build_protocol(0.0, 1, half_pi, 0.0, 0.0);
  for (double x : {0.1, 0.4, 0.7}) {
    CHECK(std::abs(model_probability(x, pc) - 0.5 * (1 + std::cos(4 * x))) <
          1e-12);
  }

  // n_plus/n = 3/4 pins cos 4x = 1/2, x = pi/12 on the monotone branch
  MeasurementBatch b;
  b.n_plus = 75;
  b.n_total = 100;
  b.protocol = pc;
  const MleResult r =
      mle_estimate({b}, standard_model(), 0.0, 0.25 * pi);
  CHECK_FALSE(r.degenerate);
  CHECK(std::abs(r.estimate - pi / 12) < 1e-4);
}

TEST_CASE("mle flags a flat likelihood and returns the midpoint") {
  // a full block period: the evolution is -identity regardless of x
  const ProtocolConfig pc = build_protocol(0.3, 1, pi, 0.0, half_pi);
  const double p0 = model_probability(0.1, pc);
  CHECK(std::abs(model_probability(0.9, pc) - p0) < 1e-12);

  MeasurementBatch b;
  b.n_plus = 7;
  b.n_total = 10;
  b.protocol = pc;
  const MleResult r = mle_estimate({b}, standard_model(), 0.0, half_pi);
  CHECK(r.degenerate);
  CHECK(r.estimate == doctest::Approx(0.25 * pi).epsilon(1e-12));
}

TEST_CASE("mle input validation") {
  const std::vector<MeasurementBatch> none;
  CHECK_THROWS_AS(mle_estimate(none, standard_model(), 0.0, 1.0),
                  std::invalid_argument);
  MeasurementBatch b;
  b.n_plus = 1;
  b.n_total = 2;
  b.protocol = build_protocol(0.0, 1, half_pi, 0.0, half_pi);
  CHECK_THROWS_AS(mle_estimate({b}, standard_model(), 1.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(mle_estimate({b}, standard_model(), 0.0, 1.0, 1),
                  std::invalid_argument);
}

TEST_CASE("a second batch strictly narrows the likelihood peak") {
  const ProbabilityModel model = standard_model();
  const double x_true = 0.3;

  MeasurementBatch a;
  a.protocol = build_protocol(0.25 * pi, 1, half_pi, 0.0, half_pi);
  a.n_total = 200;
  a.n_plus = llround(200 * model(x_true, a.protocol));

  MeasurementBatch b;
  b.protocol = build_protocol(0.35, 1, half_pi, 0.0, 0.0);
  b.n_total = 200;
  b.n_plus = llround(200 * model(x_true, b.protocol));

  const int wa = peak_width({a}, 0.0, half_pi, 1024);
  const int wb = peak_width({b}, 0.0, half_pi, 1024);
  const int wab = peak_width({a, b}, 0.0, half_pi, 1024);
  CHECK(wab < wa);
  CHECK(wab < wb);
  CHECK(wab >= 1);
}

TEST_CASE("adaptive run with matched control stays at the working point") {
  const double x_true = 0.25 * pi;
  const EstimationRun run =
      adaptive_run(x_true, 1, half_pi, 5, 20000, 0);
  CHECK(run.batches.size() == 5);
  CHECK(run.estimates.size() == 5);
  CHECK(run.x_true == x_true);
  for (double e : run.estimates) {
    CHECK(e >= 0.0);
    CHECK(e <= half_pi);
  }
  CHECK(run.final_estimate == run.estimates.back());
  // three coarse grid steps on [0, pi/2]
  CHECK(std::abs(run.final_estimate - x_true) < 3 * half_pi / 2047);
}

TEST_CASE("single large batch is consistent on a monotone fringe") {
  // half-period interval so the quadrature fringe has a unique root
  const double x_true = 0.3;
  const EstimationRun run =
      adaptive_run(x_true, 1, half_pi, 1, 100000, 31337, 0.0, 0.25 * pi);
  CHECK(run.batches.size() == 1);
  CHECK(std::abs(run.final_estimate - x_true) < 5e-3);
}

TEST_CASE("adaptive runs reproduce bit-for-bit under a fixed seed") {
  const EstimationRun r1 = adaptive_run(0.6, 2, half_pi, 4, 50, 777);
  const EstimationRun r2 = adaptive_run(0.6, 2, half_pi, 4, 50, 777);
  REQUIRE(r1.batches.size() == r2.batches.size());
  for (size_t i = 0; i < r1.batches.size(); ++i) {
    CHECK(r1.batches[i].n_plus == r2.batches[i].n_plus);
    CHECK(r1.estimates[i] == r2.estimates[i]);
  }
  CHECK(r1.final_estimate == r2.final_estimate);

  const EstimationRun r3 = adaptive_run(0.6, 2, half_pi, 4, 50, 778);
  bool differs = r3.final_estimate != r1.final_estimate;
  for (size_t i = 0; i < r1.batches.size(); ++i)
    differs = differs || r3.batches[i].n_plus != r1.batches[i].n_plus;
  CHECK(differs);
}

TEST_CASE("adaptive run input validation") {
  CHECK_THROWS_AS(adaptive_run(0.3, 1, half_pi, 0, 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(adaptive_run(0.3, 1, half_pi, 5, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(adaptive_run(0.3, 1, half_pi, 5, 10, 1, 0.5, 0.5),
                  std::invalid_argument);
}

TEST_CASE("precision stats follow the dispersion formulas") {
  const ProtocolBuilder ideal = [](double x) {
    return build_protocol(x, 1, half_pi, 0.0, half_pi);
  };
  const PrecisionStats s =
      precision_study(0.0, ideal, 50, 200, 4, -pi / 8, pi / 8);
  CHECK(s.K == 200);
  CHECK(s.n == 50);
  CHECK(s.std > 0);
  CHECK(s.std_err == s.std / std::sqrt(2.0 * 199.0));
  CHECK(s.sqrt_fisher_emp == 1.0 / (s.std * std::sqrt(50.0)));
  // pinned arithmetic: std 0.1 at K = 1000 gives std_err 0.1/sqrt(1998)
  CHECK(std::abs(0.1 / std::sqrt(1998.0) - 2.2372e-3) < 5e-7);
}

TEST_CASE("estimator consistency: dispersion tracks 1/sqrt(n J)") {
  const ProtocolBuilder ideal = [](double x) {
    return build_protocol(x, 1, half_pi, 0.0, half_pi);
  };
  const int K = 400;
  for (long long n : {100LL, 1000LL, 10000LL}) {
    const PrecisionStats s =
        precision_study(0.0, ideal, n, K, 11, -pi / 8, pi / 8);
    const double scaled = s.std * std::sqrt(double(n));
    const double sigma = scaled / std::sqrt(2.0 * (K - 1));
    CHECK(std::abs(scaled - 0.25) < 3 * sigma);  // 1/sqrt(J) = 1/4
  }
}

TEST_CASE("empirical precision grows with the block count") {
  const int K = 300;
  double prev = 0;
  for (int blocks : {1, 2, 4}) {
    const ProtocolBuilder ideal = [blocks](double x) {
      return build_protocol(x, blocks, half_pi, 0.0, half_pi);
    };
    const double window = pi / (8 * blocks);
    const PrecisionStats s =
        precision_study(0.0, ideal, 1000, K, 21, -window, window);
    CHECK(s.sqrt_fisher_emp > prev);
    // within 10% of the matched-control value 4 blocks
    CHECK(std::abs(s.sqrt_fisher_emp - 4.0 * blocks) < 0.4 * blocks);
    prev = s.sqrt_fisher_emp;
  }
}

TEST_CASE("precision studies are deterministic") {
  const ProtocolBuilder ideal = [](double x) {
    return build_protocol(x, 1, half_pi, 0.0, half_pi);
  };
  const PrecisionStats a = precision_study(0.0, ideal, 50, 64, 9, -pi / 8, pi / 8);
  const PrecisionStats b = precision_study(0.0, ideal, 50, 64, 9, -pi / 8, pi / 8);
  CHECK(a.std == b.std);
  CHECK(a.mean == b.mean);
  CHECK_THROWS_AS(precision_study(0.0, ideal, 1, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(precision_study(0.0, ideal, 50, 1, 1), std::invalid_argument);
}

TEST_CASE("bayes study at a zero-information point recovers the prior spread") {
  // a full block period carries no parameter dependence at all
  const PriorDistribution prior = raised_cosine_prior(0.0, half_pi);
  const ProtocolBuilder builder = [](double x) {
    return build_protocol(x, 1, pi, 0.0, half_pi);
  };
  const PrecisionStats s = bayes_precision_study(prior, builder, 50, 400, 13);
  // flat likelihood: every run returns the midpoint, so the error is the
  // prior deviation about its mean
  const double prior_std =
      half_pi * std::sqrt(1.0 / 12.0 - 0.5 / (pi * pi));
  CHECK(std::abs(s.std - prior_std) < 4 * s.std_err);
  // and the spread respects the prior-information floor 1/sqrt(F_p) = L/(2 pi)
  CHECK(s.std > half_pi / (2 * pi) - 3 * s.std_err);
}

TEST_CASE("bayes study with an informative fringe beats the prior spread") {
  const PriorDistribution prior = raised_cosine_prior(-pi / 8, pi / 8);
  const ProtocolBuilder builder = [](double x) {
    return build_protocol(x, 1, half_pi, 0.0, half_pi);
  };
  const PrecisionStats s = bayes_precision_study(prior, builder, 50, 400, 17);
  const double prior_std = (pi / 4) * std::sqrt(1.0 / 12.0 - 0.5 / (pi * pi));
  CHECK(s.std < prior_std);
  // close to the matched-control dispersion 1/(4 sqrt(50))
  CHECK(s.std < 2.0 / (4.0 * std::sqrt(50.0)));
}

TEST_CASE("adaptive study aggregates runs deterministically") {
  const PrecisionStats a =
      adaptive_precision_study(1, half_pi, 3, 20, 16, 5);
  const PrecisionStats b =
      adaptive_precision_study(1, half_pi, 3, 20, 16, 5);
  CHECK(a.std == b.std);
  CHECK(a.n == 60);
  CHECK(a.K == 16);
  CHECK(a.std > 0);
  CHECK_THROWS_AS(adaptive_precision_study(1, half_pi, 3, 20, 1, 5),
                  std::invalid_argument);
}
