#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ctpt/errors.hpp"
#include "ctpt/mediation.hpp"
#include "ctpt/rng.hpp"

using namespace ctpt;

namespace {

MediationData simulated_data(Eigen::Index n, double alpha, double beta, double tau,
                             SeededRng& rng) {
  MediationData data;
  data.x.resize(n);
  data.m.resize(n);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    data.x[i] = draw_standard_normal(rng);
    data.m[i] = alpha * data.x[i] + draw_standard_normal(rng);
    data.y[i] = beta * data.m[i] + tau * data.x[i] + draw_standard_normal(rng);
  }
  return data;
}

}  // namespace

TEST_CASE("bayes factor for the indirect effect") {
  const NullPartition thirds;
  CHECK(bf_mediation(1.0, 1.0, thirds) == doctest::Approx(1.0).epsilon(1e-15));
  // 50 / ((1 + 5 + 10)/3)
  CHECK(bf_mediation(10.0, 5.0, thirds) == doctest::Approx(9.375).epsilon(1e-15));

  // swapping the path BFs together with q01 <-> q10 leaves the value alone
  SeededRng rng(41, 0);
  for (int i = 0; i < 200; ++i) {
    const double bfa = std::exp(4.0 * (rng.next_double() - 0.5));
    const double bfb = std::exp(4.0 * (rng.next_double() - 0.5));
    NullPartition q;
    q.q00 = rng.next_double();
    q.q01 = (1.0 - q.q00) * rng.next_double();
    q.q10 = 1.0 - q.q00 - q.q01;
    NullPartition swapped;
    swapped.q00 = q.q00;
    swapped.q01 = q.q10;
    swapped.q10 = q.q01;
    CHECK(bf_mediation(bfa, bfb, q) == doctest::Approx(bf_mediation(bfb, bfa, swapped)).epsilon(1e-12));
  }

  CHECK_THROWS_AS(bf_mediation(0.0, 1.0, thirds), DomainError);
  CHECK_THROWS_AS(bf_mediation(1.0, -2.0, thirds), DomainError);
  NullPartition bad;
  bad.q00 = 0.5;
  bad.q01 = 0.5;
  bad.q10 = 0.5;
  CHECK_THROWS_AS(bf_mediation(1.0, 1.0, bad), DomainError);
}

TEST_CASE("prior-odds form agrees with the partition form") {
  CHECK(bf_mediation_from_odds(1.0, 1.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bf_mediation_from_odds(10.0, 5.0, 1.0, 1.0) == doctest::Approx(9.375).epsilon(1e-15));

  // equal odds correspond to the equal-thirds partition for any BFs
  SeededRng rng(42, 0);
  const NullPartition thirds;
  for (int i = 0; i < 1000; ++i) {
    const double bfa = std::exp(6.0 * (rng.next_double() - 0.5));
    const double bfb = std::exp(6.0 * (rng.next_double() - 0.5));
    const double lhs = bf_mediation_from_odds(bfa, bfb, 1.0, 1.0);
    const double rhs = bf_mediation(bfa, bfb, thirds);
    CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, std::fabs(rhs)));
  }
  CHECK_THROWS_AS(bf_mediation_from_odds(1.0, 1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("general prior odds map to the matching partition") {
  // Independent path priors with odds (oa, ob) give
  // q00 : q01 : q10 = 1 : ob : oa (normalized), conditional on a zero product.
  SeededRng rng(43, 0);
  for (int i = 0; i < 300; ++i) {
    const double oa = std::exp(2.0 * (rng.next_double() - 0.5));
    const double ob = std::exp(2.0 * (rng.next_double() - 0.5));
    const double bfa = std::exp(5.0 * (rng.next_double() - 0.5));
    const double bfb = std::exp(5.0 * (rng.next_double() - 0.5));
    const double z = 1.0 + ob + oa;
    NullPartition q;
    q.q00 = 1.0 / z;
    q.q01 = ob / z;
    q.q10 = oa / z;
    const double lhs = bf_mediation_from_odds(bfa, bfb, oa, ob);
    const double rhs = bf_mediation(bfa, bfb, q);
    CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, std::fabs(rhs)));
  }
}

TEST_CASE("bf_mediation is monotone in both arguments") {
  const NullPartition thirds;
  SeededRng rng(44, 0);
  for (int i = 0; i < 200; ++i) {
    const double bfa = std::exp(4.0 * (rng.next_double() - 0.5));
    const double bfb = std::exp(4.0 * (rng.next_double() - 0.5));
    const double up = 1.0 + rng.next_double();
    CHECK(bf_mediation(bfa * up, bfb, thirds) > bf_mediation(bfa, bfb, thirds));
    CHECK(bf_mediation(bfa, bfb * up, thirds) > bf_mediation(bfa, bfb, thirds));
  }
}

TEST_CASE("summarize on known samples") {
  CHECK_THROWS_AS(summarize(Eigen::VectorXd::Zero(50)), NumericalError);

  const Eigen::VectorXd constant = Eigen::VectorXd::Constant(500, 2.5);
  const SummaryRow c = summarize(constant);
  CHECK(c.mean == 2.5);
  CHECK(c.mode == 2.5);
  CHECK(c.p2_5 == 2.5);
  CHECK(c.p97_5 == 2.5);
  CHECK(c.ci_length == 0.0);

  Eigen::VectorXd grid(10000);
  for (int i = 0; i < 10000; ++i) grid[i] = (i + 1) / 10000.0;
  const SummaryRow u = summarize(grid);
  CHECK(u.p50 == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(u.p2_5 == doctest::Approx(0.025).epsilon(1e-2));
  CHECK(u.p97_5 == doctest::Approx(0.975).epsilon(1e-3));
  CHECK(u.ci_length == doctest::Approx(0.95).epsilon(1e-3));

  // KDE mode of a large standard normal sample sits near zero; single runs
  // jitter by about 0.1, so the centring check averages a few seeds
  double mode_sum = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    SeededRng rng(45, s);
    Eigen::VectorXd normal_draws(100000);
    for (int i = 0; i < 100000; ++i) normal_draws[i] = draw_standard_normal(rng);
    const SummaryRow n = summarize(normal_draws);
    CHECK(std::fabs(n.mode) < 0.2);
    CHECK(std::fabs(n.mean) < 0.02);
    mode_sum += n.mode;
  }
  CHECK(std::fabs(mode_sum / 5.0) < 0.05);
}

TEST_CASE("type-7 quantiles interpolate linearly") {
  Eigen::VectorXd v(5);
  v << 10, 20, 30, 40, 50;
  CHECK(quantile_type7(v, 0.0) == 10.0);
  CHECK(quantile_type7(v, 1.0) == 50.0);
  CHECK(quantile_type7(v, 0.5) == 30.0);
  CHECK(quantile_type7(v, 0.125) == doctest::Approx(15.0).epsilon(1e-15));
}

TEST_CASE("percentiles of a concatenation lie between the parts") {
  SeededRng rng(46, 0);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd a(400), b(400);
    const double shift = 2.0 * (rng.next_double() - 0.5);
    for (int i = 0; i < 400; ++i) {
      a[i] = draw_standard_normal(rng);
      b[i] = shift + draw_standard_normal(rng);
    }
    Eigen::VectorXd both(800);
    both << a, b;
    for (double p : {0.025, 0.25, 0.5, 0.75, 0.975}) {
      const double qa = quantile_type7(a, p);
      const double qb = quantile_type7(b, p);
      const double qc = quantile_type7(both, p);
      CHECK(qc >= std::min(qa, qb) - 1e-12);
      CHECK(qc <= std::max(qa, qb) + 1e-12);
    }
  }
}

TEST_CASE("mediation data invariants") {
  MediationData bad;
  bad.x = Eigen::VectorXd::Zero(5);
  bad.m = Eigen::VectorXd::Zero(4);
  bad.y = Eigen::VectorXd::Zero(5);
  CHECK_THROWS_AS(bad.check(), ValidationError);
  MediationData small;
  small.x = Eigen::VectorXd::Zero(3);
  small.m = Eigen::VectorXd::Zero(3);
  small.y = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(small.check(), ValidationError);
}

TEST_CASE("fit_mediation pairs draws and fills summaries") {
  SeededRng rng(47, 0);
  const MediationData data = simulated_data(50, 0.4, 0.4, 0.2, rng);
  MediationOptions options;
  options.family = ErrorFamily::Ctpt;
  options.chain.total_iterations = 4000;
  options.chain.seed = 9;
  options.compute_bayes_factors = false;
  const MediationResult fit = fit_mediation(data, options);

  // pairing invariant holds exactly
  CHECK(fit.alphabeta_draws == fit.alpha_draws.cwiseProduct(fit.beta_draws));
  const double paired_mean = fit.alphabeta_draws.mean();
  const double prod_of_means = fit.alpha_draws.mean() * fit.beta_draws.mean();
  CHECK(fit.summaries.at("alphabeta").mean == doctest::Approx(paired_mean).epsilon(1e-14));
  CHECK(paired_mean != prod_of_means);

  for (const char* key : {"alpha", "beta", "tau", "alphabeta", "sigma_m", "sigma_y", "gamma_m",
                          "nu_m", "gamma_y", "nu_y"}) {
    CHECK(fit.summaries.count(key) == 1);
  }
  CHECK(std::isnan(fit.bf_med));
  CHECK(fit.diag_m.rhat.size() == 5);
  CHECK(fit.diag_y.rhat.size() == 6);
}

TEST_CASE("fit_mediation computes bayes factors and respects the partition") {
  SeededRng rng(48, 0);
  const MediationData data = simulated_data(60, 0.8, 0.8, 0.2, rng);
  MediationOptions options;
  options.family = ErrorFamily::Normal;
  options.chain.total_iterations = 5000;
  options.chain.seed = 10;
  const MediationResult fit = fit_mediation(data, options);
  CHECK(fit.bf_alpha > 0.0);
  CHECK(fit.bf_beta > 0.0);
  CHECK(fit.bf_med == doctest::Approx(bf_mediation(fit.bf_alpha, fit.bf_beta, options.partition))
                          .epsilon(1e-12));

  MediationOptions skewed = options;
  skewed.partition.q00 = 0.5;
  skewed.partition.q01 = 0.25;
  skewed.partition.q10 = 0.25;
  const MediationResult fit2 = fit_mediation(data, skewed);
  CHECK(fit2.bf_alpha == doctest::Approx(fit.bf_alpha).epsilon(1e-12));
  CHECK(fit2.bf_med ==
        doctest::Approx(bf_mediation(fit.bf_alpha, fit.bf_beta, skewed.partition)).epsilon(1e-12));
}

TEST_CASE("permuting observations leaves posterior expectations unchanged") {
  SeededRng rng(49, 0);
  const MediationData data = simulated_data(40, 0.5, 0.5, 0.2, rng);
  MediationData permuted;
  std::vector<int> order(40);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937(3));
  permuted.x.resize(40);
  permuted.m.resize(40);
  permuted.y.resize(40);
  for (int i = 0; i < 40; ++i) {
    permuted.x[i] = data.x[order[i]];
    permuted.m[i] = data.m[order[i]];
    permuted.y[i] = data.y[order[i]];
  }
  MediationOptions options;
  options.family = ErrorFamily::Normal;
  options.chain.total_iterations = 20000;
  options.chain.seed = 11;
  options.compute_bayes_factors = false;
  const MediationResult a = fit_mediation(data, options);
  const MediationResult b = fit_mediation(permuted, options);
  // identical likelihood function, so only Monte Carlo noise differs
  const double scale = std::fabs(a.summaries.at("alphabeta").ci_length) + 1e-6;
  CHECK(std::fabs(a.summaries.at("alphabeta").mean - b.summaries.at("alphabeta").mean) <
        0.1 * scale);
}

TEST_CASE("errors are labeled by equation") {
  MediationData data;
  data.x = Eigen::VectorXd::LinSpaced(10, 0.0, 1.0);
  data.m = 2.0 * data.x;  // mediator equation becomes degenerate
  data.y = Eigen::VectorXd::LinSpaced(10, 1.0, 3.0);
  MediationOptions options;
  CHECK_THROWS_WITH_AS(fit_mediation(data, options), doctest::Contains("mediator equation"),
                       ValidationError);
}
