#include "ctpt/mediation.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "ctpt/errors.hpp"
#include "ctpt/special_math.hpp"

namespace ctpt {

void MediationData::check() const {
  if (m.size() != n() || y.size() != n()) throw ValidationError("mediation data: unequal column lengths");
  if (n() < 4) throw ValidationError("mediation data: need at least 4 observations");
}

void NullPartition::check() const {
  if (q00 < 0.0 || q01 < 0.0 || q10 < 0.0) throw DomainError("NullPartition: probabilities must be nonnegative");
  if (std::fabs(q00 + q01 + q10 - 1.0) > 1e-12) {
    throw DomainError("NullPartition: probabilities must sum to one");
  }
}

double quantile_type7(const Eigen::VectorXd& sample, double p) {
  if (sample.size() == 0) throw DomainError("quantile_type7: empty sample");
  if (!(p >= 0.0) || !(p <= 1.0)) throw DomainError("quantile_type7: p outside [0, 1]");
  std::vector<double> sorted(sample.data(), sample.data() + sample.size());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - std::floor(h)) * (sorted[hi] - sorted[lo]);
}

std::pair<double, double> hpd_interval(const Eigen::VectorXd& draws, double level) {
  if (draws.size() < 10) throw NumericalError("hpd_interval: InsufficientDraws");
  if (!(level > 0.0) || !(level < 1.0)) throw DomainError("hpd_interval: level must lie in (0, 1)");
  std::vector<double> sorted(draws.data(), draws.data() + draws.size());
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  const auto window = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(level * n)));
  std::size_t best = 0;
  double best_width = kInf;
  for (std::size_t i = 0; i + window <= n; ++i) {
    const double width = sorted[i + window - 1] - sorted[i];
    if (width < best_width) {
      best_width = width;
      best = i;
    }
  }
  return {sorted[best], sorted[best + window - 1]};
}

SummaryRow summarize(const Eigen::VectorXd& draws) {
  if (draws.size() < 100) throw NumericalError("summarize: InsufficientDraws (need at least 100)");
  SummaryRow row;
  row.mean = draws.mean();
  row.p2_5 = quantile_type7(draws, 0.025);
  row.p25 = quantile_type7(draws, 0.25);
  row.p50 = quantile_type7(draws, 0.50);
  row.p75 = quantile_type7(draws, 0.75);
  row.p97_5 = quantile_type7(draws, 0.975);
  row.ci_length = row.p97_5 - row.p2_5;

  const double n = static_cast<double>(draws.size());
  const double sd = std::sqrt((draws.array() - row.mean).square().sum() / (n - 1.0));
  const double iqr = row.p75 - row.p25;
  const double spread = std::min(sd, iqr / 1.34);
  const double bandwidth = 0.9 * spread * std::pow(n, -0.2);
  const double lo = draws.minCoeff();
  const double hi = draws.maxCoeff();
  if (!(bandwidth > 0.0) || lo == hi) {
    row.mode = row.p50;
    return row;
  }
  constexpr int kGrid = 512;
  double best = -kInf;
  double best_x = lo;
  const double step = (hi - lo) / (kGrid - 1);
  for (int g = 0; g < kGrid; ++g) {
    const double x = lo + g * step;
    const double dens = ((draws.array() - x) / bandwidth).square().unaryExpr([](double s) {
      return std::exp(-0.5 * s);
    }).sum();
    if (dens > best) {
      best = dens;
      best_x = x;
    }
  }
  row.mode = best_x;
  return row;
}

double bf_mediation(double bf_alpha, double bf_beta, const NullPartition& q) {
  if (!(bf_alpha > 0.0) || !(bf_beta > 0.0)) throw DomainError("bf_mediation: Bayes factors must be positive");
  q.check();
  return bf_alpha * bf_beta / (q.q00 + q.q01 * bf_beta + q.q10 * bf_alpha);
}

double bf_mediation_from_odds(double bf_alpha, double bf_beta, double prior_odds_alpha,
                              double prior_odds_beta) {
  if (!(bf_alpha > 0.0) || !(bf_beta > 0.0) || !(prior_odds_alpha > 0.0) || !(prior_odds_beta > 0.0)) {
    throw DomainError("bf_mediation_from_odds: all inputs must be positive");
  }
  return (1.0 + prior_odds_beta + prior_odds_alpha) * bf_alpha * bf_beta /
         (1.0 + prior_odds_beta * bf_beta + prior_odds_alpha * bf_alpha);
}

RegressionProblem mediator_problem(const MediationData& data, ErrorFamily family,
                                   const PriorConfig& priors) {
  data.check();
  RegressionProblem problem;
  problem.design.resize(data.n(), 2);
  problem.design.col(0).setOnes();
  problem.design.col(1) = data.x;
  problem.response = data.m;
  problem.family = family;
  problem.priors = priors;
  problem.column_names = {"intercept", "alpha"};
  return problem;
}

RegressionProblem outcome_problem(const MediationData& data, ErrorFamily family,
                                  const PriorConfig& priors) {
  data.check();
  RegressionProblem problem;
  problem.design.resize(data.n(), 3);
  problem.design.col(0).setOnes();
  problem.design.col(1) = data.m;
  problem.design.col(2) = data.x;
  problem.response = data.y;
  problem.family = family;
  problem.priors = priors;
  problem.column_names = {"intercept", "beta", "tau"};
  return problem;
}

namespace {

// Stream blocks within one mediation fit; chains never exceed 16 per fit.
constexpr std::uint64_t kStreamEq1 = 0;
constexpr std::uint64_t kStreamEq2 = 16;
constexpr std::uint64_t kStreamEq1Reduced = 32;
constexpr std::uint64_t kStreamEq2Reduced = 48;

void add_shape_summaries(MediationResult& result, const Draws& draws, ErrorFamily family,
                         Eigen::Index k, const std::string& suffix) {
  result.summaries["sigma" + suffix] = summarize(draws.natural.col(k));
  Eigen::Index pos = k + 1;
  if (family_has_gamma(family)) result.summaries["gamma" + suffix] = summarize(draws.natural.col(pos++));
  if (family_has_nu(family)) result.summaries["nu" + suffix] = summarize(draws.natural.col(pos++));
}

}  // namespace

MediationResult fit_mediation(const MediationData& data, const MediationOptions& options) {
  options.partition.check();
  const RegressionProblem eq1 = mediator_problem(data, options.family, options.priors);
  const RegressionProblem eq2 = outcome_problem(data, options.family, options.priors);
  try {
    validate(eq1);
  } catch (const ValidationError& err) {
    throw ValidationError(std::string("mediator equation: ") + err.what());
  }
  try {
    validate(eq2);
  } catch (const ValidationError& err) {
    throw ValidationError(std::string("outcome equation: ") + err.what());
  }

  MediationResult result;

  ChainConfig cfg1 = options.chain;
  cfg1.stream_base = options.chain.stream_base + kStreamEq1;
  ChainConfig cfg2 = options.chain;
  cfg2.stream_base = options.chain.stream_base + kStreamEq2;

  // The two equations are independent models; fit them concurrently.
  auto future_m = std::async(std::launch::async, [&] { return fit_regression(eq1, cfg1); });
  try {
    result.draws_y = fit_regression(eq2, cfg2);
  } catch (const NumericalError& err) {
    future_m.wait();
    throw NumericalError(std::string("outcome equation: ") + err.what());
  }
  try {
    result.draws_m = future_m.get();
  } catch (const NumericalError& err) {
    throw NumericalError(std::string("mediator equation: ") + err.what());
  }

  result.diag_m = diagnose(result.draws_m);
  result.diag_y = diagnose(result.draws_y);

  result.alpha_draws = result.draws_m.natural.col(1);
  result.beta_draws = result.draws_y.natural.col(1);
  result.tau_draws = result.draws_y.natural.col(2);
  result.alphabeta_draws = result.alpha_draws.cwiseProduct(result.beta_draws);

  result.summaries["alpha"] = summarize(result.alpha_draws);
  result.summaries["beta"] = summarize(result.beta_draws);
  result.summaries["tau"] = summarize(result.tau_draws);
  result.summaries["alphabeta"] = summarize(result.alphabeta_draws);
  add_shape_summaries(result, result.draws_m, options.family, eq1.k(), "_m");
  add_shape_summaries(result, result.draws_y, options.family, eq2.k(), "_y");

  if (options.compute_bayes_factors) {
    ChainConfig red1 = options.chain;
    red1.stream_base = options.chain.stream_base + kStreamEq1Reduced;
    ChainConfig red2 = options.chain;
    red2.stream_base = options.chain.stream_base + kStreamEq2Reduced;

    auto future_bfa = std::async(std::launch::async, [&] {
      return bayes_factor_path_with_draws(eq1, result.draws_m, 1, red1);
    });
    PathBayesFactor bfa;
    PathBayesFactor bfb;
    try {
      bfb = bayes_factor_path_with_draws(eq2, result.draws_y, 1, red2);
    } catch (const NumericalError& err) {
      future_bfa.wait();
      throw NumericalError(std::string("outcome equation: ") + err.what());
    }
    try {
      bfa = future_bfa.get();
    } catch (const NumericalError& err) {
      throw NumericalError(std::string("mediator equation: ") + err.what());
    }
    result.evidence_m = bfa.with_predictor;
    result.evidence_y = bfb.with_predictor;
    result.bf_alpha = bfa.bf;
    result.bf_beta = bfb.bf;
    result.bf_med = bf_mediation(result.bf_alpha, result.bf_beta, options.partition);
  }
  return result;
}

}  // namespace ctpt
