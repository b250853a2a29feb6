#pragma once

#include <Eigen/Core>
#include <map>
#include <string>

#include "ctpt/evidence.hpp"
#include "ctpt/mcmc.hpp"

namespace ctpt {

struct MediationData {
  Eigen::VectorXd x;  // independent variable
  Eigen::VectorXd m;  // mediator
  Eigen::VectorXd y;  // outcome

  Eigen::Index n() const { return x.size(); }
  void check() const;
};

/// Conditional probabilities of the three ways the indirect effect can be
/// zero: both paths zero, only the first, only the second.
struct NullPartition {
  double q00 = 1.0 / 3.0;
  double q01 = 1.0 / 3.0;
  double q10 = 1.0 / 3.0;

  void check() const;
};

struct SummaryRow {
  double mean = 0.0;
  double mode = 0.0;
  double p2_5 = 0.0;
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
  double p97_5 = 0.0;
  double ci_length = 0.0;
};

/// Posterior summary: mean, kernel-density mode (Gaussian kernel, Silverman
/// bandwidth, argmax over a 512-point grid), five percentiles with type-7
/// interpolation, and the equal-tailed 95% interval length. At least 100
/// draws required.
SummaryRow summarize(const Eigen::VectorXd& draws);

/// Type-7 quantile of a sample.
double quantile_type7(const Eigen::VectorXd& sample, double p);

/// Shortest interval containing the given posterior mass. The main tables use
/// equal-tailed intervals; this backs the optional HPD output.
std::pair<double, double> hpd_interval(const Eigen::VectorXd& draws, double level);

/// Indirect-effect Bayes factor from the two path Bayes factors under
/// independent paths: BFa BFb / (q00 + q01 BFb + q10 BFa).
double bf_mediation(double bf_alpha, double bf_beta, const NullPartition& q);

/// The same quantity expressed through prior odds on each path.
double bf_mediation_from_odds(double bf_alpha, double bf_beta, double prior_odds_alpha,
                              double prior_odds_beta);

struct MediationOptions {
  ErrorFamily family = ErrorFamily::Ctpt;
  ChainConfig chain;
  PriorConfig priors;
  NullPartition partition;
  bool compute_bayes_factors = true;
};

struct MediationResult {
  Eigen::VectorXd alpha_draws;
  Eigen::VectorXd beta_draws;
  Eigen::VectorXd alphabeta_draws;  // index-paired products
  Eigen::VectorXd tau_draws;
  std::map<std::string, SummaryRow> summaries;
  double bf_alpha = std::numeric_limits<double>::quiet_NaN();
  double bf_beta = std::numeric_limits<double>::quiet_NaN();
  double bf_med = std::numeric_limits<double>::quiet_NaN();
  Diagnostics diag_m;
  Diagnostics diag_y;
  Draws draws_m;
  Draws draws_y;
  EvidenceResult evidence_m;
  EvidenceResult evidence_y;
};

/// Build the two regression problems of the mediation model:
/// mediator ~ 1 + x and outcome ~ 1 + mediator + x.
RegressionProblem mediator_problem(const MediationData& data, ErrorFamily family,
                                   const PriorConfig& priors);
RegressionProblem outcome_problem(const MediationData& data, ErrorFamily family,
                                  const PriorConfig& priors);

/// Fit both equations independently, pair the draws index-wise for the
/// indirect effect, and (optionally) compute the path and mediation Bayes
/// factors.
MediationResult fit_mediation(const MediationData& data, const MediationOptions& options);

}  // namespace ctpt
