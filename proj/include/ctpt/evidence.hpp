#pragma once

#include <Eigen/Core>

#include "ctpt/mcmc.hpp"

namespace ctpt {

struct EvidenceResult {
  double log_marginal_likelihood = 0.0;
  double approx_standard_error = 0.0;
  int iterations_used = 0;
  bool converged = false;
};

struct BridgeOptions {
  int max_iterations = 1000;
  double rel_tol = 1e-10;
  // Which half of the draws fits the proposal; flipping it should move the
  // estimate by no more than Monte Carlo noise.
  bool swap_halves = false;
};

/// Marginal likelihood of the unnormalized target that generated `draws`,
/// by iterative bridge sampling against a moment-matched multivariate normal
/// proposal in unconstrained space. Draws are split 50/50 between proposal
/// fitting and bridge evaluation. Returns converged = false (with the best
/// estimate) when the fixed point does not settle within max_iterations.
EvidenceResult log_marginal(const Draws& draws, const LogDensity& logpost,
                            const BridgeOptions& options = BridgeOptions{});

struct PathBayesFactor {
  double bf = 0.0;
  double log_bf = 0.0;
  EvidenceResult with_predictor;
  EvidenceResult without_predictor;
};

/// Bayes factor for the presence of one predictor: evidence of the model with
/// the column over evidence of the model without it. Both models share the
/// error family, priors, and improper-prior constant, so the ratio is
/// well-defined.
PathBayesFactor bayes_factor_path(const RegressionProblem& full_problem,
                                  Eigen::Index predictor_col, const ChainConfig& config);

/// Companion to bayes_factor_path when the full model has already been
/// fitted: evidence of `full_draws` against evidence of the reduced fit.
PathBayesFactor bayes_factor_path_with_draws(const RegressionProblem& full_problem,
                                             const Draws& full_draws, Eigen::Index predictor_col,
                                             const ChainConfig& reduced_config);

/// Design-matrix helper: `full_problem` without column `drop_col`.
RegressionProblem drop_predictor(const RegressionProblem& full_problem, Eigen::Index drop_col);

}  // namespace ctpt
