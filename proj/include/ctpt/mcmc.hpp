#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ctpt/regression.hpp"

namespace ctpt {

using LogDensity = std::function<double(const Eigen::VectorXd&)>;

struct ChainConfig {
  int total_iterations = 30000;
  double burn_in_fraction = 0.2;
  int n_chains = 1;       // 1 for simulation parity, 4 for user-facing fits
  int adapt_window = 50;  // Robbins-Monro batch size during burn-in
  double target_accept = 0.44;
  std::uint64_t seed = 0;
  std::uint64_t stream_base = 0;  // chains use streams stream_base .. +n_chains-1

  void check() const;
  Eigen::Index kept_per_chain() const;
};

struct Draws {
  Eigen::MatrixXd natural;        // kept draws in natural parameter space
  Eigen::MatrixXd unconstrained;  // the same draws in sampler space
  std::vector<std::string> names;
  Eigen::VectorXd acceptance;  // per-coordinate acceptance rate after burn-in
  int n_chains = 1;
  Eigen::Index kept_per_chain = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream_base = 0;
  bool stuck_warning = false;  // acceptance collapsed below 1% after burn-in

  Eigen::Index kept() const { return natural.rows(); }
  Eigen::Index dim() const { return natural.cols(); }
};

struct Diagnostics {
  Eigen::VectorXd rhat;  // split R-hat per parameter; NaN when undefined
  Eigen::VectorXd ess;   // effective sample size per parameter
  double mean_acceptance = 0.0;
};

/// Starting point: least-squares coefficients, residual standard deviation,
/// gamma = 1 and nu = 10 where free.
ParamVector initialize(const RegressionProblem& problem);

/// Adaptive component-wise random-walk Metropolis on an unconstrained target.
/// Step sizes adapt in Robbins-Monro batches during burn-in and are frozen
/// afterwards, so kept draws come from a fixed kernel. Deterministic given
/// (seed, stream_base).
Draws run_chain(const LogDensity& logpost, const Eigen::VectorXd& init, const ChainConfig& config);

/// Full posterior sampling for a regression problem: validate, initialize,
/// run one chain per stream, map draws back to natural parameters.
Draws fit_regression(const RegressionProblem& problem, const ChainConfig& config);

/// Split R-hat and autocorrelation-based effective sample size.
Diagnostics diagnose(const Draws& draws);

}  // namespace ctpt
