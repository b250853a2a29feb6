#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "ctpt/mediation.hpp"

namespace ctpt {

/// Error-term generator for simulated data. Tukey g-and-h draws are centred
/// by their theoretical mean before use.
struct ErrorSpec {
  enum class Kind { Ctpt, TukeyGH, Normal };

  static ErrorSpec ctpt_err(double gamma, TailSpec tail);
  static ErrorSpec tukey(double g, double h);
  static ErrorSpec normal();

  Kind kind = Kind::Normal;
  double gamma = 1.0;
  std::optional<TailSpec> tail;
  double g = 0.0;
  double h = 0.0;

  std::string describe() const;
};

enum class NullVariant { None, BothZero, AlphaZero, BetaZero };

struct ScenarioConfig {
  int n = 50;
  double alpha = 0.4;
  double beta = 0.4;
  double tau = 0.2;
  double intercept_m = 0.0;
  double intercept_y = 0.0;
  double sigma_m = 1.0;
  double sigma_y = 1.0;
  ErrorSpec err_m = ErrorSpec::normal();
  ErrorSpec err_y = ErrorSpec::normal();
  NullVariant null_variant = NullVariant::None;

  void check() const;
  bool is_null() const;
  /// alpha * beta after applying the null variant.
  double true_alphabeta() const;
};

/// Theoretical mean of the Tukey g-and-h transform of a standard normal.
double tukey_gh_mean(double g, double h);

/// Centred Tukey g-and-h draws; the g = 0 skewless case uses the analytic
/// limit Z exp(h Z^2 / 2).
Eigen::VectorXd sample_tukey_gh(Eigen::Index n, double g, double h, SeededRng& rng);

Eigen::VectorXd sample_error(Eigen::Index n, const ErrorSpec& spec, SeededRng& rng);

/// One simulated dataset: x standard normal, mediator and outcome from the
/// two-equation model with independent centred errors.
MediationData gen_data(const ScenarioConfig& scenario, SeededRng& rng);

struct RecoveryResult {
  std::vector<SummaryRow> rows;  // per-replication summary of the indirect effect
  std::vector<bool> covered;
  SummaryRow column_means;
  SummaryRow column_sds;
  double coverage = 0.0;
  double true_alphabeta = 0.0;
  int replications = 0;
  int failures = 0;
};

RecoveryResult run_recovery(const ScenarioConfig& scenario, int replications, ErrorFamily family,
                            const ChainConfig& chain, int threads = 0);

struct PowerResult {
  std::vector<double> alt_bfs;
  std::vector<double> null_bfs;
  double tpr = 0.0;
  double fpr = 0.0;
  double cutoff = 10.0;
  int replications = 0;
  int alt_failures = 0;
  int null_failures = 0;
};

/// True/false positive rates of the indirect-effect test at a Bayes-factor
/// cutoff. Null replications cycle uniformly over the three zero-path
/// variants.
PowerResult run_power(const ScenarioConfig& alt_scenario, const ScenarioConfig& null_scenario,
                      int replications, ErrorFamily family, const ChainConfig& chain,
                      double cutoff, int threads = 0);

/// The ceil(target_fpr * R)-th largest null Bayes factor; rejecting on
/// BF > cutoff then matches the target false positive rate within 1/R.
double match_cutoff(std::vector<double> null_bfs, double target_fpr);

double empirical_rejection_rate(const std::vector<double>& bfs, double cutoff);

struct BootstrapTest {
  double estimate = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  bool reject = false;
  int dropped = 0;  // singular resamples discarded
};

/// Case-resampling OLS bootstrap percentile test for the indirect effect.
BootstrapTest ols_bootstrap_test(const MediationData& data, int n_boot, double level,
                                 SeededRng& rng);

/// Run fn(i) for i in [0, count) over a small worker pool; items own their
/// RNG streams so the schedule does not affect results. threads = 0 uses the
/// hardware count.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace ctpt
