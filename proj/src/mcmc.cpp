#include "ctpt/mcmc.hpp"

#include <Eigen/QR>
#include <cmath>

#include "ctpt/errors.hpp"
#include "ctpt/rng.hpp"
#include "ctpt/special_math.hpp"

namespace ctpt {

void ChainConfig::check() const {
  if (total_iterations < 1000) throw DomainError("ChainConfig: total_iterations must be at least 1000");
  if (!(burn_in_fraction > 0.0) || !(burn_in_fraction < 1.0)) {
    throw DomainError("ChainConfig: burn_in_fraction must lie in (0, 1)");
  }
  if (n_chains < 1) throw DomainError("ChainConfig: n_chains must be at least 1");
  if (adapt_window < 1) throw DomainError("ChainConfig: adapt_window must be at least 1");
  if (!(target_accept > 0.0) || !(target_accept < 1.0)) {
    throw DomainError("ChainConfig: target_accept must lie in (0, 1)");
  }
}

Eigen::Index ChainConfig::kept_per_chain() const {
  const auto burn = static_cast<Eigen::Index>(std::floor(burn_in_fraction * total_iterations));
  return total_iterations - burn;
}

ParamVector initialize(const RegressionProblem& problem) {
  validate(problem);
  ParamVector theta;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(problem.design);
  theta.beta = qr.solve(problem.response);
  const double rss = (problem.response - problem.design * theta.beta).squaredNorm();
  theta.sigma = std::sqrt(rss / static_cast<double>(problem.n() - problem.k()));
  theta.gamma = 1.0;
  theta.nu = 10.0;
  return theta;
}

namespace {

struct SingleChainResult {
  Eigen::MatrixXd kept;
  Eigen::VectorXd acceptance;
};

SingleChainResult run_single_chain(const LogDensity& logpost, const Eigen::VectorXd& init,
                                   const ChainConfig& config, std::uint64_t stream) {
  const Eigen::Index dim = init.size();
  const Eigen::Index burn = config.total_iterations - config.kept_per_chain();
  SeededRng rng(config.seed, stream);

  Eigen::VectorXd z = init;
  double lp = logpost(z);
  if (!std::isfinite(lp)) {
    throw NumericalError("run_chain: NonFiniteLogPost at the initial point");
  }

  Eigen::VectorXd log_step = Eigen::VectorXd::Constant(dim, std::log(0.5));
  Eigen::VectorXi window_accepts = Eigen::VectorXi::Zero(dim);
  Eigen::VectorXd kept_accepts = Eigen::VectorXd::Zero(dim);
  int window_count = 0;
  int batch_index = 0;

  SingleChainResult result;
  result.kept.resize(config.kept_per_chain(), dim);

  for (int iter = 0; iter < config.total_iterations; ++iter) {
    const bool adapting = iter < burn;
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double old = z[j];
      z[j] = old + std::exp(log_step[j]) * draw_standard_normal(rng);
      const double lp_new = logpost(z);
      const double log_u = std::log(rng.next_double());
      if (lp_new - lp > log_u) {
        lp = lp_new;
        if (adapting) window_accepts[j] += 1;
        else kept_accepts[j] += 1.0;
      } else {
        z[j] = old;
      }
    }
    if (adapting) {
      if (++window_count == config.adapt_window) {
        ++batch_index;
        const double delta = std::min(0.1, 1.0 / std::sqrt(static_cast<double>(batch_index)));
        for (Eigen::Index j = 0; j < dim; ++j) {
          const double rate = static_cast<double>(window_accepts[j]) / config.adapt_window;
          log_step[j] += rate > config.target_accept ? delta : -delta;
        }
        window_accepts.setZero();
        window_count = 0;
      }
    } else {
      result.kept.row(iter - burn) = z;
    }
  }
  result.acceptance = kept_accepts / static_cast<double>(config.kept_per_chain());
  return result;
}

}  // namespace

Draws run_chain(const LogDensity& logpost, const Eigen::VectorXd& init, const ChainConfig& config) {
  config.check();
  const Eigen::Index dim = init.size();
  const Eigen::Index kept_each = config.kept_per_chain();

  Draws draws;
  draws.n_chains = config.n_chains;
  draws.kept_per_chain = kept_each;
  draws.seed = config.seed;
  draws.stream_base = config.stream_base;
  draws.unconstrained.resize(kept_each * config.n_chains, dim);
  draws.acceptance = Eigen::VectorXd::Zero(dim);

  for (int c = 0; c < config.n_chains; ++c) {
    SingleChainResult chain = run_single_chain(logpost, init, config, config.stream_base + c);
    draws.unconstrained.middleRows(c * kept_each, kept_each) = chain.kept;
    draws.acceptance += chain.acceptance;
  }
  draws.acceptance /= static_cast<double>(config.n_chains);
  draws.natural = draws.unconstrained;
  draws.names.resize(dim);
  for (Eigen::Index j = 0; j < dim; ++j) draws.names[j] = "z" + std::to_string(j);
  draws.stuck_warning = draws.acceptance.mean() < 0.01;
  return draws;
}

Draws fit_regression(const RegressionProblem& problem, const ChainConfig& config) {
  validate(problem);
  const ParamVector start = initialize(problem);
  const Eigen::VectorXd init_z = to_unconstrained(problem, start);
  const LogDensity target = [&problem](const Eigen::VectorXd& z) {
    return log_posterior_unconstrained(problem, z);
  };
  Draws draws = run_chain(target, init_z, config);
  draws.names = param_names(problem);
  const Eigen::Index k = problem.k();
  for (Eigen::Index i = 0; i < draws.kept(); ++i) {
    const ParamVector theta = from_unconstrained(problem, draws.unconstrained.row(i).transpose());
    draws.natural.row(i).head(k) = theta.beta;
    draws.natural(i, k) = theta.sigma;
    Eigen::Index pos = k + 1;
    if (family_has_gamma(problem.family)) draws.natural(i, pos++) = theta.gamma;
    if (family_has_nu(problem.family)) draws.natural(i, pos++) = theta.nu;
  }
  return draws;
}

namespace {

// Geyer initial monotone positive sequence estimate of the autocorrelation
// time, combined across chains the way Stan does it.
double ess_for_parameter(const Eigen::MatrixXd& natural, Eigen::Index col, int n_chains,
                         Eigen::Index kept_per_chain) {
  const int m = 2 * n_chains;  // split each chain in half
  const Eigen::Index n = kept_per_chain / 2;
  if (n < 2) return 1.0;

  Eigen::MatrixXd seq(n, m);
  for (int c = 0; c < n_chains; ++c) {
    seq.col(2 * c) = natural.col(col).segment(c * kept_per_chain, n);
    seq.col(2 * c + 1) = natural.col(col).segment(c * kept_per_chain + n, n);
  }

  Eigen::VectorXd means(m), vars(m);
  for (int c = 0; c < m; ++c) {
    means[c] = seq.col(c).mean();
    vars[c] = (seq.col(c).array() - means[c]).square().sum() / static_cast<double>(n - 1);
  }
  const double w = vars.mean();
  const double mean_all = means.mean();
  const double b_over_n = m > 1 ? (means.array() - mean_all).square().sum() / (m - 1) : 0.0;
  const double var_plus = (static_cast<double>(n - 1) / n) * w + b_over_n;
  if (!(var_plus > 0.0)) return 1.0;

  double tau = 1.0;
  double prev_pair = kInf;
  for (Eigen::Index t = 1; t + 1 < n; t += 2) {
    double acov_t = 0.0, acov_t1 = 0.0;
    for (int c = 0; c < m; ++c) {
      const auto x = seq.col(c).array() - means[c];
      acov_t += (x.head(n - t) * x.tail(n - t)).sum() / n;
      acov_t1 += (x.head(n - t - 1) * x.tail(n - t - 1)).sum() / n;
    }
    acov_t /= m;
    acov_t1 /= m;
    const double rho_t = 1.0 - (w - acov_t) / var_plus;
    const double rho_t1 = 1.0 - (w - acov_t1) / var_plus;
    double pair = rho_t + rho_t1;
    if (pair < 0.0) break;
    pair = std::min(pair, prev_pair);  // enforce monotonicity
    prev_pair = pair;
    tau += 2.0 * pair;
  }
  const double total = static_cast<double>(m) * n;
  return std::min(total, total / tau);
}

}  // namespace

Diagnostics diagnose(const Draws& draws) {
  if (draws.kept_per_chain < 4) throw NumericalError("diagnose: InsufficientDraws");
  const Eigen::Index dim = draws.dim();
  const int m = 2 * draws.n_chains;
  const Eigen::Index n = draws.kept_per_chain / 2;

  Diagnostics diag;
  diag.rhat.resize(dim);
  diag.ess.resize(dim);
  diag.mean_acceptance = draws.acceptance.size() > 0 ? draws.acceptance.mean() : 0.0;

  for (Eigen::Index j = 0; j < dim; ++j) {
    Eigen::VectorXd means(m), vars(m);
    for (int c = 0; c < draws.n_chains; ++c) {
      const auto first = draws.natural.col(j).segment(c * draws.kept_per_chain, n);
      const auto second = draws.natural.col(j).segment(c * draws.kept_per_chain + n, n);
      means[2 * c] = first.mean();
      means[2 * c + 1] = second.mean();
      vars[2 * c] = (first.array() - means[2 * c]).square().sum() / static_cast<double>(n - 1);
      vars[2 * c + 1] = (second.array() - means[2 * c + 1]).square().sum() / static_cast<double>(n - 1);
    }
    const double w = vars.mean();
    const double mean_all = means.mean();
    const double b = n * (means.array() - mean_all).square().sum() / (m - 1);
    // Degenerate (constant up to rounding) chains have no defined R-hat.
    if (!(w > 1e-24 * (1.0 + mean_all * mean_all))) {
      diag.rhat[j] = std::numeric_limits<double>::quiet_NaN();
      diag.ess[j] = 1.0;
      continue;
    }
    const double var_plus = (static_cast<double>(n - 1) / n) * w + b / n;
    diag.rhat[j] = std::sqrt(var_plus / w);
    diag.ess[j] = ess_for_parameter(draws.natural, j, draws.n_chains, draws.kept_per_chain);
  }
  return diag;
}

}  // namespace ctpt
