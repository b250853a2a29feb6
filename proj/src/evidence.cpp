#include "ctpt/evidence.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "ctpt/errors.hpp"
#include "ctpt/rng.hpp"
#include "ctpt/special_math.hpp"

namespace ctpt {

namespace {

// Proposal draws use a stream far from any chain stream of the same fit.
constexpr std::uint64_t kBridgeStreamOffset = 0x100000000ULL;

double log_sum_exp(const Eigen::VectorXd& v) {
  const double mx = v.maxCoeff();
  if (!std::isfinite(mx)) return mx;
  return mx + std::log((v.array() - mx).exp().sum());
}

double log_add_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double mx = std::max(a, b);
  return mx + std::log1p(std::exp(std::min(a, b) - mx));
}

struct MvnProposal {
  Eigen::VectorXd mean;
  Eigen::MatrixXd chol;  // lower factor of the covariance
  double log_norm;       // -(d/2) log(2 pi) - sum(log diag(chol))

  double logpdf(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd u = chol.triangularView<Eigen::Lower>().solve(x - mean);
    return log_norm - 0.5 * u.squaredNorm();
  }

  Eigen::VectorXd sample(SeededRng& rng) const {
    Eigen::VectorXd z(mean.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = draw_standard_normal(rng);
    return mean + chol * z;
  }
};

MvnProposal fit_proposal(const Eigen::MatrixXd& rows) {
  const Eigen::Index n = rows.rows();
  const Eigen::Index d = rows.cols();
  MvnProposal prop;
  prop.mean = rows.colwise().mean();
  Eigen::MatrixXd centred = rows.rowwise() - prop.mean.transpose();
  Eigen::MatrixXd cov = centred.transpose() * centred / static_cast<double>(n - 1);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("log_marginal: DegenerateCovariance in unconstrained draws");
  }
  prop.chol = llt.matrixL();
  const double scale = std::sqrt(cov.diagonal().maxCoeff());
  double log_det_half = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double diag = prop.chol(j, j);
    if (!(diag > 1e-6 * scale)) {
      throw NumericalError("log_marginal: DegenerateCovariance in unconstrained draws");
    }
    log_det_half += std::log(diag);
  }
  prop.log_norm = -0.5 * d * std::log(2.0 * M_PI) - log_det_half;
  return prop;
}

// Lag-1-based inflation of the error term coming from autocorrelated
// posterior draws; crude spectral correction, adequate for an SE report.
double autocorrelation_inflation(const Eigen::VectorXd& series) {
  const Eigen::Index n = series.size();
  if (n < 3) return 1.0;
  const double mean = series.mean();
  const Eigen::ArrayXd x = series.array() - mean;
  const double denom = x.square().sum();
  if (!(denom > 0.0)) return 1.0;
  const double rho = (x.head(n - 1) * x.tail(n - 1)).sum() / denom;
  const double clipped = std::clamp(rho, 0.0, 0.99);
  return (1.0 + clipped) / (1.0 - clipped);
}

}  // namespace

EvidenceResult log_marginal(const Draws& draws, const LogDensity& logpost,
                            const BridgeOptions& options) {
  const Eigen::Index total = draws.unconstrained.rows();
  if (total < 8) throw NumericalError("log_marginal: too few draws");
  const Eigen::Index half = total / 2;

  const Eigen::MatrixXd fit_rows = options.swap_halves
                                       ? draws.unconstrained.bottomRows(total - half)
                                       : draws.unconstrained.topRows(half);
  const Eigen::MatrixXd eval_rows = options.swap_halves
                                        ? draws.unconstrained.topRows(half)
                                        : draws.unconstrained.bottomRows(total - half);

  const MvnProposal prop = fit_proposal(fit_rows);

  const Eigen::Index n1 = eval_rows.rows();
  const Eigen::Index n2 = n1;  // matched budget for proposal evaluations

  // l1: posterior draws, l2: proposal draws; both are log(q_post / q_prop).
  Eigen::VectorXd l1(n1);
  for (Eigen::Index i = 0; i < n1; ++i) {
    const Eigen::VectorXd x = eval_rows.row(i).transpose();
    l1[i] = logpost(x) - prop.logpdf(x);
  }

  SeededRng rng(draws.seed, draws.stream_base + kBridgeStreamOffset + (options.swap_halves ? 1 : 0));
  Eigen::VectorXd l2(n2);
  for (Eigen::Index i = 0; i < n2; ++i) {
    const Eigen::VectorXd x = prop.sample(rng);
    l2[i] = logpost(x) - prop.logpdf(x);
  }

  const double log_s1 = std::log(static_cast<double>(n1) / (n1 + n2));
  const double log_s2 = std::log(static_cast<double>(n2) / (n1 + n2));

  // Fixed point of the optimal-bridge identity, iterated in log space.
  double lr = log_sum_exp(l2) - std::log(static_cast<double>(n2));
  EvidenceResult result;
  bool converged = false;
  int used = 0;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    Eigen::VectorXd num_terms(n2), den_terms(n1);
    for (Eigen::Index i = 0; i < n2; ++i) {
      num_terms[i] = l2[i] - log_add_exp(log_s1 + l2[i], log_s2 + lr);
    }
    for (Eigen::Index j = 0; j < n1; ++j) {
      den_terms[j] = -log_add_exp(log_s1 + l1[j], log_s2 + lr);
    }
    const double lr_new = (log_sum_exp(num_terms) - std::log(static_cast<double>(n2))) -
                          (log_sum_exp(den_terms) - std::log(static_cast<double>(n1)));
    used = iter;
    const double change = std::fabs(lr_new - lr);
    lr = lr_new;
    if (change <= options.rel_tol * (1.0 + std::fabs(lr))) {
      converged = true;
      break;
    }
  }

  // Relative-MSE approximation for the standard error on the log scale.
  Eigen::VectorXd f1(n1), f2(n2);
  for (Eigen::Index j = 0; j < n1; ++j) f1[j] = -log_add_exp(log_s1 + l1[j], log_s2 + lr);
  for (Eigen::Index i = 0; i < n2; ++i) f2[i] = l2[i] - log_add_exp(log_s1 + l2[i], log_s2 + lr);
  const auto rel_var = [](const Eigen::VectorXd& logs) {
    const double lm = log_sum_exp(logs) - std::log(static_cast<double>(logs.size()));
    const Eigen::ArrayXd w = (logs.array() - lm).exp();
    return (w - 1.0).square().sum() / static_cast<double>(logs.size() - 1);
  };
  const double infl = autocorrelation_inflation(f1);
  const double re2 = rel_var(f2) / static_cast<double>(n2) +
                     infl * rel_var(f1) / static_cast<double>(n1);
  result.approx_standard_error = std::sqrt(std::max(re2, 0.0));
  result.log_marginal_likelihood = lr;
  result.iterations_used = used;
  result.converged = converged;
  return result;
}

RegressionProblem drop_predictor(const RegressionProblem& full_problem, Eigen::Index drop_col) {
  if (drop_col < 0 || drop_col >= full_problem.k()) {
    throw DomainError("drop_predictor: column index out of range");
  }
  RegressionProblem reduced = full_problem;
  const Eigen::Index k = full_problem.k();
  reduced.design.resize(full_problem.n(), k - 1);
  reduced.column_names.clear();
  Eigen::Index out = 0;
  for (Eigen::Index j = 0; j < k; ++j) {
    if (j == drop_col) continue;
    reduced.design.col(out++) = full_problem.design.col(j);
    if (j < static_cast<Eigen::Index>(full_problem.column_names.size())) {
      reduced.column_names.push_back(full_problem.column_names[j]);
    }
  }
  return reduced;
}

PathBayesFactor bayes_factor_path_with_draws(const RegressionProblem& full_problem,
                                             const Draws& full_draws, Eigen::Index predictor_col,
                                             const ChainConfig& reduced_config) {
  const RegressionProblem reduced = drop_predictor(full_problem, predictor_col);
  validate(full_problem);
  validate(reduced);

  const LogDensity full_target = [&full_problem](const Eigen::VectorXd& z) {
    return log_posterior_unconstrained(full_problem, z);
  };
  const LogDensity reduced_target = [&reduced](const Eigen::VectorXd& z) {
    return log_posterior_unconstrained(reduced, z);
  };

  PathBayesFactor out;
  out.with_predictor = log_marginal(full_draws, full_target);
  const Draws reduced_draws = fit_regression(reduced, reduced_config);
  out.without_predictor = log_marginal(reduced_draws, reduced_target);
  out.log_bf = out.with_predictor.log_marginal_likelihood -
               out.without_predictor.log_marginal_likelihood;
  out.bf = std::exp(out.log_bf);
  return out;
}

PathBayesFactor bayes_factor_path(const RegressionProblem& full_problem,
                                  Eigen::Index predictor_col, const ChainConfig& config) {
  const Draws full_draws = fit_regression(full_problem, config);
  ChainConfig reduced_config = config;
  reduced_config.stream_base = config.stream_base + 16;
  return bayes_factor_path_with_draws(full_problem, full_draws, predictor_col, reduced_config);
}

}  // namespace ctpt
