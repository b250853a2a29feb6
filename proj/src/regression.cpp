#include "ctpt/regression.hpp"

#include <Eigen/QR>
#include <cmath>

#include "ctpt/errors.hpp"
#include "ctpt/special_math.hpp"

namespace ctpt {

bool family_has_gamma(ErrorFamily family) {
  return family == ErrorFamily::SkewNormal || family == ErrorFamily::Ctpt;
}

bool family_has_nu(ErrorFamily family) {
  return family == ErrorFamily::StudentT || family == ErrorFamily::Ctpt;
}

std::string family_name(ErrorFamily family) {
  switch (family) {
    case ErrorFamily::Normal: return "normal";
    case ErrorFamily::StudentT: return "nu-only";
    case ErrorFamily::SkewNormal: return "gamma-only";
    case ErrorFamily::Ctpt: return "full";
  }
  return "unknown";
}

ErrorFamily family_from_name(const std::string& name) {
  if (name == "normal") return ErrorFamily::Normal;
  if (name == "nu-only" || name == "student-t") return ErrorFamily::StudentT;
  if (name == "gamma-only" || name == "skew-normal") return ErrorFamily::SkewNormal;
  if (name == "full" || name == "ctpt") return ErrorFamily::Ctpt;
  throw ValidationError("unknown error family: " + name +
                        " (expected full, gamma-only, nu-only, or normal)");
}

void PriorConfig::check() const {
  if (!(gamma_shape > 0.0) || !(gamma_rate > 0.0) || !(nu_rate > 0.0)) {
    throw DomainError("PriorConfig: shape and rate hyperparameters must be positive");
  }
  if (!(gamma_lower > 0.0) || !(gamma_lower <= 1.0) || !(gamma_upper >= 1.0) ||
      !std::isfinite(gamma_upper)) {
    throw DomainError("PriorConfig: gamma support must satisfy 0 < lower <= 1 <= upper < inf");
  }
}

void validate(const RegressionProblem& problem) {
  const Eigen::Index n = problem.n();
  const Eigen::Index k = problem.k();
  if (k < 1 || n < 1) throw ValidationError("empty design matrix");
  if (problem.response.size() != n) throw ValidationError("response length does not match design rows");
  if (n <= k) {
    throw ValidationError("ImproperPosterior: the posterior is proper if and only if n > k (n=" +
                          std::to_string(n) + ", k=" + std::to_string(k) + ")");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(problem.design);
  qr.setThreshold(1e-10);
  if (qr.rank() < k) {
    throw ValidationError("RankDeficient: design matrix does not have full column rank");
  }
  const Eigen::VectorXd fitted = problem.design * qr.solve(problem.response);
  const double rss = (problem.response - fitted).squaredNorm();
  const double scale = std::max(1.0, problem.response.squaredNorm());
  if (rss <= 1e-20 * scale) {
    throw ValidationError("DegenerateResponse: response lies in the column space of the design");
  }
  problem.priors.check();
}

int sigma_moment_bound(Eigen::Index n, Eigen::Index k) {
  if (n <= k) throw ValidationError("sigma_moment_bound: requires n > k");
  return static_cast<int>(n - k - 1);
}

CtptSpec error_spec_for(const RegressionProblem& problem, const ParamVector& theta) {
  const double gamma = family_has_gamma(problem.family) ? theta.gamma : 1.0;
  const TailSpec tail = family_has_nu(problem.family) ? TailSpec::finite(theta.nu)
                                                      : TailSpec::normal_limit();
  return CtptSpec(gamma, tail);
}

namespace {

// Per-theta constants of the error density, hoisted out of the data loop.
struct ErrorDensity {
  double gamma;
  double m;
  double lognorm;  // log(2 / (gamma + 1/gamma))
  bool normal;
  double nu;
  double t_const;  // Student t normalization, unused for the normal base

  explicit ErrorDensity(const CtptSpec& spec)
      : gamma(spec.gamma),
        m(offset_m(spec)),
        lognorm(std::log(2.0 / (spec.gamma + 1.0 / spec.gamma))),
        normal(spec.tail.is_normal_limit()),
        nu(normal ? 0.0 : spec.tail.nu()),
        t_const(normal ? 0.0 : log_gamma_ratio_half(0.5 * nu) - 0.5 * std::log(nu * M_PI)) {}

  // Log density of the centred error at e.
  double operator()(double e) const {
    const double y = e + m;
    const double s = y >= 0.0 ? y / gamma : gamma * y;
    if (normal) return lognorm + normal_logpdf(s);
    return lognorm + t_const - 0.5 * (nu + 1.0) * std::log1p(s * s / nu);
  }
};

void check_theta(const RegressionProblem& problem, const ParamVector& theta) {
  if (theta.beta.size() != problem.k()) throw DomainError("theta: beta dimension mismatch");
  if (!(theta.sigma > 0.0)) throw DomainError("theta: sigma must be positive");
  if (family_has_gamma(problem.family) && !(theta.gamma > 0.0)) {
    throw DomainError("theta: gamma must be positive");
  }
  if (family_has_nu(problem.family) && !(theta.nu > 2.0)) {
    throw DomainError("theta: nu must exceed 2");
  }
}

}  // namespace

double log_likelihood(const RegressionProblem& problem, const ParamVector& theta) {
  check_theta(problem, theta);
  const ErrorDensity dens(error_spec_for(problem, theta));
  const Eigen::VectorXd resid = problem.response - problem.design * theta.beta;
  const double inv_sigma = 1.0 / theta.sigma;
  double total = -static_cast<double>(problem.n()) * std::log(theta.sigma);
  for (Eigen::Index i = 0; i < resid.size(); ++i) {
    total += dens(resid[i] * inv_sigma);
  }
  return total;
}

double log_likelihood_uncentred(const RegressionProblem& problem, const ParamVector& theta) {
  check_theta(problem, theta);
  const CtptSpec spec = error_spec_for(problem, theta);
  const Eigen::VectorXd resid = problem.response - problem.design * theta.beta;
  const double inv_sigma = 1.0 / theta.sigma;
  double total = -static_cast<double>(problem.n()) * std::log(theta.sigma);
  for (Eigen::Index i = 0; i < resid.size(); ++i) {
    total += logpdf_uncentred(resid[i] * inv_sigma, spec);
  }
  return total;
}

double log_prior(const ParamVector& theta, const PriorConfig& priors, ErrorFamily family) {
  priors.check();
  if (!(theta.sigma > 0.0)) return -kInf;
  double lp = -std::log(theta.sigma);
  if (family_has_gamma(family)) {
    const double g = theta.gamma;
    if (!(g > priors.gamma_lower) || !(g < priors.gamma_upper)) return -kInf;
    const double a = priors.gamma_shape;
    const double b = priors.gamma_rate;
    const double trunc_mass = regularized_lower_gamma(a, b * priors.gamma_upper) -
                              regularized_lower_gamma(a, b * priors.gamma_lower);
    lp += a * std::log(b) - log_gamma(a) + (a - 1.0) * std::log(g) - b * g - std::log(trunc_mass);
  }
  if (family_has_nu(family)) {
    const double nu = theta.nu;
    if (!(nu > 2.0)) return -kInf;
    lp += std::log(priors.nu_rate) - priors.nu_rate * (nu - 2.0);
  }
  return lp;
}

Eigen::Index param_dim(const RegressionProblem& problem) {
  return problem.k() + 1 + (family_has_gamma(problem.family) ? 1 : 0) +
         (family_has_nu(problem.family) ? 1 : 0);
}

std::vector<std::string> param_names(const RegressionProblem& problem) {
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < problem.k(); ++j) {
    if (j < static_cast<Eigen::Index>(problem.column_names.size())) {
      names.push_back(problem.column_names[j]);
    } else {
      names.push_back("b" + std::to_string(j));
    }
  }
  names.push_back("sigma");
  if (family_has_gamma(problem.family)) names.push_back("gamma");
  if (family_has_nu(problem.family)) names.push_back("nu");
  return names;
}

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }
double expit(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

Eigen::VectorXd to_unconstrained(const RegressionProblem& problem, const ParamVector& theta) {
  check_theta(problem, theta);
  Eigen::VectorXd z(param_dim(problem));
  const Eigen::Index k = problem.k();
  z.head(k) = theta.beta;
  z[k] = std::log(theta.sigma);
  Eigen::Index pos = k + 1;
  if (family_has_gamma(problem.family)) {
    const double lo = problem.priors.gamma_lower;
    const double hi = problem.priors.gamma_upper;
    z[pos++] = logit((theta.gamma - lo) / (hi - lo));
  }
  if (family_has_nu(problem.family)) {
    z[pos++] = std::log(theta.nu - 2.0);
  }
  return z;
}

ParamVector from_unconstrained(const RegressionProblem& problem, const Eigen::VectorXd& z) {
  if (z.size() != param_dim(problem)) throw DomainError("from_unconstrained: dimension mismatch");
  ParamVector theta;
  const Eigen::Index k = problem.k();
  theta.beta = z.head(k);
  theta.sigma = std::exp(z[k]);
  Eigen::Index pos = k + 1;
  if (family_has_gamma(problem.family)) {
    const double lo = problem.priors.gamma_lower;
    const double hi = problem.priors.gamma_upper;
    theta.gamma = lo + (hi - lo) * expit(z[pos++]);
  }
  if (family_has_nu(problem.family)) {
    theta.nu = 2.0 + std::exp(z[pos++]);
  }
  return theta;
}

double log_jacobian(const RegressionProblem& problem, const Eigen::VectorXd& z) {
  if (z.size() != param_dim(problem)) throw DomainError("log_jacobian: dimension mismatch");
  const Eigen::Index k = problem.k();
  double lj = z[k];  // d sigma / d log sigma = sigma
  Eigen::Index pos = k + 1;
  if (family_has_gamma(problem.family)) {
    const double span = problem.priors.gamma_upper - problem.priors.gamma_lower;
    const double s = expit(z[pos++]);
    lj += std::log(span) + std::log(s) + std::log1p(-s);
  }
  if (family_has_nu(problem.family)) {
    lj += z[pos++];  // d nu / d z = exp(z)
  }
  return lj;
}

double log_posterior_unconstrained(const RegressionProblem& problem, const Eigen::VectorXd& z) {
  const ParamVector theta = from_unconstrained(problem, z);
  const double lp = log_prior(theta, problem.priors, problem.family);
  if (lp == -kInf) return -kInf;
  return log_likelihood(problem, theta) + lp + log_jacobian(problem, z);
}

namespace {

Eigen::Index find_intercept_column(const RegressionProblem& problem) {
  for (Eigen::Index j = 0; j < problem.k(); ++j) {
    if ((problem.design.col(j).array() == 1.0).all()) return j;
  }
  throw ValidationError("loglik_equivalence_shift: design has no intercept column");
}

}  // namespace

double loglik_equivalence_shift(const RegressionProblem& problem, const ParamVector& theta) {
  const Eigen::Index j = find_intercept_column(problem);
  const double centred = log_likelihood(problem, theta);
  const double m = offset_m(error_spec_for(problem, theta));
  ParamVector shifted = theta;
  shifted.beta[j] -= theta.sigma * m;
  const double uncentred = log_likelihood_uncentred(problem, shifted);
  return std::fabs(centred - uncentred);
}

}  // namespace ctpt
