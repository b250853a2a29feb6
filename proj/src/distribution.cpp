#include "ctpt/distribution.hpp"

#include <cmath>

#include "ctpt/errors.hpp"
#include "ctpt/special_math.hpp"

namespace ctpt {

TailSpec TailSpec::finite(double nu) {
  if (!(nu > 2.0)) throw DomainError("TailSpec: finite tails require nu > 2");
  return TailSpec(false, nu);
}

TailSpec TailSpec::normal_limit() { return TailSpec(true, 0.0); }

double TailSpec::nu() const {
  if (normal_) throw DomainError("TailSpec: normal limit has no finite nu");
  return nu_;
}

CtptSpec::CtptSpec(double gamma_in, TailSpec tail_in) : gamma(gamma_in), tail(tail_in) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("CtptSpec: gamma must be positive and finite");
}

namespace {

constexpr double kSqrtTwoOverPi = 0.79788456080286535587989211986876;

double base_logpdf(double x, const TailSpec& tail) {
  return tail.is_normal_limit() ? normal_logpdf(x) : student_t_logpdf(x, tail.nu());
}

double base_cdf(double x, const TailSpec& tail) {
  return tail.is_normal_limit() ? normal_cdf(x) : student_t_cdf(x, tail.nu());
}

// Mean of |T| for the base density; m = (gamma - 1/gamma) * mean_abs.
double base_mean_abs(const TailSpec& tail) {
  if (tail.is_normal_limit()) return kSqrtTwoOverPi;
  const double nu = tail.nu();
  // 2 nu Gamma((nu+1)/2) / (sqrt(pi nu) (nu - 1) Gamma(nu/2))
  return 2.0 * nu / (std::sqrt(M_PI * nu) * (nu - 1.0)) * std::exp(log_gamma_ratio_half(0.5 * nu));
}

}  // namespace

double offset_m(const CtptSpec& spec) {
  return (spec.gamma - 1.0 / spec.gamma) * base_mean_abs(spec.tail);
}

double mode(const CtptSpec& spec) { return -offset_m(spec); }

double logpdf_uncentred(double x, const CtptSpec& spec) {
  const double g = spec.gamma;
  const double lognorm = std::log(2.0 / (g + 1.0 / g));
  const double scaled = x >= 0.0 ? x / g : g * x;
  return lognorm + base_logpdf(scaled, spec.tail);
}

double logpdf(double x, const CtptSpec& spec) {
  return logpdf_uncentred(x + offset_m(spec), spec);
}

double pdf(double x, const CtptSpec& spec) { return std::exp(logpdf(x, spec)); }

namespace {

// E[Y^k] for the uncentred two-piece variable Y. Finite tails need nu > k.
double uncentred_raw_moment(int k, const CtptSpec& spec) {
  const double g = spec.gamma;
  const double piece = std::pow(g, k + 1) + (k % 2 == 0 ? 1.0 : -1.0) * std::pow(g, -k - 1);
  const double front = piece / (g + 1.0 / g);
  if (spec.tail.is_normal_limit()) {
    return front * std::pow(2.0, 0.5 * k) / std::sqrt(M_PI) * std::exp(log_gamma(0.5 * (k + 1)));
  }
  const double nu = spec.tail.nu();
  const double log_tail = log_gamma(0.5 * (k + 1)) + log_gamma(0.5 * (nu - k)) - log_gamma(0.5 * nu);
  return front * std::pow(nu, 0.5 * k) / std::sqrt(M_PI) * std::exp(log_tail);
}

}  // namespace

double variance(const CtptSpec& spec) {
  const double g = spec.gamma;
  const double shape = g * g - 1.0 + 1.0 / (g * g);
  const double m = offset_m(spec);
  const double second = spec.tail.is_normal_limit()
                            ? shape
                            : spec.tail.nu() / (spec.tail.nu() - 2.0) * shape;
  return second - m * m;
}

double raw_moment(int r, const CtptSpec& spec) {
  if (r < 1) throw DomainError("raw_moment: r must be a positive integer");
  if (!spec.tail.is_normal_limit() && !(spec.tail.nu() > r)) {
    throw DomainError("raw_moment: moment of order r requires nu > r");
  }
  const double m = offset_m(spec);
  double total = 0.0;
  double binom = 1.0;  // C(r, k), updated incrementally
  for (int k = 0; k <= r; ++k) {
    const double mk = k == 0 ? 1.0 : uncentred_raw_moment(k, spec);
    total += binom * std::pow(-m, r - k) * mk;
    binom = binom * (r - k) / (k + 1.0);
  }
  return total;
}

double skewness_fisher(const CtptSpec& spec) {
  if (!spec.tail.is_normal_limit() && !(spec.tail.nu() > 3.0)) {
    throw DomainError("skewness_fisher: requires nu > 3");
  }
  const double m2 = raw_moment(2, spec);
  const double m3 = raw_moment(3, spec);
  return m3 / std::pow(m2, 1.5);
}

double skewness_ag(double gamma) {
  if (!(gamma > 0.0)) throw DomainError("skewness_ag: gamma must be positive");
  return (gamma * gamma - 1.0) / (gamma * gamma + 1.0);
}

double cdf(double x, const CtptSpec& spec) {
  const double g = spec.gamma;
  const double y = x + offset_m(spec);  // uncentred coordinate, mode at 0
  const double left_mass = 1.0 / (1.0 + g * g);
  if (y < 0.0) {
    return 2.0 * left_mass * base_cdf(g * y, spec.tail);
  }
  const double right_mass = 1.0 - left_mass;
  return left_mass + 2.0 * right_mass * (base_cdf(y / g, spec.tail) - 0.5);
}

double quantile(double p, const CtptSpec& spec) {
  if (!(p > 0.0) || !(p < 1.0)) throw DomainError("quantile: p must lie in (0, 1)");
  // Bracket around the mode, then safeguarded Newton on the piecewise cdf.
  double lo = mode(spec);
  double hi = lo;
  double step = 1.0;
  while (cdf(lo, spec) > p) {
    lo -= step;
    step *= 2.0;
  }
  step = 1.0;
  while (cdf(hi, spec) < p) {
    hi += step;
    step *= 2.0;
  }
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double c = cdf(x, spec);
    if (c > p) {
      hi = x;
    } else {
      lo = x;
    }
    const double dens = pdf(x, spec);
    double next = dens > 0.0 ? x - (c - p) / dens : x;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 1e-12 * (1.0 + std::fabs(next)) && std::fabs(c - p) < 1e-12) {
      return next;
    }
    x = next;
  }
  return x;
}

Eigen::VectorXd sample(Eigen::Index n, const CtptSpec& spec, SeededRng& rng) {
  if (n < 1) throw DomainError("sample: n must be at least 1");
  const double g = spec.gamma;
  const double right_prob = g * g / (1.0 + g * g);
  const double m = offset_m(spec);
  const bool normal = spec.tail.is_normal_limit();
  const double nu = normal ? 0.0 : spec.tail.nu();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = rng.next_double();
    const double t = std::fabs(normal ? draw_standard_normal(rng) : draw_student_t(nu, rng));
    const double y = u < right_prob ? g * t : -t / g;
    out[i] = y - m;
  }
  return out;
}

}  // namespace ctpt
