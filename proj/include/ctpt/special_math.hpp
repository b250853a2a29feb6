#pragma once

#include <functional>
#include <limits>

namespace ctpt {

struct QuadratureSettings {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  // Budget of integrand evaluations before giving up.
  int max_subdivisions = 2000;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Natural log of the gamma function, Lanczos approximation (g = 7, 9 terms).
/// Relative error below 1e-13 for x > 0.
double log_gamma(double x);

/// log( Gamma(z + 1/2) / Gamma(z) ), stable for large z where the two
/// log-gamma terms would cancel.
double log_gamma_ratio_half(double z);

double log_beta(double a, double b);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

/// Regularized lower incomplete gamma P(a, x).
double regularized_lower_gamma(double a, double x);

double normal_logpdf(double x);
double normal_pdf(double x);
double normal_cdf(double x);

/// Log density of the Student t distribution with nu degrees of freedom.
double student_t_logpdf(double x, double nu);

/// CDF of the Student t distribution with nu degrees of freedom.
double student_t_cdf(double x, double nu);

/// Definite integral of f over (lower, upper); either endpoint may be
/// infinite. Double-exponential (tanh-sinh family) rule: the finite-interval
/// map clusters nodes at the endpoints, the half-line and whole-line maps
/// decay double-exponentially, so smooth integrands converge at machine
/// precision within a few refinement levels. Throws NumericalError when the
/// evaluation budget runs out before the tolerance is met.
double integrate(const std::function<double(double)>& f, double lower, double upper,
                 const QuadratureSettings& settings = QuadratureSettings{});

}  // namespace ctpt
