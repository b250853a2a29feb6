#pragma once

// Test-only reference computations. Moments are evaluated by quadrature of
// the density split at the mode (the density has a kink there), independent
// of the closed-form implementations they are used to check.

#include <cmath>

#include "ctpt/distribution.hpp"
#include "ctpt/special_math.hpp"

namespace ctpt::testing {

inline double moment_by_quadrature(int order, const CtptSpec& spec) {
  const auto integrand = [order, &spec](double x) {
    return std::pow(x, order) * pdf(x, spec);
  };
  const double split = mode(spec);
  QuadratureSettings settings;
  settings.abs_tol = 1e-12;
  settings.rel_tol = 1e-11;
  settings.max_subdivisions = 4000;
  return integrate(integrand, -kInf, split, settings) + integrate(integrand, split, kInf, settings);
}

inline double mass_by_quadrature(const CtptSpec& spec, double upper) {
  QuadratureSettings settings;
  settings.abs_tol = 1e-12;
  settings.rel_tol = 1e-11;
  settings.max_subdivisions = 4000;
  const double split = mode(spec);
  const auto f = [&spec](double x) { return pdf(x, spec); };
  if (upper <= split) return integrate(f, -kInf, upper, settings);
  return integrate(f, -kInf, split, settings) + integrate(f, split, upper, settings);
}

// Mean of the uncentred two-piece density by direct quadrature of x * pdf.
inline double uncentred_mean_by_quadrature(const CtptSpec& spec) {
  QuadratureSettings settings;
  settings.abs_tol = 1e-12;
  settings.rel_tol = 1e-11;
  settings.max_subdivisions = 4000;
  const auto f = [&spec](double x) { return x * std::exp(logpdf_uncentred(x, spec)); };
  return integrate(f, -kInf, 0.0, settings) + integrate(f, 0.0, kInf, settings);
}

}  // namespace ctpt::testing
