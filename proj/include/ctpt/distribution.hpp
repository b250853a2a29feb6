#pragma once

#include <Eigen/Core>

#include "ctpt/rng.hpp"

namespace ctpt {

/// Tail behaviour of the skewed error family: a Student t base with
/// nu > 2 degrees of freedom, or the normal base as a distinct variant
/// (never a large-nu stand-in).
class TailSpec {
public:
  static TailSpec finite(double nu);
  static TailSpec normal_limit();

  bool is_normal_limit() const { return normal_; }
  /// Degrees of freedom; only meaningful for the finite variant.
  double nu() const;

  friend bool operator==(const TailSpec& a, const TailSpec& b) {
    return a.normal_ == b.normal_ && (a.normal_ || a.nu_ == b.nu_);
  }

private:
  TailSpec(bool normal, double nu) : normal_(normal), nu_(nu) {}
  bool normal_;
  double nu_;
};

/// Skewed, mean-zero error distribution: a Student t (or normal) density
/// scaled by gamma right of its mode and 1/gamma left of it, then shifted so
/// the mean is exactly zero. gamma > 1 skews right, gamma < 1 left, gamma = 1
/// recovers the symmetric base.
struct CtptSpec {
  CtptSpec(double gamma_in, TailSpec tail_in);
  double gamma;
  TailSpec tail;
};

/// Mean of the uncentred two-piece density; the centring shift. Computed via
/// log-gamma differences so large nu does not overflow the Gamma ratios.
double offset_m(const CtptSpec& spec);

/// Location of the density mode of the centred distribution, -offset_m.
double mode(const CtptSpec& spec);

/// Log density of the uncentred two-piece distribution (mode at zero,
/// mean offset_m).
double logpdf_uncentred(double x, const CtptSpec& spec);

/// Log density of the centred distribution (mean zero, mode at -offset_m).
double logpdf(double x, const CtptSpec& spec);
double pdf(double x, const CtptSpec& spec);

double variance(const CtptSpec& spec);

/// r-th raw moment of the centred distribution, closed form. Requires
/// nu > r for the finite-tail variant.
double raw_moment(int r, const CtptSpec& spec);

/// Fisher's moment coefficient of skewness, E[X^3]/E[X^2]^(3/2).
/// Requires nu > 3 for the finite-tail variant.
double skewness_fisher(const CtptSpec& spec);

/// Arnold-Groeneveld skewness: one minus twice the mass left of the mode,
/// (gamma^2 - 1)/(gamma^2 + 1). Tail-independent.
double skewness_ag(double gamma);

double cdf(double x, const CtptSpec& spec);
double quantile(double p, const CtptSpec& spec);

Eigen::VectorXd sample(Eigen::Index n, const CtptSpec& spec, SeededRng& rng);

}  // namespace ctpt
