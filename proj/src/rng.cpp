#include "ctpt/rng.hpp"

#include <cmath>

#include "ctpt/errors.hpp"

namespace ctpt {

namespace {
constexpr std::uint64_t kPcgMultiplier = 6364136223846793005ULL;
}

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream_id)
    : state_(0), inc_((stream_id << 1u) | 1u), seed_(seed), stream_(stream_id) {
  next_u32();
  state_ += seed;
  next_u32();
}

std::uint32_t SeededRng::next_u32() {
  const std::uint64_t old = state_;
  state_ = old * kPcgMultiplier + inc_;
  const std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
  const std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
  return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
}

std::uint64_t SeededRng::next_u64() {
  const std::uint64_t hi = next_u32();
  const std::uint64_t lo = next_u32();
  return (hi << 32u) | lo;
}

double SeededRng::next_double() {
  // 53-bit mantissa, offset to stay inside the open interval.
  return (static_cast<double>(next_u64() >> 11u) + 0.5) * 0x1.0p-53;
}

double draw_uniform(SeededRng& rng) { return rng.next_double(); }

double draw_standard_normal(SeededRng& rng) {
  // Marsaglia polar method; the unused second variate is discarded so the
  // generator stays stateless beyond the stream itself.
  for (;;) {
    const double u = 2.0 * rng.next_double() - 1.0;
    const double v = 2.0 * rng.next_double() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

double draw_gamma(double shape, double rate, SeededRng& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw DomainError("draw_gamma: shape and rate must be positive");
  if (shape < 1.0) {
    // Boost to shape + 1, correct by u^(1/shape).
    const double u = rng.next_double();
    return draw_gamma(shape + 1.0, rate, rng) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = draw_standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.next_double();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double draw_student_t(double nu, SeededRng& rng) {
  if (!(nu > 0.0)) throw DomainError("draw_student_t: requires nu > 0");
  const double z = draw_standard_normal(rng);
  const double chi2 = draw_gamma(0.5 * nu, 0.5, rng);
  return z / std::sqrt(chi2 / nu);
}

}  // namespace ctpt
