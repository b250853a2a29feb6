#pragma once

#include <cstdint>

namespace ctpt {

/// Small value-type PRNG (PCG32). A (seed, stream_id) pair selects an
/// independent stream, so workers that own distinct stream ids produce
/// results independent of scheduling order and thread count.
class SeededRng {
public:
  SeededRng() : SeededRng(0, 0) {}
  SeededRng(std::uint64_t seed, std::uint64_t stream_id);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform double in the open interval (0, 1).
  double next_double();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

private:
  std::uint64_t state_;
  std::uint64_t inc_;
  std::uint64_t seed_;
  std::uint64_t stream_;
};

double draw_uniform(SeededRng& rng);
double draw_standard_normal(SeededRng& rng);
double draw_student_t(double nu, SeededRng& rng);
double draw_gamma(double shape, double rate, SeededRng& rng);

}  // namespace ctpt
