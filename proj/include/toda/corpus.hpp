#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "toda/jacobi.hpp"
#include "toda/scalar_function.hpp"

namespace toda {

/// Counter-based SplitMix64: draw i of stream `seed` is mix(seed + (i+1) * 0x9E3779B97F4A7C15),
/// mapped to [0, 1) with the top 53 bits.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t x);
  std::uint64_t bits(std::uint64_t i) const;
  double uniform01(std::uint64_t i) const;

  /// Sequential interface over the same counter.
  std::uint64_t next_bits() { return bits(counter_++); }
  double next_uniform(double lo = 0.0, double hi = 1.0);
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

struct RandomJacobiSpec {
  int size = 16;
  int index_base = 1;
  double a_lo = 0.5, a_hi = 1.5;
  double b_lo = -1.0, b_hi = 1.0;
};

/// Draws a_1..a_{N-1} first, then b_1..b_N.
JacobiMatrix random_jacobi(std::uint64_t seed, const RandomJacobiSpec& spec = {});

/// Instance k of a corpus is random_jacobi(base_seed + k).
std::vector<JacobiMatrix> random_corpus(std::uint64_t base_seed, int count, const RandomJacobiSpec& spec = {});

/// Free background on [-W, W] with the interior coefficients perturbed by up to
/// `strength` (a in [1 - s/2, 1 + s/2], b in [-s, s]); edge coefficients equal the tail.
ExtendedJacobi random_compact_perturbation(std::uint64_t seed, int W, double strength = 0.5);

/// a_n = 1 + h exp(-(n - c)^2 / 4), b_n = 0 on [base, base + N - 1], c the centre.
JacobiMatrix bump_jacobi(int size, int index_base = 1, double height = 0.5);

/// Named test generators: x, x^2, x^3, exp(x/4), cos x.
std::vector<ScalarFunction> standard_functions();
std::vector<std::string> standard_function_names();

/// Matrix source by name: `free`, `bump` or `random` (seeded).
JacobiMatrix named_matrix(const std::string& name, int size, std::uint64_t seed, int index_base = 1);

}  // namespace toda
