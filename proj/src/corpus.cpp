#include "toda/corpus.hpp"

#include <cmath>

#include "toda/error.hpp"

namespace toda {

std::uint64_t SplitMix64::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::bits(std::uint64_t i) const { return mix(seed_ + (i + 1) * 0x9E3779B97F4A7C15ULL); }

double SplitMix64::uniform01(std::uint64_t i) const { return static_cast<double>(bits(i) >> 11) * 0x1.0p-53; }

double SplitMix64::next_uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(counter_++); }

JacobiMatrix random_jacobi(std::uint64_t seed, const RandomJacobiSpec& spec) {
  if (spec.size < 1) throw DomainError("random_jacobi: size must be >= 1");
  if (!(spec.a_lo > 0.0) || spec.a_hi < spec.a_lo || spec.b_hi < spec.b_lo)
    throw DomainError("random_jacobi: bad coefficient ranges");
  SplitMix64 rng(seed);
  std::vector<double> a(spec.size - 1), b(spec.size);
  for (double& v : a) v = rng.next_uniform(spec.a_lo, spec.a_hi);
  for (double& v : b) v = rng.next_uniform(spec.b_lo, spec.b_hi);
  return JacobiMatrix(std::move(a), std::move(b), spec.index_base);
}

std::vector<JacobiMatrix> random_corpus(std::uint64_t base_seed, int count, const RandomJacobiSpec& spec) {
  std::vector<JacobiMatrix> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) out.push_back(random_jacobi(base_seed + k, spec));
  return out;
}

ExtendedJacobi random_compact_perturbation(std::uint64_t seed, int W, double s) {
  if (W < 1) throw DomainError("random_compact_perturbation: W must be >= 1");
  SplitMix64 rng(seed);
  const int N = 2 * W + 1;
  std::vector<double> a(N - 1, 1.0), b(N, 0.0);
  for (int i = 1; i + 1 < N - 1; ++i) a[i] = rng.next_uniform(1.0 - 0.5 * s, 1.0 + 0.5 * s);
  for (int i = 1; i + 1 < N; ++i) b[i] = rng.next_uniform(-s, s);
  return ExtendedJacobi(JacobiMatrix(std::move(a), std::move(b), -W), 1.0, 0.0);
}

JacobiMatrix bump_jacobi(int size, int index_base, double height) {
  if (size < 1) throw DomainError("bump_jacobi: size must be >= 1");
  const double c = index_base + 0.5 * (size - 1);
  std::vector<double> a(size - 1), b(size, 0.0);
  for (int i = 0; i + 1 < size; ++i) {
    const double x = index_base + i + 0.5 - c;
    a[i] = 1.0 + height * std::exp(-x * x / 4.0);
  }
  return JacobiMatrix(std::move(a), std::move(b), index_base);
}

std::vector<ScalarFunction> standard_functions() {
  return {ScalarFunction::identity(), ScalarFunction::monomial(2), ScalarFunction::monomial(3),
          ScalarFunction::named(NamedKind::Exp, 1.0, 0.25), ScalarFunction::named(NamedKind::Cos)};
}

std::vector<std::string> standard_function_names() { return {"x", "x^2", "x^3", "exp(x/4)", "cos x"}; }

JacobiMatrix named_matrix(const std::string& name, int size, std::uint64_t seed, int index_base) {
  if (name == "free") return JacobiMatrix::free(size, index_base);
  if (name == "bump") return bump_jacobi(size, index_base);
  if (name == "random") {
    RandomJacobiSpec spec;
    spec.size = size;
    spec.index_base = index_base;
    return random_jacobi(seed, spec);
  }
  throw std::invalid_argument("unknown matrix source '" + name + "' (free, bump, random)");
}

}  // namespace toda
