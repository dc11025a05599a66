#include <doctest.h>

#include <cmath>

#include "toda/corpus.hpp"
#include "toda/error.hpp"
#include "toda/m_function.hpp"

using namespace toda;

TEST_CASE("free m-functions") {
  const Complex z(0.0, 2.0);
  const auto m = free_m(1.0, 0.0, z);
  const double r2 = std::sqrt(2.0);
  CHECK(std::abs(m.m_plus - Complex(0.0, r2 - 1.0)) <= 1e-15);
  CHECK(std::abs(m.m_minus - Complex(0.0, r2 + 1.0)) <= 1e-15);
  CHECK(std::abs(m.w) < 1.0);
  CHECK(std::abs(m.w * m.w - z * m.w + 1.0) <= 1e-15);

  // a shift of b is a shift of z
  const auto mb = free_m(1.3, 0.4, Complex(1.0, 0.5));
  const auto m0 = free_m(1.3, 0.0, Complex(0.6, 0.5));
  CHECK(std::abs(mb.m_plus - m0.m_plus) <= 1e-15);
  CHECK(std::abs(mb.m_minus - m0.m_minus) <= 1e-15);
  CHECK(mb.m_plus.imag() > 0.0);

  CHECK_THROWS_AS(free_m(1.0, 0.0, Complex(1.0, 0.0)), DomainError);
  CHECK_THROWS_AS(free_m(0.0, 0.0, z), DomainError);
}

TEST_CASE("half-line m-functions of two-sided data") {
  const Complex z(0.3, 0.7);
  const auto F = m_functions(ExtendedJacobi::free(4), z);
  const auto fr = free_m(1.0, 0.0, z);
  CHECK(std::abs(F.m_plus - fr.m_plus) <= 1e-14);
  CHECK(std::abs(F.m_minus - fr.m_minus) <= 1e-14);

  // b_0 only enters m_-
  const ExtendedJacobi P(JacobiMatrix({1.0, 1.0}, {0.0, 1.0, 0.0}, -1), 1.0, 0.0);
  const auto mp = m_functions(P, z);
  CHECK(std::abs(mp.m_plus - fr.m_plus) <= 1e-14);
  CHECK(std::abs(mp.m_minus - fr.m_minus) > 1e-3);
  CHECK(mp.herglotz_margin() > 0.0);

  // the window can be made larger without changing anything
  const auto X = random_compact_perturbation(9, 5);
  const auto a = m_functions(X, z), b = m_functions(X.enlarged(7), z);
  CHECK(std::abs(a.m_plus - b.m_plus) <= 1e-12);
  CHECK(std::abs(a.m_minus - b.m_minus) <= 1e-12);

  CHECK_THROWS_AS(m_functions(X, Complex(0.3, 0.0)), DomainError);
  CHECK_THROWS_AS(m_functions(X, Complex(0.3, -1.0)), DomainError);
}

TEST_CASE("shift law") {
  for (int k = 0; k < 5; ++k) {
    const auto X = random_compact_perturbation(200 + k, 4);
    for (int n = -8; n <= 8; ++n)
      for (const Complex z : {Complex(0.3, 0.5), Complex(0.0, 2.0), Complex(-2.5, 0.4)})
        CHECK(shift_law_residual(X, n, z) <= 1e-10);
  }
}

TEST_CASE("flow update") {
  const auto X = random_compact_perturbation(31, 4);
  const Complex z(0.2, 1.0);
  CocycleConfig cfg;
  cfg.flow.diagnostics = false;

  const auto s = flow_update_check(X, {ScalarFunction(), 3}, z, {10, 20}, cfg);
  for (double e : s.residuals) CHECK(e <= 1e-10);

  const auto fr = flow_update_check(ExtendedJacobi::free(3), {ScalarFunction::identity(), 0}, z, {20}, cfg);
  CHECK(fr.residuals[0] <= 1e-8);

  const auto u = flow_update_check(X, {ScalarFunction::identity(), 1}, z, {10, 20, 40}, cfg);
  REQUIRE(u.residuals.size() == 3);
  CHECK(u.residuals[2] <= u.residuals[0] + 1e-10);
  CHECK(u.residuals[2] <= 1e-6);
  CHECK(u.herglotz_margin > 0.0);
}
