#include <doctest.h>

#include <cmath>

#include "toda/cocycle.hpp"
#include "toda/corpus.hpp"
#include "toda/error.hpp"
#include "toda/lax_flow.hpp"

using namespace toda;

namespace {

double dist(const Mat2& A, const Mat2& B) { return norm2x2(A - B); }

CocycleConfig quiet_config() {
  CocycleConfig c;
  c.flow.diagnostics = false;
  return c;
}

}  // namespace

TEST_CASE("transfer matrices") {
  const Mat2 A = transfer_matrix(1.0, 0.0, Complex(0.0, 0.0));
  Mat2 R;
  R << 0.0, 1.0, -1.0, 0.0;
  CHECK(dist(A, R) == 0.0);
  for (const Complex z : {Complex(0.3, 0.1), Complex(-2.0, 0.0), Complex(5.0, -3.0)})
    CHECK(std::abs(transfer_matrix(0.7, -0.4, z).determinant() - 1.0) <= 1e-15);

  // (u_{n+1}, -a_n u_n) = A_n (u_n, -a_{n-1} u_{n-1}) for solutions of J u = z u
  const auto J = random_jacobi(3, {.size = 8});
  const Complex z(0.4, 0.9);
  std::vector<Complex> u(9);
  u[1] = 1.0;
  u[2] = (z - J.b(1)) / J.a(1);
  for (int n = 2; n < 8; ++n) u[n + 1] = ((z - J.b(n)) * u[n] - J.a(n - 1) * u[n - 1]) / J.a(n);
  for (int n = 2; n < 8; ++n) {
    Eigen::Vector2cd v(u[n], -J.a(n - 1) * u[n - 1]);
    const Eigen::Vector2cd w = transfer_matrix(J.a(n), J.b(n), z) * v;
    CHECK(std::abs(w(0) - u[n + 1]) <= 1e-12 * std::abs(u[n + 1]));
    CHECK(std::abs(w(1) + J.a(n) * u[n]) <= 1e-12 * std::abs(u[n]));
  }
  // the base n0 uses site n0 + 1
  CHECK(dist(transfer_matrix(J, 3, z), transfer_matrix(J.a(4), J.b(4), z)) == 0.0);
  CHECK_THROWS_AS(transfer_matrix(J, 8, z), DomainError);
}

TEST_CASE("shift cocycle") {
  const auto X = random_compact_perturbation(8, 5);
  const Complex z(0.2, 0.6);
  CHECK(dist(shift_cocycle(X, 0, z), Mat2::Identity()) == 0.0);
  const Mat2 T2 = shift_cocycle(X, 2, z);
  CHECK(dist(T2, transfer_matrix(shift(X, 1), 0, z) * transfer_matrix(X, 0, z)) <= 1e-15);
  for (int n : {1, 3, 7}) {
    const Mat2 T = shift_cocycle(X, n, z);
    const Mat2 Tinv = shift_cocycle(shift(X, n), -n, z);
    CHECK(dist(Tinv * T, Mat2::Identity()) <= 1e-12 * (1 + T.norm() * T.norm()));
    // cocycle over the shift: T(n + m; X) = T(m; n.X) T(n; X)
    CHECK(dist(shift_cocycle(X, n + 2, z), shift_cocycle(shift(X, n), 2, z) * T) <= 1e-12 * (1 + T.norm()));
  }
}

TEST_CASE("entire parts") {
  const auto J = random_jacobi(5, {.size = 9});
  const Complex z(0.7, -0.3);
  const auto e = entire_part(J, ScalarFunction::identity(), 4, z);
  CHECK(std::abs(e.divided.fg + 1.0) <= 1e-12);
  CHECK(std::abs(e.divided.fh + z) <= 1e-12);
  CHECK(std::abs(e.series.fg + 1.0) <= 1e-12);
  CHECK(std::abs(e.series.fh + z) <= 1e-12);

  const auto c = entire_part_divided(J, ScalarFunction::constant(2.5), 4, z);
  CHECK(std::abs(c.fg) <= 1e-13);
  CHECK(std::abs(c.fh + 2.5) <= 1e-13);

  // x^2 g_n = -(z + b_n) + O(1/z)
  const auto q = entire_part_divided(J, ScalarFunction::monomial(2), 4, z);
  CHECK(std::abs(q.fg + (z + J.b(4))) <= 1e-12);

  const auto ex = entire_part(J, ScalarFunction::named(NamedKind::Exp), 4, z);
  CHECK(std::abs(ex.divided.fg - ex.series.fg) <= 1e-9);
  CHECK(std::abs(ex.divided.fh - ex.series.fh) <= 1e-9);
}

TEST_CASE("generator B") {
  const auto J = random_jacobi(6, {.size = 9});
  const int n0 = 4;
  const Complex z(1.1, 0.4);
  const Mat2 B = build_B(J, ScalarFunction::identity(), n0, z);
  Mat2 ref;
  ref << z - J.b(n0 + 1), 2.0, -2.0 * J.a(n0) * J.a(n0), -(z - J.b(n0 + 1));
  CHECK(dist(B, ref) <= 1e-12);
  CHECK(norm2x2(build_B(J, ScalarFunction::constant(3.0), n0, z)) <= 1e-12);
  for (const auto& f : standard_functions()) CHECK(std::abs(build_B(J, f, n0, z).trace()) <= 1e-12);
  CHECK_THROWS_AS(build_B(J, ScalarFunction::identity(), J.first_site(), z), DomainError);
  CHECK_THROWS_AS(build_B(J, ScalarFunction::identity(), J.last_site() - 1, z), DomainError);

  // polynomial f: sampled coefficient form reproduces the pointwise values
  const auto grid = default_grid(J);
  const auto s = build_B(J, ScalarFunction::polynomial({0.1, -0.5, 0.3, 0.2}), n0, grid);
  REQUIRE(s.poly.has_value());
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(dist(s.eval_poly(grid[i]), s.values[i]) <= 1e-10 * (1 + s.values[i].norm()));

  // B for Taylor truncations of exp converges to B for exp
  const auto e = ScalarFunction::named(NamedKind::Exp);
  const Mat2 Be = build_B(J, e, n0, z);
  double prev = INFINITY;
  for (double eps : {1e-1, 1e-3, 1e-6}) {
    const double d = dist(build_B(J, taylor_truncate(e, 4.0, eps), n0, z), Be);
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev <= 1e-10);
}

TEST_CASE("zero curvature") {
  for (const auto& J : random_corpus(60, 5, {.size = 12}))
    for (const auto& f : standard_functions()) {
      const auto r = zero_curvature_residual(J, f, default_base(J), default_grid(J));
      CHECK(r.max_residual <= 1e-8 * r.scale);
    }
  const auto F = JacobiMatrix::free(12);
  CHECK(zero_curvature_residual(F, ScalarFunction::identity(), 6, default_grid(F)).max_residual <= 1e-12);
  const auto J = random_jacobi(61, {.size = 12});
  const auto bad = zero_curvature_residual(J, ScalarFunction::identity(), 6, default_grid(J), 1e-3);
  CHECK(bad.max_residual >= 5e-4);
}

TEST_CASE("rate pair from the entire parts") {
  const auto F = JacobiMatrix::free(10);
  const auto zf = appendix_grid(F);
  const auto of = appendix_oracle(F, ScalarFunction::identity(), 5, zf);
  CHECK(std::abs(of.adot_over_a) <= 1e-12);
  CHECK(std::abs(of.bdot) <= 1e-12);

  const auto J = random_jacobi(62, {.size = 10});
  const auto o = appendix_oracle(J, ScalarFunction::identity(), 5, appendix_grid(J));
  CHECK(std::abs(o.adot_over_a - (J.b(6) - J.b(5))) <= 1e-10);
  CHECK(std::abs(o.bdot - 2.0 * (J.a(5) * J.a(5) - J.a(4) * J.a(4))) <= 1e-10);
  CHECK(o.spread_a <= 1e-9);
  CHECK(o.imag_b <= 1e-9);
  CHECK_THROWS_AS(appendix_oracle(J, ScalarFunction::identity(), 1, appendix_grid(J)), DomainError);
  CHECK_THROWS_AS(appendix_oracle(J, ScalarFunction::identity(), 5, {}), DomainError);
}

TEST_CASE("integrated cocycle") {
  const auto J = random_jacobi(63, {.size = 14});
  const int n0 = default_base(J);
  const auto grid = cocycle_grid(J);
  const auto cfg = quiet_config();

  const auto c = integrate_cocycle(J, ScalarFunction::constant(2.0), 1.0, n0, grid, cfg);
  for (const auto& T : c.T.values) CHECK(dist(T, Mat2::Identity()) <= 1e-12);

  const auto f = ScalarFunction::identity();
  const auto r0 = integrate_cocycle(J, f, 1.0, n0, grid, cfg);
  const auto r1 = integrate_cocycle(J, f, 1.0, n0 + 1, grid, cfg);
  CHECK(r0.T.max_det_drift() <= 1e-10);
  CHECK(r0.T.max_real_residue() <= 1e-10);
  const JacobiMatrix& Jt = r0.trajectory.final();
  CHECK(sup_distance(Jt, r1.trajectory.final()) == 0.0);
  // T_{n0+1}(t) A(J) = A(J(t)) T_{n0}(t)
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Mat2 lhs = r1.T.values[i] * transfer_matrix(J, n0, grid[i]);
    const Mat2 rhs = transfer_matrix(Jt, n0, grid[i]) * r0.T.values[i];
    CHECK(dist(lhs, rhs) <= 1e-6 * (1 + lhs.norm()));
  }

  // truncations of exp converge
  const auto e = ScalarFunction::named(NamedKind::Exp, 1.0, 0.25);
  const auto re = integrate_cocycle(J, e, 1.0, n0, grid, cfg);
  double prev = INFINITY;
  for (double eps : {1e-2, 1e-4, 1e-8}) {
    const auto rt = integrate_cocycle(J, taylor_truncate(e, 4.0, eps), 1.0, n0, grid, cfg);
    double d = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) d = std::max(d, dist(rt.T.values[i], re.T.values[i]));
    CHECK(d <= prev);
    prev = d;
  }
  CHECK(prev <= 1e-6);
}

TEST_CASE("joint cocycle") {
  const auto X = random_compact_perturbation(64, 4);
  const std::vector<Complex> grid{{0.3, 0.5}, {-1.0, 1.0}, {0.0, 2.0}};
  auto cfg = quiet_config();
  cfg.flow.padding = 30;

  const auto s = joint_cocycle({ScalarFunction(), 3}, X, grid, cfg);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(dist(s.values[i], shift_cocycle(X, 3, grid[i])) == 0.0);

  const GroupElement g1{ScalarFunction::identity(), 1}, g2{ScalarFunction(), 2};
  const auto lhs = joint_cocycle(g1 * g2, X, grid, cfg);
  const auto a = joint_cocycle(g1, act(g2, X, cfg.flow), grid, cfg);
  const auto b = joint_cocycle(g2, X, grid, cfg);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Mat2 rhs = a.values[i] * b.values[i];
    CHECK(dist(lhs.values[i], rhs) <= 1e-6 * (1 + rhs.norm()));
  }
}

TEST_CASE("Mobius action") {
  const Complex w(0.3, 0.8);
  CHECK(mobius(Mat2::Identity(), w) == w);
  Mat2 S;
  S << 0.0, 1.0, 1.0, 0.0;
  CHECK(std::abs(mobius(S, w) - 1.0 / w) <= 1e-15);
  CHECK(mobius(S, Riemann{Complex(0.0, 0.0), false}).infinite);
  CHECK(mobius(Mat2::Identity(), Riemann::inf()).infinite);
  CHECK(mobius(S, Riemann::inf()).v == Complex(0.0, 0.0));
  CHECK_THROWS_AS(mobius(S, Complex(0.0, 0.0)), DomainError);
  CHECK_THROWS_AS(mobius(Mat2::Zero(), w), DomainError);
  const Mat2 A = transfer_matrix(0.9, 0.1, Complex(0.2, 0.4));
  const Mat2 B = transfer_matrix(1.1, -0.3, Complex(0.2, 0.4));
  CHECK(std::abs(mobius(A * B, w) - mobius(A, mobius(B, w))) <= 1e-14);
}
