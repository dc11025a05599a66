#include <doctest.h>

#include <cmath>
#include <sstream>

#include "toda/corpus.hpp"
#include "toda/error.hpp"
#include "toda/lax_flow.hpp"

using namespace toda;

namespace {

// [f(J)_a, J] from dense matrices.
Eigen::MatrixXd dense_commutator(const JacobiMatrix& J, const ScalarFunction& f) {
  const Eigen::MatrixXd F = apply_function(J, f);
  const Eigen::MatrixXd Fa = parts(F).antisymmetric;
  return Fa * J.dense() - J.dense() * Fa;
}

FlowConfig rk4(double t, double dt) {
  FlowConfig c;
  c.t = t;
  c.dt = dt;
  c.diagnostics = false;
  return c;
}

}  // namespace

TEST_CASE("field of the identity generator") {
  const auto J = random_jacobi(5, {.size = 7, .index_base = 0});
  const auto X = lax_vector(J, ScalarFunction::identity());
  REQUIRE(X.size() == 7);
  for (int n = 0; n < 6; ++n)
    CHECK(X.off[n] == doctest::Approx(J.a(n) * (J.b(n + 1) - J.b(n))).epsilon(1e-12));
  for (int n = 0; n <= 6; ++n) {
    const double right = n < 6 ? J.a(n) : 0.0;
    const double left = n > 0 ? J.a(n - 1) : 0.0;
    CHECK(X.diag[n] == doctest::Approx(2.0 * (right * right - left * left)).epsilon(1e-12));
  }

  const JacobiMatrix J2({1.0}, {0.0, 0.0});
  const auto X2 = lax_vector(J2, ScalarFunction::identity());
  CHECK(X2.diag[0] == doctest::Approx(2.0));
  CHECK(X2.diag[1] == doctest::Approx(-2.0));
  CHECK(std::abs(X2.off[0]) <= 1e-15);

  const auto Xc = lax_vector(J, ScalarFunction::constant(3.0));
  CHECK(Xc.sup_norm() <= 1e-13);
}

TEST_CASE("field against the dense commutator") {
  for (const auto& J : random_corpus(30, 10, {.size = 12}))
    for (const auto& f : standard_functions()) {
      const auto L = lax_field(J, f, true);
      const Eigen::MatrixXd C = dense_commutator(J, f);
      double err = 0.0;
      for (int i = 0; i < J.size(); ++i) {
        err = std::max(err, std::abs(L.X.diag[i] - C(i, i)));
        if (i + 1 < J.size()) err = std::max(err, std::abs(L.X.off[i] - C(i, i + 1)));
      }
      CHECK(err <= 1e-10 * (1.0 + C.cwiseAbs().maxCoeff()));
      CHECK(L.offband <= 1e-10 * (1.0 + L.fJ_sup));
      const auto S = lax_field(J, f, false, FieldMethod::Spectral);
      double d = 0.0;
      for (int i = 0; i < J.size(); ++i) d = std::max(d, std::abs(S.X.diag[i] - L.X.diag[i]));
      CHECK(d <= 1e-10 * (1.0 + L.fJ_sup));
    }
}

TEST_CASE("polynomial method needs coefficients") {
  const auto J = random_jacobi(1, {.size = 5});
  C2Callable d;
  d.f = [](double x) { return x * x; };
  d.df = [](double x) { return 2 * x; };
  d.d2f = [](double) { return 2.0; };
  d.lo = -4;
  d.hi = 4;
  d.sup_abs = 16;
  d.l2_second = 2 * std::sqrt(8.0);
  const auto f = ScalarFunction::c2(d);
  CHECK_THROWS_AS(lax_field(J, f, false, FieldMethod::Polynomial), DomainError);
  const auto X = lax_vector(J, f);
  const auto Y = lax_vector(J, ScalarFunction::monomial(2));
  for (int i = 0; i < 5; ++i) CHECK(std::abs(X.diag[i] - Y.diag[i]) <= 1e-12);
}

TEST_CASE("isospectral flow") {
  const auto J = random_jacobi(8, {.size = 10});
  FlowConfig c;
  c.t = 1.0;
  c.record_every = 100;
  const auto tr = flow(J, ScalarFunction::identity(), c);
  CHECK(tr.times.back() == doctest::Approx(1.0));
  CHECK(tr.max_eig_drift() <= 1e-10);
  CHECK(tr.max_norm_drift() <= 1e-10);
  CHECK(tr.max_offband() <= 1e-10);
  const auto s0 = eig(J).values, s1 = eig(tr.final()).values;
  for (int k = 0; k < 10; ++k) CHECK(std::abs(s0[k] - s1[k]) <= 1e-10);

  // sum b_n is conserved (trace)
  double tr0 = 0, tr1 = 0;
  for (double v : J.diagonal()) tr0 += v;
  for (double v : tr.final().diagonal()) tr1 += v;
  CHECK(std::abs(tr0 - tr1) <= 1e-12);
}

TEST_CASE("trajectory bookkeeping") {
  const auto J = random_jacobi(2, {.size = 4});
  auto c = rk4(0.1, 0.01);
  c.record_every = 3;
  const auto tr = flow(J, ScalarFunction::identity(), c);
  // steps 0, 3, 6, 9 and the last step 10
  REQUIRE(tr.times.size() == 5);
  CHECK(tr.times[0] == 0.0);
  CHECK(tr.times[4] == doctest::Approx(0.1));

  const auto t0 = flow(J, ScalarFunction::identity(), rk4(0.0, 0.01));
  CHECK(t0.snapshots.size() == 1);

  std::ostringstream out;
  write_trajectory_csv(out, tr);
  const std::string text = out.str();
  CHECK(text.rfind("t,a_1,a_2,a_3,b_1,b_2,b_3,b_4,eig_drift,norm_drift,offband_residual\n", 0) == 0);
  int lines = 0;
  for (char ch : text) lines += ch == '\n';
  CHECK(lines == 6);
  CHECK(text.find(",nan,nan,nan") != std::string::npos);

  const double dt = default_dt(J, ScalarFunction::identity());
  CHECK(dt == doctest::Approx(1e-3 * std::min(1.0, 8.0 / (1.0 + J.operator_norm()))));
  CHECK_THROWS_AS(flow(J, ScalarFunction::identity(), rk4(-1.0, 0.01)), DomainError);
}

TEST_CASE("positivity is monitored") {
  const JacobiMatrix J({1.0}, {0.0, -5.0});
  auto c = rk4(2.0, 0.01);
  c.positivity_floor = 0.5;
  CHECK_THROWS_AS(flow(J, ScalarFunction::identity(), c), FlowError);
  try {
    flow(J, ScalarFunction::identity(), c);
  } catch (const FlowError& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.time() < 2.0);
  }
  const JacobiMatrix small({1e-13}, {0.0, 0.0});
  try {
    flow(small, ScalarFunction::identity(), rk4(1.0, 0.01));
    FAIL("expected FlowError");
  } catch (const FlowError& e) {
    CHECK(e.time() == 0.0);
  }
}

TEST_CASE("Picard iteration") {
  const auto J = random_jacobi(13, {.size = 8});
  const auto zero = picard_segment(J, ScalarFunction(), 0.05, 5);
  for (double g : zero.gaps) CHECK(g == 0.0);
  CHECK(sup_distance(zero.J_T, J) == 0.0);

  const auto f = ScalarFunction::identity();
  const double Tmax = picard_segment_length(J, f);
  CHECK(Tmax > 0.0);
  CHECK_THROWS_AS(picard_segment(J, f, 1.5 * Tmax, 10), DomainError);
  CHECK_THROWS_AS(picard_segment(J, f, 0.5 * Tmax, 0), DomainError);
  CHECK_THROWS_AS(picard_segment(J, f, 0.5 * Tmax, 10, 7), DomainError);

  const auto p = picard_segment(J, f, Tmax, 30);
  // contraction with rate at most 1/2 until the roundoff floor
  for (std::size_t k = 1; k < p.gaps.size(); ++k)
    if (p.gaps[k - 1] > p.floor) CHECK(p.gaps[k] <= 0.5 * p.gaps[k - 1] + p.floor);

  FlowConfig c = rk4(Tmax, Tmax / 200);
  const auto ref = flow_to_one(J, f.scaled(Tmax), rk4(1.0, 1.0 / 200));
  CHECK(sup_distance(p.J_T, ref) <= 1e-8);
  CHECK(sup_distance(flow(J, f, c).final(), ref) <= 1e-12);

  // far from the edges a free matrix does not move on a short segment
  const auto F = JacobiMatrix::free(40);
  const double T = 0.5 * picard_segment_length(F, f);
  const auto q = picard_segment(F, f, T, 30);
  for (int n = 15; n <= 25; ++n) {
    CHECK(std::abs(q.J_T.b(n)) <= 1e-12);
    CHECK(std::abs(q.J_T.a(n) - 1.0) <= 1e-12);
  }
}

TEST_CASE("two-sided free data is a fixed point") {
  // the truncation edges move; their influence on the kept window decays with the padding
  FlowConfig c;
  c.diagnostics = false;
  for (const auto& f : {ScalarFunction::identity(), ScalarFunction::monomial(2)}) {
    const auto X = ExtendedJacobi::free(3);
    double prev = INFINITY;
    for (int P : {10, 20, 30, 40}) {
      c.padding = P;
      const double d = metric(X, group_action(f, 0, X, c));
      CHECK(d <= prev);
      prev = d;
    }
    CHECK(prev <= 1e-12);
  }
  c.padding = 20;
  // pure shift
  const auto X = random_compact_perturbation(3, 4);
  const auto Y = group_action(ScalarFunction(), 2, X, c);
  for (int n = -8; n <= 8; ++n) {
    CHECK(Y.a(n) == X.a(n + 2));
    CHECK(Y.b(n) == X.b(n + 2));
  }
}

TEST_CASE("group action laws") {
  const auto J = random_jacobi(44, {.size = 10});
  const auto f = ScalarFunction::identity();
  const auto g = ScalarFunction::monomial(2, 0.5);
  const auto c = rk4(1.0, 1e-3);
  // flows of different generators commute
  const auto fg = flow_to_one(flow_to_one(J, g, c), f, c);
  const auto gf = flow_to_one(flow_to_one(J, f, c), g, c);
  CHECK(sup_distance(fg, gf) <= 1e-6);
  // f.(f.J) = (2f).J
  const auto ff = flow_to_one(flow_to_one(J, f, c), f, c);
  const auto f2 = flow_to_one(J, f.scaled(2.0), rk4(1.0, 5e-4));
  CHECK(sup_distance(ff, f2) <= 1e-8);
  // finite matrices: shift relabels
  const auto s = group_action(ScalarFunction(), 3, J, c);
  CHECK(s.index_base() == J.index_base() - 3);
  CHECK(s.diagonal() == J.diagonal());
}

TEST_CASE("comparison and continuity bounds") {
  const auto J = random_jacobi(19, {.size = 8});
  const auto g = ScalarFunction::identity();
  const auto c = rk4(1.0, 1e-3);
  const auto same = comparison_bound_check(J, g, g, 0.5, c);
  CHECK(same.lhs == 0.0);
  CHECK(same.rhs == 0.0);
  const auto shifted = comparison_bound_check(J, g, g + ScalarFunction::constant(0.75), 0.5, c);
  CHECK(shifted.lhs <= 1e-12);
  CHECK(shifted.rhs > 0.0);
  CHECK(shifted.holds());
  const auto h = comparison_bound_check(J, g, g + ScalarFunction::monomial(2, 0.25), 0.5, c);
  CHECK(h.lhs > 0.0);
  CHECK(h.holds());

  const auto Jp = random_jacobi(20, {.size = 8});
  const auto k = continuity_bound_check(J, Jp, g, c);
  CHECK(k.lhs > 0.0);
  CHECK(k.holds());
  const auto k0 = continuity_bound_check(J, J, g, c);
  CHECK(k0.lhs == 0.0);
}
