#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "toda/error.hpp"
#include "toda/scalar_function.hpp"

using namespace toda;

namespace {

// sum_{m <= M} x^m / m!, accumulated independently of the library's series.
double exp_partial_sum(double x, int M) {
  double term = 1.0, sum = 1.0;
  for (int m = 1; m <= M; ++m) {
    term *= x / m;
    sum += term;
  }
  return sum;
}

C2Callable quadratic_c2() {
  C2Callable d;
  d.f = [](double x) { return x * x; };
  d.df = [](double x) { return 2.0 * x; };
  d.d2f = [](double) { return 2.0; };
  d.lo = -3.0;
  d.hi = 3.0;
  d.sup_abs = 9.0;
  d.l2_second = 2.0 * std::sqrt(6.0);
  return d;
}

}  // namespace

TEST_CASE("evaluate") {
  CHECK(ScalarFunction::identity()(3.0) == 3.0);
  const auto c = ScalarFunction::constant(-1.25);
  CHECK(c(0.0) == -1.25);
  CHECK(c(17.0) == -1.25);
  CHECK(c(Complex(2.0, 5.0)) == Complex(-1.25, 0.0));

  const auto e = ScalarFunction::named(NamedKind::Exp);
  CHECK(std::abs(e(1.0) - exp_partial_sum(1.0, 30)) <= 1e-12);
  CHECK(std::abs(e(1.0) - 2.718281828459045) <= 1e-12);
  const Complex ez = e(Complex(0.3, 1.1));
  CHECK(std::abs(ez - std::exp(Complex(0.3, 1.1))) <= 1e-14);

  const auto cs = ScalarFunction::named(NamedKind::Cos, 2.0, 0.5);  // 2 cos(x/2)
  CHECK(std::abs(cs(1.3) - 2.0 * std::cos(0.65)) <= 1e-14);
}

TEST_CASE("C2 generator: real evaluation only, inside its interval") {
  const auto f = ScalarFunction::c2(quadratic_c2());
  CHECK(f(1.5) == doctest::Approx(2.25));
  CHECK(f.derivative(1.5, 1) == doctest::Approx(3.0));
  CHECK_THROWS_AS(f(Complex(0.0, 1.0)), DomainError);
  CHECK_THROWS_AS(f(3.5), DomainError);
  CHECK_THROWS_AS(divided_difference(f, Complex(1.0, 1.0), 0.0), DomainError);
  CHECK_THROWS_AS(f.coefficients(3), DomainError);
  CHECK_THROWS_AS(taylor_truncate(f, 1.0, 1e-3), DomainError);

  const auto L = lipschitz_data(f, 2.0);
  CHECK(L.C == doctest::Approx(2.0 * (9.0 + 2.0 * std::sqrt(6.0))));

  C2Callable nobounds = quadratic_c2();
  nobounds.sup_abs.reset();
  CHECK_THROWS_AS(lipschitz_data(ScalarFunction::c2(nobounds), 1.0), DomainError);
  CHECK_THROWS_AS(lipschitz_data(f, 4.0), DomainError);  // [-4, 4] not covered
}

TEST_CASE("divided difference") {
  const auto id = ScalarFunction::identity();
  CHECK(std::abs(divided_difference(id, Complex(2.0, 7.0), -1.0) - 1.0) <= 1e-15);
  CHECK(std::abs(divided_difference(id, Complex(0.5, 0.0), 0.5) - 1.0) <= 1e-15);

  const auto sq = ScalarFunction::monomial(2);
  CHECK(std::abs(divided_difference(sq, Complex(2.0, 0.0), 1.0) - 3.0) <= 1e-14);

  // removable point: against a forward difference quotient
  const auto e = ScalarFunction::named(NamedKind::Exp);
  const Complex at0 = divided_difference(e, Complex(0.0, 0.0), 0.0);
  const double h = 1e-7;
  CHECK(std::abs(at0 - 1.0) <= 1e-14);
  CHECK(std::abs(at0.real() - (std::exp(h) - 1.0) / h) <= 1e-6);

  SUBCASE("random pairs") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.5, 2.5);
    const std::vector<ScalarFunction> fs = {ScalarFunction::polynomial({1.0, -0.5, 0.0, 2.0, 0.25}),
                                            ScalarFunction::named(NamedKind::Cos),
                                            ScalarFunction::named(NamedKind::Sinh, 1.0, 0.8) +
                                                ScalarFunction::polynomial({0.0, 1.0})};
    for (int k = 0; k < 1000; ++k) {
      const auto& f = fs[k % fs.size()];
      const Complex z(u(rng), u(rng));
      const double lam = u(rng);
      if (std::abs(z - lam) < 1e-3) continue;
      const Complex dd = divided_difference(f, z, lam);
      const Complex q = (f(z) - f(Complex(lam, 0.0))) / (z - lam);
      REQUIRE(std::abs(dd - q) <= 1e-12 * (1.0 + std::abs(dd)));
    }
  }

  SUBCASE("close to the removable point") {
    for (double d : {1e-3, 1e-6, 1e-9}) {
      const Complex dd = divided_difference(e, Complex(0.4 + d, 0.0), 0.4);
      // (e^{0.4+d} - e^{0.4}) / d = e^{0.4} expm1(d) / d
      CHECK(std::abs(dd.real() - std::exp(0.4) * std::expm1(d) / d) <= 1e-14);
    }
  }
}

TEST_CASE("Lipschitz data") {
  const auto x = lipschitz_data(ScalarFunction::identity(), 2.0);
  CHECK(x.C == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(x.L == doctest::Approx(12.0 * (4.0 * 2.0 + 2.0)).epsilon(1e-12));

  const auto zero = lipschitz_data(ScalarFunction(), 3.0);
  CHECK(zero.C == 0.0);
  CHECK(zero.L == 0.0);

  const auto sq = lipschitz_data(ScalarFunction::monomial(2), 1.0);
  CHECK(sq.sup_abs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sq.l2_second == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));
  CHECK(sq.C == doctest::Approx(2.0 * (1.0 + 2.0 * std::sqrt(2.0))).epsilon(1e-9));

  CHECK_THROWS(lipschitz_data(ScalarFunction::identity(), 0.0));

  SUBCASE("monotone in the radius") {
    for (const auto& f : {ScalarFunction::named(NamedKind::Exp, 1.0, 0.25), ScalarFunction::named(NamedKind::Cos),
                          ScalarFunction::polynomial({0.3, -1.0, 0.0, 0.2})}) {
      LipschitzData prev = lipschitz_data(f, 0.1);
      for (double R = 0.2; R < 6.0; R += 0.3) {
        const LipschitzData cur = lipschitz_data(f, R);
        CHECK(cur.C >= prev.C);
        CHECK(cur.L >= prev.L);
        prev = cur;
      }
    }
  }
}

TEST_CASE("Taylor truncation") {
  const auto e = ScalarFunction::named(NamedKind::Exp);
  const auto p = taylor_truncate(e, 1.0, 1e-3);
  CHECK(p.kind() == ScalarFunction::Kind::Polynomial);
  CHECK(p.polynomial_degree() == 6);

  const auto poly = ScalarFunction::polynomial({1.0, 2.0, 3.0});
  const auto same = taylor_truncate(poly, 5.0, 1e-300);
  CHECK(same.polynomial_part() == poly.polynomial_part());

  const auto c = ScalarFunction::named(NamedKind::Cos);
  const auto pc = taylor_truncate(c, 2.0, 1e-10);
  // 2^{21}/21! < 1e-10, so degree 20 always suffices
  CHECK(pc.polynomial_degree() <= 20);

  for (const auto& [f, R, eps] : {std::tuple{e, 1.0, 1e-3}, std::tuple{c, 2.0, 1e-10},
                                  std::tuple{ScalarFunction::named(NamedKind::Sinh, 0.5, 1.5), 3.0, 1e-8}}) {
    const auto q = taylor_truncate(f, R, eps);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double x = -R + 2.0 * R * i / 999.0;
      worst = std::max(worst, std::abs(f(x) - q(x)));
    }
    CHECK(worst <= eps);
  }
}

TEST_CASE("tail bounds are rigorous for the named functions") {
  for (const auto& f : {ScalarFunction::named(NamedKind::Exp), ScalarFunction::named(NamedKind::Sin, 2.0, 0.7),
                        ScalarFunction::named(NamedKind::Cosh, 1.0, 1.3)}) {
    for (double R : {0.5, 2.0, 6.0})
      for (std::size_t D : {3u, 10u, 25u}) {
        double tail = 0.0;
        for (std::size_t m = D + 1; m < D + 200; ++m) tail += std::abs(f.coefficient(m)) * std::pow(R, m);
        CHECK(f.tail_bound(R, D) >= tail * (1.0 - 1e-12));
      }
  }
}

TEST_CASE("series coefficients") {
  const auto poly = ScalarFunction::polynomial({0.0, 0.0, 1.0});
  CHECK(series_coefficients(poly, 10.0) == poly.polynomial_part());
  const auto e = ScalarFunction::named(NamedKind::Exp, 1.0, 0.25);
  const auto c = series_coefficients(e, 3.0);
  CHECK(c.size() > 10);
  CHECK(c[2] == doctest::Approx(0.25 * 0.25 / 2.0));
  CHECK_THROWS_AS(series_coefficients(ScalarFunction::c2(quadratic_c2()), 1.0), DomainError);
}

TEST_CASE("arithmetic and derivatives") {
  const auto f = ScalarFunction::named(NamedKind::Sin) + ScalarFunction::monomial(3, 0.5);
  const auto df = f.derivative_function();
  for (double x : {-1.0, 0.2, 1.7}) {
    CHECK(df(x) == doctest::Approx(std::cos(x) + 1.5 * x * x).epsilon(1e-13));
    CHECK(f.derivative(x, 2) == doctest::Approx(-std::sin(x) + 3.0 * x).epsilon(1e-12));
  }
  const auto g = f.scaled(-2.0) - f;
  CHECK(g(0.9) == doctest::Approx(-3.0 * f(0.9)));
}

TEST_CASE("function spec parsing") {
  CHECK(parse_function("poly:0,1")(2.5) == 2.5);
  CHECK(parse_function("poly:1,0,2")(2.0) == 9.0);
  CHECK(parse_function("taylor:exp")(1.0) == doctest::Approx(std::exp(1.0)));
  CHECK(parse_function("taylor:cos:2")(0.3) == doctest::Approx(std::cos(0.6)));
  CHECK(parse_function("taylor:sinh:0.5:3")(1.0) == doctest::Approx(3.0 * std::sinh(0.5)));
  CHECK_THROWS_AS(parse_function("poly:"), std::invalid_argument);
  CHECK_THROWS_AS(parse_function("poly:1,x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_function("taylor:tan"), std::invalid_argument);
  CHECK_THROWS_AS(parse_function("x^2"), std::invalid_argument);

  SUBCASE("tabulated C2 data") {
    const std::string path = "test_c2_table.txt";
    {
      std::ofstream out(path);
      out << "# x f(x)\ninterval -2 2\nsup_abs 4.5\nl2_second 6\n";
      for (int i = 0; i <= 80; ++i) {
        const double x = -2.0 + 4.0 * i / 80.0;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", x, std::cos(x));
        out << buf;
      }
    }
    const auto f = parse_function("c2:file=" + path);
    CHECK(f.kind() == ScalarFunction::Kind::C2Callable);
    CHECK(f(0.37) == doctest::Approx(std::cos(0.37)).epsilon(1e-5));
    CHECK(f.derivative(0.37, 1) == doctest::Approx(-std::sin(0.37)).epsilon(1e-3));
    CHECK(lipschitz_data(f, 1.5).sup_abs == 4.5);
    CHECK_THROWS_AS(parse_function("c2:file=does_not_exist.txt"), IoError);
    std::remove(path.c_str());
  }
}
