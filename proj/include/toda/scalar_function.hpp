#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace toda {

using Complex = std::complex<double>;

enum class NamedKind { Exp, Cos, Sin, Cosh, Sinh };

// amplitude * phi(scale * x) for one of the named entire functions phi.
struct NamedTerm {
  NamedKind kind = NamedKind::Exp;
  double amplitude = 1.0;
  double scale = 1.0;
};

// Black-box C^2 generator, known only on [lo, hi] together with the two bounds
// that the Lipschitz constants need.
struct C2Callable {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;
  double lo = -1.0;
  double hi = 1.0;
  std::optional<double> sup_abs;    // >= sup |f| on [lo, hi]
  std::optional<double> l2_second;  // >= ||f''||_{L^2(lo, hi)}
};

/// Generator f of a Toda flow.
///
/// Three representations share one value type:
///   - Polynomial: real coefficients f_0..f_D.
///   - Taylor: a polynomial part plus finitely many NamedTerm's.  Every
///     coefficient is available, and tail_bound() gives a rigorous upper
///     bound for sum_{m>D} |f_m| R^m.
///   - C2Callable: real-line evaluation only (no coefficients, no complex z).
///
/// Immutable; copies share the C2 payload.
class ScalarFunction {
 public:
  enum class Kind { Polynomial, Taylor, C2Callable };

  ScalarFunction();  // the zero polynomial

  static ScalarFunction polynomial(std::vector<double> coeffs);
  static ScalarFunction constant(double c);
  static ScalarFunction identity();
  static ScalarFunction monomial(int degree, double coeff = 1.0);
  static ScalarFunction named(NamedKind kind, double amplitude = 1.0, double scale = 1.0);
  static ScalarFunction c2(C2Callable data);

  Kind kind() const { return kind_; }
  bool has_coefficients() const { return kind_ != Kind::C2Callable; }

  double operator()(double x) const;
  Complex operator()(Complex z) const;

  /// f, f' or f'' at a real point.
  double derivative(double x, int order) const;

  double coefficient(std::size_t m) const;
  std::vector<double> coefficients(std::size_t degree) const;

  /// Degree of the polynomial part (0 for the zero polynomial).
  std::size_t polynomial_degree() const;

  /// Upper bound for sum_{m>degree} |f_m| radius^m.
  double tail_bound(double radius, std::size_t degree) const;

  /// Smallest D with tail_bound(radius, D) <= eps.
  std::size_t truncation_degree(double radius, double eps) const;

  /// Upper bound for sum_m |f_m| r^m; sets the scale for relative truncation.
  double majorant(double r) const;

  ScalarFunction scaled(double c) const;
  ScalarFunction operator+(const ScalarFunction& other) const;
  ScalarFunction operator-(const ScalarFunction& other) const;

  /// Exact derivative as a function of the same family (Polynomial/Taylor only).
  ScalarFunction derivative_function() const;

  std::string describe() const;

  const std::vector<double>& polynomial_part() const { return poly_; }
  const std::vector<NamedTerm>& named_terms() const { return terms_; }
  const C2Callable* c2_data() const { return c2_.get(); }
  double c2_factor() const { return c2_factor_; }

 private:
  Kind kind_ = Kind::Polynomial;
  std::vector<double> poly_;
  std::vector<NamedTerm> terms_;
  std::shared_ptr<const C2Callable> c2_;
  double c2_factor_ = 1.0;

  void require_coefficients(const char* op) const;
};

struct LipschitzData {
  double radius = 0.0;
  double C = 0.0;  // operator-Lipschitz constant of J -> f(J) on ||J|| <= R
  double L = 0.0;  // Lipschitz constant of the Lax field on ||J|| <= R
  double sup_abs = 0.0;
  double l2_second = 0.0;
};

inline constexpr int kLipschitzSamples = 4096;

/// (f(z) - f(lambda)) / (z - lambda), with f'(lambda) at z == lambda.
Complex divided_difference(const ScalarFunction& f, Complex z, double lambda);

/// sup |f| over [-R, R], by dense sampling (or the declared bound for C2 data).
double sup_abs(const ScalarFunction& f, double R);

/// ||f''||_{L^2(-R, R)}, by dense sampling (or the declared bound for C2 data).
double l2_second_derivative(const ScalarFunction& f, double R);

/// sup over [-R, R] of |f - g|, sampled.
double sup_distance(const ScalarFunction& f, const ScalarFunction& g, double R);

LipschitzData lipschitz_data(const ScalarFunction& f, double R);

/// Polynomial p with ||f - p||_{C[-R,R]} <= eps.
ScalarFunction taylor_truncate(const ScalarFunction& f, double R, double eps);

/// Coefficients f_0..f_D with sum_{m>D} |f_m| radius^m <= rel_eps * max(1, majorant(radius)).
/// Polynomials are returned exactly.
std::vector<double> series_coefficients(const ScalarFunction& f, double radius, double rel_eps = 1e-17);

/// Parses `poly:c0,c1,...`, `taylor:<name>[:scale[:amplitude]]`, `c2:file=<path>`.
ScalarFunction parse_function(std::string_view spec);

/// Loads tabulated C^2 data; see README for the file layout.
C2Callable load_c2_table(const std::string& path);

}  // namespace toda
