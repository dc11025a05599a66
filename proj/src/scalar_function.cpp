#include "toda/scalar_function.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "toda/error.hpp"

namespace toda {

namespace {

using LComplex = std::complex<long double>;

constexpr std::size_t kMaxTruncationDegree = 4000;

bool named_nonzero(NamedKind kind, std::size_t m) {
  switch (kind) {
    case NamedKind::Exp:
      return true;
    case NamedKind::Cos:
    case NamedKind::Cosh:
      return m % 2 == 0;
    case NamedKind::Sin:
    case NamedKind::Sinh:
      return m % 2 == 1;
  }
  return false;
}

int named_sign(NamedKind kind, std::size_t m) {
  switch (kind) {
    case NamedKind::Cos:
      return (m / 2) % 2 == 0 ? 1 : -1;
    case NamedKind::Sin:
      return ((m - 1) / 2) % 2 == 0 ? 1 : -1;
    default:
      return 1;
  }
}

// Taylor coefficients of a single named term up to `degree`.
void add_named_coefficients(const NamedTerm& t, std::vector<double>& out) {
  long double mag = t.amplitude;  // amplitude * scale^m / m!
  for (std::size_t m = 0; m < out.size(); ++m) {
    if (named_nonzero(t.kind, m)) out[m] += static_cast<double>(named_sign(t.kind, m) * mag);
    mag *= static_cast<long double>(t.scale) / static_cast<long double>(m + 1);
  }
}

// sum_m phi_m w^m, truncated once the geometric remainder is negligible
// against the running sum of |terms|.
LComplex named_series(NamedKind kind, LComplex w) {
  const long double aw = std::abs(w);
  LComplex sum = 0;
  LComplex term = 1;  // w^m / m!
  long double abs_sum = 0;
  for (std::size_t m = 0; m < 100000; ++m) {
    if (named_nonzero(kind, m)) {
      sum += static_cast<long double>(named_sign(kind, m)) * term;
      abs_sum += std::abs(term);
    }
    term *= w / static_cast<long double>(m + 1);
    const long double next = std::abs(term);
    if (m + 1 > 2 * aw && (next == 0 || 2 * next <= 1e-22L * abs_sum)) break;
  }
  return sum;
}

// sum_{m>degree, phi_m != 0} x^m / m!  (upper bound, x >= 0)
double named_tail(NamedKind kind, double x, std::size_t degree) {
  if (x == 0.0) return 0.0;
  std::size_t m = degree + 1;
  long double term = std::exp(static_cast<long double>(m) * std::log(static_cast<long double>(x)) -
                              std::lgamma(static_cast<long double>(m) + 1.0L));
  long double sum = 0;
  for (std::size_t it = 0; it < 200000; ++it, ++m) {
    if (named_nonzero(kind, m)) sum += term;
    const long double next = term * x / static_cast<long double>(m + 1);
    if (m + 1 > 2 * x && (next == 0 || next <= 1e-30L * sum)) {
      sum += 2 * next;
      break;
    }
    term = next;
  }
  return static_cast<double>(sum);
}

NamedKind derivative_kind(NamedKind kind, int& sign) {
  sign = 1;
  switch (kind) {
    case NamedKind::Exp:
      return NamedKind::Exp;
    case NamedKind::Cos:
      sign = -1;
      return NamedKind::Sin;
    case NamedKind::Sin:
      return NamedKind::Cos;
    case NamedKind::Cosh:
      return NamedKind::Sinh;
    case NamedKind::Sinh:
      return NamedKind::Cosh;
  }
  return kind;
}

const char* kind_name(NamedKind kind) {
  switch (kind) {
    case NamedKind::Exp:
      return "exp";
    case NamedKind::Cos:
      return "cos";
    case NamedKind::Sin:
      return "sin";
    case NamedKind::Cosh:
      return "cosh";
    case NamedKind::Sinh:
      return "sinh";
  }
  return "?";
}

template <class T>
T horner(const std::vector<double>& c, T x) {
  T acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + static_cast<T>(*it);
  return acc;
}

void trim(std::vector<double>& c) {
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  if (c.empty()) c.push_back(0.0);
}

std::vector<double> sample_grid(double R) {
  std::vector<double> xs(kLipschitzSamples);
  for (int i = 0; i < kLipschitzSamples; ++i)
    xs[i] = -R + 2.0 * R * static_cast<double>(i) / (kLipschitzSamples - 1);
  return xs;
}

}  // namespace

ScalarFunction::ScalarFunction() : poly_{0.0} {}

ScalarFunction ScalarFunction::polynomial(std::vector<double> coeffs) {
  ScalarFunction f;
  f.poly_ = std::move(coeffs);
  trim(f.poly_);
  return f;
}

ScalarFunction ScalarFunction::constant(double c) { return polynomial({c}); }

ScalarFunction ScalarFunction::identity() { return polynomial({0.0, 1.0}); }

ScalarFunction ScalarFunction::monomial(int degree, double coeff) {
  std::vector<double> c(static_cast<std::size_t>(degree) + 1, 0.0);
  c.back() = coeff;
  return polynomial(std::move(c));
}

ScalarFunction ScalarFunction::named(NamedKind kind, double amplitude, double scale) {
  ScalarFunction f;
  f.kind_ = Kind::Taylor;
  f.terms_.push_back({kind, amplitude, scale});
  return f;
}

ScalarFunction ScalarFunction::c2(C2Callable data) {
  if (!data.f || !data.df || !data.d2f) throw std::invalid_argument("C2Callable needs f, f', f''");
  if (!(data.lo < data.hi)) throw std::invalid_argument("C2Callable interval is empty");
  ScalarFunction f;
  f.kind_ = Kind::C2Callable;
  f.c2_ = std::make_shared<const C2Callable>(std::move(data));
  return f;
}

void ScalarFunction::require_coefficients(const char* op) const {
  if (kind_ == Kind::C2Callable)
    throw DomainError(std::string(op) + ": not available for a C2Callable generator");
}

double ScalarFunction::operator()(double x) const {
  if (kind_ == Kind::C2Callable) {
    const double slack = 1e-12 * (1.0 + std::abs(x));
    if (x < c2_->lo - slack || x > c2_->hi + slack)
      throw DomainError("C2Callable evaluated outside its interval");
    return c2_factor_ * c2_->f(std::clamp(x, c2_->lo, c2_->hi));
  }
  return (*this)(Complex(x, 0.0)).real();
}

Complex ScalarFunction::operator()(Complex z) const {
  if (kind_ == Kind::C2Callable) {
    if (z.imag() != 0.0) throw DomainError("complex argument to a C2Callable generator");
    return (*this)(z.real());
  }
  const LComplex w(z.real(), z.imag());
  LComplex acc = horner<LComplex>(poly_, w);
  for (const auto& t : terms_)
    acc += static_cast<long double>(t.amplitude) *
           named_series(t.kind, static_cast<long double>(t.scale) * w);
  return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

double ScalarFunction::derivative(double x, int order) const {
  if (order < 0 || order > 2) throw std::invalid_argument("derivative order must be 0, 1 or 2");
  if (kind_ == Kind::C2Callable) {
    (void)(*this)(x);  // domain check
    const double xc = std::clamp(x, c2_->lo, c2_->hi);
    if (order == 0) return c2_factor_ * c2_->f(xc);
    if (order == 1) return c2_factor_ * c2_->df(xc);
    return c2_factor_ * c2_->d2f(xc);
  }
  ScalarFunction g = *this;
  for (int k = 0; k < order; ++k) g = g.derivative_function();
  return g(x);
}

double ScalarFunction::coefficient(std::size_t m) const {
  require_coefficients("coefficient");
  return coefficients(m)[m];
}

std::vector<double> ScalarFunction::coefficients(std::size_t degree) const {
  require_coefficients("coefficients");
  std::vector<double> c(degree + 1, 0.0);
  for (std::size_t m = 0; m < poly_.size() && m <= degree; ++m) c[m] = poly_[m];
  for (const auto& t : terms_) add_named_coefficients(t, c);
  return c;
}

std::size_t ScalarFunction::polynomial_degree() const { return poly_.size() - 1; }

double ScalarFunction::tail_bound(double radius, std::size_t degree) const {
  require_coefficients("tail_bound");
  const double r = std::abs(radius);
  double tail = 0.0;
  for (std::size_t m = degree + 1; m < poly_.size(); ++m) tail += std::abs(poly_[m]) * std::pow(r, m);
  for (const auto& t : terms_) tail += std::abs(t.amplitude) * named_tail(t.kind, std::abs(t.scale) * r, degree);
  return tail;
}

std::size_t ScalarFunction::truncation_degree(double radius, double eps) const {
  require_coefficients("truncation_degree");
  if (!(eps > 0.0)) throw std::invalid_argument("truncation accuracy must be positive");
  std::size_t lo = polynomial_degree();
  if (terms_.empty() || tail_bound(radius, lo) <= eps) return lo;
  std::size_t hi = std::max<std::size_t>(lo + 1, 8);
  while (tail_bound(radius, hi) > eps) {
    if (hi >= kMaxTruncationDegree)
      throw DomainError("tail-bound rule does not reach the requested accuracy at this radius");
    hi = std::min(2 * hi, kMaxTruncationDegree);
  }
  while (hi - lo > 1) {  // invariant: tail(lo) > eps >= tail(hi)
    const std::size_t mid = lo + (hi - lo) / 2;
    if (tail_bound(radius, mid) <= eps)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

double ScalarFunction::majorant(double r) const {
  require_coefficients("majorant");
  double m = 0.0;
  for (std::size_t k = 0; k < poly_.size(); ++k) m += std::abs(poly_[k]) * std::pow(r, k);
  for (const auto& t : terms_) m += std::abs(t.amplitude) * std::exp(std::abs(t.scale) * r);
  return m;
}

ScalarFunction ScalarFunction::scaled(double c) const {
  ScalarFunction g = *this;
  if (kind_ == Kind::C2Callable) {
    g.c2_factor_ *= c;
    return g;
  }
  for (auto& p : g.poly_) p *= c;
  for (auto& t : g.terms_) t.amplitude *= c;
  trim(g.poly_);
  return g;
}

ScalarFunction ScalarFunction::operator+(const ScalarFunction& other) const {
  if (kind_ == Kind::C2Callable || other.kind_ == Kind::C2Callable)
    throw DomainError("sums are only supported for Polynomial/Taylor generators");
  ScalarFunction g;
  g.poly_.assign(std::max(poly_.size(), other.poly_.size()), 0.0);
  for (std::size_t m = 0; m < poly_.size(); ++m) g.poly_[m] += poly_[m];
  for (std::size_t m = 0; m < other.poly_.size(); ++m) g.poly_[m] += other.poly_[m];
  trim(g.poly_);
  g.terms_ = terms_;
  g.terms_.insert(g.terms_.end(), other.terms_.begin(), other.terms_.end());
  g.kind_ = g.terms_.empty() ? Kind::Polynomial : Kind::Taylor;
  return g;
}

ScalarFunction ScalarFunction::operator-(const ScalarFunction& other) const {
  return *this + other.scaled(-1.0);
}

ScalarFunction ScalarFunction::derivative_function() const {
  require_coefficients("derivative_function");
  ScalarFunction g;
  g.poly_.assign(std::max<std::size_t>(poly_.size(), 2) - 1, 0.0);
  for (std::size_t m = 1; m < poly_.size(); ++m) g.poly_[m - 1] = static_cast<double>(m) * poly_[m];
  trim(g.poly_);
  for (const auto& t : terms_) {
    int sign = 1;
    const NamedKind k = derivative_kind(t.kind, sign);
    g.terms_.push_back({k, sign * t.amplitude * t.scale, t.scale});
  }
  g.kind_ = g.terms_.empty() ? Kind::Polynomial : Kind::Taylor;
  return g;
}

std::string ScalarFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind_ == Kind::C2Callable) {
    os << "c2[" << c2_->lo << "," << c2_->hi << "]*" << c2_factor_;
    return os.str();
  }
  os << "poly:";
  for (std::size_t m = 0; m < poly_.size(); ++m) os << (m ? "," : "") << poly_[m];
  for (const auto& t : terms_) os << " + " << t.amplitude << "*" << kind_name(t.kind) << "(" << t.scale << "x)";
  return os.str();
}

Complex divided_difference(const ScalarFunction& f, Complex z, double lambda) {
  if (!f.has_coefficients()) throw DomainError("divided_difference: C2Callable generator has no complex extension");
  const Complex dz = z - lambda;
  if (std::abs(dz) >= 0.5) return (f(z) - Complex(f(lambda))) / dz;

  // Synthetic division of the truncated series by (x - lambda).
  const double r = std::max(std::abs(z), std::abs(lambda)) + 1.0;
  const double eps = 1e-19 * std::max(1.0, f.majorant(r));
  const std::size_t D = f.truncation_degree(r, eps);
  if (D == 0) return 0.0;
  const std::vector<double> c = f.coefficients(D);
  std::vector<long double> q(D);
  q[D - 1] = c[D];
  for (std::size_t k = D - 1; k >= 1; --k) q[k - 1] = c[k] + static_cast<long double>(lambda) * q[k];
  const LComplex w(z.real(), z.imag());
  LComplex acc = 0;
  for (std::size_t k = D; k-- > 0;) acc = acc * w + q[k];
  return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

namespace {

// Declared C2 bounds hold on [lo, hi], so they dominate those on [-R, R] only if it is covered.
const C2Callable& covering_c2(const ScalarFunction& f, double R) {
  const C2Callable& d = *f.c2_data();
  const double slack = 1e-12 * (1.0 + R);
  if (-R < d.lo - slack || R > d.hi + slack)
    throw DomainError("[-R, R] is not inside the C2Callable interval");
  return d;
}

}  // namespace

double sup_abs(const ScalarFunction& f, double R) {
  if (f.kind() == ScalarFunction::Kind::C2Callable) {
    const C2Callable& d = covering_c2(f, R);
    if (!d.sup_abs) throw DomainError("C2Callable has no declared bound for sup |f|");
    return std::abs(f.c2_factor()) * *d.sup_abs;
  }
  double m = 0.0;
  for (double x : sample_grid(R)) m = std::max(m, std::abs(f(x)));
  return m;
}

double l2_second_derivative(const ScalarFunction& f, double R) {
  if (f.kind() == ScalarFunction::Kind::C2Callable) {
    const C2Callable& d = covering_c2(f, R);
    if (!d.l2_second) throw DomainError("C2Callable has no declared bound for ||f''||_L2");
    return std::abs(f.c2_factor()) * *d.l2_second;
  }
  const ScalarFunction f2 = f.derivative_function().derivative_function();
  const auto xs = sample_grid(R);
  const double h = xs[1] - xs[0];
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v = f2(xs[i]);
    acc += (i == 0 || i + 1 == xs.size() ? 0.5 : 1.0) * v * v;
  }
  return std::sqrt(acc * h);
}

double sup_distance(const ScalarFunction& f, const ScalarFunction& g, double R) {
  double m = 0.0;
  for (double x : sample_grid(R)) m = std::max(m, std::abs(f(x) - g(x)));
  return m;
}

LipschitzData lipschitz_data(const ScalarFunction& f, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("lipschitz_data: radius must be positive");
  LipschitzData d;
  d.radius = R;
  d.sup_abs = sup_abs(f, R);
  d.l2_second = l2_second_derivative(f, R);
  d.C = 2.0 * (d.sup_abs + d.l2_second);
  d.L = 12.0 * (d.C * R + d.sup_abs);
  return d;
}

std::vector<double> series_coefficients(const ScalarFunction& f, double radius, double rel_eps) {
  if (!f.has_coefficients()) throw DomainError("series_coefficients: C2Callable generator has no coefficients");
  if (f.kind() == ScalarFunction::Kind::Polynomial) return f.polynomial_part();
  const double r = std::max(std::abs(radius), 1e-300);
  return f.coefficients(f.truncation_degree(r, rel_eps * std::max(1.0, f.majorant(r))));
}

ScalarFunction taylor_truncate(const ScalarFunction& f, double R, double eps) {
  if (f.kind() == ScalarFunction::Kind::Polynomial) return f;
  if (f.kind() == ScalarFunction::Kind::C2Callable) throw DomainError("taylor_truncate: needs a Taylor generator");
  if (!(eps > 0.0)) throw std::invalid_argument("taylor_truncate: eps must be positive");
  const std::size_t D = f.truncation_degree(R, eps);
  return ScalarFunction::polynomial(f.coefficients(D));
}

namespace {

struct Spline {
  std::vector<double> x, y, m;  // m: second derivatives at the knots

  std::size_t segment(double t) const {
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
    return std::min(i, x.size() - 2);
  }
  double eval(double t, int order) const {
    const std::size_t i = segment(t);
    const double h = x[i + 1] - x[i];
    const double A = (x[i + 1] - t) / h;
    const double B = (t - x[i]) / h;
    if (order == 0)
      return A * y[i] + B * y[i + 1] + ((A * A * A - A) * m[i] + (B * B * B - B) * m[i + 1]) * h * h / 6.0;
    if (order == 1)
      return (y[i + 1] - y[i]) / h - (3 * A * A - 1) * h * m[i] / 6.0 + (3 * B * B - 1) * h * m[i + 1] / 6.0;
    return A * m[i] + B * m[i + 1];
  }
};

Spline natural_spline(std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end());
  Spline s;
  for (auto& [x, y] : pts) {
    if (!s.x.empty() && x <= s.x.back()) throw std::invalid_argument("c2 table: abscissae must be distinct");
    s.x.push_back(x);
    s.y.push_back(y);
  }
  const std::size_t n = s.x.size();
  s.m.assign(n, 0.0);
  if (n < 3) return s;
  // Thomas algorithm on the interior knots.
  std::vector<double> diag(n, 0.0), rhs(n, 0.0), up(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = s.x[i] - s.x[i - 1], h1 = s.x[i + 1] - s.x[i];
    diag[i] = (h0 + h1) / 3.0;
    up[i] = h1 / 6.0;
    rhs[i] = (s.y[i + 1] - s.y[i]) / h1 - (s.y[i] - s.y[i - 1]) / h0;
    if (i > 1) {
      const double w = (h0 / 6.0) / diag[i - 1];
      diag[i] -= w * up[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
  }
  for (std::size_t i = n - 2; i >= 1; --i) s.m[i] = (rhs[i] - up[i] * s.m[i + 1]) / diag[i];
  return s;
}

double parse_double(const std::string& tok, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != tok.size()) throw std::invalid_argument(std::string(what) + ": bad number '" + tok + "'");
  return v;
}

}  // namespace

C2Callable load_c2_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open c2 table '" + path + "'");
  std::vector<std::pair<double, double>> pts;
  std::optional<double> lo, hi, sup, l2;
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    std::string a, b;
    if (head == "interval") {
      ls >> a >> b;
      lo = parse_double(a, "c2 table");
      hi = parse_double(b, "c2 table");
    } else if (head == "sup_abs") {
      ls >> a;
      sup = parse_double(a, "c2 table");
    } else if (head == "l2_second") {
      ls >> a;
      l2 = parse_double(a, "c2 table");
    } else {
      ls >> b;
      pts.emplace_back(parse_double(head, "c2 table"), parse_double(b, "c2 table"));
    }
  }
  if (pts.size() < 3) throw std::invalid_argument("c2 table needs at least three samples");
  auto spline = std::make_shared<Spline>(natural_spline(std::move(pts)));
  C2Callable d;
  d.f = [spline](double x) { return spline->eval(x, 0); };
  d.df = [spline](double x) { return spline->eval(x, 1); };
  d.d2f = [spline](double x) { return spline->eval(x, 2); };
  d.lo = lo.value_or(spline->x.front());
  d.hi = hi.value_or(spline->x.back());
  if (d.lo < spline->x.front() || d.hi > spline->x.back())
    throw std::invalid_argument("c2 table: declared interval exceeds the tabulated range");
  d.sup_abs = sup;
  d.l2_second = l2;
  return d;
}

ScalarFunction parse_function(std::string_view spec_view) {
  const std::string spec(spec_view);
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("function spec needs a 'kind:' prefix: " + spec);
  const std::string kind = spec.substr(0, colon);
  const std::string body = spec.substr(colon + 1);
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
  };
  if (kind == "poly") {
    std::vector<double> c;
    for (const auto& tok : split(body, ',')) c.push_back(parse_double(tok, "poly"));
    if (c.empty()) throw std::invalid_argument("poly: needs at least one coefficient");
    return ScalarFunction::polynomial(std::move(c));
  }
  if (kind == "taylor") {
    const auto parts = split(body, ':');
    if (parts.empty() || parts.size() > 3) throw std::invalid_argument("taylor: expected name[:scale[:amplitude]]");
    NamedKind k;
    if (parts[0] == "exp")
      k = NamedKind::Exp;
    else if (parts[0] == "cos")
      k = NamedKind::Cos;
    else if (parts[0] == "sin")
      k = NamedKind::Sin;
    else if (parts[0] == "cosh")
      k = NamedKind::Cosh;
    else if (parts[0] == "sinh")
      k = NamedKind::Sinh;
    else
      throw std::invalid_argument("taylor: unknown function '" + parts[0] + "'");
    const double scale = parts.size() > 1 ? parse_double(parts[1], "taylor scale") : 1.0;
    const double amp = parts.size() > 2 ? parse_double(parts[2], "taylor amplitude") : 1.0;
    return ScalarFunction::named(k, amp, scale);
  }
  if (kind == "c2") {
    if (body.rfind("file=", 0) != 0) throw std::invalid_argument("c2: expected c2:file=<path>");
    return ScalarFunction::c2(load_c2_table(body.substr(5)));
  }
  throw std::invalid_argument("unknown function kind '" + kind + "'");
}

}  // namespace toda
