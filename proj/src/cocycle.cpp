#include "toda/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "toda/error.hpp"

namespace toda {

Mat2 transfer_matrix(double a, double b, Complex z) {
  if (!(a > 0.0)) throw DomainError("transfer_matrix: a must be positive");
  Mat2 A;
  A << (z - b) / a, 1.0 / a, -a, 0.0;
  return A;
}

Mat2 transfer_matrix(const JacobiMatrix& J, int n0, Complex z) {
  if (!J.has_bond(n0 + 1)) throw DomainError("transfer_matrix: base needs a and b at site n0 + 1");
  return transfer_matrix(J.a(n0 + 1), J.b(n0 + 1), z);
}

Mat2 transfer_matrix(const ExtendedJacobi& X, int n0, Complex z) {
  return transfer_matrix(X.a(n0 + 1), X.b(n0 + 1), z);
}

namespace {

Mat2 inverse_transfer(double a, double b, Complex z) {
  Mat2 A;
  A << 0.0, -1.0 / a, a, (z - b) / a;
  return A;
}

}  // namespace

Mat2 shift_cocycle(const ExtendedJacobi& X, int n, Complex z, int n0) {
  Mat2 T = Mat2::Identity();
  if (n >= 0) {
    for (int k = 0; k < n; ++k) T = transfer_matrix(X.a(n0 + 1 + k), X.b(n0 + 1 + k), z) * T;
  } else {
    // T(n) = A_{n0+n+1}^{-1} ... A_{n0}^{-1}
    for (int m = n0; m >= n0 + n + 1; --m) T = inverse_transfer(X.a(m), X.b(m), z) * T;
  }
  return T;
}

double norm2x2(const Mat2& M) { return M.norm(); }

namespace {

void require_sites(const JacobiMatrix& J, int lo, int hi, const char* who) {
  if (!J.has_site(lo) || !J.has_site(hi))
    throw DomainError(std::string(who) + ": needs the sites " + std::to_string(lo) + " .. " + std::to_string(hi) +
                      " (edge base or site)");
}

using LComplex = std::complex<long double>;

}  // namespace

EntirePart entire_part_divided(const JacobiMatrix& J, const ScalarFunction& f, int n, Complex z) {
  if (!f.has_coefficients()) throw DomainError("entire_part: needs polynomial or Taylor coefficients");
  require_sites(J, n, n + 1, "entire_part");
  const auto& sp = J.spectrum();
  Complex sg = 0.0, sh = 0.0;
  for (std::size_t e = 0; e < sp.values.size(); ++e) {
    const int ei = static_cast<int>(e);
    const Complex d = divided_difference(f, z, sp.values[e]);
    const double un = sp.u(ei, n);
    sg += un * un * d;
    sh += sp.u(ei, n + 1) * un * d;
  }
  return {-sg, -f(z) - 2.0 * J.a(n) * sh};
}

EntirePartPaths entire_part(const JacobiMatrix& J, const ScalarFunction& f, int n, Complex z) {
  EntirePartPaths out;
  out.divided = entire_part_divided(J, f, n, z);

  const double rho = std::max({std::abs(z), J.operator_norm(), 1e-6});
  std::size_t D;
  if (f.kind() == ScalarFunction::Kind::Polynomial) {
    D = f.polynomial_degree();
    out.series_tail = 0.0;
  } else {
    const double eps = 1e-20 * std::max(1.0, f.majorant(2.0 * rho));
    D = f.truncation_degree(2.0 * rho, eps);
    // |g_k| <= rho^{k-1}, |h_k| <= 2 rho^k, so the neglected terms sum to at most
    // sum_{j>D} |f_j| (j + 2j rho) rho^{j-1} <= (1/rho + 2) * tail(2 rho).
    out.series_tail = (1.0 / rho + 2.0) * f.tail_bound(2.0 * rho, D);
  }
  out.degree = static_cast<int>(D);
  const std::vector<double> c = f.coefficients(D);
  const auto s = detail::gh_series_wide(J, n, static_cast<int>(D) + 1, true);
  // [f g](z) = sum_m z^m sum_{k>=1} f_{m+k} g_k ;  [f h](z) = sum_m z^m sum_{k>=0} f_{m+k} h_k
  const LComplex zl(z.real(), z.imag());
  LComplex fg = 0.0L, fh = 0.0L;
  for (std::size_t m = D + 1; m-- > 0;) {
    long double cg = 0.0L, ch = 0.0L;
    for (std::size_t k = 0; m + k <= D; ++k) {
      const long double fk = c[m + k];
      if (k >= 1) cg += fk * s.g[k];
      ch += fk * s.h[k];
    }
    fg = fg * zl + cg;
    fh = fh * zl + ch;
  }
  out.series = {Complex(static_cast<double>(fg.real()), static_cast<double>(fg.imag())),
                Complex(static_cast<double>(fh.real()), static_cast<double>(fh.imag()))};
  return out;
}

BEvaluator::BEvaluator(const JacobiMatrix& J, const ScalarFunction& f, int n0) : f_(&f), n0_(n0) {
  if (!f.has_coefficients()) throw DomainError("build_B: needs polynomial or Taylor coefficients");
  require_sites(J, n0 - 1, n0 + 2, "build_B");
  const auto& sp = J.spectrum();
  const std::size_t N = sp.values.size();
  lambda_ = sp.values;
  w0_.resize(N);
  w1_.resize(N);
  w1h_.resize(N);
  fd1_ = 0.0;
  for (std::size_t e = 0; e < N; ++e) {
    const int ei = static_cast<int>(e);
    const double u0 = sp.u(ei, n0), u1 = sp.u(ei, n0 + 1), u2 = sp.u(ei, n0 + 2);
    w0_[e] = u0 * u0;
    w1_[e] = u1 * u1;
    w1h_[e] = u2 * u1;
  }
  fl_ = function_on_spectrum(J, f);
  for (std::size_t e = 0; e < N; ++e) fd1_ += w1_[e] * fl_[e];
  // Quotients (f(x) - f(lambda_e)) / (x - lambda_e) as polynomials, for z near lambda_e.
  double lmax = 0.0;
  for (double l : lambda_) lmax = std::max(lmax, std::abs(l));
  const double r = lmax + 1.5;
  const std::size_t D = f.truncation_degree(r, 1e-19 * std::max(1.0, f.majorant(r)));
  const std::vector<double> c = f.coefficients(D);
  quotients_.assign(N, std::vector<long double>(D, 0.0L));
  for (std::size_t e = 0; e < N && D > 0; ++e) {
    auto& q = quotients_[e];
    q[D - 1] = c[D];
    for (std::size_t k = D - 1; k >= 1; --k) q[k - 1] = c[k] + static_cast<long double>(lambda_[e]) * q[k];
  }
  a0_ = J.a(n0);
  a1_ = J.a(n0 + 1);
  b1_ = J.b(n0 + 1);
}

Mat2 BEvaluator::operator()(Complex z) const {
  const ScalarFunction& f = *f_;
  const Complex fz = f(z);
  const LComplex zl(z.real(), z.imag());
  Complex s0 = 0.0, s1 = 0.0, s1h = 0.0;
  for (std::size_t e = 0; e < lambda_.size(); ++e) {
    const Complex dz = z - lambda_[e];
    Complex d;
    if (std::abs(dz) >= 0.5) {
      d = (fz - fl_[e]) / dz;
    } else {
      const auto& q = quotients_[e];
      LComplex acc = 0.0L;
      for (std::size_t k = q.size(); k-- > 0;) acc = acc * zl + q[k];
      d = Complex(static_cast<double>(acc.real()), static_cast<double>(acc.imag()));
    }
    s0 += w0_[e] * d;
    s1 += w1_[e] * d;
    s1h += w1h_[e] * d;
  }
  const Complex fg0 = -s0, fg1 = -s1;
  const Complex fh1 = -fz - 2.0 * a1_ * s1h;
  const Complex B11 = fh1 + fd1_ - 2.0 * (z - b1_) * fg1;
  Mat2 B;
  B << B11, -2.0 * fg1, 2.0 * a0_ * a0_ * fg0, -B11;
  return B;
}

Mat2 build_B(const JacobiMatrix& J, const ScalarFunction& f, int n0, Complex z) { return BEvaluator(J, f, n0)(z); }

namespace {

std::vector<double> poly_mul_linear(const std::vector<double>& p, double c0, double c1) {
  // p(z) * (c0 + c1 z)
  std::vector<double> r(p.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    r[i] += c0 * p[i];
    r[i + 1] += c1 * p[i];
  }
  return r;
}

std::vector<double> poly_add(std::vector<double> p, const std::vector<double>& q) {
  if (q.size() > p.size()) p.resize(q.size(), 0.0);
  for (std::size_t i = 0; i < q.size(); ++i) p[i] += q[i];
  return p;
}

std::vector<double> poly_scale(std::vector<double> p, double c) {
  for (double& v : p) v *= c;
  return p;
}

Complex poly_eval(const std::vector<double>& p, Complex z) {
  Complex acc = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * z + p[i];
  return acc;
}

// B for the polynomial with coefficients c, as polynomials in z.  f(J)_d comes from
// the same Laurent coefficients: (J^k)_{nn} = -g_{n,k+1}.
std::array<std::vector<double>, 4> polynomial_B(const JacobiMatrix& J, const std::vector<double>& c, int n0) {
  const std::size_t D = c.empty() ? 0 : c.size() - 1;
  const int K = static_cast<int>(D) + 1;
  const auto s0 = detail::gh_series_wide(J, n0, K, false);
  const auto s1 = detail::gh_series_wide(J, n0 + 1, K, true);
  auto fg_coeffs = [&](const detail::GHSeriesWide& s) {
    std::vector<double> out(std::max<std::size_t>(D, 1), 0.0);
    for (std::size_t m = 0; m < D; ++m) {
      long double acc = 0.0L;
      for (std::size_t k = 1; m + k <= D; ++k) acc += static_cast<long double>(c[m + k]) * s.g[k];
      out[m] = static_cast<double>(acc);
    }
    return out;
  };
  std::vector<double> fh1(D + 1, 0.0);
  for (std::size_t m = 0; m <= D; ++m) {
    long double acc = 0.0L;
    for (std::size_t k = 0; m + k <= D; ++k) acc += static_cast<long double>(c[m + k]) * s1.h[k];
    fh1[m] = static_cast<double>(acc);
  }
  const std::vector<double> fg0 = fg_coeffs(s0), fg1 = fg_coeffs(s1);
  long double fd1l = 0.0L;
  for (std::size_t k = 0; k <= D; ++k) fd1l -= static_cast<long double>(c[k]) * s1.g[k + 1];
  const double fd1 = static_cast<double>(fd1l);
  std::vector<double> B11 = fh1;
  B11[0] += fd1;
  // -2 (z - b_1) [fg]_1
  B11 = poly_add(B11, poly_mul_linear(fg1, 2.0 * J.b(n0 + 1), -2.0));
  const double a0 = J.a(n0);
  return {B11, poly_scale(fg1, -2.0), poly_scale(fg0, 2.0 * a0 * a0), poly_scale(B11, -1.0)};
}

}  // namespace

Mat2 BSample::eval_poly(Complex z) const {
  if (!poly) throw DomainError("BSample: no polynomial form");
  Mat2 B;
  B << poly_eval((*poly)[0], z), poly_eval((*poly)[1], z), poly_eval((*poly)[2], z), poly_eval((*poly)[3], z);
  return B;
}

BSample build_B(const JacobiMatrix& J, const ScalarFunction& f, int n0, const std::vector<Complex>& grid) {
  const BEvaluator B(J, f, n0);
  BSample s;
  s.grid = grid;
  s.base = n0;
  s.values.reserve(grid.size());
  for (Complex z : grid) s.values.push_back(B(z));
  if (f.kind() == ScalarFunction::Kind::Polynomial) s.poly = polynomial_B(J, f.polynomial_part(), n0);
  return s;
}

std::vector<Complex> default_grid(const JacobiMatrix& J) {
  const double r = 12.0 * J.sup_norm();
  const auto& ev = J.spectrum().values;
  const double lo = ev.front(), hi = ev.back();
  std::vector<Complex> g;
  for (int k = 0; k < 12; ++k) g.push_back(std::polar(r, 2.0 * std::numbers::pi * k / 12.0));
  g.emplace_back(hi + 0.5, 0.0);
  g.emplace_back(hi + 1.0, 0.0);
  g.emplace_back(lo - 0.5, 0.0);
  g.emplace_back(lo - 1.0, 0.0);
  for (int k = 0; k < 4; ++k) g.emplace_back(lo + (k + 0.5) * (hi - lo) / 4.0, 1.0);
  return g;
}

std::vector<Complex> cocycle_grid(double lo, double hi) {
  std::vector<Complex> g;
  for (int k = 0; k < 8; ++k) g.push_back(std::polar(1.5, std::numbers::pi * (2.0 * k + 1.0) / 8.0));
  for (int k = 0; k < 4; ++k) g.emplace_back(lo + (k + 0.5) * (hi - lo) / 4.0, 0.0);
  for (int k = 0; k < 4; ++k) g.emplace_back(lo + (k + 0.5) * (hi - lo) / 4.0, 0.5);
  return g;
}

std::vector<Complex> cocycle_grid(const JacobiMatrix& J) {
  const auto& ev = J.spectrum().values;
  return cocycle_grid(ev.front(), ev.back());
}

int default_base(const JacobiMatrix& J) { return J.first_site() + (J.size() - 1) / 2; }

double CocycleSample::max_det_drift() const {
  double m = 0.0;
  for (const auto& T : values) m = std::max(m, std::abs(T.determinant() - 1.0));
  return m;
}

double CocycleSample::max_real_residue() const {
  double m = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i].imag() == 0.0) m = std::max(m, values[i].imag().cwiseAbs().maxCoeff());
  return m;
}

namespace {

JacobiMatrix advance_jacobi(const JacobiMatrix& J, const TridiagonalSymmetric& X, double c, double time,
                            double floor) {
  std::vector<double> a = J.off_diagonal(), b = J.diagonal();
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] += c * X.off[i];
    if (!(a[i] > floor)) throw FlowError("off-diagonal lost positivity during cocycle integration", time);
  }
  for (std::size_t i = 0; i < b.size(); ++i) b[i] += c * X.diag[i];
  return JacobiMatrix(std::move(a), std::move(b), J.index_base());
}

struct StageDerivative {
  TridiagonalSymmetric X;
  std::vector<Mat2> K;
};

// Field and generator along one joint run.  With coefficients available both come
// from banded/series arithmetic on a truncation fixed at the start; otherwise from
// the spectral data of each stage matrix.
struct JointField {
  const ScalarFunction& f;
  int base;
  FieldEvaluator field;
  std::vector<double> b_coeffs;

  JointField(const ScalarFunction& fn, const JacobiMatrix& J0, int n0, double zmax)
      : f(fn), base(n0), field(fn, J0) {
    if (field.polynomial()) {
      const double r = 2.0 * std::max(1.25 * gershgorin_radius(J0) + 1e-3, zmax);
      b_coeffs = series_coefficients(fn, r, 1e-19);
      if (b_coeffs.empty()) b_coeffs.push_back(0.0);
    }
  }

  StageDerivative operator()(const JacobiMatrix& J, const std::vector<Complex>& grid,
                             const std::vector<Mat2>& T) const {
    StageDerivative d;
    d.X = field(J);
    d.K.resize(grid.size());
    if (!b_coeffs.empty()) {
      BSample P;
      P.poly = polynomial_B(J, b_coeffs, base);
      for (std::size_t i = 0; i < grid.size(); ++i) d.K[i] = P.eval_poly(grid[i]) * T[i];
    } else {
      const BEvaluator B(J, f, base);
      for (std::size_t i = 0; i < grid.size(); ++i) d.K[i] = B(grid[i]) * T[i];
    }
    return d;
  }
};

std::vector<Mat2> axpy(const std::vector<Mat2>& T, const std::vector<Mat2>& K, double c) {
  std::vector<Mat2> r(T.size());
  for (std::size_t i = 0; i < T.size(); ++i) r[i] = T[i] + c * K[i];
  return r;
}

bool is_zero_function(const ScalarFunction& f) {
  if (f.kind() != ScalarFunction::Kind::Polynomial) return false;
  for (double c : f.polynomial_part())
    if (c != 0.0) return false;
  return true;
}

}  // namespace

CocycleRun integrate_cocycle(const JacobiMatrix& J, const ScalarFunction& f, double t, int base,
                             const std::vector<Complex>& grid, const CocycleConfig& cfg) {
  if (!(t >= 0.0)) throw DomainError("integrate_cocycle: t must be >= 0");
  if (cfg.flow.integrator != Integrator::RK4) throw DomainError("integrate_cocycle: joint integration is RK4 only");
  const BEvaluator B0(J, f, base);
  double maxB = 0.0, zmax = 0.0;
  for (Complex z : grid) {
    maxB = std::max(maxB, norm2x2(B0(z)));
    zmax = std::max(zmax, std::abs(z));
  }
  const JointField stage(f, J, base, zmax);
  double dt = cfg.dt ? *cfg.dt : (cfg.flow.dt ? *cfg.flow.dt : default_dt(J, f));
  if (!(dt > 0.0)) throw DomainError("integrate_cocycle: dt must be > 0");
  if (maxB > 0.0) dt = std::min(dt, cfg.step_safety / maxB);
  const double floor = cfg.flow.positivity_floor;

  for (int halvings = 0;; ++halvings, dt *= 0.5) {
    CocycleRun run;
    run.halvings = halvings;
    run.T.grid = grid;
    std::vector<Mat2> T(grid.size(), Mat2::Identity());
    JacobiMatrix cur = J;
    run.trajectory.times.push_back(0.0);
    run.trajectory.snapshots.push_back(J);
    const long steps = t == 0.0 ? 0L : std::max(1L, static_cast<long>(std::ceil(t / dt - 1e-9)));
    const double h = steps ? t / static_cast<double>(steps) : 0.0;
    run.dt = h;
    for (long s = 1; s <= steps; ++s) {
      const double tau = (s - 1) * h;
      const auto k1 = stage(cur, grid, T);
      const auto k2 = stage(advance_jacobi(cur, k1.X, 0.5 * h, tau, floor), grid, axpy(T, k1.K, 0.5 * h));
      const auto k3 = stage(advance_jacobi(cur, k2.X, 0.5 * h, tau, floor), grid, axpy(T, k2.K, 0.5 * h));
      const auto k4 = stage(advance_jacobi(cur, k3.X, h, tau, floor), grid, axpy(T, k3.K, h));
      TridiagonalSymmetric incr = k1.X;
      for (std::size_t i = 0; i < incr.diag.size(); ++i)
        incr.diag[i] = (k1.X.diag[i] + 2.0 * k2.X.diag[i] + 2.0 * k3.X.diag[i] + k4.X.diag[i]) / 6.0;
      for (std::size_t i = 0; i < incr.off.size(); ++i)
        incr.off[i] = (k1.X.off[i] + 2.0 * k2.X.off[i] + 2.0 * k3.X.off[i] + k4.X.off[i]) / 6.0;
      for (std::size_t i = 0; i < T.size(); ++i)
        T[i] += h / 6.0 * (k1.K[i] + 2.0 * k2.K[i] + 2.0 * k3.K[i] + k4.K[i]);
      cur = advance_jacobi(cur, incr, h, tau + h, floor);
      if (s % std::max(1, cfg.flow.record_every) == 0 || s == steps) {
        run.trajectory.times.push_back(s == steps ? t : s * h);
        run.trajectory.snapshots.push_back(cur);
      }
    }
    run.T.values = std::move(T);
    if (run.T.max_det_drift() <= cfg.det_tolerance) return run;
    if (halvings >= cfg.max_halvings)
      throw ConvergenceError("integrate_cocycle: det T drift " + std::to_string(run.T.max_det_drift()) +
                             " after " + std::to_string(halvings) + " step halvings");
  }
}

std::vector<Complex> appendix_grid(const JacobiMatrix& J, int count) {
  const double r = 4.0 * std::max(J.operator_norm(), 1e-3);
  std::vector<Complex> g;
  for (int k = 0; k < count; ++k) g.push_back(std::polar(r, 2.0 * std::numbers::pi * k / count));
  g[0] = Complex(r, 0.0);
  return g;
}

AppendixOracle appendix_oracle(const JacobiMatrix& J, const ScalarFunction& f, int n, const std::vector<Complex>& zs) {
  if (zs.empty()) throw DomainError("appendix_oracle: empty z set");
  require_sites(J, n - 1, n + 2, "appendix_oracle");
  const auto& sp = J.spectrum();
  const std::vector<double> fv = function_on_spectrum(J, f);
  auto fd = [&](int m) {
    double acc = 0.0;
    for (std::size_t e = 0; e < fv.size(); ++e) {
      const double u = sp.u(static_cast<int>(e), m);
      acc += u * u * fv[e];
    }
    return acc;
  };
  const double fdn = fd(n), fdn1 = fd(n + 1);
  const double bn = J.b(n), bn1 = J.b(n + 1), am = J.a(n - 1), an = J.a(n);
  AppendixOracle o;
  Complex ra0, rb0;
  std::vector<Complex> ra, rb;
  double sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const Complex z = zs[i];
    const EntirePart pm = entire_part_divided(J, f, n - 1, z);
    const EntirePart p0 = entire_part_divided(J, f, n, z);
    const EntirePart p1 = entire_part_divided(J, f, n + 1, z);
    const Complex H0 = p0.fh + fdn, H1 = p1.fh + fdn1;
    const Complex ta[3] = {2.0 * (z - bn1) * p1.fg, -H1, -H0};
    const Complex tb[4] = {-2.0 * (z - bn) * (z - bn) * p0.fg, 2.0 * (z - bn) * H0, 2.0 * am * am * pm.fg,
                           -2.0 * an * an * p1.fg};
    Complex va = 0.0, vb = 0.0;
    double ma = 0.0, mb = 0.0;
    for (const auto& v : ta) va += v, ma += std::abs(v);
    for (const auto& v : tb) vb += v, mb += std::abs(v);
    ra.push_back(va);
    rb.push_back(vb);
    sa = std::max(sa, ma);
    sb = std::max(sb, mb);
  }
  ra0 = ra[0];
  rb0 = rb[0];
  o.scale_a = 1.0 + sa;
  o.scale_b = 1.0 + sb;
  for (std::size_t i = 1; i < zs.size(); ++i) {
    o.spread_a = std::max(o.spread_a, std::abs(ra[i] - ra0));
    o.spread_b = std::max(o.spread_b, std::abs(rb[i] - rb0));
  }
  o.spread_a /= o.scale_a;
  o.spread_b /= o.scale_b;
  o.adot_over_a = ra0.real();
  o.bdot = rb0.real();
  o.imag_a = std::abs(ra0.imag()) / o.scale_a;
  o.imag_b = std::abs(rb0.imag()) / o.scale_b;
  return o;
}

ZeroCurvature zero_curvature_residual(const JacobiMatrix& J, const ScalarFunction& f, int base,
                                      const std::vector<Complex>& grid, double corrupt) {
  require_sites(J, base - 1, base + 3, "zero_curvature_residual");
  const BEvaluator B(J, f, base);
  const BEvaluator B1(J, f, base + 1);
  const TridiagonalSymmetric X = lax_vector(J, f);
  const int i1 = base + 1 - J.index_base();
  const double a = J.a(base + 1), b = J.b(base + 1);
  const double ad = X.off[i1], bd = X.diag[i1];
  Mat2 s3;
  s3 << 1.0, 0.0, 0.0, -1.0;
  ZeroCurvature out;
  double maxBA = 0.0;
  for (Complex z : grid) {
    const Mat2 A = transfer_matrix(a, b, z);
    Mat2 Ad;
    Ad << -bd / a - (z - b) * ad / (a * a), -ad / (a * a), -ad, 0.0;
    const Mat2 Bz = B(z) + corrupt * s3;
    const Mat2 B1z = B1(z) + corrupt * s3;
    const double r = norm2x2(Ad - (B1z * A - A * Bz));
    out.residuals.push_back(r);
    out.max_residual = std::max(out.max_residual, r);
    maxBA = std::max(maxBA, std::max(norm2x2(Bz), norm2x2(B1z)) * norm2x2(A));
  }
  out.scale = 1.0 + maxBA;
  return out;
}

ExtendedJacobi act(const GroupElement& g, const ExtendedJacobi& X, const FlowConfig& cfg) {
  if (is_zero_function(g.f)) return shift(X, g.n);
  return group_action(g.f, g.n, X, cfg);
}

CocycleSample joint_cocycle(const GroupElement& g, const ExtendedJacobi& X, const std::vector<Complex>& grid,
                            const CocycleConfig& cfg) {
  CocycleSample out;
  out.grid = grid;
  out.values.reserve(grid.size());
  for (Complex z : grid) out.values.push_back(shift_cocycle(X, g.n, z, 0));
  if (is_zero_function(g.f)) return out;
  const ExtendedJacobi Y = shift(X, g.n);
  const int P = std::max(cfg.flow.padding, 0);
  const int lo = std::min(Y.first_site() - P, -2), hi = std::max(Y.last_site() + P, 3);
  const CocycleRun run = integrate_cocycle(Y.truncate(lo, hi), g.f, 1.0, 0, grid, cfg);
  for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] = run.T.values[i] * out.values[i];
  return out;
}

Riemann mobius(const Mat2& M, Riemann w) {
  if (M.isZero(0.0)) throw DomainError("mobius: zero matrix");
  const Complex a = M(0, 0), b = M(0, 1), c = M(1, 0), d = M(1, 1);
  if (w.infinite) {
    if (c == 0.0) return Riemann::inf();
    return {a / c, false};
  }
  const Complex num = a * w.v + b, den = c * w.v + d;
  if (den == 0.0) return Riemann::inf();
  return {num / den, false};
}

Complex mobius(const Mat2& M, Complex w) {
  const Riemann r = mobius(M, Riemann{w, false});
  if (r.infinite) throw DomainError("mobius: image is the point at infinity");
  return r.v;
}

}  // namespace toda
