#include "toda/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <optional>

#include "toda/error.hpp"
#include "toda/tridiagonal_eigen.hpp"

namespace toda {

namespace detail {
struct SpectrumCache {
  std::once_flag once;
  std::optional<SpectralFactorization> value;
};
}  // namespace detail

double SpectralFactorization::spectral_radius() const {
  if (values.empty()) return 0.0;
  return std::max(std::abs(values.front()), std::abs(values.back()));
}

JacobiMatrix::JacobiMatrix(std::vector<double> a, std::vector<double> b, int index_base)
    : a_(std::move(a)), b_(std::move(b)), base_(index_base), cache_(std::make_shared<detail::SpectrumCache>()) {
  if (b_.empty()) throw DomainError("JacobiMatrix: needs at least one site");
  if (a_.size() + 1 != b_.size()) throw DomainError("JacobiMatrix: need N-1 off-diagonal entries for N sites");
  for (double v : a_)
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("JacobiMatrix: off-diagonal entries must be positive");
  for (double v : b_)
    if (!std::isfinite(v)) throw DomainError("JacobiMatrix: diagonal entries must be finite");
}

JacobiMatrix JacobiMatrix::free(int size, int index_base, double a, double b) {
  if (size < 1) throw DomainError("JacobiMatrix::free: size must be >= 1");
  return JacobiMatrix(std::vector<double>(size - 1, a), std::vector<double>(size, b), index_base);
}

double JacobiMatrix::a(int n) const {
  if (!has_bond(n)) throw DomainError("JacobiMatrix: bond " + std::to_string(n) + " outside the matrix");
  return a_[n - base_];
}

double JacobiMatrix::b(int n) const {
  if (!has_site(n)) throw DomainError("JacobiMatrix: site " + std::to_string(n) + " outside the matrix");
  return b_[n - base_];
}

Eigen::MatrixXd JacobiMatrix::dense() const {
  const int n = size();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) M(i, i) = b_[i];
  for (int i = 0; i + 1 < n; ++i) M(i, i + 1) = M(i + 1, i) = a_[i];
  return M;
}

const SpectralFactorization& JacobiMatrix::spectrum() const {
  std::call_once(cache_->once, [this] { cache_->value = eig(*this); });
  return *cache_->value;
}

double JacobiMatrix::sup_norm() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::abs(v));
  for (double v : b_) m = std::max(m, std::abs(v));
  return m;
}

double JacobiMatrix::operator_norm() const {
  if (size() <= 512) return spectrum().spectral_radius();
  return 3.0 * sup_norm();
}

JacobiMatrix JacobiMatrix::relabeled(int n) const {
  JacobiMatrix J = *this;
  J.base_ = base_ - n;
  // Eigenvectors are label-independent, but the cached block stores the base.
  J.cache_ = std::make_shared<detail::SpectrumCache>();
  return J;
}

double TridiagonalSymmetric::sup_norm() const {
  double m = 0.0;
  for (double v : off) m = std::max(m, std::abs(v));
  for (double v : diag) m = std::max(m, std::abs(v));
  return m;
}

Eigen::MatrixXd TridiagonalSymmetric::dense() const {
  const int n = size();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) M(i, i) = diag[i];
  for (int i = 0; i + 1 < n; ++i) M(i, i + 1) = M(i + 1, i) = off[i];
  return M;
}

ExtendedJacobi::ExtendedJacobi(JacobiMatrix window, double a_inf, double b_inf)
    : window_(std::move(window)), a_inf_(a_inf), b_inf_(b_inf) {
  if (!(a_inf > 0.0) || !std::isfinite(a_inf)) throw DomainError("ExtendedJacobi: tail a_inf must be positive");
  if (!std::isfinite(b_inf)) throw DomainError("ExtendedJacobi: tail b_inf must be finite");
}

ExtendedJacobi ExtendedJacobi::free(int W, double a_inf, double b_inf) {
  if (W < 0) throw DomainError("ExtendedJacobi::free: W must be >= 0");
  return ExtendedJacobi(JacobiMatrix::free(2 * W + 1, -W, a_inf, b_inf), a_inf, b_inf);
}

double ExtendedJacobi::a(int n) const { return window_.has_bond(n) ? window_.a(n) : a_inf_; }

double ExtendedJacobi::b(int n) const { return window_.has_site(n) ? window_.b(n) : b_inf_; }

JacobiMatrix ExtendedJacobi::truncate(int lo, int hi) const {
  if (hi < lo) throw DomainError("ExtendedJacobi::truncate: empty range");
  std::vector<double> a, b;
  for (int n = lo; n <= hi; ++n) {
    b.push_back(this->b(n));
    if (n < hi) a.push_back(this->a(n));
  }
  return JacobiMatrix(std::move(a), std::move(b), lo);
}

ExtendedJacobi ExtendedJacobi::enlarged(int k) const {
  if (k < 0) throw DomainError("ExtendedJacobi::enlarged: k must be >= 0");
  return ExtendedJacobi(truncate(first_site() - k, last_site() + k), a_inf_, b_inf_);
}

double ExtendedJacobi::edge_mismatch() const {
  double m = std::max(std::abs(window_.b(first_site()) - b_inf_), std::abs(window_.b(last_site()) - b_inf_));
  if (window_.size() > 1) {
    m = std::max(m, std::abs(window_.a(first_site()) - a_inf_));
    m = std::max(m, std::abs(window_.a(last_site() - 1) - a_inf_));
  }
  return m;
}

double ExtendedJacobi::sup_norm() const { return std::max({window_.sup_norm(), a_inf_, std::abs(b_inf_)}); }

SpectralFactorization eig(const JacobiMatrix& J) {
  TridiagonalEigen te = solve_tridiagonal(J.diagonal(), J.off_diagonal(), true);
  SpectralFactorization s;
  s.values = std::move(te.values);
  s.vectors = std::move(te.vectors);
  s.index_base = J.index_base();
  return s;
}

std::vector<double> function_on_spectrum(const JacobiMatrix& J, const ScalarFunction& f) {
  const auto& sp = J.spectrum();
  std::vector<double> fv(sp.values.size());
  for (std::size_t e = 0; e < fv.size(); ++e) fv[e] = f(sp.values[e]);
  return fv;
}

Eigen::MatrixXd apply_function(const JacobiMatrix& J, const ScalarFunction& f) {
  const auto& sp = J.spectrum();
  const std::vector<double> fv = function_on_spectrum(J, f);
  const Eigen::Map<const Eigen::VectorXd> fl(fv.data(), static_cast<Eigen::Index>(fv.size()));
  Eigen::MatrixXd P = sp.vectors * fl.asDiagonal() * sp.vectors.transpose();
  return 0.5 * (P + P.transpose());
}

std::vector<std::vector<double>> function_band(const JacobiMatrix& J, std::span<const double> f_values, int width) {
  const auto& U = J.spectrum().vectors;
  const int n = J.size();
  std::vector<std::vector<double>> band(width + 1);
  Eigen::MatrixXd W = U;  // W(i, e) = U(i, e) f(lambda_e)
  for (int e = 0; e < n; ++e) W.col(e) *= f_values[e];
  for (int d = 0; d <= width; ++d) {
    band[d].assign(std::max(0, n - d), 0.0);
    for (int i = 0; i + d < n; ++i) band[d][i] = U.row(i).dot(W.row(i + d));
  }
  return band;
}

std::vector<std::vector<double>> polynomial_band(const JacobiMatrix& J, std::span<const double> c, int width) {
  const int N = J.size();
  const auto& a = J.off_diagonal();
  const auto& b = J.diagonal();
  const int D = c.empty() ? 0 : static_cast<int>(c.size()) - 1;
  // P[d][i] = P_{i, i+d}; P is a polynomial in J, hence symmetric.
  std::vector<std::vector<double>> P(1, std::vector<double>(N, c.empty() ? 0.0 : c[D]));
  auto at = [&](const std::vector<std::vector<double>>& M, int i, int j) {
    if (i > j) std::swap(i, j);
    const int d = j - i;
    return d < static_cast<int>(M.size()) ? M[d][i] : 0.0;
  };
  for (int k = D - 1; k >= 0; --k) {
    // After this step k Horner steps remain, so entries beyond width + k are never needed.
    const int w = std::min({static_cast<int>(P.size()), width + k, N - 1});
    std::vector<std::vector<double>> Q(w + 1);
    for (int d = 0; d <= w; ++d) {
      Q[d].assign(N - d, 0.0);
      for (int i = 0; i + d < N; ++i) {
        const int j = i + d;
        double v = at(P, i, j) * b[j];
        if (j >= 1) v += at(P, i, j - 1) * a[j - 1];
        if (j + 1 < N) v += at(P, i, j + 1) * a[j];
        Q[d][i] = v;
      }
    }
    for (double& v : Q[0]) v += c[k];
    P = std::move(Q);
  }
  std::vector<std::vector<double>> band(width + 1);
  for (int d = 0; d <= width; ++d) {
    band[d].assign(std::max(0, N - d), 0.0);
    if (d < static_cast<int>(P.size())) band[d] = P[d];
  }
  return band;
}

double gershgorin_radius(const JacobiMatrix& J) {
  const auto& a = J.off_diagonal();
  const auto& b = J.diagonal();
  double r = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    double v = std::abs(b[i]);
    if (i >= 1) v += a[i - 1];
    if (i < a.size()) v += a[i];
    r = std::max(r, v);
  }
  return r;
}

MatrixParts parts(const Eigen::MatrixXd& X) {
  if (X.rows() != X.cols()) throw DomainError("parts: square matrix required");
  MatrixParts p;
  p.diagonal = X.diagonal().asDiagonal();
  p.upper = X.triangularView<Eigen::StrictlyUpper>();
  p.antisymmetric = p.upper - Eigen::MatrixXd(X.triangularView<Eigen::StrictlyLower>());
  return p;
}

namespace {

void check_distance(const SpectralFactorization& sp, Complex z) {
  for (double l : sp.values)
    if (std::abs(z - l) <= 1e-10) throw DomainError("resolvent: z is within 1e-10 of the spectrum");
}

Complex spectral_sum(const SpectralFactorization& sp, int j, int k, Complex z) {
  Complex acc = 0.0;
  for (std::size_t e = 0; e < sp.values.size(); ++e)
    acc += sp.u(static_cast<int>(e), j) * sp.u(static_cast<int>(e), k) / (sp.values[e] - z);
  return acc;
}

}  // namespace

std::vector<Complex> resolvent_entries(const JacobiMatrix& J, Complex z, std::span<const std::pair<int, int>> pairs) {
  const auto& sp = J.spectrum();
  check_distance(sp, z);
  std::vector<Complex> out;
  out.reserve(pairs.size());
  for (auto [j, k] : pairs) {
    if (!J.has_site(j) || !J.has_site(k)) throw DomainError("resolvent_entries: site outside the matrix");
    out.push_back(spectral_sum(sp, j, k, z));
  }
  return out;
}

Complex resolvent_g(const JacobiMatrix& J, int n, Complex z) {
  const std::pair<int, int> p{n, n};
  return resolvent_entries(J, z, std::span(&p, 1))[0];
}

Complex resolvent_h(const JacobiMatrix& J, int n, Complex z) {
  if (!J.has_bond(n)) throw DomainError("resolvent_h: needs site n+1");
  const std::pair<int, int> p{n + 1, n};
  return 2.0 * J.a(n) * resolvent_entries(J, z, std::span(&p, 1))[0] - 1.0;
}

namespace detail {

GHSeriesWide gh_series_wide(const JacobiMatrix& J, int n, int K, bool need_h) {
  if (K < 1) throw DomainError("gh_series: K must be >= 1");
  if (!J.has_site(n)) throw DomainError("gh_series: site outside the matrix");
  if (need_h && !J.has_bond(n)) throw DomainError("gh_series: h_n needs site n+1 (right edge)");
  const int N = J.size();
  const int i0 = n - J.index_base();
  std::vector<long double> v(N, 0.0L), w(N);
  v[i0] = 1.0L;  // J^{k-1} delta_n
  const auto& a = J.off_diagonal();
  const auto& b = J.diagonal();
  GHSeriesWide s;
  s.g.assign(K + 1, 0.0L);
  s.h.assign(K + 1, 0.0L);
  s.h[0] = -1.0L;
  const long double an = need_h ? static_cast<long double>(a[i0]) : 0.0L;
  // Nonzero support of J^{k-1} delta_n is [i0-k+1, i0+k-1].
  for (int k = 1; k <= K; ++k) {
    s.g[k] = -v[i0];
    if (need_h) s.h[k] = -2.0L * an * v[i0 + 1];
    if (k == K) break;
    const int lo = std::max(0, i0 - k), hi = std::min(N - 1, i0 + k);
    for (int i = lo; i <= hi; ++i) {
      long double acc = static_cast<long double>(b[i]) * v[i];
      if (i > 0) acc += static_cast<long double>(a[i - 1]) * v[i - 1];
      if (i + 1 < N) acc += static_cast<long double>(a[i]) * v[i + 1];
      w[i] = acc;
    }
    for (int i = lo; i <= hi; ++i) v[i] = w[i];
  }
  return s;
}

}  // namespace detail

GHSeries gh_series(const JacobiMatrix& J, int n, int K) {
  const auto wide = detail::gh_series_wide(J, n, K, true);
  GHSeries s;
  s.g.assign(wide.g.begin(), wide.g.end());
  s.h.assign(wide.h.begin(), wide.h.end());
  return s;
}

double residue_check(const JacobiMatrix& J, int n, const ScalarFunction& f) {
  if (!f.has_coefficients()) throw DomainError("residue_check: needs polynomial or Taylor coefficients");
  const double rho = std::max(1.0, J.operator_norm());
  const std::size_t D = f.kind() == ScalarFunction::Kind::Polynomial
                            ? f.polynomial_degree()
                            : f.truncation_degree(rho, 1e-18 * std::max(1.0, f.majorant(rho)));
  const std::vector<double> c = f.coefficients(D);
  const auto s = detail::gh_series_wide(J, n, static_cast<int>(D) + 2, false);
  long double res = 0.0L;  // coefficient of z^{-1} in f(z) g_n(z)
  for (std::size_t k = 1; k <= D + 1; ++k) res += static_cast<long double>(c[k - 1]) * s.g[k];
  const auto& sp = J.spectrum();
  const std::vector<double> fv = function_on_spectrum(J, f);
  long double fnn = 0.0L;
  for (std::size_t e = 0; e < fv.size(); ++e) {
    const double u = sp.u(static_cast<int>(e), n);
    fnn += static_cast<long double>(u) * u * fv[e];
  }
  return static_cast<double>(std::abs(res + fnn));
}

Norms norms(const JacobiMatrix& J) {
  Norms r;
  r.sup = J.sup_norm();
  r.op_exact = J.size() <= 512;
  r.op = J.operator_norm();
  return r;
}

double metric(const JacobiMatrix& J, const JacobiMatrix& Jp) {
  if (J.index_base() != Jp.index_base() || J.size() != Jp.size())
    throw DomainError("metric: misaligned index bases");
  double d = 0.0;
  for (int n = J.first_site(); n <= J.last_site(); ++n) {
    const double w = std::ldexp(1.0, -std::abs(n));
    d += w * std::abs(J.b(n) - Jp.b(n));
    if (J.has_bond(n)) d += w * std::abs(J.a(n) - Jp.a(n));
  }
  return d;
}

double metric(const ExtendedJacobi& X, const ExtendedJacobi& Xp) {
  const int lo = std::min({X.first_site(), Xp.first_site(), 0}) - 1;
  const int hi = std::max({X.last_site(), Xp.last_site(), 0}) + 1;
  double d = 0.0;
  for (int n = lo; n <= hi; ++n)
    d += std::ldexp(1.0, -std::abs(n)) * (std::abs(X.a(n) - Xp.a(n)) + std::abs(X.b(n) - Xp.b(n)));
  // Outside [lo, hi] both operators are free: sum_{n>hi} 2^{-n} = 2^{-hi}, sum_{n<lo} 2^{n} = 2^{lo}.
  const double tail = std::abs(X.a_inf() - Xp.a_inf()) + std::abs(X.b_inf() - Xp.b_inf());
  d += tail * (std::ldexp(1.0, -hi) + std::ldexp(1.0, lo));
  return d;
}

double sup_distance(const JacobiMatrix& J, const JacobiMatrix& Jp) {
  if (J.index_base() != Jp.index_base() || J.size() != Jp.size())
    throw DomainError("sup_distance: misaligned index bases");
  double m = 0.0;
  for (std::size_t i = 0; i < J.diagonal().size(); ++i) m = std::max(m, std::abs(J.diagonal()[i] - Jp.diagonal()[i]));
  for (std::size_t i = 0; i < J.off_diagonal().size(); ++i)
    m = std::max(m, std::abs(J.off_diagonal()[i] - Jp.off_diagonal()[i]));
  return m;
}

ExtendedJacobi shift(const ExtendedJacobi& X, int n) {
  return ExtendedJacobi(X.window().relabeled(n), X.a_inf(), X.b_inf());
}

JacobiMatrix shift(const JacobiMatrix& J, int n) { return J.relabeled(n); }

}  // namespace toda
