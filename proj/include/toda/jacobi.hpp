#pragma once

#include <complex>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "toda/scalar_function.hpp"

namespace toda {

/// Spectral data of a finite Jacobi matrix.  vectors(row, e) is u_e at the
/// site index_base + row.
struct SpectralFactorization {
  std::vector<double> values;
  Eigen::MatrixXd vectors;
  int index_base = 1;

  double u(int e, int site) const { return vectors(site - index_base, e); }
  double spectral_radius() const;
};

namespace detail {
struct SpectrumCache;
}

/// Finite Jacobi matrix on the sites index_base .. index_base+N-1.
/// a(n) is the coupling of sites n and n+1; every a(n) > 0.
class JacobiMatrix {
 public:
  JacobiMatrix(std::vector<double> a, std::vector<double> b, int index_base = 1);

  static JacobiMatrix free(int size, int index_base = 1, double a = 1.0, double b = 0.0);

  int size() const { return static_cast<int>(b_.size()); }
  int index_base() const { return base_; }
  int first_site() const { return base_; }
  int last_site() const { return base_ + size() - 1; }
  bool has_site(int n) const { return n >= first_site() && n <= last_site(); }
  bool has_bond(int n) const { return n >= first_site() && n < last_site(); }

  double a(int n) const;
  double b(int n) const;
  const std::vector<double>& off_diagonal() const { return a_; }
  const std::vector<double>& diagonal() const { return b_; }

  Eigen::MatrixXd dense() const;

  /// Cached eigendecomposition (computed once, thread-safe).
  const SpectralFactorization& spectrum() const;

  double sup_norm() const;
  /// Exact spectral radius for N <= 512, otherwise the 3 ||J||_inf bound.
  double operator_norm() const;

  /// Same coefficients, sites relabeled so that new label m carries old label m + n.
  JacobiMatrix relabeled(int n) const;

 private:
  std::vector<double> a_;
  std::vector<double> b_;
  int base_ = 1;
  std::shared_ptr<detail::SpectrumCache> cache_;
};

/// Value of a Lax vector field: symmetric tridiagonal, off-diagonal of any sign.
struct TridiagonalSymmetric {
  int index_base = 1;
  std::vector<double> diag;
  std::vector<double> off;

  int size() const { return static_cast<int>(diag.size()); }
  double sup_norm() const;
  Eigen::MatrixXd dense() const;
};

/// Two-sided Jacobi data: a finite window plus constant coefficients a_inf,
/// b_inf at every site and bond outside it.  The window bonds are
/// window.first_site() .. window.last_site()-1; all other bonds carry a_inf.
class ExtendedJacobi {
 public:
  ExtendedJacobi(JacobiMatrix window, double a_inf, double b_inf);

  /// Window [-W, W] of free coefficients.
  static ExtendedJacobi free(int W, double a_inf = 1.0, double b_inf = 0.0);

  double a(int n) const;
  double b(int n) const;
  double a_inf() const { return a_inf_; }
  double b_inf() const { return b_inf_; }
  const JacobiMatrix& window() const { return window_; }
  int first_site() const { return window_.first_site(); }
  int last_site() const { return window_.last_site(); }

  /// Finite matrix on the sites lo..hi (tail values filled in).
  JacobiMatrix truncate(int lo, int hi) const;

  /// Same operator with k free sites absorbed into the window on each side.
  ExtendedJacobi enlarged(int k) const;

  /// Largest deviation of the window's edge coefficients from the tail.
  double edge_mismatch() const;

  double sup_norm() const;

 private:
  JacobiMatrix window_;
  double a_inf_;
  double b_inf_;
};

struct MatrixParts {
  Eigen::MatrixXd diagonal;
  Eigen::MatrixXd upper;          // strictly upper triangle
  Eigen::MatrixXd antisymmetric;  // upper triangle minus its transpose
};

SpectralFactorization eig(const JacobiMatrix& J);

/// f(J) = U f(Lambda) U^T.
Eigen::MatrixXd apply_function(const JacobiMatrix& J, const ScalarFunction& f);

/// f evaluated at the eigenvalues (throws if f is not evaluable there).
std::vector<double> function_on_spectrum(const JacobiMatrix& J, const ScalarFunction& f);

/// Band entries of f(J): band[d][i] = f(J)_{s, s+d}, s = index_base + i, for d = 0..width.
std::vector<std::vector<double>> function_band(const JacobiMatrix& J, std::span<const double> f_values, int width);

/// Band entries of p(J) for p = sum_k c_k x^k, by banded Horner steps (same layout as function_band).
std::vector<std::vector<double>> polynomial_band(const JacobiMatrix& J, std::span<const double> c, int width);

/// max_n (|b_n| + a_{n-1} + a_n), an upper bound for the operator norm.
double gershgorin_radius(const JacobiMatrix& J);

MatrixParts parts(const Eigen::MatrixXd& X);

/// Entries ((J - z)^{-1})_{jk} for absolute site pairs.
std::vector<Complex> resolvent_entries(const JacobiMatrix& J, Complex z, std::span<const std::pair<int, int>> pairs);

/// g_n(z) = ((J - z)^{-1})_{nn}.
Complex resolvent_g(const JacobiMatrix& J, int n, Complex z);
/// h_n(z) = 2 a_n ((J - z)^{-1})_{n+1,n} - 1; needs site n+1.
Complex resolvent_h(const JacobiMatrix& J, int n, Complex z);

/// Laurent coefficients about infinity: g_n = sum_{k>=1} g[k] z^{-k},
/// h_n = sum_{k>=0} h[k] z^{-k}.  g[0] is 0 by construction.
struct GHSeries {
  std::vector<double> g;
  std::vector<double> h;
};
GHSeries gh_series(const JacobiMatrix& J, int n, int K);

namespace detail {
struct GHSeriesWide {
  std::vector<long double> g;
  std::vector<long double> h;
};
GHSeriesWide gh_series_wide(const JacobiMatrix& J, int n, int K, bool need_h);
}  // namespace detail

/// |Res(f g_n) + f(J)_{nn}|, Res taken from the truncated Laurent product.
double residue_check(const JacobiMatrix& J, int n, const ScalarFunction& f);

struct Norms {
  double sup = 0.0;       // max(|a|_inf, |b|_inf)
  double op = 0.0;        // operator norm (exact or bound)
  bool op_exact = false;  // true when op is the spectral radius
};
Norms norms(const JacobiMatrix& J);

/// d(J, J') = sum_n 2^{-|n|} (|a_n - a'_n| + |b_n - b'_n|).
double metric(const JacobiMatrix& J, const JacobiMatrix& Jp);
double metric(const ExtendedJacobi& X, const ExtendedJacobi& Xp);

/// sup-norm distance of the coefficient sequences (same labels required).
double sup_distance(const JacobiMatrix& J, const JacobiMatrix& Jp);

/// n.J: coefficients a_{m+n}, b_{m+n} at site m.
ExtendedJacobi shift(const ExtendedJacobi& X, int n);
JacobiMatrix shift(const JacobiMatrix& J, int n);

}  // namespace toda
