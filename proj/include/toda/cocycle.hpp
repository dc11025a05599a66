#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "toda/jacobi.hpp"
#include "toda/lax_flow.hpp"
#include "toda/scalar_function.hpp"

namespace toda {

using Mat2 = Eigen::Matrix2cd;

/// [[(z-b)/a, 1/a], [-a, 0]].
Mat2 transfer_matrix(double a, double b, Complex z);

/// A(J) for the base n0: uses a and b at the site n0 + 1.
Mat2 transfer_matrix(const JacobiMatrix& J, int n0, Complex z);
Mat2 transfer_matrix(const ExtendedJacobi& X, int n0, Complex z);

/// T(n; J) with J's base at n0 (the tail supplies sites outside the window).
Mat2 shift_cocycle(const ExtendedJacobi& X, int n, Complex z, int n0 = 0);

/// Frobenius norm; every 2x2 residual in this library uses it.
double norm2x2(const Mat2& M);

struct EntirePart {
  Complex fg;  // [f g_n](z)
  Complex fh;  // [f h_n](z)
};

struct EntirePartPaths {
  EntirePart divided;      // primary (pole decomposition of the resolvent)
  EntirePart series;       // truncated Cauchy product of Laurent coefficients
  double series_tail = 0;  // bound on the neglected part of the series path
  int degree = 0;          // Taylor degree used by the series path
};

/// Power-series parts of f g_n and f h_n at z; both evaluation paths.
EntirePartPaths entire_part(const JacobiMatrix& J, const ScalarFunction& f, int n, Complex z);

/// Divided-difference path only.
EntirePart entire_part_divided(const JacobiMatrix& J, const ScalarFunction& f, int n, Complex z);

/// Precomputed spectral data for fast evaluation of B at many z.
class BEvaluator {
 public:
  BEvaluator(const JacobiMatrix& J, const ScalarFunction& f, int n0);
  Mat2 operator()(Complex z) const;
  int base() const { return n0_; }

 private:
  const ScalarFunction* f_;
  int n0_;
  std::vector<double> lambda_;
  std::vector<double> fl_;
  std::vector<std::vector<long double>> quotients_;
  std::vector<double> w0_, w1_, w1h_;  // u_e(n0)^2, u_e(n0+1)^2, u_e(n0+2) u_e(n0+1)
  double a0_, a1_, b1_, fd1_;
};

/// B_f(J) at base n0 (relative indices 0 -> n0, 1 -> n0 + 1).
/// Needs the sites n0-1 .. n0+2.
Mat2 build_B(const JacobiMatrix& J, const ScalarFunction& f, int n0, Complex z);

struct BSample {
  std::vector<Complex> grid;
  std::vector<Mat2> values;
  int base = 0;
  /// Polynomial f only: coefficient vectors (ascending powers of z) of B11, B12, B21, B22.
  std::optional<std::array<std::vector<double>, 4>> poly;

  Mat2 eval_poly(Complex z) const;
};

BSample build_B(const JacobiMatrix& J, const ScalarFunction& f, int n0, const std::vector<Complex>& grid);

/// Identity-check grid: 12 points on |z| = 12 ||J||_inf, 4 real points outside
/// the spectral hull, 4 points x + i across the hull.
std::vector<Complex> default_grid(const JacobiMatrix& J);

/// Grid for integrated cocycles: 8 points on |z| = 1.5 (none real), 4 real points
/// inside the spectral hull and the same 4 shifted by 0.5i.  Kept small so that
/// |T| stays moderate and det T - 1 remains resolvable.
std::vector<Complex> cocycle_grid(const JacobiMatrix& J);
std::vector<Complex> cocycle_grid(double lambda_min, double lambda_max);

/// Site window [base - 1, base + 2] with the default base at the center.
int default_base(const JacobiMatrix& J);

struct CocycleSample {
  std::vector<Complex> grid;
  std::vector<Mat2> values;

  double max_det_drift() const;
  /// Largest |Im T_jk| at real grid points.
  double max_real_residue() const;
};

struct CocycleConfig {
  std::optional<double> dt;     // RK4 step, capped by step_safety / max ||B||
  double step_safety = 0.01;
  double det_tolerance = 1e-8;  // restart with dt/2 beyond this
  int max_halvings = 6;
  FlowConfig flow;              // integrator settings of the flow (RK4 only)
};

struct CocycleRun {
  CocycleSample T;
  Trajectory trajectory;
  double dt = 0.0;
  int halvings = 0;
};

/// Joint RK4 on (J(s), T(s; z)), with T' = B(J(s)) T, T(0) = 1; stages shared.
CocycleRun integrate_cocycle(const JacobiMatrix& J, const ScalarFunction& f, double t, int base,
                             const std::vector<Complex>& grid, const CocycleConfig& cfg = {});

struct AppendixOracle {
  double adot_over_a = 0.0;  // at the first z
  double bdot = 0.0;
  double spread_a = 0.0;     // max over z of the deviation from the first value, relative
  double spread_b = 0.0;
  double scale_a = 0.0;      // 1 + sum of summand magnitudes (max over z)
  double scale_b = 0.0;
  double imag_a = 0.0;       // |Im| at the first z, relative
  double imag_b = 0.0;
};

/// Rate pair from the entire parts; n needs the sites n-1 .. n+2.
AppendixOracle appendix_oracle(const JacobiMatrix& J, const ScalarFunction& f, int n, const std::vector<Complex>& zs);

/// The first z is real: |z| = 4 ||J||; then `count - 1` further points on that circle.
std::vector<Complex> appendix_grid(const JacobiMatrix& J, int count = 10);

struct ZeroCurvature {
  double max_residual = 0.0;
  double scale = 1.0;  // 1 + grid-max ||B|| ||A||
  std::vector<double> residuals;
};

/// Grid max of ||A' - (B(1.J) A - A B(J))||; A' from the Lax field.
/// `corrupt` adds corrupt * diag(1, -1) to the generator.
ZeroCurvature zero_curvature_residual(const JacobiMatrix& J, const ScalarFunction& f, int base,
                                      const std::vector<Complex>& grid, double corrupt = 0.0);

struct GroupElement {
  ScalarFunction f;
  int n = 0;

  GroupElement operator*(const GroupElement& o) const { return {f + o.f, n + o.n}; }
};

ExtendedJacobi act(const GroupElement& g, const ExtendedJacobi& X, const FlowConfig& cfg);

/// T(g; X) = T(f; n.X) T(n; X) at base 0 (flow part on the padded truncation).
CocycleSample joint_cocycle(const GroupElement& g, const ExtendedJacobi& X, const std::vector<Complex>& grid,
                            const CocycleConfig& cfg = {});

/// Point of the Riemann sphere.
struct Riemann {
  Complex v{0.0, 0.0};
  bool infinite = false;

  static Riemann inf() { return {Complex{}, true}; }
};

Riemann mobius(const Mat2& M, Riemann w);
Complex mobius(const Mat2& M, Complex w);

}  // namespace toda
