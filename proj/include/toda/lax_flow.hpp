#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "toda/jacobi.hpp"
#include "toda/scalar_function.hpp"

namespace toda {

struct LaxField {
  TridiagonalSymmetric X;
  double offband = 0.0;   // max |[f(J)_a, J]_{jk}| over |j-k| >= 2 (only when requested)
  double fJ_sup = 0.0;    // max |f(J)_{jk}|, same condition
};

/// How the band of f(J) is obtained: from the eigendecomposition, or (Polynomial and
/// Taylor generators) by banded Horner steps on the coefficients truncated at the
/// Gershgorin radius.  Auto picks the polynomial route whenever coefficients exist.
enum class FieldMethod { Auto, Spectral, Polynomial };

/// Band part of [f(J)_a, J].  With diagnostics the full commutator is formed
/// densely so the off-band entries can be reported.
LaxField lax_field(const JacobiMatrix& J, const ScalarFunction& f, bool diagnostics = false,
                   FieldMethod method = FieldMethod::Auto);

/// Just the tridiagonal field.
TridiagonalSymmetric lax_vector(const JacobiMatrix& J, const ScalarFunction& f);

/// Evaluates X_f repeatedly along one trajectory; truncation coefficients are fixed
/// once from the initial matrix (the operator norm is conserved along the flow).
class FieldEvaluator {
 public:
  FieldEvaluator(const ScalarFunction& f, const JacobiMatrix& J0, FieldMethod method = FieldMethod::Auto);
  TridiagonalSymmetric operator()(const JacobiMatrix& J) const;
  bool polynomial() const { return !coeffs_.empty(); }
  const std::vector<double>& coefficients() const { return coeffs_; }

 private:
  const ScalarFunction* f_;
  std::vector<double> coeffs_;
};

enum class Integrator { RK4, Picard };

struct FlowConfig {
  Integrator integrator = Integrator::RK4;
  double t = 1.0;
  std::optional<double> dt;     // RK4 step; default_dt() when unset
  int picard_max_iters = 40;    // sweeps per segment
  int picard_subintervals = 64; // Simpson subintervals (even), doubled on non-monotone gaps
  int record_every = 1;         // keep a snapshot every k steps (last step always kept)
  bool diagnostics = true;      // eig drift, norm drift, off-band residual per snapshot
  int padding = 20;             // ExtendedJacobi truncation padding
  double positivity_floor = 1e-12;
};

/// 1e-3 * min(1, 8 / (1 + R sup|f'|)), R the spectral radius of J.
double default_dt(const JacobiMatrix& J, const ScalarFunction& f);

struct Trajectory {
  std::vector<double> times;
  std::vector<JacobiMatrix> snapshots;
  std::vector<double> eig_drift;
  std::vector<double> norm_drift;
  std::vector<double> offband;

  const JacobiMatrix& final() const { return snapshots.back(); }
  double max_eig_drift() const;
  double max_norm_drift() const;
  double max_offband() const;
};

struct PicardResult {
  JacobiMatrix J_T;
  std::vector<double> gaps;  // gaps[k] = sup_s ||J_{k+1}(s) - J_k(s)||_inf
  double L = 0.0;            // Lipschitz constant used for the segment bound
  double T = 0.0;
  int subintervals = 0;
  double floor = 0.0;        // roundoff level below which gaps are not compared
};

/// Picard iteration for J(s) = J + int_0^s X_f(J(r)) dr on [0, T].
/// T must satisfy T <= 1/(2L), L = lipschitz_data(f, 2 ||J||).L.
PicardResult picard_segment(const JacobiMatrix& J, const ScalarFunction& f, double T, int iters,
                            int subintervals = 64);

/// Largest contractive segment length 1/(2L) for J.
double picard_segment_length(const JacobiMatrix& J, const ScalarFunction& f);

/// One RK4 step of the Lax equation.
JacobiMatrix rk4_step(const JacobiMatrix& J, const FieldEvaluator& X, double dt, double time = 0.0,
                      double positivity_floor = 1e-12);

Trajectory flow(const JacobiMatrix& J, const ScalarFunction& f, const FlowConfig& cfg);

/// f.J := J(1) (time scale folded into f).
JacobiMatrix flow_to_one(const JacobiMatrix& J, const ScalarFunction& f, const FlowConfig& cfg);

/// (f, n).J = n.(f.J).
JacobiMatrix group_action(const ScalarFunction& f, int n, const JacobiMatrix& J, const FlowConfig& cfg);

/// Flow of two-sided data: truncate to [first - P, last + P], flow, keep
/// [first - P/2, last + P/2] as the new window and re-attach the tail; then shift.
ExtendedJacobi group_action(const ScalarFunction& f, int n, const ExtendedJacobi& X, const FlowConfig& cfg);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds() const { return lhs <= rhs; }
};

/// Both sides of ||J_g(t) - J_h(t)||_inf <= (4R/L_h) ||g-h||_{C[-R,R]} (e^{L_h t} - 1),
/// R = ||J'||, L_h valid on ||J|| <= 2R.
BoundCheck comparison_bound_check(const JacobiMatrix& Jp, const ScalarFunction& g, const ScalarFunction& h,
                                  double t, const FlowConfig& cfg);

/// Both sides of ||f.J - f.J'||_inf <= ||J - J'||_inf e^{L_f}.
BoundCheck continuity_bound_check(const JacobiMatrix& J, const JacobiMatrix& Jp, const ScalarFunction& f,
                                  const FlowConfig& cfg);

/// Header: t,a_1..a_{N-1},b_1..b_N,eig_drift,norm_drift,offband_residual (labels follow the index base).
void write_trajectory_csv(std::ostream& out, const Trajectory& tr);

}  // namespace toda
