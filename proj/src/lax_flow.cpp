#include "toda/lax_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "toda/error.hpp"
#include "toda/matrix_io.hpp"
#include "toda/tridiagonal_eigen.hpp"

namespace toda {

namespace {

// Band of [P_a, J] from the band entries P_{i,i+d}, d = 0..2.
TridiagonalSymmetric band_commutator(const JacobiMatrix& J, const std::vector<std::vector<double>>& P) {
  const int N = J.size();
  const auto& a = J.off_diagonal();
  const auto& b = J.diagonal();
  TridiagonalSymmetric X;
  X.index_base = J.index_base();
  X.diag.assign(N, 0.0);
  X.off.assign(std::max(0, N - 1), 0.0);
  for (int i = 0; i + 1 < N; ++i) {
    double v = P[1][i] * (b[i + 1] - b[i]);
    if (i + 2 < N) v += a[i + 1] * P[2][i];
    if (i >= 1) v -= a[i - 1] * P[2][i - 1];
    X.off[i] = v;
  }
  for (int i = 0; i < N; ++i) {
    double v = 0.0;
    if (i + 1 < N) v += a[i] * P[1][i];
    if (i >= 1) v -= a[i - 1] * P[1][i - 1];
    X.diag[i] = 2.0 * v;
  }
  return X;
}

std::vector<double> sorted_eigenvalues(const JacobiMatrix& J) {
  return solve_tridiagonal(J.diagonal(), J.off_diagonal(), false).values;
}

double spectral_radius(const std::vector<double>& ev) {
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

// J + c * X, with positivity monitoring.
JacobiMatrix advance(const JacobiMatrix& J, const TridiagonalSymmetric& X, double c, double time, double floor) {
  std::vector<double> a = J.off_diagonal(), b = J.diagonal();
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] += c * X.off[i];
    if (!(a[i] > floor))
      throw FlowError("off-diagonal a_" + std::to_string(J.index_base() + static_cast<int>(i)) + " lost positivity",
                      time);
  }
  for (std::size_t i = 0; i < b.size(); ++i) b[i] += c * X.diag[i];
  return JacobiMatrix(std::move(a), std::move(b), J.index_base());
}

struct Recorder {
  const FlowConfig& cfg;
  std::vector<double> ev0;
  double rho0 = 0.0;
  Trajectory tr;

  Recorder(const FlowConfig& c, const JacobiMatrix& J0, const ScalarFunction& f) : cfg(c) {
    if (cfg.diagnostics) {
      ev0 = sorted_eigenvalues(J0);
      rho0 = spectral_radius(ev0);
    }
    push(0.0, J0, f);
  }

  void push(double t, const JacobiMatrix& J, const ScalarFunction& f) {
    tr.times.push_back(t);
    tr.snapshots.push_back(J);
    if (!cfg.diagnostics) return;
    const auto ev = sorted_eigenvalues(J);
    double d = 0.0;
    for (std::size_t e = 0; e < ev.size(); ++e) d = std::max(d, std::abs(ev[e] - ev0[e]));
    tr.eig_drift.push_back(d);
    tr.norm_drift.push_back(std::abs(spectral_radius(ev) - rho0));
    tr.offband.push_back(lax_field(J, f, true).offband);
  }
};

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace

namespace {

constexpr std::size_t kMaxFieldDegree = 400;

std::vector<double> field_coefficients(const ScalarFunction& f, double radius, FieldMethod method) {
  if (method == FieldMethod::Spectral || !f.has_coefficients()) {
    if (method == FieldMethod::Polynomial) throw DomainError("lax_field: generator has no coefficients");
    return {};
  }
  std::vector<double> c = series_coefficients(f, radius);
  if (c.size() > kMaxFieldDegree && method == FieldMethod::Auto) return {};
  if (c.empty()) c.push_back(0.0);
  return c;
}

}  // namespace

FieldEvaluator::FieldEvaluator(const ScalarFunction& f, const JacobiMatrix& J0, FieldMethod method)
    : f_(&f), coeffs_(field_coefficients(f, 1.25 * gershgorin_radius(J0) + 1e-3, method)) {}

TridiagonalSymmetric FieldEvaluator::operator()(const JacobiMatrix& J) const {
  if (!coeffs_.empty()) return band_commutator(J, polynomial_band(J, coeffs_, 2));
  return band_commutator(J, function_band(J, function_on_spectrum(J, *f_), 2));
}

LaxField lax_field(const JacobiMatrix& J, const ScalarFunction& f, bool diagnostics, FieldMethod method) {
  LaxField out;
  out.X = FieldEvaluator(f, J, method)(J);
  if (diagnostics) {
    const Eigen::MatrixXd P = apply_function(J, f);
    const Eigen::MatrixXd Pa = parts(P).antisymmetric;
    const Eigen::MatrixXd D = J.dense();
    const Eigen::MatrixXd C = Pa * D - D * Pa;
    double off = 0.0;
    for (int j = 0; j < C.rows(); ++j)
      for (int k = 0; k < C.cols(); ++k)
        if (std::abs(j - k) >= 2) off = std::max(off, std::abs(C(j, k)));
    out.offband = off;
    out.fJ_sup = P.cwiseAbs().maxCoeff();
  }
  return out;
}

TridiagonalSymmetric lax_vector(const JacobiMatrix& J, const ScalarFunction& f) { return lax_field(J, f).X; }

double default_dt(const JacobiMatrix& J, const ScalarFunction& f) {
  const double R = J.operator_norm();
  double slope = 0.0;
  constexpr int kSamples = 513;
  if (f.has_coefficients()) {
    const ScalarFunction df = f.derivative_function();
    for (int i = 0; i < kSamples; ++i) slope = std::max(slope, std::abs(df(-R + 2.0 * R * i / (kSamples - 1))));
  } else {
    for (int i = 0; i < kSamples; ++i)
      slope = std::max(slope, std::abs(f.derivative(-R + 2.0 * R * i / (kSamples - 1), 1)));
  }
  return 1e-3 * std::min(1.0, 8.0 / (1.0 + R * slope));
}

double Trajectory::max_eig_drift() const { return max_of(eig_drift); }
double Trajectory::max_norm_drift() const { return max_of(norm_drift); }
double Trajectory::max_offband() const { return max_of(offband); }

JacobiMatrix rk4_step(const JacobiMatrix& J, const FieldEvaluator& X, double dt, double time, double floor) {
  const auto k1 = X(J);
  const auto k2 = X(advance(J, k1, 0.5 * dt, time, floor));
  const auto k3 = X(advance(J, k2, 0.5 * dt, time, floor));
  const auto k4 = X(advance(J, k3, dt, time, floor));
  TridiagonalSymmetric incr = k1;
  for (std::size_t i = 0; i < incr.diag.size(); ++i)
    incr.diag[i] = (k1.diag[i] + 2.0 * k2.diag[i] + 2.0 * k3.diag[i] + k4.diag[i]) / 6.0;
  for (std::size_t i = 0; i < incr.off.size(); ++i)
    incr.off[i] = (k1.off[i] + 2.0 * k2.off[i] + 2.0 * k3.off[i] + k4.off[i]) / 6.0;
  return advance(J, incr, dt, time + dt, floor);
}

double picard_segment_length(const JacobiMatrix& J, const ScalarFunction& f) {
  const double L = lipschitz_data(f, 2.0 * std::max(J.operator_norm(), 1e-300)).L;
  return L > 0.0 ? 0.5 / L : std::numeric_limits<double>::infinity();
}

namespace {

struct Coeffs {
  std::vector<double> a, b;
};

Coeffs coeffs_of(const JacobiMatrix& J) { return {J.off_diagonal(), J.diagonal()}; }

// Cumulative composite Simpson of samples y_0..y_M (M even) at every node.
std::vector<double> cumulative_simpson(const std::vector<double>& y, double h) {
  const std::size_t M = y.size() - 1;
  std::vector<double> I(M + 1, 0.0);
  for (std::size_t i = 2; i <= M; i += 2) I[i] = I[i - 2] + h / 3.0 * (y[i - 2] + 4.0 * y[i - 1] + y[i]);
  for (std::size_t i = 1; i <= M; i += 2) I[i] = I[i - 1] + h / 12.0 * (5.0 * y[i - 1] + 8.0 * y[i] - y[i + 1]);
  return I;
}

bool attempt_picard(const JacobiMatrix& J, const ScalarFunction& f, double T, int iters, int M, double floor,
                    PicardResult& res) {
  const Coeffs c0 = coeffs_of(J);
  const std::size_t na = c0.a.size(), nb = c0.b.size();
  std::vector<Coeffs> nodes(M + 1, c0);
  const double h = T / M;
  res.gaps.clear();
  std::vector<std::vector<double>> ya(na, std::vector<double>(M + 1)), yb(nb, std::vector<double>(M + 1));
  const FieldEvaluator field(f, J);
  for (int k = 0; k < iters; ++k) {
    for (int i = 0; i <= M; ++i) {
      for (double v : nodes[i].a)
        if (!(v > 1e-12)) throw FlowError("Picard iterate lost positivity", i * h);
      const auto X = field(JacobiMatrix(nodes[i].a, nodes[i].b, J.index_base()));
      for (std::size_t j = 0; j < na; ++j) ya[j][i] = X.off[j];
      for (std::size_t j = 0; j < nb; ++j) yb[j][i] = X.diag[j];
    }
    double gap = 0.0;
    std::vector<Coeffs> next(M + 1, c0);
    for (std::size_t j = 0; j < na; ++j) {
      const auto I = cumulative_simpson(ya[j], h);
      for (int i = 0; i <= M; ++i) {
        next[i].a[j] = c0.a[j] + I[i];
        gap = std::max(gap, std::abs(next[i].a[j] - nodes[i].a[j]));
      }
    }
    for (std::size_t j = 0; j < nb; ++j) {
      const auto I = cumulative_simpson(yb[j], h);
      for (int i = 0; i <= M; ++i) {
        next[i].b[j] = c0.b[j] + I[i];
        gap = std::max(gap, std::abs(next[i].b[j] - nodes[i].b[j]));
      }
    }
    nodes = std::move(next);
    res.gaps.push_back(gap);
    const std::size_t n = res.gaps.size();
    if (n >= 2 && res.gaps[n - 1] > floor && res.gaps[n - 1] > res.gaps[n - 2]) return false;
    if (gap <= floor) break;
  }
  for (const double v : nodes[M].a)
    if (!(v > 1e-12)) throw FlowError("Picard iterate lost positivity", T);
  res.J_T = JacobiMatrix(nodes[M].a, nodes[M].b, J.index_base());
  return true;
}

}  // namespace

PicardResult picard_segment(const JacobiMatrix& J, const ScalarFunction& f, double T, int iters, int subintervals) {
  if (!(T >= 0.0)) throw DomainError("picard_segment: T must be >= 0");
  if (iters < 1) throw DomainError("picard_segment: iters must be >= 1");
  if (subintervals < 2 || subintervals % 2 != 0) throw DomainError("picard_segment: subintervals must be even");
  const double R = 2.0 * std::max(J.operator_norm(), 1e-300);
  PicardResult res{J, {}, lipschitz_data(f, R).L, T, subintervals, 0.0};
  if (res.L > 0.0 && T > (0.5 / res.L) * (1.0 + 1e-12))
    throw DomainError("picard_segment: T exceeds the contraction bound 1/(2L)");
  res.floor = 1e3 * std::numeric_limits<double>::epsilon() * (1.0 + J.sup_norm());
  if (T == 0.0) {
    res.gaps.assign(1, 0.0);
    return res;
  }
  for (int M = subintervals, tries = 0; tries < 5; M *= 2, ++tries) {
    res.subintervals = M;
    if (attempt_picard(J, f, T, iters, M, res.floor, res)) return res;
  }
  throw ConvergenceError("picard_segment: gap sequence not monotone even with 16x refined quadrature");
}

Trajectory flow(const JacobiMatrix& J, const ScalarFunction& f, const FlowConfig& cfg) {
  if (!(cfg.t >= 0.0)) throw DomainError("flow: horizon must be >= 0");
  if (cfg.record_every < 1) throw DomainError("flow: record_every must be >= 1");
  for (double v : J.off_diagonal())
    if (!(v > cfg.positivity_floor)) throw FlowError("initial a below the positivity floor", 0.0);
  Recorder rec(cfg, J, f);
  if (cfg.t == 0.0) return std::move(rec.tr);

  if (cfg.integrator == Integrator::RK4) {
    const double dt0 = cfg.dt ? *cfg.dt : default_dt(J, f);
    if (!(dt0 > 0.0)) throw DomainError("flow: dt must be > 0");
    const long steps = std::max(1L, static_cast<long>(std::ceil(cfg.t / dt0 - 1e-9)));
    const double dt = cfg.t / static_cast<double>(steps);
    const FieldEvaluator X(f, J);
    JacobiMatrix cur = J;
    for (long s = 1; s <= steps; ++s) {
      cur = rk4_step(cur, X, dt, (s - 1) * dt, cfg.positivity_floor);
      if (s % cfg.record_every == 0 || s == steps) rec.push(s == steps ? cfg.t : s * dt, cur, f);
    }
  } else {
    const double T0 = picard_segment_length(J, f);
    const long segs = std::isfinite(T0) ? std::max(1L, static_cast<long>(std::ceil(cfg.t / T0 - 1e-9))) : 1L;
    const double T = cfg.t / static_cast<double>(segs);
    JacobiMatrix cur = J;
    for (long s = 1; s <= segs; ++s) {
      try {
        cur = picard_segment(cur, f, T, cfg.picard_max_iters, cfg.picard_subintervals).J_T;
      } catch (const FlowError& e) {
        throw FlowError(e.what(), (s - 1) * T + e.time());
      }
      if (s % cfg.record_every == 0 || s == segs) rec.push(s == segs ? cfg.t : s * T, cur, f);
    }
  }
  return std::move(rec.tr);
}

JacobiMatrix flow_to_one(const JacobiMatrix& J, const ScalarFunction& f, const FlowConfig& cfg) {
  FlowConfig c = cfg;
  c.t = 1.0;
  c.diagnostics = false;
  c.record_every = std::numeric_limits<int>::max();
  return flow(J, f, c).final();
}

JacobiMatrix group_action(const ScalarFunction& f, int n, const JacobiMatrix& J, const FlowConfig& cfg) {
  return shift(flow_to_one(J, f, cfg), n);
}

ExtendedJacobi group_action(const ScalarFunction& f, int n, const ExtendedJacobi& X, const FlowConfig& cfg) {
  if (cfg.padding < 0) throw DomainError("group_action: padding must be >= 0");
  const int P = cfg.padding;
  const int lo = X.first_site() - P, hi = X.last_site() + P;
  const JacobiMatrix flowed = flow_to_one(X.truncate(lo, hi), f, cfg);
  const int klo = X.first_site() - P / 2, khi = X.last_site() + P / 2;
  std::vector<double> a, b;
  for (int m = klo; m <= khi; ++m) {
    b.push_back(flowed.b(m));
    if (m < khi) a.push_back(flowed.a(m));
  }
  ExtendedJacobi Y(JacobiMatrix(std::move(a), std::move(b), klo), X.a_inf(), X.b_inf());
  return shift(Y, n);
}

BoundCheck comparison_bound_check(const JacobiMatrix& Jp, const ScalarFunction& g, const ScalarFunction& h, double t,
                                  const FlowConfig& cfg) {
  FlowConfig c = cfg;
  c.t = t;
  c.diagnostics = false;
  c.record_every = std::numeric_limits<int>::max();
  const JacobiMatrix Jg = flow(Jp, g, c).final();
  const JacobiMatrix Jh = flow(Jp, h, c).final();
  BoundCheck r;
  r.lhs = sup_distance(Jg, Jh);
  const double R = Jp.operator_norm();
  const double Lh = lipschitz_data(h, 2.0 * R).L;
  const double dist = sup_distance(g, h, R);
  r.rhs = Lh > 0.0 ? 4.0 * R / Lh * dist * std::expm1(Lh * t) : 4.0 * R * dist * t;
  return r;
}

BoundCheck continuity_bound_check(const JacobiMatrix& J, const JacobiMatrix& Jp, const ScalarFunction& f,
                                  const FlowConfig& cfg) {
  BoundCheck r;
  r.lhs = sup_distance(flow_to_one(J, f, cfg), flow_to_one(Jp, f, cfg));
  const double R = std::max(J.operator_norm(), Jp.operator_norm());
  r.rhs = sup_distance(J, Jp) * std::exp(lipschitz_data(f, 2.0 * R).L);
  return r;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& tr) {
  if (tr.snapshots.empty()) return;
  const JacobiMatrix& J0 = tr.snapshots.front();
  out << 't';
  for (int n = J0.first_site(); n < J0.last_site(); ++n) out << ",a_" << n;
  for (int n = J0.first_site(); n <= J0.last_site(); ++n) out << ",b_" << n;
  out << ",eig_drift,norm_drift,offband_residual\n";
  const bool diag = tr.eig_drift.size() == tr.snapshots.size();
  for (std::size_t s = 0; s < tr.snapshots.size(); ++s) {
    out << format_double(tr.times[s]);
    for (double v : tr.snapshots[s].off_diagonal()) out << ',' << format_double(v);
    for (double v : tr.snapshots[s].diagonal()) out << ',' << format_double(v);
    if (diag)
      out << ',' << format_double(tr.eig_drift[s]) << ',' << format_double(tr.norm_drift[s]) << ','
          << format_double(tr.offband[s]);
    else
      out << ",nan,nan,nan";
    out << '\n';
  }
}

}  // namespace toda
