#include "toda/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "toda/cocycle.hpp"
#include "toda/corpus.hpp"
#include "toda/error.hpp"
#include "toda/jacobi.hpp"
#include "toda/lax_flow.hpp"
#include "toda/m_function.hpp"
#include "toda/scalar_function.hpp"

namespace toda {

double VerifyOptions::tol(const std::string& name, double fallback) const {
  const auto it = tolerances.find(name);
  return it == tolerances.end() ? fallback : it->second;
}

namespace {

// Running maximum with the location where it was attained.
struct Worst {
  double value = 0.0;
  std::string where;
  bool seen = false;

  void add(double v, const std::string& w) {
    if (!seen || v > value || std::isnan(v)) {
      value = v;
      where = w;
      seen = true;
    }
  }
};

// Running minimum, for lower-bound checks.
struct Least {
  double value = std::numeric_limits<double>::infinity();
  std::string where;

  void add(double v, const std::string& w) {
    if (v < value || std::isnan(v)) {
      value = v;
      where = w;
    }
  }
};

CheckResult at_most(const std::string& name, const VerifyOptions& opt, double fallback, const Worst& w) {
  CheckResult r;
  r.name = name;
  r.value = w.value;
  r.tolerance = opt.tol(name, fallback);
  r.passed = w.value <= r.tolerance;  // false for NaN
  r.detail = w.where;
  return r;
}

CheckResult at_least(const std::string& name, const VerifyOptions& opt, double fallback, const Least& w) {
  CheckResult r;
  r.name = name;
  r.value = w.value;
  r.tolerance = opt.tol(name, fallback);
  r.at_least = true;
  r.passed = w.value >= r.tolerance;
  r.detail = w.where;
  return r;
}

CheckResult failed(const std::string& name, const std::string& why) {
  CheckResult r;
  r.name = name;
  r.value = std::numeric_limits<double>::quiet_NaN();
  r.detail = why;
  return r;
}

std::string tag(int k, const std::string& f) { return "instance " + std::to_string(k) + ", f=" + f; }

RandomJacobiSpec corpus_spec(const VerifyOptions& opt) {
  RandomJacobiSpec s;
  s.size = opt.n;
  return s;
}

std::vector<JacobiMatrix> corpus(const VerifyOptions& opt, int count) {
  return random_corpus(opt.seed, count, corpus_spec(opt));
}

FlowConfig rk4_config(const VerifyOptions& opt, bool diagnostics = false) {
  FlowConfig c;
  c.dt = opt.dt;
  c.diagnostics = diagnostics;
  if (!diagnostics) c.record_every = std::numeric_limits<int>::max();
  return c;
}

double max_abs(const Eigen::MatrixXd& M) { return M.size() ? M.cwiseAbs().maxCoeff() : 0.0; }

bool is_polynomial(const ScalarFunction& f) { return f.kind() == ScalarFunction::Kind::Polynomial; }

}  // namespace

// ---------------------------------------------------------------------------
// core

std::vector<CheckResult> check_eig_reconstruction(const VerifyOptions& opt) {
  Worst rec, orth;
  const auto Js = corpus(opt, 50);
  for (std::size_t k = 0; k < Js.size(); ++k) {
    const auto& J = Js[k];
    const auto& sp = J.spectrum();
    const Eigen::MatrixXd& U = sp.vectors;
    const Eigen::VectorXd lam = Eigen::Map<const Eigen::VectorXd>(sp.values.data(), sp.values.size());
    const double scale = 1.0 + J.sup_norm();
    rec.add(max_abs(U * lam.asDiagonal() * U.transpose() - J.dense()) / scale, "instance " + std::to_string(k));
    orth.add(max_abs(U.transpose() * U - Eigen::MatrixXd::Identity(J.size(), J.size())),
             "instance " + std::to_string(k));
  }
  return {at_most("eig_reconstruction", opt, 1e-12, rec), at_most("eig_orthogonality", opt, 1e-12, orth)};
}

std::vector<CheckResult> check_norm_sandwich(const VerifyOptions& opt) {
  // ratio = max(sup / rho, rho / (3 sup)); the sandwich holds iff ratio <= 1.
  Worst w;
  RandomJacobiSpec spec = corpus_spec(opt);
  for (int k = 0; k < 1000; ++k) {
    spec.size = 1 + k % std::max(opt.n, 1);
    const JacobiMatrix J = random_jacobi(opt.seed + 7919 + k, spec);
    const double sup = J.sup_norm(), rho = J.spectrum().spectral_radius();
    w.add(std::max(sup / rho, rho / (3.0 * sup)), "matrix " + std::to_string(k));
  }
  return {at_most("norm_sandwich", opt, 1.0 + 1e-12, w)};
}

std::vector<CheckResult> check_functional_calculus(const VerifyOptions& opt) {
  Worst hom, horner;
  const auto Js = corpus(opt, 20);
  const std::vector<ScalarFunction> ps = {ScalarFunction::polynomial({0.5, -1.0, 0.25}),
                                          ScalarFunction::polynomial({0.0, 0.3, 0.0, -0.2}),
                                          ScalarFunction::polynomial({1.0, 0.0, 0.0, 0.0, 0.1})};
  for (std::size_t k = 0; k < Js.size(); ++k) {
    const auto& J = Js[k];
    const Eigen::MatrixXd D = J.dense();
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const auto& p = ps[i];
      const auto& q = ps[(i + 1) % ps.size()];
      std::vector<double> pq(p.polynomial_part().size() + q.polynomial_part().size() - 1, 0.0);
      for (std::size_t r = 0; r < p.polynomial_part().size(); ++r)
        for (std::size_t s = 0; s < q.polynomial_part().size(); ++s)
          pq[r + s] += p.polynomial_part()[r] * q.polynomial_part()[s];
      const Eigen::MatrixXd P = apply_function(J, p), Q = apply_function(J, q);
      hom.add(max_abs(apply_function(J, ScalarFunction::polynomial(pq)) - P * Q), tag(k, p.describe()));
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(J.size(), J.size());
      const auto& c = p.polynomial_part();
      for (std::size_t r = c.size(); r-- > 0;) {
        H = H * D;
        H.diagonal().array() += c[r];
      }
      horner.add(max_abs(P - H) / (1.0 + max_abs(H)), tag(k, p.describe()));
    }
  }
  return {at_most("functional_calculus_homomorphism", opt, 1e-10, hom),
          at_most("polynomial_consistency", opt, 1e-10, horner)};
}

std::vector<CheckResult> check_divided_differences(const VerifyOptions& opt) {
  Worst w;
  SplitMix64 rng(opt.seed + 31337);
  const std::vector<ScalarFunction> fs = {ScalarFunction::polynomial({0.1, -2.0, 0.5, 1.0}),
                                          ScalarFunction::named(NamedKind::Exp),
                                          ScalarFunction::named(NamedKind::Cos),
                                          ScalarFunction::named(NamedKind::Sinh, 0.5, 0.7)};
  for (int k = 0; k < 1000; ++k) {
    const auto& f = fs[k % fs.size()];
    const Complex z(rng.next_uniform(-3.0, 3.0), rng.next_uniform(-3.0, 3.0));
    const double lam = rng.next_uniform(-3.0, 3.0);
    if (std::abs(z - lam) < 1e-3) continue;  // the quotient itself loses digits there
    const Complex dd = divided_difference(f, z, lam);
    const Complex ref = (f(z) - Complex(f(lam), 0.0)) / (z - lam);
    w.add(std::abs(dd - ref) / (1.0 + std::abs(dd)), f.describe());
  }
  return {at_most("divided_difference", opt, 1e-12, w)};
}

std::vector<CheckResult> check_gh_series(const VerifyOptions& opt) {
  // error / (geometric tail bound) at |z| = 4||J||; h carries an extra 2 a_n <= 2 ||J||.
  Worst w;
  const auto Js = corpus(opt, 10);
  const int K = 12;
  for (std::size_t k = 0; k < Js.size(); ++k) {
    const auto& J = Js[k];
    const double nrm = J.operator_norm();
    for (int j = 0; j < 8; ++j) {
      const Complex z = std::polar(4.0 * nrm, 2.0 * M_PI * (j + 0.3) / 8.0);
      const double r = nrm / std::abs(z);
      const double bound = std::pow(r, K + 1) / (1.0 - r);
      for (int n = J.first_site(); n < J.last_site(); ++n) {
        const GHSeries s = gh_series(J, n, K);
        Complex g(0.0), h(s.h[0]);
        Complex zk(1.0);
        for (int m = 1; m <= K; ++m) {
          zk /= z;
          g += s.g[m] * zk;
          h += s.h[m] * zk;
        }
        const double eg = std::abs(g - resolvent_g(J, n, z));
        const double eh = std::abs(h - resolvent_h(J, n, z));
        w.add(std::max(eg / (bound + 1e-14), eh / (2.0 * bound + 1e-14)), "instance " + std::to_string(k));
      }
    }
  }
  return {at_most("gh_series_vs_resolvent", opt, 1.0, w)};
}

std::vector<CheckResult> check_residue_identity(const VerifyOptions& opt) {
  Worst w;
  const auto Js = corpus(opt, 10);
  const auto fs = standard_functions();
  const auto names = standard_function_names();
  for (std::size_t k = 0; k < Js.size(); ++k)
    for (std::size_t i = 0; i < fs.size(); ++i)
      for (int n = Js[k].first_site(); n <= Js[k].last_site(); ++n)
        w.add(residue_check(Js[k], n, fs[i]), tag(static_cast<int>(k), names[i]) + ", n=" + std::to_string(n));
  return {at_most("residue_identity", opt, 1e-10, w)};
}

std::vector<CheckResult> check_path_equivalence(const VerifyOptions& opt) {
  Worst w;
  const auto Js = corpus(opt, 5);
  const auto fs = standard_functions();
  const auto names = standard_function_names();
  for (std::size_t k = 0; k < Js.size(); ++k) {
    const auto& J = Js[k];
    const auto grid = default_grid(J);
    for (std::size_t i = 0; i < fs.size(); ++i)
      for (int n = J.first_site(); n < J.last_site(); ++n)
        for (Complex z : grid) {
          const auto p = entire_part(J, fs[i], n, z);
          const double e = std::max(std::abs(p.series.fg - p.divided.fg) / (1.0 + std::abs(p.divided.fg)),
                                    std::abs(p.series.fh - p.divided.fh) / (1.0 + std::abs(p.divided.fh)));
          w.add(e, tag(static_cast<int>(k), names[i]) + ", n=" + std::to_string(n));
        }
  }
  return {at_most("entire_part_path_equivalence", opt, 1e-9, w)};
}

// ---------------------------------------------------------------------------
// flow

std::vector<CheckResult> check_isospectrality(const VerifyOptions& opt) {
  Worst eigd, normd;
  const auto Js = corpus(opt, 50);
  const auto fs = standard_functions();
  const auto names = standard_function_names();
  std::string error;
  for (std::size_t k = 0; k < Js.size() && error.empty(); ++k)
    for (std::size_t i = 0; i < fs.size(); ++i) {
      FlowConfig c = rk4_config(opt);
      c.diagnostics = true;
      c.record_every = 10;
      try {
        // The off-band residual of every snapshot is covered by check_offband.
        const Trajectory tr = flow(Js[k], fs[i], c);
        eigd.add(tr.max_eig_drift(), tag(static_cast<int>(k), names[i]));
        normd.add(tr.max_norm_drift(), tag(static_cast<int>(k), names[i]));
      } catch (const FlowError& e) {
        std::ostringstream os;
        os << tag(static_cast<int>(k), names[i]) << ": " << e.what() << " at t=" << e.time();
        error = os.str();
        break;
      }
    }
  if (!error.empty()) return {failed("isospectrality", error), failed("norm_conservation", error)};
  return {at_most("isospectrality", opt, 1e-8, eigd), at_most("norm_conservation", opt, 1e-8, normd)};
}

std::vector<CheckResult> check_offband(const VerifyOptions& opt) {
  // Relative to 1 + ||f(J)||_inf ||J||_inf, at t = 0 and at the end of the flow.
  Worst w;
  const auto Js = corpus(opt, 50);
  const auto fs = standard_functions();
  const auto names = standard_function_names();
  for (std::size_t k = 0; k < Js.size(); ++k)
    for (std::size_t i = 0; i < fs.size(); ++i) {
      std::vector<JacobiMatrix> at = {Js[k]};
      try {
        at.push_back(flow_to_one(Js[k], fs[i], rk4_config(opt)));
      } catch (const FlowError&) {
        // flow failures are reported by the isospectrality check
      }
      for (const auto& J : at) {
        const LaxField L = lax_field(J, fs[i], true);
        w.add(L.offband / (1.0 + L.fJ_sup * J.sup_norm()), tag(static_cast<int>(k), names[i]));
      }
    }
  return {at_most("offband_exactness", opt, 1e-10, w)};
}

std::vector<CheckResult> check_field_identities(const VerifyOptions& opt) {
  // X_{n,n+1}/a_n = f(J)_{n+1,n+1} - f(J)_{nn}; ||X||_inf <= 4 rho(f(J)) ||J||_inf;
  // banded and spectral evaluation of the field agree.
  Worst rate, bound, methods;
  const auto Js = corpus(opt, 20);
  const auto fs = standard_functions();
  const auto names = standard_function_names();
  for (std::size_t k = 0; k < Js.size(); ++k) {
    const auto& J = Js[k];
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const std::string where = tag(static_cast<int>(k), names[i]);
      const TridiagonalSymmetric X = lax_field(J, fs[i], false, FieldMethod::Polynomial).X;
      const TridiagonalSymmetric Xs = lax_field(J, fs[i], false, FieldMethod::Spectral).X;
      const Eigen::MatrixXd F = apply_function(J, fs[i]);
      for (int j = 0; j + 1 < J.size(); ++j) {
        rate.add(std::abs(X.off[j] / J.off_diagonal()[j] - (F(j + 1, j + 1) - F(j, j))), where);
        methods.add(std::abs(X.off[j] - Xs.off[j]), where);
      }
      for (int j = 0; j < J.size(); ++j) methods.add(std::abs(X.diag[j] - Xs.diag[j]), where);
      double rhoF = 0.0;
      for (double v : function_on_spectrum(J, fs[i])) rhoF = std::max(rhoF, std::abs(v));
      const double cap = 4.0 * rhoF * J.sup_norm();
      bound.add(X.sup_norm() / std::max(cap, 1e-300), where);
    }
  }
  return {at_most("derivative_oracle", opt, 1e-10, rate), at_most("field_entry_bound", opt, 1.0, bound),
          at_most("field_banded_vs_spectral", opt, 1e-10, methods)};
}

std::vector<CheckResult> check_picard_rate(const VerifyOptions& opt) {
  // ratio_n = (gap_n - floor) / (G (LT)^{n+1} / (n+1)!), G fitted so that n = 0 matches.
  Worst w;
  const auto Js = corpus(opt, 10);
  const auto fs = standard_functions();
  const auto names = standard_function_names();
  for (std::size_t k = 0; k < Js.size(); ++k) {
    const std::size_t i = k % fs.size();
    const double T = picard_segment_length(Js[k], fs[i]);
    const PicardResult p = picard_segment(Js[k], fs[i], T, 13, 64);
    const double LT = p.L * p.T;
    const double G = p.gaps.front() / LT;
    double fact = 1.0, pw = LT;
    for (std::size_t n = 1; n < p.gaps.size() && n <= 12; ++n) {
      fact *= static_cast<double>(n + 1);
      pw *= LT;
      const double dominating = G * pw / fact;
      const double excess = p.gaps[n] - p.floor;
      w.add(excess <= 0.0 ? 0.0 : excess / dominating,
            tag(static_cast<int>(k), names[i]) + ", n=" + std::to_string(n));
    }
  }
  return {at_most("picard_rate", opt, 1.0, w)};
}

std::vector<CheckResult> check_picard_rk4(const VerifyOptions& opt) {
  Worst w;
  const auto Js = corpus(opt, 3);
  const std::vector<ScalarFunction> fs = {ScalarFunction::identity(), ScalarFunction::named(NamedKind::Exp, 1.0, 0.25)};
  const std::vector<std::string> names = {"x", "exp(x/4)"};
  for (std::size_t k = 0; k < Js.size(); ++k)
    for (std::size_t i = 0; i < fs.size(); ++i) {
      FlowConfig c = rk4_config(opt);
      c.t = 0.1;
      const JacobiMatrix rk = flow(Js[k], fs[i], c).final();
      c.integrator = Integrator::Picard;
      const JacobiMatrix pic = flow(Js[k], fs[i], c).final();
      w.add(sup_distance(rk, pic), tag(static_cast<int>(k), names[i]));
    }
  return {at_most("picard_rk4_agreement", opt, 1e-6, w)};
}

std::vector<CheckResult> check_time_rescaling(const VerifyOptions& opt) {
  Worst w;
  const auto Js = corpus(opt, 5);
  const auto fs = standard_functions();
  const auto names = standard_function_names();
  for (std::size_t k = 0; k < Js.size(); ++k)
    for (std::size_t i = 0; i < fs.size(); ++i) {
      // Two different discretizations are compared, at half the corpus step so that
      // the RK4 error of x^3 stays below the tolerance.
      const double t = 0.6;
      VerifyOptions fine = opt;
      fine.dt = 0.5 * opt.dt;
      FlowConfig c = rk4_config(fine);
      c.t = t;
      const JacobiMatrix direct = flow(Js[k], fs[i], c).final();
      const JacobiMatrix scaled = flow_to_one(Js[k], fs[i].scaled(t), rk4_config(fine));
      w.add(sup_distance(direct, scaled), tag(static_cast<int>(k), names[i]));
    }
  return {at_most("time_rescaling", opt, 1e-8, w)};
}

std::vector<CheckResult> check_approximation(const VerifyOptions& opt) {
  // g = exp(x/4) against its degree 2, 4, 6, 8 truncations.
  Least monotone;  // 1 while lhs(D) keeps decreasing, 0 otherwise
  Worst ratio;     // lhs / rhs
  const auto Js = corpus(opt, 5);
  const ScalarFunction g = ScalarFunction::named(NamedKind::Exp, 1.0, 0.25);
  FlowConfig c = rk4_config(opt);
  for (std::size_t k = 0; k < Js.size(); ++k) {
    double prev = std::numeric_limits<double>::infinity();
    for (int D : {2, 4, 6, 8}) {
      const ScalarFunction h = ScalarFunction::polynomial(g.coefficients(D));
      const BoundCheck b = comparison_bound_check(Js[k], g, h, 1.0, c);
      const std::string where = "instance " + std::to_string(k) + ", degree " + std::to_string(D);
      ratio.add(b.rhs > 0.0 ? b.lhs / b.rhs : (b.lhs == 0.0 ? 0.0 : INFINITY), where);
      if (std::isfinite(prev)) monotone.add(prev > b.lhs ? 1.0 : 0.0, where);
      prev = b.lhs;
    }
  }
  CheckResult mono = at_least("approximation_monotone", opt, 1.0, monotone);
  mono.detail = mono.passed ? "strictly decreasing in the degree" : "not decreasing at " + mono.detail;
  return {at_most("approximation_bound", opt, 1.0, ratio), mono};
}

std::vector<CheckResult> check_continuity(const VerifyOptions& opt) {
  Worst w;
  const auto Js = corpus(opt, 20);
  const auto fs = standard_functions();
  const auto names = standard_function_names();
  for (std::size_t k = 0; k < Js.size(); ++k) {
    SplitMix64 rng(opt.seed + 5000 + k);
    std::vector<double> a = Js[k].off_diagonal(), b = Js[k].diagonal();
    for (double& v : a) v += rng.next_uniform(-1e-3, 1e-3);
    for (double& v : b) v += rng.next_uniform(-1e-3, 1e-3);
    const JacobiMatrix Jp(a, b, Js[k].index_base());
    const std::size_t i = k % fs.size();
    const BoundCheck r = continuity_bound_check(Js[k], Jp, fs[i], rk4_config(opt));
    w.add(r.lhs / r.rhs, tag(static_cast<int>(k), names[i]));
  }
  return {at_most("continuity_bound", opt, 1.0, w)};
}

std::vector<CheckResult> check_commutativity(const VerifyOptions& opt) {
  // g1.(g2.J) against g2.(g1.J) for group elements (s f, n); the pure
  // flow/shift pairing f.(k.J) = k.(f.J) is the special case g2 = (0, k).
  Worst w;
  const auto Js = corpus(opt, 20);
  const auto fs = standard_functions();
  const auto names = standard_function_names();
  const FlowConfig c = rk4_config(opt);
  for (std::size_t k = 0; k < Js.size(); ++k) {
    SplitMix64 rng(opt.seed + 9000 + k);
    const std::size_t i = k % fs.size(), j = (k / fs.size() + i + 1) % fs.size();
    const double s1 = rng.next_uniform(0.2, 1.0), s2 = rng.next_uniform(0.2, 1.0);
    const int n1 = static_cast<int>(rng.next_bits() % 7) - 3, n2 = static_cast<int>(rng.next_bits() % 7) - 3;
    const ScalarFunction f1 = fs[i].scaled(s1);
    const ScalarFunction f2 = k % 4 == 0 ? ScalarFunction() : fs[j].scaled(s2);
    const JacobiMatrix A = group_action(f1, n1, group_action(f2, n2, Js[k], c), c);
    const JacobiMatrix B = group_action(f2, n2, group_action(f1, n1, Js[k], c), c);
    w.add(sup_distance(A, B), tag(static_cast<int>(k), names[i] + " / " + (k % 4 == 0 ? "shift" : names[j])));
  }
  return {at_most("flow_commutativity", opt, 1e-6, w)};
}

// ---------------------------------------------------------------------------
// cocycle

std::vector<CheckResult> check_zero_curvature(const VerifyOptions& opt) {
  Worst res;
  Least control;
  const auto Js = corpus(opt, 10);
  const auto fs = standard_functions();
  const auto names = standard_function_names();
  for (std::size_t k = 0; k < Js.size(); ++k) {
    const auto& J = Js[k];
    const auto grid = default_grid(J);
    std::vector<int> bases = {J.first_site() + 1, default_base(J), J.last_site() - 3};
    bases.erase(std::unique(bases.begin(), bases.end()), bases.end());
    for (std::size_t i = 0; i < fs.size(); ++i)
      for (int n0 : bases) {
        const std::string where = tag(static_cast<int>(k), names[i]) + ", base " + std::to_string(n0);
        const ZeroCurvature zc = zero_curvature_residual(J, fs[i], n0, grid);
        res.add(zc.max_residual / zc.scale, where);
        if (n0 == default_base(J)) control.add(zero_curvature_residual(J, fs[i], n0, grid, 1e-3).max_residual, where);
      }
  }
  return {at_most("zero_curvature", opt, 1e-8, res), at_least("zero_curvature_negative_control", opt, 5e-4, control)};
}

std::vector<CheckResult> check_appendix(const VerifyOptions& opt) {
  Worst spread, agree, simple;
  const auto Js = corpus(opt, 10);
  const auto fs = standard_functions();
  const auto names = standard_function_names();
  for (std::size_t k = 0; k < Js.size(); ++k) {
    const auto& J = Js[k];
    const auto zs = appendix_grid(J, 10);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const TridiagonalSymmetric X = lax_vector(J, fs[i]);
      const Eigen::MatrixXd F = apply_function(J, fs[i]);
      for (int n = J.first_site() + 1; n <= J.last_site() - 2; ++n) {
        const std::string where = tag(static_cast<int>(k), names[i]) + ", n=" + std::to_string(n);
        const AppendixOracle ao = appendix_oracle(J, fs[i], n, zs);
        const int j = n - J.index_base();
        spread.add(std::max(ao.spread_a, ao.spread_b), where);
        agree.add(std::max(std::abs(ao.adot_over_a - X.off[j] / J.a(n)), std::abs(ao.bdot - X.diag[j])), where);
        simple.add(std::abs(ao.adot_over_a - (F(j + 1, j + 1) - F(j, j))), where);
      }
    }
  }
  auto out = std::vector<CheckResult>{at_most("appendix_z_spread", opt, 1e-9, spread),
                                      at_most("appendix_lax_agreement", opt, 1e-9, agree),
                                      at_most("appendix_simplified_rate", opt, 1e-10, simple)};
  auto r = check_residue_identity(opt);
  out.insert(out.end(), r.begin(), r.end());
  return out;
}

std::vector<CheckResult> check_generator(const VerifyOptions& opt) {
  // B traceless and real at real z; polynomial coefficient form against the grid values.
  Worst trace, real, poly;
  const auto Js = corpus(opt, 10);
  const auto fs = standard_functions();
  const auto names = standard_function_names();
  for (std::size_t k = 0; k < Js.size(); ++k) {
    const auto& J = Js[k];
    const auto grid = default_grid(J);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const std::string where = tag(static_cast<int>(k), names[i]);
      const BSample B = build_B(J, fs[i], default_base(J), grid);
      for (std::size_t p = 0; p < grid.size(); ++p) {
        const double scale = 1.0 + B.values[p].cwiseAbs().maxCoeff();
        trace.add(std::abs(B.values[p].trace()) / scale, where);
        if (grid[p].imag() == 0.0) real.add(B.values[p].imag().cwiseAbs().maxCoeff() / scale, where);
        if (B.poly) poly.add((B.eval_poly(grid[p]) - B.values[p]).cwiseAbs().maxCoeff() / scale, where);
      }
      if (is_polynomial(fs[i]) && !B.poly) poly.add(INFINITY, where + " (no polynomial form)");
    }
  }
  return {at_most("generator_traceless", opt, 1e-12, trace), at_most("generator_real", opt, 1e-12, real),
          at_most("generator_polynomial_form", opt, 1e-12, poly)};
}

std::vector<CheckResult> check_sl_structure(const VerifyOptions& opt) {
  // det T = 1 and real T at real z after integration; T(1; 1.J) A(J) = A(1.J) T(1; J).
  Worst det, real, inter;
  const auto Js = corpus(opt, 10);
  const auto fs = standard_functions();
  const auto names = standard_function_names();
  for (std::size_t k = 0; k < Js.size(); ++k) {
    const auto& J = Js[k];
    const int n0 = default_base(J);
    const auto grid = cocycle_grid(J);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const std::string where = tag(static_cast<int>(k), names[i]);
      CocycleConfig cc;
      cc.dt = opt.dt;
      cc.flow.dt = opt.dt;
      const CocycleRun r0 = integrate_cocycle(J, fs[i], 1.0, n0, grid, cc);
      det.add(r0.T.max_det_drift(), where);
      real.add(r0.T.max_real_residue(), where);
      if (k < 4) {
        const CocycleRun r1 = integrate_cocycle(J, fs[i], 1.0, n0 + 1, grid, cc);
        const JacobiMatrix& Jt = r0.trajectory.final();
        for (std::size_t p = 0; p < grid.size(); ++p) {
          const Mat2 lhs = r1.T.values[p] * transfer_matrix(J, n0, grid[p]);
          const Mat2 rhs = transfer_matrix(Jt, n0, grid[p]) * r0.T.values[p];
          inter.add(norm2x2(lhs - rhs), where);
        }
      }
    }
  }
  return {at_most("sl_determinant", opt, 1e-10, det), at_most("sl_real_axis", opt, 1e-10, real),
          at_most("finite_time_intertwining", opt, 1e-6, inter)};
}

std::vector<CheckResult> check_joint_cocycle(const VerifyOptions& opt) {
  Worst w;
  const auto fs = standard_functions();
  const auto names = standard_function_names();
  // Fast generators (x^3) carry the perturbation well past a 20-site margin within t = 1.
  CocycleConfig cc;
  cc.dt = opt.dt;
  cc.flow.dt = opt.dt;
  cc.flow.padding = 40;
  for (int k = 0; k < 20; ++k) {
    const ExtendedJacobi X = random_compact_perturbation(opt.seed + k, 4);
    SplitMix64 rng(opt.seed + 12000 + k);
    auto element = [&](std::size_t fi) {
      const double s = rng.next_uniform(0.2, 1.0);
      const int n = static_cast<int>(rng.next_bits() % 7) - 3;
      return GroupElement{fs[fi].scaled(s), n};
    };
    const std::size_t i = k % fs.size(), j = (i + 1 + k / fs.size()) % fs.size();
    const GroupElement g = element(i), h = element(j);
    const auto grid = cocycle_grid(X.truncate(-10, 10));
    const CocycleSample Tgh = joint_cocycle(g * h, X, grid, cc);
    const CocycleSample Tg = joint_cocycle(g, act(h, X, cc.flow), grid, cc);
    const CocycleSample Th = joint_cocycle(h, X, grid, cc);
    for (std::size_t p = 0; p < grid.size(); ++p)
      w.add(norm2x2(Tgh.values[p] - Tg.values[p] * Th.values[p]),
            "pair " + std::to_string(k) + ": " + names[i] + " shift " + std::to_string(g.n) + ", " + names[j] +
                " shift " + std::to_string(h.n));
  }
  return {at_most("joint_cocycle_identity", opt, 1e-6, w)};
}

// ---------------------------------------------------------------------------
// mfun

namespace {

const std::vector<Complex>& m_points() {
  static const std::vector<Complex> zs = {{0.3, 0.5}, {-1.2, 0.8}, {0.0, 2.0}, {2.5, 0.5}};
  return zs;
}

}  // namespace

std::vector<CheckResult> check_m_functions(const VerifyOptions& opt) {
  Worst shiftlaw, tails;
  Least herglotz;
  for (int k = 0; k < 10; ++k) {
    const ExtendedJacobi X = random_compact_perturbation(opt.seed + k, 4);
    for (Complex z : m_points()) {
      const std::string where = "instance " + std::to_string(k) + ", z=" + std::to_string(z.real()) + "+" +
                                std::to_string(z.imag()) + "i";
      const HalfLineM m = m_functions(X, z);
      herglotz.add(m.herglotz_margin(), where);
      for (int n = -10; n <= 10; ++n) {
        herglotz.add(m_functions(shift(X, n), z).herglotz_margin(), where);
        shiftlaw.add(shift_law_residual(X, n, z), where + ", n=" + std::to_string(n));
      }
      for (int e : {1, 5}) {
        const HalfLineM me = m_functions(X.enlarged(e), z);
        tails.add(std::abs(me.m_plus - m.m_plus) + std::abs(me.m_minus - m.m_minus), where);
      }
    }
  }
  CheckResult h = at_least("herglotz_margin", opt, 0.0, herglotz);
  h.passed = herglotz.value > h.tolerance;
  return {h, at_most("m_shift_law", opt, 1e-10, shiftlaw), at_most("m_tail_independence", opt, 1e-12, tails)};
}

std::vector<CheckResult> check_flow_update(const VerifyOptions& opt) {
  // e(P) over P = 10, 20, 40; "nonincreasing" allows rounding-level growth (1e-10).
  Worst last, growth;
  Least herglotz;
  const std::vector<ScalarFunction> fs = {ScalarFunction::identity(), ScalarFunction::monomial(2),
                                          ScalarFunction::named(NamedKind::Exp, 1.0, 0.25),
                                          ScalarFunction::named(NamedKind::Cos)};
  const std::vector<std::string> names = {"x", "x^2", "exp(x/4)", "cos(x)"};
  const std::vector<int> paddings = {10, 20, 40};
  CocycleConfig cc;
  cc.dt = opt.dt;
  cc.flow.dt = opt.dt;
  for (int k = 0; k < 4; ++k) {
    const ExtendedJacobi X = random_compact_perturbation(opt.seed + 100 + k, 4);
    const Complex z = m_points()[k % m_points().size()];
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const std::string where = tag(k, names[i]);
      const FlowUpdate u = flow_update_check(X, GroupElement{fs[i], 0}, z, paddings, cc);
      herglotz.add(u.herglotz_margin, where);
      last.add(u.residuals.back(), where);
      for (std::size_t p = 1; p < u.residuals.size(); ++p)
        growth.add(u.residuals[p] - u.residuals[p - 1], where + ", P=" + std::to_string(paddings[p]));
    }
    // shift-only and mixed elements
    const FlowUpdate s = flow_update_check(X, GroupElement{ScalarFunction(), 3}, z, paddings, cc);
    last.add(s.residuals.back(), "instance " + std::to_string(k) + ", pure shift");
    const FlowUpdate mixed = flow_update_check(X, GroupElement{fs[k % fs.size()].scaled(0.5), -2}, z, paddings, cc);
    last.add(mixed.residuals.back(), "instance " + std::to_string(k) + ", mixed element");
    for (std::size_t p = 1; p < mixed.residuals.size(); ++p)
      growth.add(mixed.residuals[p] - mixed.residuals[p - 1], "instance " + std::to_string(k) + ", mixed element");
  }
  CheckResult h = at_least("flow_update_herglotz", opt, 0.0, herglotz);
  h.passed = herglotz.value > h.tolerance;
  return {at_most("flow_update_residual", opt, 1e-6, last), at_most("flow_update_monotone", opt, 1e-10, growth), h};
}

// ---------------------------------------------------------------------------

const std::vector<SuiteEntry>& suite_registry() {
  static const std::vector<SuiteEntry> reg = {
      {"core", "eig", check_eig_reconstruction},
      {"core", "norms", check_norm_sandwich},
      {"core", "functional_calculus", check_functional_calculus},
      {"core", "divided_difference", check_divided_differences},
      {"core", "gh_series", check_gh_series},
      {"core", "residue", check_residue_identity},
      {"core", "path_equivalence", check_path_equivalence},
      {"flow", "isospectrality", check_isospectrality},
      {"flow", "offband", check_offband},
      {"flow", "field_identities", check_field_identities},
      {"flow", "picard_rate", check_picard_rate},
      {"flow", "picard_rk4", check_picard_rk4},
      {"flow", "time_rescaling", check_time_rescaling},
      {"flow", "approximation", check_approximation},
      {"flow", "continuity", check_continuity},
      {"flow", "commutativity", check_commutativity},
      {"cocycle", "zero_curvature", check_zero_curvature},
      {"cocycle", "appendix", check_appendix},
      {"cocycle", "generator", check_generator},
      {"cocycle", "sl_structure", check_sl_structure},
      {"cocycle", "joint_cocycle", check_joint_cocycle},
      {"mfun", "m_functions", check_m_functions},
      {"mfun", "flow_update", check_flow_update},
  };
  return reg;
}

std::vector<CheckResult> run_suite(const std::string& suite, const VerifyOptions& opt) {
  if (suite != "all" && suite != "core" && suite != "flow" && suite != "cocycle" && suite != "mfun")
    throw DomainError("unknown suite '" + suite + "'");
  std::vector<CheckResult> out;
  for (const auto& e : suite_registry()) {
    if (suite != "all" && e.suite != suite) continue;
    // The appendix group repeats the residue identity; keep one copy in "all".
    try {
      for (auto& r : e.run(opt)) {
        const bool dup = std::any_of(out.begin(), out.end(), [&](const CheckResult& o) { return o.name == r.name; });
        if (!dup) out.push_back(std::move(r));
      }
    } catch (const std::exception& ex) {
      out.push_back(failed(e.name, ex.what()));
    }
  }
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

void print_summary(std::ostream& out, const std::vector<CheckResult>& results) {
  std::size_t w = 5;
  for (const auto& r : results) w = std::max(w, r.name.size());
  char buf[64];
  out << "check" << std::string(w - 5 + 2, ' ') << "value        bound         status  where\n";
  for (const auto& r : results) {
    out << r.name << std::string(w - r.name.size() + 2, ' ');
    std::snprintf(buf, sizeof buf, "%-12.3e %s%-11.3e  ", r.value, r.at_least ? ">=" : "<=", r.tolerance);
    out << buf << (r.passed ? "PASS  " : "FAIL  ") << "  " << r.detail << '\n';
  }
}

}  // namespace toda
