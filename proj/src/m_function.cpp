#include "toda/m_function.hpp"

#include <algorithm>
#include <cmath>

#include "toda/error.hpp"

namespace toda {

FreeM free_m(double a, double b, Complex z) {
  if (!(a > 0.0)) throw DomainError("free_m: a_inf must be positive");
  const Complex s = z - b;
  const Complex root = std::sqrt(s * s - 4.0 * a * a);
  Complex w = (s - root) / (2.0 * a);
  if (std::abs(w) > 1.0) w = 1.0 / w;  // the two roots multiply to 1
  if (std::abs(1.0 - std::abs(w)) <= 1e-8) throw DomainError("free_m: z lies in the essential spectrum");
  return {w, -w / a, (1.0 / w) / a};
}

HalfLineM m_functions(const ExtendedJacobi& X, Complex z) {
  if (!(z.imag() > 0.0)) throw DomainError("m_functions: needs Im z > 0");
  const FreeM fr = free_m(X.a_inf(), X.b_inf(), z);
  const int K = std::max(X.last_site(), 0);
  const int Kl = std::min(X.first_site() - 1, 0);
  HalfLineM m;
  m.z = z;
  m.tail_root = fr.w;
  m.steps_right = K;
  m.steps_left = -Kl;
  // m_+(X) = T(K; X)^{-1} m_+(K.X) = T(-K; K.X) m_+(K.X).
  m.m_plus = mobius(shift_cocycle(X, -K, z, K), fr.m_plus);
  // -m_-(X) = T(-K'; K'.X)(-m_-(K'.X)).
  m.m_minus = -mobius(shift_cocycle(X, -Kl, z, Kl), -fr.m_minus);
  if (!(m.m_plus.imag() > 0.0) || !(m.m_minus.imag() > 0.0))
    throw DomainError("m_functions: Herglotz property violated (Im m_+ = " + std::to_string(m.m_plus.imag()) +
                      ", Im m_- = " + std::to_string(m.m_minus.imag()) + ")");
  return m;
}

double shift_law_residual(const ExtendedJacobi& X, int n, Complex z) {
  const HalfLineM m = m_functions(X, z);
  const HalfLineM mn = m_functions(shift(X, n), z);
  // Forward is contracting for m_+ when n <= 0 and for m_- when n >= 0; the other
  // direction multiplies rounding by up to ||T||^2.
  const Mat2 T = shift_cocycle(X, n, z, 0);
  const Mat2 Ti = T.inverse();
  const double ep = n <= 0 ? std::abs(mn.m_plus - mobius(T, m.m_plus)) : std::abs(m.m_plus - mobius(Ti, mn.m_plus));
  const double em =
      n >= 0 ? std::abs(-mn.m_minus - mobius(T, -m.m_minus)) : std::abs(-m.m_minus - mobius(Ti, -mn.m_minus));
  return ep + em;
}

FlowUpdate flow_update_check(const ExtendedJacobi& X, const GroupElement& g, Complex z,
                             const std::vector<int>& paddings, const CocycleConfig& cfg) {
  if (paddings.empty()) throw DomainError("flow_update_check: empty padding list");
  if (!(z.imag() > 0.0)) throw DomainError("flow_update_check: needs Im z > 0");
  const HalfLineM m0 = m_functions(X, z);
  CocycleConfig big = cfg;
  big.flow.padding = *std::max_element(paddings.begin(), paddings.end());
  const Mat2 T = joint_cocycle(g, X, {z}, big).values[0];
  const Complex rp = mobius(T, m0.m_plus);
  const Complex rm = mobius(T, -m0.m_minus);
  FlowUpdate out;
  out.paddings = paddings;
  out.herglotz_margin = m0.herglotz_margin();
  for (int P : paddings) {
    FlowConfig fc = cfg.flow;
    fc.padding = P;
    const HalfLineM m1 = m_functions(act(g, X, fc), z);
    out.herglotz_margin = std::min(out.herglotz_margin, m1.herglotz_margin());
    out.residuals.push_back(std::abs(m1.m_plus - rp) + std::abs(-m1.m_minus - rm));
  }
  return out;
}

}  // namespace toda
