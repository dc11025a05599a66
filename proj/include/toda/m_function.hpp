#pragma once

#include <vector>

#include "toda/cocycle.hpp"
#include "toda/jacobi.hpp"
#include "toda/lax_flow.hpp"

namespace toda {

struct FreeM {
  Complex w;  // root of a w^2 - (z - b) w + a = 0 with |w| < 1
  Complex m_plus;
  Complex m_minus;
};

/// Constant coefficients a, b.  Rejects z within the guard band of the essential spectrum.
FreeM free_m(double a_inf, double b_inf, Complex z);

/// m-functions at the base between sites 0 and 1.
struct HalfLineM {
  Complex z;
  Complex m_plus;
  Complex m_minus;
  Complex tail_root;
  int steps_right = 0;  // transfer matrices used to pull m_plus back from the right tail
  int steps_left = 0;

  double herglotz_margin() const { return std::min(m_plus.imag(), m_minus.imag()); }
};

/// Pulls the free tail values back to the base through the window's transfer matrices.
/// Throws DomainError for Im z <= 0 and when a Herglotz margin is not positive.
HalfLineM m_functions(const ExtendedJacobi& X, Complex z);

/// |m_+(n.X) - T(n;X) m_+(X)| + |-m_-(n.X) - T(n;X)(-m_-(X))|; each term is evaluated in
/// whichever direction (T or T^{-1}) contracts that half-line's values.
double shift_law_residual(const ExtendedJacobi& X, int n, Complex z);

struct FlowUpdate {
  std::vector<int> paddings;
  std::vector<double> residuals;  // e(P)
  double herglotz_margin = 0.0;   // smallest Im m over every evaluation
};

/// e(P) = |m_+(g.X_P) - T(g;X) m_+(X)| + |-m_-(g.X_P) - T(g;X)(-m_-(X))|, with T(g; X)
/// taken at the largest padding.
FlowUpdate flow_update_check(const ExtendedJacobi& X, const GroupElement& g, Complex z,
                             const std::vector<int>& paddings, const CocycleConfig& cfg = {});

}  // namespace toda
