#include "toda/tridiagonal_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "toda/error.hpp"

namespace toda {

TridiagonalEigen solve_tridiagonal(std::span<const double> diag, std::span<const double> off,
                                   bool want_vectors, int max_iterations) {
  const int n = static_cast<int>(diag.size());
  if (n == 0) return {};
  if (static_cast<int>(off.size()) != n - 1) throw DomainError("solve_tridiagonal: off-diagonal must have n-1 entries");

  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> e(n, 0.0);
  std::copy(off.begin(), off.end(), e.begin());
  Eigen::MatrixXd z;
  if (want_vectors) z = Eigen::MatrixXd::Identity(n, n);

  int total = 0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) + dd == dd) break;
      }
      if (m != l) {
        if (iter++ == max_iterations) {
          std::ostringstream os;
          os << "solve_tridiagonal: no convergence for eigenvalue " << l << " of " << n << " after "
             << max_iterations << " QL sweeps (|e|=" << std::abs(e[l]) << ")";
          throw ConvergenceError(os.str());
        }
        ++total;
        // Wilkinson shift from the leading 2x2 block.
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          e[i + 1] = (r = std::hypot(f, g));
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          d[i + 1] = g + (p = s * r);
          g = c * r - b;
          if (want_vectors) {
            auto zi = z.col(i);
            auto zi1 = z.col(i + 1);
            for (int k = 0; k < n; ++k) {
              f = zi1[k];
              zi1[k] = s * zi[k] + c * f;
              zi[k] = c * zi[k] - s * f;
            }
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return d[x] < d[y]; });

  TridiagonalEigen out;
  out.iterations = total;
  out.values.resize(n);
  for (int k = 0; k < n; ++k) out.values[k] = d[order[k]];
  if (want_vectors) {
    out.vectors.resize(n, n);
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXd v = z.col(order[k]);
      const double cut = 1e-8 * v.cwiseAbs().maxCoeff();
      for (int j = 0; j < n; ++j) {
        if (std::abs(v[j]) > cut) {
          if (v[j] < 0) v = -v;
          break;
        }
      }
      out.vectors.col(k) = v;
    }
  }
  return out;
}

}  // namespace toda
