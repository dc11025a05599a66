#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace toda {

/// Eigenpairs of a real symmetric tridiagonal matrix.
/// values ascending; vectors column e is the eigenvector of values[e],
/// sign-normalized so that its first nonnegligible component is positive.
struct TridiagonalEigen {
  std::vector<double> values;
  Eigen::MatrixXd vectors;
  int iterations = 0;
};

/// Implicit-shift QL with Wilkinson shifts; eigenvectors by accumulated rotations.
/// `diag` has n entries, `off` has n-1 (off[i] couples i and i+1).
/// Throws ConvergenceError if an eigenvalue needs more than `max_iterations` sweeps.
TridiagonalEigen solve_tridiagonal(std::span<const double> diag, std::span<const double> off,
                                   bool want_vectors = true, int max_iterations = 60);

}  // namespace toda
