#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "toda/jacobi.hpp"

namespace toda {

// Text layout:
//   N <n> base <index_base>
//   a: <n-1 reals>
//   b: <n reals>
//   tail: <a_inf> <b_inf>     (optional; makes the data two-sided)
// Blank lines and lines starting with '#' are ignored.
struct MatrixFile {
  JacobiMatrix matrix;
  std::optional<std::pair<double, double>> tail;

  bool extended() const { return tail.has_value(); }
  ExtendedJacobi as_extended() const;
};

MatrixFile parse_matrix(std::istream& in);
MatrixFile read_matrix_file(const std::string& path);

void write_matrix(std::ostream& out, const JacobiMatrix& J);
void write_matrix(std::ostream& out, const ExtendedJacobi& X);
void write_matrix_file(const std::string& path, const JacobiMatrix& J);
void write_matrix_file(const std::string& path, const ExtendedJacobi& X);

/// %.17g
std::string format_double(double v);

}  // namespace toda
