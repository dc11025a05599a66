#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "toda/cocycle.hpp"
#include "toda/m_function.hpp"

namespace toda::cli {

/// One cocycle report line per grid point.
struct CocycleRecord {
  Complex z;
  Mat2 T;
  double det_drift = 0.0;
  double zc_residual = 0.0;
  double cocycle_identity_residual = 0.0;
};

void write_cocycle_line(std::ostream& out, const CocycleRecord& r);

struct MReport {
  HalfLineM m;
  int shift = 0;
  double shift_residual = 0.0;
  std::string function;
  std::vector<int> paddings;
  std::vector<double> update_residuals;
  double update_herglotz = 0.0;
};

void write_m_report(std::ostream& out, const MReport& r);

/// JSON number with 17 significant digits; null for NaN and infinities.
std::string json_number(double v);

}  // namespace toda::cli
