#include "reports.hpp"

#include <cmath>
#include <ostream>

#include "toda/matrix_io.hpp"

namespace toda::cli {

std::string json_number(double v) { return std::isfinite(v) ? format_double(v) : "null"; }

namespace {

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

void complex_pair(std::ostream& out, Complex v) {
  out << '[' << json_number(v.real()) << ',' << json_number(v.imag()) << ']';
}

}  // namespace

void write_cocycle_line(std::ostream& out, const CocycleRecord& r) {
  static const char* names[2][2] = {{"T11", "T12"}, {"T21", "T22"}};
  out << "{\"z_re\":" << json_number(r.z.real()) << ",\"z_im\":" << json_number(r.z.imag());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out << ",\"" << names[i][j] << "_re\":" << json_number(r.T(i, j).real()) << ",\"" << names[i][j]
          << "_im\":" << json_number(r.T(i, j).imag());
  out << ",\"det_drift\":" << json_number(r.det_drift) << ",\"zc_residual\":" << json_number(r.zc_residual)
      << ",\"cocycle_identity_residual\":" << json_number(r.cocycle_identity_residual) << "}\n";
}

void write_m_report(std::ostream& out, const MReport& r) {
  out << "{\n  \"z\": ";
  complex_pair(out, r.m.z);
  out << ",\n  \"m_plus\": ";
  complex_pair(out, r.m.m_plus);
  out << ",\n  \"m_minus\": ";
  complex_pair(out, r.m.m_minus);
  out << ",\n  \"herglotz\": {\"m_plus\": " << json_number(r.m.m_plus.imag())
      << ", \"m_minus\": " << json_number(r.m.m_minus.imag()) << "},\n";
  out << "  \"steps\": {\"right\": " << r.m.steps_right << ", \"left\": " << r.m.steps_left << "},\n";
  out << "  \"shift\": " << r.shift << ",\n  \"shift_residual\": " << json_number(r.shift_residual) << ",\n";
  out << "  \"function\": " << json_string(r.function) << ",\n  \"update\": {\"paddings\": [";
  for (std::size_t i = 0; i < r.paddings.size(); ++i) out << (i ? "," : "") << r.paddings[i];
  out << "], \"residuals\": [";
  for (std::size_t i = 0; i < r.update_residuals.size(); ++i)
    out << (i ? "," : "") << json_number(r.update_residuals[i]);
  out << "], \"herglotz_margin\": " << json_number(r.update_herglotz) << "}\n}\n";
}

}  // namespace toda::cli
