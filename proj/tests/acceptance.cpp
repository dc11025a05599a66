// Acceptance driver: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "toda/verification.hpp"

using namespace toda;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool passed = true;
  std::string detail;

  void add(bool ok, const std::string& what) {
    passed = passed && ok;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void take(Outcome& o, const std::vector<CheckResult>& results, const std::set<std::string>& names) {
  std::set<std::string> seen;
  for (const auto& r : results) {
    if (!names.count(r.name)) continue;
    seen.insert(r.name);
    o.add(r.passed, r.name + "=" + fmt(r.value) + (r.at_least ? " >= " : " <= ") + fmt(r.tolerance) +
                        (r.passed || r.detail.empty() ? "" : " [" + r.detail + "]"));
  }
  for (const auto& n : names)
    if (!seen.count(n)) o.add(false, n + " missing");
}

struct Command {
  int code = -1;
  std::string out;
};

Command run_cli(const std::string& args) {
  const std::string cmd = std::string(TODA_CLI) + " " + args + " 2>/dev/null";
  Command c;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return c;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) c.out.append(buf, n);
  const int status = pclose(p);
  c.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return c;
}

int failures = 0;

void report(int k, const std::string& label, const Outcome& o) {
  std::cout << "criterion " << k << " " << label << ": " << (o.passed ? "PASS" : "FAIL") << "  " << o.detail
            << std::endl;
  if (!o.passed) ++failures;
}

}  // namespace

int main() {
  const VerifyOptions opt;  // seed 42, N = 16, dt = 1e-3

  {
    const auto t0 = Clock::now();
    const auto r = check_isospectrality(opt);
    const double secs = seconds_since(t0);
    Outcome o;
    take(o, r, {"isospectrality"});
    o.add(secs <= 120.0, "runtime " + fmt(secs) + " s <= 120 s");
    report(1, "isospectrality", o);
  }
  {
    Outcome o;
    take(o, check_offband(opt), {"offband_exactness"});
    report(2, "off-band exactness", o);
  }
  {
    Outcome o;
    take(o, check_picard_rate(opt), {"picard_rate"});
    report(3, "Picard rate", o);
  }
  {
    Outcome o;
    take(o, check_approximation(opt), {"approximation_bound", "approximation_monotone"});
    report(4, "approximation", o);
  }
  {
    Outcome o;
    take(o, check_continuity(opt), {"continuity_bound"});
    report(5, "continuity", o);
  }
  {
    Outcome o;
    take(o, check_commutativity(opt), {"flow_commutativity"});
    report(6, "commutativity", o);
  }
  {
    Outcome o;
    take(o, check_zero_curvature(opt), {"zero_curvature", "zero_curvature_negative_control"});
    const Command c = run_cli("cocycle --matrix random -n 16 --seed 42 -f poly:0,1 --corrupt-b 1e-3 --quiet");
    double worst = 0.0;
    std::istringstream in(c.out);
    std::string line;
    try {
      while (std::getline(in, line))
        if (!line.empty()) worst = std::max(worst, nlohmann::json::parse(line).at("zc_residual").get<double>());
    } catch (const std::exception& e) {
      o.add(false, std::string("unreadable cocycle report: ") + e.what());
    }
    o.add(c.code != 0 && c.code != -1, "corrupted run exit " + std::to_string(c.code) + " != 0");
    o.add(worst >= 5e-4, "corrupted run zc_residual=" + fmt(worst) + " >= 0.0005");
    report(7, "zero curvature", o);
  }
  {
    Outcome o;
    take(o, check_joint_cocycle(opt), {"joint_cocycle_identity"});
    report(8, "joint cocycle identity", o);
  }
  {
    Outcome o;
    take(o, check_appendix(opt),
         {"appendix_z_spread", "appendix_lax_agreement", "appendix_simplified_rate", "residue_identity"});
    report(9, "rate formulas", o);
  }
  {
    Outcome o;
    take(o, check_path_equivalence(opt), {"entire_part_path_equivalence"});
    report(10, "entire-part path equivalence", o);
  }
  {
    Outcome o;
    take(o, check_m_functions(opt), {"m_shift_law", "herglotz_margin"});
    take(o, check_flow_update(opt), {"flow_update_residual", "flow_update_monotone", "flow_update_herglotz"});
    report(11, "m-function updates", o);
  }
  {
    Outcome o;
    take(o, check_sl_structure(opt), {"sl_determinant", "sl_real_axis"});
    report(12, "SL(2) structure", o);
  }
  {
    const auto t0 = Clock::now();
    const Command c = run_cli("verify --suite all --quiet");
    const double secs = seconds_since(t0);
    Outcome o;
    o.add(c.code == 0 || c.code == 1, "exit " + std::to_string(c.code));
    o.add(secs <= 600.0, "runtime " + fmt(secs) + " s <= 600 s");
    const auto pos = c.out.find("verify all:");
    if (pos != std::string::npos) o.add(true, c.out.substr(pos, c.out.find('\n', pos) - pos));
    report(13, "verify --suite all runtime", o);
  }

  std::cout << (failures ? "acceptance: FAIL (" + std::to_string(failures) + " criteria)" : "acceptance: PASS")
            << std::endl;
  return failures ? 1 : 0;
}
