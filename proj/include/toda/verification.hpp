#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace toda {

struct CheckResult {
  std::string name;
  double value = 0.0;      // worst residual (or worst margin for lower bounds)
  double tolerance = 0.0;
  bool at_least = false;   // pass means value >= tolerance instead of <=
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 42;
  int n = 16;          // size of the random corpus matrices
  double dt = 1e-3;    // RK4 step of the flow checks
  std::map<std::string, double> tolerances;  // by check name

  double tol(const std::string& name, double fallback) const;
};

using CheckFn = std::function<std::vector<CheckResult>(const VerifyOptions&)>;

struct SuiteEntry {
  std::string suite;  // core | flow | cocycle | mfun
  std::string name;
  CheckFn run;
};

/// Every check group, in report order.
const std::vector<SuiteEntry>& suite_registry();

/// Runs `suite` (core, flow, cocycle, mfun or all).  Exceptions inside a check
/// turn into a failed result carrying the message.
std::vector<CheckResult> run_suite(const std::string& suite, const VerifyOptions& opt);

bool all_passed(const std::vector<CheckResult>& results);

void print_summary(std::ostream& out, const std::vector<CheckResult>& results);

// Individual groups (also used by the acceptance driver).
std::vector<CheckResult> check_eig_reconstruction(const VerifyOptions& opt);
std::vector<CheckResult> check_norm_sandwich(const VerifyOptions& opt);
std::vector<CheckResult> check_functional_calculus(const VerifyOptions& opt);
std::vector<CheckResult> check_divided_differences(const VerifyOptions& opt);
std::vector<CheckResult> check_gh_series(const VerifyOptions& opt);
std::vector<CheckResult> check_residue_identity(const VerifyOptions& opt);
std::vector<CheckResult> check_path_equivalence(const VerifyOptions& opt);

std::vector<CheckResult> check_isospectrality(const VerifyOptions& opt);  // also norm drift
std::vector<CheckResult> check_offband(const VerifyOptions& opt);
std::vector<CheckResult> check_field_identities(const VerifyOptions& opt);
std::vector<CheckResult> check_picard_rate(const VerifyOptions& opt);
std::vector<CheckResult> check_picard_rk4(const VerifyOptions& opt);
std::vector<CheckResult> check_time_rescaling(const VerifyOptions& opt);
std::vector<CheckResult> check_approximation(const VerifyOptions& opt);
std::vector<CheckResult> check_continuity(const VerifyOptions& opt);
std::vector<CheckResult> check_commutativity(const VerifyOptions& opt);

std::vector<CheckResult> check_zero_curvature(const VerifyOptions& opt);  // includes the corrupted control
std::vector<CheckResult> check_appendix(const VerifyOptions& opt);
std::vector<CheckResult> check_generator(const VerifyOptions& opt);
std::vector<CheckResult> check_sl_structure(const VerifyOptions& opt);  // also the finite-time intertwining
std::vector<CheckResult> check_joint_cocycle(const VerifyOptions& opt);

std::vector<CheckResult> check_m_functions(const VerifyOptions& opt);  // Herglotz, shift law, tails
std::vector<CheckResult> check_flow_update(const VerifyOptions& opt);

}  // namespace toda
