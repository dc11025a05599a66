#include <doctest.h>

#include <set>
#include <sstream>

#include "toda/error.hpp"
#include "toda/verification.hpp"

using namespace toda;

TEST_CASE("registry") {
  std::set<std::string> suites;
  for (const auto& e : suite_registry()) suites.insert(e.suite);
  CHECK(suites == std::set<std::string>{"core", "flow", "cocycle", "mfun"});
  CHECK_THROWS_AS(run_suite("nope", {}), DomainError);
}

TEST_CASE("core suite on a small corpus") {
  VerifyOptions opt;
  opt.n = 8;
  const auto r = run_suite("core", opt);
  CHECK(!r.empty());
  CHECK(all_passed(r));
  std::ostringstream out;
  print_summary(out, r);
  CHECK(out.str().find("residue_identity") != std::string::npos);

  // an impossible tolerance turns the same measurement red
  opt.tolerances["residue_identity"] = 0.0;
  const auto red = run_suite("core", opt);
  CHECK_FALSE(all_passed(red));
  for (const auto& c : red)
    if (c.name != "residue_identity") CHECK(c.passed);
}

TEST_CASE("tolerance lookup") {
  VerifyOptions opt;
  opt.tolerances["a"] = 3.0;
  CHECK(opt.tol("a", 1.0) == 3.0);
  CHECK(opt.tol("b", 1.0) == 1.0);
}
