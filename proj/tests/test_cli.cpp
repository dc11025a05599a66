#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("toda_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  const fs::path o = scratch() / "stdout.txt", e = scratch() / "stderr.txt";
  const std::string cmd = std::string(TODA_CLI) + " " + args + " >" + o.string() + " 2>" + e.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(o);
  r.err = slurp(e);
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string l;
  while (std::getline(in, l)) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(run("").code == 64);
  CHECK(run("bogus").code == 64);
  CHECK(run("flow --nope").code == 64);
  CHECK(run("flow --set nope=1").code == 64);
  CHECK(run("flow -f poly:").code == 64);
  CHECK(run("flow --integrator euler").code == 64);
  CHECK(run("flow --dt -1").code == 64);
  CHECK(run("verify --suite nope").code == 64);
  CHECK(run("flow --config /nonexistent/cfg.txt").code == 74);
  CHECK(run("flow --out /nonexistent/dir/x.csv -t 0.01").code == 74);
  const Run h = run("--help");
  CHECK(h.code == 0);
  CHECK(h.out.find("Exit status") != std::string::npos);
}

TEST_CASE("flow output") {
  const Run a = run("flow --matrix random -n 6 -t 0.05 --dt 0.01");
  REQUIRE(a.code == 0);
  const auto rows = lines(a.out);
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == "t,a_1,a_2,a_3,a_4,a_5,b_1,b_2,b_3,b_4,b_5,b_6,eig_drift,norm_drift,offband_residual");
  CHECK(run("flow --matrix random -n 6 -t 0.05 --dt 0.01").out == a.out);
  CHECK(run("flow --matrix random -n 6 -t 0.05 --dt 0.01 --seed 43").out != a.out);

  // a constant generator does not move anything
  const auto still = lines(run("flow --matrix free -n 5 -f poly:2 -t 0.1 --dt 0.01").out);
  REQUIRE(still.size() == 12);
  for (std::size_t i = 2; i < still.size(); ++i)
    CHECK(still[i].substr(still[i].find(',')) == still[1].substr(still[1].find(',')));

  const fs::path cfg = scratch() / "run.cfg";
  std::ofstream(cfg) << "# flow settings\nmatrix = random\nn = 6\nt = 0.05\ndt = 0.01\n";
  CHECK(run("flow --config " + cfg.string()).out == a.out);

  const fs::path csv = scratch() / "traj.csv";
  CHECK(run("flow --matrix random -n 6 -t 0.05 --dt 0.01 --out " + csv.string()).code == 0);
  CHECK(slurp(csv) == a.out);

  const Run p = run("flow --matrix random -n 6 -t 0.05 --integrator picard");
  CHECK(p.code == 0);
  CHECK(lines(p.out).size() >= 2);
}

TEST_CASE("matrix files") {
  const fs::path m = scratch() / "m.txt";
  REQUIRE(run("gen --matrix random -n 7 --base 0 --out " + m.string()).code == 0);
  const Run a = run("flow --matrix file:" + m.string() + " -t 0.02 --dt 0.01");
  CHECK(a.code == 0);
  CHECK(lines(a.out)[0].rfind("t,a_0,", 0) == 0);
  CHECK(run("flow --matrix file:/nonexistent/m.txt").code == 74);
  std::ofstream(scratch() / "bad.txt") << "N 3 base 0\na: 1\nb: 0 0 0\n";
  CHECK(run("flow --matrix file:" + (scratch() / "bad.txt").string()).code == 64);
}

TEST_CASE("cocycle report") {
  const Run a = run("cocycle --matrix random -n 12 -f poly:0,1");
  REQUIRE(a.code == 0);
  const auto rows = lines(a.out);
  REQUIRE(!rows.empty());
  for (const auto& r : rows) {
    const auto j = nlohmann::json::parse(r);
    CHECK(j.contains("T11_re"));
    CHECK(j.at("det_drift").get<double>() <= 1e-10);
    CHECK(j.at("cocycle_identity_residual").get<double>() <= 1e-6);
  }
  const Run bad = run("cocycle --matrix random -n 12 -f poly:0,1 --corrupt-b 1e-3");
  CHECK(bad.code == 1);
  double worst = 0.0;
  for (const auto& r : lines(bad.out))
    worst = std::max(worst, nlohmann::json::parse(r).at("zc_residual").get<double>());
  CHECK(worst >= 5e-4);
  CHECK(run("cocycle --matrix random -n 12 --site 1").code == 65);
}

TEST_CASE("m-function report") {
  const Run a = run("mfun --matrix free --z 0,2 -f poly:0,1");
  REQUIRE(a.code == 0);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(std::abs(j["m_plus"][1].get<double>() - (std::sqrt(2.0) - 1.0)) <= 1e-12);
  CHECK(std::abs(j["m_plus"][0].get<double>()) <= 1e-12);
  CHECK(j["herglotz"]["m_minus"].get<double>() > 0.0);
  CHECK(run("mfun --matrix random --z 0.3,0.5 --shift 2 -f poly:0,1").code == 0);
  CHECK(run("mfun --matrix free --z 0.5,0").code == 65);
}

TEST_CASE("verify") {
  const Run a = run("verify --suite core --seed 42 -n 8");
  CHECK(a.code == 0);
  CHECK(a.out.find("verify core: PASS") != std::string::npos);
  const Run b = run("verify --suite core --seed 42 -n 8");
  CHECK(b.out == a.out);
  const Run t = run("verify --suite core -n 8 --tol residue_identity=1e-300");
  CHECK(t.code == 1);
  CHECK(t.out.find("verify core: FAIL") != std::string::npos);
  CHECK(run("verify --suite core -n 2").code == 64);
}
