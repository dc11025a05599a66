#include "cli_config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "toda/corpus.hpp"
#include "toda/error.hpp"
#include "toda/matrix_io.hpp"

namespace toda::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    throw UsageError("setting '" + key + "': not a number: '" + v + "'");
  return x;
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& RunConfig::documented_keys() {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"matrix", "random | free | bump | file:<path>  (matrix source)"},
      {"n", "matrix size for random/free/bump (default 16)"},
      {"base", "label of the first site (default 1; two-sided data uses [-window, window])"},
      {"seed", "seed of the random generator (default 42)"},
      {"a_lo", "lower end of the off-diagonal range (default 0.5)"},
      {"a_hi", "upper end of the off-diagonal range (default 1.5)"},
      {"b_lo", "lower end of the diagonal range (default -1)"},
      {"b_hi", "upper end of the diagonal range (default 1)"},
      {"window", "half-width W of two-sided data on [-W, W] (default 4)"},
      {"strength", "size of the compact perturbation for random two-sided data (default 0.5)"},
      {"tail_a", "free tail off-diagonal (default 1)"},
      {"tail_b", "free tail diagonal (default 0)"},
      {"function", "generator: poly:c0,c1,... | taylor:<exp|cos|sin|cosh|sinh>[:scale[:amp]] | c2:file=<path>"},
      {"integrator", "rk4 | picard (default rk4)"},
      {"t", "time horizon (default 1)"},
      {"dt", "RK4 step (default: chosen from the generator and the matrix)"},
      {"record_every", "keep every k-th step in the trajectory (default 1)"},
      {"diagnostics", "true | false: per-sample drift columns (default true)"},
      {"padding", "truncation padding for two-sided data (default 20)"},
      {"picard_iters", "Picard sweeps per segment (default 40)"},
      {"site", "base site n0 of the cocycle (default: window centre)"},
      {"grid", "cocycle | default  (evaluation grid of the cocycle report)"},
      {"corrupt_b", "add this multiple of diag(1,-1) to B in the zero-curvature check (default 0)"},
      {"z", "spectral parameter re,im for mfun (default 0,2)"},
      {"shift", "shift component of the group element for mfun (default 0)"},
      {"paddings", "padding sweep for mfun (default 10,20,40)"},
      {"suite", "core | flow | cocycle | mfun | all  (verify)"},
  };
  return keys;
}

RunConfig::RunConfig() {
  values_ = {{"matrix", "random"}, {"n", "16"},          {"base", "1"},          {"seed", "42"},
             {"a_lo", "0.5"},      {"a_hi", "1.5"},      {"b_lo", "-1"},         {"b_hi", "1"},
             {"window", "4"},      {"strength", "0.5"},  {"tail_a", "1"},        {"tail_b", "0"},
             {"function", "poly:0,1"}, {"integrator", "rk4"}, {"t", "1"},        {"dt", ""},
             {"record_every", "1"}, {"diagnostics", "true"}, {"padding", "20"}, {"picard_iters", "40"},
             {"site", ""},         {"grid", "cocycle"},  {"corrupt_b", "0"},     {"z", "0,2"},
             {"shift", "0"},       {"paddings", "10,20,40"}, {"suite", "all"}};
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  parse_text(ss.str(), path);
}

void RunConfig::parse_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void RunConfig::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!values_.count(key)) throw UsageError("unknown setting '" + key + "'");
  values_[key] = value;
}

bool RunConfig::has(const std::string& key) const {
  const auto it = values_.find(key);
  return it != values_.end() && !it->second.empty();
}

std::string RunConfig::str(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("unknown setting '" + key + "'");
  return it->second;
}

double RunConfig::num(const std::string& key) const { return to_double(key, str(key)); }

long RunConfig::integer(const std::string& key) const {
  const double x = num(key);
  if (x != static_cast<double>(static_cast<long>(x))) throw UsageError("setting '" + key + "' must be an integer");
  return static_cast<long>(x);
}

bool RunConfig::flag(const std::string& key) const {
  const std::string v = str(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError("setting '" + key + "' must be true or false");
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : split(str(key), ',')) out.push_back(to_double(key, s));
  return out;
}

std::vector<int> RunConfig::integers(const std::string& key) const {
  std::vector<int> out;
  for (double x : numbers(key)) {
    if (x != static_cast<double>(static_cast<int>(x))) throw UsageError("setting '" + key + "' must list integers");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

std::uint64_t RunConfig::seed() const {
  const std::string v = str("seed");
  errno = 0;
  char* end = nullptr;
  const unsigned long long s = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || v[0] == '-' || end != v.c_str() + v.size() || errno == ERANGE)
    throw UsageError("seed must be a non-negative integer");
  return static_cast<std::uint64_t>(s);
}

ScalarFunction RunConfig::function() const {
  try {
    return parse_function(str("function"));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

bool RunConfig::matrix_is_extended() const {
  const std::string m = str("matrix");
  if (m.rfind("file:", 0) == 0) return read_matrix_file(m.substr(5)).extended();
  return false;
}

JacobiMatrix RunConfig::matrix() const {
  const std::string m = str("matrix");
  const long n = integer("n");
  const int base = static_cast<int>(integer("base"));
  if (m.rfind("file:", 0) == 0) {
    try {
      return read_matrix_file(m.substr(5)).matrix;
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (n < 1) throw UsageError("n must be >= 1");
  if (m == "random") {
    RandomJacobiSpec spec;
    spec.size = static_cast<int>(n);
    spec.index_base = base;
    spec.a_lo = num("a_lo");
    spec.a_hi = num("a_hi");
    spec.b_lo = num("b_lo");
    spec.b_hi = num("b_hi");
    if (!(spec.a_lo > 0.0) || spec.a_hi < spec.a_lo || spec.b_hi < spec.b_lo)
      throw UsageError("coefficient ranges must satisfy 0 < a_lo <= a_hi and b_lo <= b_hi");
    return random_jacobi(seed(), spec);
  }
  if (m == "free") return JacobiMatrix::free(static_cast<int>(n), base, num("tail_a"), num("tail_b"));
  if (m == "bump") return bump_jacobi(static_cast<int>(n), base);
  throw UsageError("matrix must be random, free, bump or file:<path>");
}

ExtendedJacobi RunConfig::extended_matrix() const {
  const std::string m = str("matrix");
  const long W = integer("window");
  if (m.rfind("file:", 0) == 0) {
    MatrixFile mf = [&] {
      try {
        return read_matrix_file(m.substr(5));
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }();
    if (!mf.extended()) return ExtendedJacobi(mf.matrix, num("tail_a"), num("tail_b"));
    return mf.as_extended();
  }
  if (W < 1) throw UsageError("window must be >= 1");
  const double ta = num("tail_a"), tb = num("tail_b");
  if (m == "free") return ExtendedJacobi::free(static_cast<int>(W), ta, tb);
  if (m == "random") {
    const ExtendedJacobi X = random_compact_perturbation(seed(), static_cast<int>(W), num("strength"));
    if (ta == 1.0 && tb == 0.0) return X;
    // rescale the unit background to the requested tail
    std::vector<double> a = X.window().off_diagonal(), b = X.window().diagonal();
    for (double& v : a) v *= ta;
    for (double& v : b) v = ta * v + tb;
    return ExtendedJacobi(JacobiMatrix(a, b, X.first_site()), ta, tb);
  }
  if (m == "bump") return ExtendedJacobi(bump_jacobi(static_cast<int>(2 * W + 1), static_cast<int>(-W)), 1.0, 0.0);
  throw UsageError("matrix must be random, free, bump or file:<path>");
}

FlowConfig RunConfig::flow_config() const {
  FlowConfig c;
  const std::string integ = str("integrator");
  if (integ == "rk4")
    c.integrator = Integrator::RK4;
  else if (integ == "picard")
    c.integrator = Integrator::Picard;
  else
    throw UsageError("integrator must be rk4 or picard");
  c.t = num("t");
  if (!(c.t >= 0.0)) throw UsageError("t must be >= 0");
  if (has("dt")) {
    c.dt = num("dt");
    if (!(*c.dt > 0.0)) throw UsageError("dt must be > 0");
  }
  c.record_every = static_cast<int>(integer("record_every"));
  if (c.record_every < 1) throw UsageError("record_every must be >= 1");
  c.diagnostics = flag("diagnostics");
  c.padding = static_cast<int>(integer("padding"));
  if (c.padding < 0) throw UsageError("padding must be >= 0");
  c.picard_max_iters = static_cast<int>(integer("picard_iters"));
  if (c.picard_max_iters < 1) throw UsageError("picard_iters must be >= 1");
  return c;
}

CocycleConfig RunConfig::cocycle_config() const {
  CocycleConfig c;
  c.flow = flow_config();
  c.flow.integrator = Integrator::RK4;
  c.dt = c.flow.dt;
  return c;
}

Complex RunConfig::z() const {
  const auto v = numbers("z");
  if (v.size() != 2) throw UsageError("z must be given as re,im");
  return {v[0], v[1]};
}

}  // namespace toda::cli
