#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "cli_config.hpp"
#include "reports.hpp"
#include "toda/cocycle.hpp"
#include "toda/error.hpp"
#include "toda/lax_flow.hpp"
#include "toda/m_function.hpp"
#include "toda/matrix_io.hpp"
#include "toda/verification.hpp"

using namespace toda;
using toda::cli::RunConfig;
using toda::cli::UsageError;

namespace {

enum Exit { kPass = 0, kInvariant = 1, kFlow = 2, kUsage = 64, kDomain = 65, kIo = 74 };

struct Globals {
  std::string config;
  std::string seed;
  std::string out;
  std::vector<std::string> tol;
  std::vector<std::string> set;
  bool quiet = false;
};

// Subcommand flags land here as strings and are applied over the config.
using Overrides = std::vector<std::pair<std::string, std::string>>;

std::map<std::string, double> parse_tolerances(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--tol expects name=value, got '" + item + "'");
    char* end = nullptr;
    const std::string v = item.substr(eq + 1);
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !(x > 0.0))
      throw UsageError("--tol " + item + ": tolerance must be a positive number");
    out[item.substr(0, eq)] = x;
  }
  return out;
}

double tolerance(const std::map<std::string, double>& tol, const std::string& name, double fallback) {
  const auto it = tol.find(name);
  return it == tol.end() ? fallback : it->second;
}

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw IoError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void close() {
    if (file_) {
      file_->close();
      if (file_->fail()) throw IoError("write to output file failed");
    } else {
      std::cout.flush();
      if (std::cout.fail()) throw IoError("write to stdout failed");
    }
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

RunConfig build_config(const Globals& g, const Overrides& local) {
  RunConfig c;
  if (!g.config.empty()) c.load_file(g.config);
  for (const auto& s : g.set) c.set(s);
  for (const auto& [k, v] : local) c.set(k, v);
  if (!g.seed.empty()) c.set("seed", g.seed);
  return c;
}

void note(const Globals& g, const std::string& msg) {
  if (!g.quiet) std::cerr << msg << '\n';
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

int cmd_flow(const Globals& g, const Overrides& local) {
  const RunConfig c = build_config(g, local);
  const ScalarFunction f = c.function();
  const FlowConfig fc = c.flow_config();
  JacobiMatrix J = c.matrix();
  if (c.matrix_is_extended()) {
    const ExtendedJacobi X = c.extended_matrix();
    J = X.truncate(X.first_site() - fc.padding, X.last_site() + fc.padding);
  }
  const Trajectory tr = flow(J, f, fc);
  Output out(g.out);
  write_trajectory_csv(out.stream(), tr);
  out.close();
  if (fc.diagnostics)
    note(g, "flow: " + std::to_string(tr.snapshots.size()) + " samples, max eig drift " + sci(tr.max_eig_drift()) +
                ", max norm drift " + sci(tr.max_norm_drift()) + ", max off-band " + sci(tr.max_offband()));
  return kPass;
}

int cmd_cocycle(const Globals& g, const Overrides& local) {
  const RunConfig c = build_config(g, local);
  const auto tol = parse_tolerances(g.tol);
  const ScalarFunction f = c.function();
  const JacobiMatrix J = c.matrix();
  const int n0 = c.has("site") ? static_cast<int>(c.integer("site")) : default_base(J);
  if (!J.has_site(n0 - 1) || !J.has_site(n0 + 3))
    throw DomainError("cocycle: base site " + std::to_string(n0) + " needs the sites " + std::to_string(n0 - 1) +
                      ".." + std::to_string(n0 + 3));
  const std::string gridname = c.str("grid");
  std::vector<Complex> grid;
  if (gridname == "cocycle")
    grid = cocycle_grid(J);
  else if (gridname == "default")
    grid = default_grid(J);
  else
    throw UsageError("grid must be cocycle or default");
  const double t = c.flow_config().t;
  const CocycleConfig cc = c.cocycle_config();
  const double corrupt = c.num("corrupt_b");

  const CocycleRun r0 = integrate_cocycle(J, f, t, n0, grid, cc);
  const CocycleRun r1 = integrate_cocycle(J, f, t, n0 + 1, grid, cc);
  const ZeroCurvature zc = zero_curvature_residual(J, f, n0, grid, corrupt);
  const JacobiMatrix& Jt = r0.trajectory.final();

  const double tol_det = tolerance(tol, "sl_determinant", 1e-10);
  const double tol_real = tolerance(tol, "sl_real_axis", 1e-10);
  const double tol_zc = tolerance(tol, "zero_curvature", 1e-8);
  const double tol_id = tolerance(tol, "finite_time_intertwining", 1e-6);

  Output out(g.out);
  double max_det = 0.0, max_real = 0.0, max_id = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    cli::CocycleRecord rec;
    rec.z = grid[p];
    rec.T = r0.T.values[p];
    rec.det_drift = std::abs(rec.T.determinant() - 1.0);
    rec.zc_residual = zc.residuals[p];
    rec.cocycle_identity_residual =
        norm2x2(r1.T.values[p] * transfer_matrix(J, n0, grid[p]) - transfer_matrix(Jt, n0, grid[p]) * rec.T);
    max_det = std::max(max_det, rec.det_drift);
    max_id = std::max(max_id, rec.cocycle_identity_residual);
    if (grid[p].imag() == 0.0) max_real = std::max(max_real, rec.T.imag().cwiseAbs().maxCoeff());
    cli::write_cocycle_line(out.stream(), rec);
  }
  out.close();
  const bool pass = max_det <= tol_det && max_real <= tol_real && zc.max_residual <= tol_zc * zc.scale &&
                    max_id <= tol_id;
  note(g, "cocycle: zc_residual " + sci(zc.max_residual) + " (bound " + sci(tol_zc * zc.scale) + "), det drift " +
              sci(max_det) + ", real-axis residue " + sci(max_real) + ", cocycle identity " + sci(max_id) +
              (pass ? "  PASS" : "  FAIL"));
  return pass ? kPass : kInvariant;
}

int cmd_mfun(const Globals& g, const Overrides& local) {
  const RunConfig c = build_config(g, local);
  const auto tol = parse_tolerances(g.tol);
  const ScalarFunction f = c.function();
  const ExtendedJacobi X = c.extended_matrix();
  const Complex z = c.z();
  cli::MReport rep;
  rep.m = m_functions(X, z);
  rep.shift = static_cast<int>(c.integer("shift"));
  rep.shift_residual = shift_law_residual(X, rep.shift, z);
  rep.function = f.describe();
  rep.paddings = c.integers("paddings");
  if (rep.paddings.empty()) throw UsageError("paddings must list at least one value");
  const double t = c.flow_config().t;
  const FlowUpdate up = flow_update_check(X, GroupElement{f.scaled(t), rep.shift}, z, rep.paddings, c.cocycle_config());
  rep.update_residuals = up.residuals;
  rep.update_herglotz = up.herglotz_margin;

  Output out(g.out);
  cli::write_m_report(out.stream(), rep);
  out.close();

  const double tol_shift = tolerance(tol, "m_shift_law", 1e-10);
  const double tol_up = tolerance(tol, "flow_update_residual", 1e-6);
  const double slack = tolerance(tol, "flow_update_monotone", 1e-10);
  bool monotone = true;
  for (std::size_t i = 1; i < up.residuals.size(); ++i)
    monotone = monotone && up.residuals[i] <= up.residuals[i - 1] + slack;
  const bool pass = rep.m.herglotz_margin() > 0.0 && up.herglotz_margin > 0.0 && rep.shift_residual <= tol_shift &&
                    monotone && up.residuals.back() <= tol_up;
  note(g, "mfun: shift residual " + sci(rep.shift_residual) + ", update residual at P=" +
              std::to_string(rep.paddings.back()) + " " + sci(up.residuals.back()) +
              (monotone ? "" : " (not monotone in P)") + ", Herglotz margin " +
              sci(std::min(rep.m.herglotz_margin(), up.herglotz_margin)) + (pass ? "  PASS" : "  FAIL"));
  return pass ? kPass : kInvariant;
}

int cmd_verify(const Globals& g, const Overrides& local) {
  const RunConfig c = build_config(g, local);
  VerifyOptions opt;
  opt.seed = c.seed();
  opt.n = static_cast<int>(c.integer("n"));
  if (opt.n < 4) throw UsageError("verify needs n >= 4");
  if (c.has("dt")) opt.dt = c.num("dt");
  if (!(opt.dt > 0.0)) throw UsageError("dt must be > 0");
  opt.tolerances = parse_tolerances(g.tol);
  const std::string suite = c.str("suite");
  if (suite != "all" && suite != "core" && suite != "flow" && suite != "cocycle" && suite != "mfun")
    throw UsageError("suite must be core, flow, cocycle, mfun or all");
  const auto results = run_suite(suite, opt);
  const bool pass = all_passed(results);
  std::ostringstream table;
  print_summary(table, results);
  if (!g.quiet) std::cout << table.str();
  if (!g.out.empty()) {
    Output out(g.out);
    out.stream() << table.str();
    out.close();
  }
  std::size_t failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << "verify " << suite << ": " << (pass ? "PASS" : "FAIL") << " (" << results.size() - failed << "/"
            << results.size() << " checks passed)\n";
  return pass ? kPass : kInvariant;
}

int cmd_gen(const Globals& g, const Overrides& local, bool extended) {
  const RunConfig c = build_config(g, local);
  Output out(g.out);
  if (extended)
    write_matrix(out.stream(), c.extended_matrix());
  else
    write_matrix(out.stream(), c.matrix());
  out.close();
  return kPass;
}

std::string help_footer() {
  std::ostringstream os;
  os << "\nSettings (--config file lines or --set key=value):\n";
  for (const auto& [k, d] : RunConfig::documented_keys()) os << "  " << k << std::string(14 - std::min<std::size_t>(k.size(), 13), ' ') << d << '\n';
  os << "\nOutputs (all numbers printed with 17 significant digits):\n"
        "  flow     CSV  t,a_<n>...,b_<n>...,eig_drift,norm_drift,offband_residual\n"
        "  cocycle  JSON lines  z_re,z_im,T11_re,T11_im,T12_re,T12_im,T21_re,T21_im,T22_re,T22_im,\n"
        "                       det_drift,zc_residual,cocycle_identity_residual\n"
        "  mfun     JSON  z,m_plus,m_minus ([re,im]), herglotz{m_plus,m_minus}, steps{right,left},\n"
        "                 shift, shift_residual, function, update{paddings,residuals,herglotz_margin}\n"
        "  verify   table of check, value, bound, status\n"
        "\nExit status: 0 pass, 1 invariant failure, 2 flow failure, 64 usage, 65 domain, 74 I/O.\n";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Toda flows on Jacobi matrices: flows, cocycles, m-functions and invariant checks."};
  app.footer(help_footer());
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config, "flat key = value settings file");
  app.add_option("--seed", g.seed, "random seed (overrides the config)");
  app.add_option("--out", g.out, "output path (default stdout)");
  app.add_option("--tol", g.tol, "tolerance override name=value (repeatable)")->take_all();
  app.add_option("--set", g.set, "setting override key=value (repeatable)")->take_all();
  app.add_flag("--quiet", g.quiet, "suppress summaries on stderr");

  Overrides local;
  auto bind = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(flag, [&local, key](const std::string& v) { local.emplace_back(key, v); },
                                          help);
  };
  auto common = [&](CLI::App* sub) {
    bind(sub, "--matrix", "matrix", "random | free | bump | file:<path>");
    bind(sub, "-f,--function", "function", "generator spec, e.g. poly:0,1 or taylor:exp:0.25");
    bind(sub, "-n,--n", "n", "matrix size");
    bind(sub, "-t,--t", "t", "time horizon");
    bind(sub, "--dt", "dt", "RK4 step");
  };

  auto* flow_cmd = app.add_subcommand("flow", "integrate a flow and write the trajectory CSV");
  common(flow_cmd);
  bind(flow_cmd, "--integrator", "integrator", "rk4 | picard");
  bind(flow_cmd, "--record-every", "record_every", "keep every k-th step");

  auto* coc_cmd = app.add_subcommand("cocycle", "integrate the cocycle and write the JSON-lines report");
  common(coc_cmd);
  bind(coc_cmd, "--site", "site", "base site n0");
  bind(coc_cmd, "--grid", "grid", "cocycle | default");
  bind(coc_cmd, "--corrupt-b", "corrupt_b", "perturb B by eps*diag(1,-1) in the zero-curvature check");

  auto* mf_cmd = app.add_subcommand("mfun", "m-functions of two-sided data and their update laws");
  common(mf_cmd);
  bind(mf_cmd, "--z", "z", "spectral parameter re,im");
  bind(mf_cmd, "--shift", "shift", "shift component of the group element");
  bind(mf_cmd, "--paddings", "paddings", "padding sweep, e.g. 10,20,40");
  bind(mf_cmd, "--window", "window", "half-width of generated two-sided data");

  auto* ver_cmd = app.add_subcommand("verify", "run the invariant suites");
  bind(ver_cmd, "--suite", "suite", "core | flow | cocycle | mfun | all");
  bind(ver_cmd, "-n,--n", "n", "size of the corpus matrices");
  bind(ver_cmd, "--dt", "dt", "RK4 step of the flow checks");

  bool gen_extended = false;
  auto* gen_cmd = app.add_subcommand("gen", "write a matrix file");
  bind(gen_cmd, "--matrix", "matrix", "random | free | bump");
  bind(gen_cmd, "-n,--n", "n", "matrix size");
  bind(gen_cmd, "--base", "base", "label of the first site");
  bind(gen_cmd, "--window", "window", "half-width of two-sided data");
  gen_cmd->add_flag("--extended", gen_extended, "two-sided data with a free tail");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*flow_cmd) return cmd_flow(g, local);
    if (*coc_cmd) return cmd_cocycle(g, local);
    if (*mf_cmd) return cmd_mfun(g, local);
    if (*ver_cmd) return cmd_verify(g, local);
    if (*gen_cmd) return cmd_gen(g, local, gen_extended);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const FlowError& e) {
    std::cerr << "flow error at t=" << e.time() << ": " << e.what() << '\n';
    return kFlow;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << '\n';
    return kFlow;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvariant;
  }
  return kUsage;
}
