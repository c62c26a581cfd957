// orlicz: command-line front end.
//
//   orlicz inspect  --young <spec>
//   orlicz solve    --young <spec> --mesh <spec> --alpha <a>
//   orlicz nonlocal --young <spec> --interval L --nodes N --s <s> --alpha <a>
//   orlicz sweep    --young <spec> --mesh <spec> --alpha-min --alpha-max --per-decade
//                   [--nonlocal --s] [--check bounds,derivative,limits,decay]
//
// <spec> is inline JSON or a JSON file. Exit codes: 0 success, 1 a check
// failed or a solve did not converge, 2 usage / configuration / hypothesis
// errors.

#include <CLI11.hpp>
#include <Eigen/Core>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "orlicz/config.hpp"
#include "orlicz/nonlocal.hpp"
#include "orlicz/sweep.hpp"

#ifndef ORLICZ_VERSION
#define ORLICZ_VERSION "0.0.0"
#endif

using nlohmann::json;
using namespace orlicz;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite numbers become null in JSON.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

void emit_json(const json& j, const std::string& path) {
  write_text(path.empty() ? "-" : path, j.dump(2) + "\n");
}

int env_jobs() {
  if (const char* s = std::getenv("ORLICZ_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end != s && *end == '\0' && v > 0) return static_cast<int>(v);
    throw UsageError("ORLICZ_JOBS must be a positive integer");
  }
  return 1;
}

struct Common {
  std::string config;
  std::string young;
  std::string mesh;
  std::optional<double> tol;
  std::optional<int> max_iter;
  std::optional<int> restarts;
  std::optional<std::uint64_t> seed;
  std::string csv;
  std::string json_out;

  RunConfig rc;

  void add_solver_flags(CLI::App* app) {
    app->add_option("--tol", tol, "normalized weak residual tolerance")->check(CLI::PositiveNumber);
    app->add_option("--max-iter", max_iter, "iteration cap per start")->check(CLI::PositiveNumber);
    app->add_option("--restarts", restarts, "number of starts")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "seed of the random starts");
  }

  /// Merges the config file with the flags (flags win).
  void resolve() {
    if (!config.empty()) rc = parse_run_config(load_json(config));
    if (tol) rc.solver.tol = *tol;
    if (max_iter) rc.solver.max_iter = *max_iter;
    if (restarts) rc.solver.restarts = *restarts;
    if (seed) rc.solver.seed = *seed;
    if (csv.empty()) csv = rc.output.csv;
    if (json_out.empty()) json_out = rc.output.json;
  }

  json young_json() const {
    if (!young.empty()) return load_json(young);
    if (rc.young) return *rc.young;
    throw ConfigError("young", "missing (use --young or the config file)");
  }
  json mesh_json() const {
    if (!mesh.empty()) return load_json(mesh);
    if (rc.mesh) return *rc.mesh;
    throw ConfigError("mesh", "missing (use --mesh or the config file)");
  }
};

json mesh_summary(const Mesh& m) {
  return {{"dim", m.dim()},
          {"extents", m.extents()},
          {"counts", m.counts()},
          {"holes", m.holes().size()},
          {"interior_nodes", m.interior_count()},
          {"inner_radius", m.inner_radius()}};
}

json result_json(const YoungFunction& F, const MinimizerResult& r, double alpha) {
  return {{"young", F.name()},
          {"alpha", alpha},
          {"achieved_alpha", r.alpha},
          {"energy", r.energy},
          {"quotient", r.energy / alpha},
          {"lambda", r.lambda},
          {"residual", r.residual},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"restarts_used", r.restarts_used}};
}

// ---------------------------------------------------------------------------

int run_inspect(const Common& c) {
  const YoungFunction F = parse_young(c.young_json());
  json j{{"young", F.name()}, {"family", to_string(F.family())}, {"params", F.params()}};
  json d2j = json::object();
  json mzj = json::object();
  json exps = json::object();
  std::string text = "Young function " + F.name() + "\n";
  char line[256];
  std::snprintf(line, sizeof line, "  %-9s %-7s %-12s %-12s %-20s %s\n", "endpoint", "delta2",
                "p_index", "C", "matuszewska", "exponent");
  text += line;
  for (Endpoint e : {Endpoint::Zero, Endpoint::Infinity}) {
    const Delta2Report d = delta2_report(F, e);
    const MatuszewskaEstimate mz = matuszewska_exponent(F, e);
    const std::string key = e == Endpoint::Zero ? "0" : "inf";
    d2j[to_string(e)] = {{"holds", d.holds},
                         {"p_index", d.p_divergent ? json(nullptr) : num(d.p_index)},
                         {"p_divergent", d.p_divergent},
                         {"C", d.C_divergent ? json(nullptr) : num(d.C_constant)},
                         {"doubling_sup", d.doubling_divergent ? json(nullptr) : num(d.doubling_sup)},
                         {"threshold", d.threshold},
                         {"skipped_points", d.skipped_points}};
    mzj[to_string(e)] = {{"regime", to_string(mz.regime)},
                         {"exponent", mz.exponent_valid ? num(mz.exponent) : json(nullptr)},
                         {"max_fit_deviation", num(mz.max_fit_deviation)}};
    exps[key] = mz.exponent_valid ? num(mz.exponent) : json(nullptr);
    std::snprintf(line, sizeof line, "  %-9s %-7s %-12s %-12s %-20s %s\n", to_string(e).c_str(),
                  d.holds ? "yes" : "no",
                  d.p_divergent ? "divergent" : std::to_string(d.p_index).c_str(),
                  d.C_divergent ? "divergent" : std::to_string(d.C_constant).c_str(),
                  to_string(mz.regime).c_str(),
                  mz.exponent_valid ? std::to_string(mz.exponent).c_str() : "-");
    text += line;
  }
  const double p = global_p_index(F);
  j["delta2"] = d2j;
  j["matuszewska"] = mzj;
  j["exponents"] = exps;
  j["p_index"] = num(p);
  text += "  global p index: " + (std::isfinite(p) ? std::to_string(p) : std::string("none")) + "\n";
  if (c.json_out == "-") {
    emit_json(j, "-");
  } else {
    std::cout << text;
    if (!c.json_out.empty()) emit_json(j, c.json_out);
  }
  return 0;
}

int run_solve(const Common& c, double alpha) {
  const YoungFunction F = parse_young(c.young_json());
  const Mesh m = parse_mesh(c.mesh_json());
  const MinimizerResult r = solve_E(F, m, alpha, c.rc.solver);
  json j = result_json(F, r, alpha);
  j["mesh"] = mesh_summary(m);
  emit_json(j, c.json_out);
  if (!c.csv.empty()) {
    std::ofstream out(c.csv);
    if (!out) throw UsageError("cannot write " + c.csv);
    write_field_csv(out, m, r.u);
  }
  return r.converged ? 0 : 1;
}

struct NonlocalFlags {
  std::optional<double> interval;
  std::optional<int> nodes;
  double s = 0.5;
  double rcut = 0.0;
  bool no_tail = false;

  NonlocalMesh build(const Common& c) const {
    double L = 0.0;
    int n = 0;
    if (interval && nodes) {
      L = *interval;
      n = *nodes;
    } else if (!c.mesh.empty() || c.rc.mesh) {
      const Mesh m = parse_mesh(c.mesh_json());
      if (m.dim() != 1) throw ConfigError("mesh.dim", "the nonlocal problem is one-dimensional");
      L = interval.value_or(m.extents()[0]);
      n = nodes.value_or(static_cast<int>(m.interior_count()));
    } else {
      throw UsageError("nonlocal: give --interval and --nodes (or a 1D --mesh)");
    }
    try {
      return NonlocalMesh(L, n, s, rcut, !no_tail);
    } catch (const ContractError& e) {
      throw ConfigError("nonlocal", e.what());
    }
  }
};

int run_nonlocal(const Common& c, const NonlocalFlags& nf, double alpha) {
  const YoungFunction F = parse_young(c.young_json());
  const NonlocalMesh nm = nf.build(c);
  const MinimizerResult r = solve_Es(F, nm, alpha, c.rc.solver);
  json j = result_json(F, r, alpha);
  j["mesh"] = {{"interval", nm.length()}, {"nodes", nm.nodes()},   {"s", nm.order()},
               {"rcut", nm.rcut()},       {"halo_nodes", nm.halo_nodes()},
               {"tail_correction", nm.tail_correction()}};
  j["tail_energy"] = tail_energy_s(F, r.u, nm);
  emit_json(j, c.json_out);
  if (!c.csv.empty()) {
    std::ofstream out(c.csv);
    if (!out) throw UsageError("cannot write " + c.csv);
    char buf[96];
    out << "x,u\n";
    out << "0,0\n";
    for (int i = 0; i < nm.nodes(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", (i + 1) * nm.spacing(), r.u[i]);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g,0\n", nm.length());
    out << buf;
  }
  return r.converged ? 0 : 1;
}

struct SweepFlags {
  std::optional<double> alpha_min;
  std::optional<double> alpha_max;
  std::optional<int> per_decade;
  std::string checks;
  std::string plot;
  bool nonlocal = false;
  bool no_warm_start = false;
  std::optional<int> jobs;
  NonlocalFlags nl;
};

json bounds_json(const BoundsReport& b, bool negative_control) {
  return {{"passed", b.passed},          {"p", b.p},
          {"E1", b.E1},                  {"checked", b.checked},
          {"failed_energy", b.failed_energy}, {"failed_eigenvalue", b.failed_eigenvalue},
          {"failed_quotient", b.failed_quotient}, {"negative_control_fails", negative_control}};
}

json derivative_json(const DerivativeReport& d) {
  return {{"passed", d.passed},
          {"median_gap", num(d.median_gap)},
          {"max_gap", num(d.max_gap)},
          {"tolerance", d.tolerance},
          {"samples", d.samples},
          {"sandwich_violations", d.sandwich_violations},
          {"lipschitz_violations", d.lipschitz_violations},
          {"monotone_violations", d.monotone_violations},
          {"quotient_samples", d.quotient_samples},
          {"quotient_violations", d.quotient_violations},
          {"quotient_median_gap", num(d.quotient_median_gap)},
          {"sup_quotient", d.sup_quotient}};
}

int run_sweep_cmd(const Common& c, const SweepFlags& sf) {
  const YoungFunction F = parse_young(c.young_json());
  const SweepConfig& sc = c.rc.sweep;
  const double amin = sf.alpha_min.value_or(sc.alpha_min);
  const double amax = sf.alpha_max.value_or(sc.alpha_max);
  const int per = sf.per_decade.value_or(sc.per_decade);
  if (!(amax > amin)) throw UsageError("sweep: need alpha-max > alpha-min");
  const std::vector<std::string> checks = sf.checks.empty() ? sc.checks : parse_checks(sf.checks);
  const auto wants = [&](const char* k) {
    return std::find(checks.begin(), checks.end(), k) != checks.end();
  };

  SweepOptions opts;
  opts.solve = c.rc.solver;
  if (!c.restarts && !c.rc.restarts_set) opts.solve.restarts = 1;
  opts.warm_start = sc.warm_start && !sf.no_warm_start;
  opts.jobs = sf.jobs ? *sf.jobs : (sc.jobs > 1 ? sc.jobs : env_jobs());
  const std::vector<double> grid = numeric::geometric_grid(amin, amax, per);

  std::optional<Mesh> mesh;
  std::optional<NonlocalMesh> nmesh;
  json mj;
  if (sf.nonlocal) {
    nmesh = sf.nl.build(c);
    mj = {{"interval", nmesh->length()}, {"nodes", nmesh->nodes()}, {"s", nmesh->order()},
          {"rcut", nmesh->rcut()}};
  } else {
    mesh = parse_mesh(c.mesh_json());
    mj = mesh_summary(*mesh);
  }

  // Hypotheses of the requested checks, before any solve.
  std::vector<Endpoint> decay_ends;
  if (wants("decay")) {
    if (sf.nonlocal) throw PreconditionError("decay check: not available for the nonlocal problem");
    if (!(mesh->inner_radius() > 1.0)) {
      throw PreconditionError("decay check: the domain needs inner radius > 1 (got " +
                              std::to_string(mesh->inner_radius()) + ")");
    }
    for (Endpoint e : {Endpoint::Zero, Endpoint::Infinity}) {
      const Delta2Report d = delta2_report(F, e);
      if (d.p_divergent || d.doubling_divergent || d.C_divergent) {
        if ((e == Endpoint::Zero && amin < 1.0) || (e == Endpoint::Infinity && amax > 1.0)) {
          decay_ends.push_back(e);
        }
      }
    }
    if (decay_ends.empty()) {
      throw PreconditionError("decay check: A satisfies the doubling condition at every endpoint the grid approaches");
    }
  }
  const double p = global_p_index(F);
  if (wants("bounds") && !std::isfinite(p)) {
    throw PreconditionError("bounds check: A does not satisfy the doubling condition globally");
  }
  if (wants("bounds") && !(amin <= 1.0 && amax >= 1.0)) {
    throw PreconditionError("bounds check: the grid must contain alpha = 1");
  }

  std::vector<SweepRecord> recs =
      sf.nonlocal ? run_sweep(F, *nmesh, grid, opts) : run_sweep(F, *mesh, grid, opts);

  json report{{"young", F.name()},
              {"mesh", mj},
              {"nonlocal", sf.nonlocal},
              {"grid", {{"alpha_min", amin}, {"alpha_max", amax}, {"per_decade", per},
                        {"points", grid.size()}}},
              {"warm_start", opts.warm_start}};
  int converged = 0;
  for (const auto& r : recs) converged += r.converged;
  report["converged"] = converged;
  bool ok = converged == static_cast<int>(recs.size());
  json cj = json::object();

  if (wants("bounds")) {
    const BoundsReport b = check_bounds(recs, p);
    const bool neg = negative_control_fails(recs, p);
    cj["bounds"] = bounds_json(b, neg);
    ok = ok && b.passed && neg;
  }
  if (wants("derivative")) {
    const DerivativeReport d = check_derivative(recs);
    cj["derivative"] = derivative_json(d);
    ok = ok && d.passed;
  }
  if (wants("limits")) {
    json lj = json::object();
    for (Endpoint e : {Endpoint::Zero, Endpoint::Infinity}) {
      try {
        const LimitEstimate L = sf.nonlocal ? estimate_limits(F, *nmesh, recs, e, opts.solve)
                                            : estimate_limits(F, *mesh, recs, e, opts.solve);
        lj[to_string(e)] = {{"passed", L.passed},         {"exponent", L.exponent},
                            {"last_quotient", L.last_quotient}, {"extrapolated", L.extrapolated},
                            {"reference", L.reference},   {"gap", L.gap},
                            {"tolerance", L.tolerance}};
        ok = ok && L.passed;
      } catch (const PreconditionError& err) {
        lj[to_string(e)] = {{"deferred", err.what()}};
      }
    }
    lj["note"] =
        "the limit is checked two-sided (last samples and their extrapolation), not only as a limsup";
    cj["limits"] = lj;
  }
  if (wants("decay")) {
    json dj = json::object();
    for (Endpoint e : decay_ends) {
      const DecayReport d = check_decay(F, *mesh, recs, e);
      dj[to_string(e)] = {{"passed", d.passed},
                          {"inner_radius", d.inner_radius},
                          {"quotient_at_one", d.quotient_at_one},
                          {"final_quotient", d.final_quotient},
                          {"ratio", d.ratio},
                          {"fraction", d.fraction},
                          {"decade_samples", d.decade_samples},
                          {"strictly_decreasing", d.strictly_decreasing}};
      ok = ok && d.passed;
    }
    cj["decay"] = dj;
  }
  report["checks"] = cj;
  report["passed"] = ok;

  if (!c.csv.empty()) {
    std::ofstream out(c.csv);
    if (!out) throw UsageError("cannot write " + c.csv);
    write_sweep_csv(out, recs);
  }
  const std::string plot = sf.plot.empty() ? c.rc.output.plot : sf.plot;
  if (!plot.empty()) {
    if (c.csv.empty()) throw UsageError("--plot needs --csv");
    write_text(plot, plot_script(c.csv, F.name()));
  }
  emit_json(report, c.json_out);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orlicz eigenvalue problems: energies, eigenvalues and Young-function calculus"};
  app.require_subcommand(0, 1);
  bool version = false;
  app.add_flag("--version", version, "print version and build information");

  Common c;
  const auto common = [&](CLI::App* sub, bool mesh) {
    sub->add_option("--config", c.config, "JSON run configuration");
    sub->add_option("--young", c.young, "Young function spec (JSON text or file)");
    if (mesh) sub->add_option("--mesh", c.mesh, "mesh spec (JSON text or file)");
    sub->add_option("--json", c.json_out, "write the JSON report here ('-' for stdout)");
  };

  CLI::App* inspect = app.add_subcommand("inspect", "Delta_2 and Matuszewska report of a Young function");
  common(inspect, false);

  double alpha = 1.0;
  CLI::App* solve = app.add_subcommand("solve", "minimize int A(|grad u|) subject to int A(|u|) = alpha");
  common(solve, true);
  solve->add_option("--alpha", alpha, "constraint level")->required()->check(CLI::PositiveNumber);
  solve->add_option("--csv", c.csv, "write the minimizer as CSV");
  c.add_solver_flags(solve);

  NonlocalFlags nf;
  CLI::App* nonlocal = app.add_subcommand("nonlocal", "fractional problem on an interval");
  common(nonlocal, true);
  nonlocal->add_option("--interval", nf.interval, "interval length L")->check(CLI::PositiveNumber);
  nonlocal->add_option("--nodes", nf.nodes, "interior nodes N")->check(CLI::PositiveNumber);
  nonlocal->add_option("--s", nf.s, "fractional order in (0, 1)");
  nonlocal->add_option("--alpha", alpha, "constraint level")->required()->check(CLI::PositiveNumber);
  nonlocal->add_option("--rcut", nf.rcut, "halo extent (default 4 L)")->check(CLI::PositiveNumber);
  nonlocal->add_flag("--no-tail", nf.no_tail, "drop the exterior term beyond the halo");
  nonlocal->add_option("--csv", c.csv, "write the minimizer as CSV");
  c.add_solver_flags(nonlocal);

  SweepFlags sf;
  CLI::App* sweep = app.add_subcommand("sweep", "alpha sweep with verification checks");
  common(sweep, true);
  sweep->add_option("--alpha-min", sf.alpha_min)->check(CLI::PositiveNumber);
  sweep->add_option("--alpha-max", sf.alpha_max)->check(CLI::PositiveNumber);
  sweep->add_option("--per-decade", sf.per_decade)->check(CLI::PositiveNumber);
  sweep->add_option("--check", sf.checks, "comma list of bounds,derivative,limits,decay");
  sweep->add_flag("--nonlocal", sf.nonlocal, "sweep the fractional problem");
  sweep->add_option("--s", sf.nl.s, "fractional order for --nonlocal");
  sweep->add_option("--interval", sf.nl.interval, "interval length for --nonlocal")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--nodes", sf.nl.nodes, "interior nodes for --nonlocal")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--rcut", sf.nl.rcut, "halo extent for --nonlocal")->check(CLI::PositiveNumber);
  sweep->add_option("--csv", c.csv, "write the sweep records as CSV");
  sweep->add_option("--plot", sf.plot, "write a matplotlib script for the CSV");
  sweep->add_flag("--no-warm-start", sf.no_warm_start, "independent solves (parallel with --jobs)");
  sweep->add_option("--jobs", sf.jobs, "worker threads (default $ORLICZ_JOBS or 1)")
      ->check(CLI::PositiveNumber);
  c.add_solver_flags(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (version) {
    std::cout << "orlicz " << ORLICZ_VERSION << " (Eigen " << EIGEN_WORLD_VERSION << "."
              << EIGEN_MAJOR_VERSION << "." << EIGEN_MINOR_VERSION << ", C++" << (__cplusplus / 100) % 100
              << ", " << __VERSION__ << ")\n";
    return 0;
  }

  try {
    c.resolve();
    if (*inspect) return run_inspect(c);
    if (*solve) return run_solve(c, alpha);
    if (*nonlocal) return run_nonlocal(c, nf, alpha);
    if (*sweep) return run_sweep_cmd(c, sf);
    std::cerr << app.help();
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
  } catch (const RangeError& e) {
    std::cerr << "range error: " << e.what() << " (bracket [" << e.bracket_lo() << ", "
              << e.bracket_hi() << "])\n";
  } catch (const ContractError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 2;
}
