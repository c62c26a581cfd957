#include "orlicz/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <thread>

namespace orlicz {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kSlack = 1e-9;

SweepRecord to_record(double alpha, MinimizerResult&& r) {
  SweepRecord rec;
  rec.alpha = alpha;
  rec.energy = r.energy;
  rec.quotient = r.energy / alpha;
  rec.lambda = r.lambda;
  rec.dE_dalpha = kNaN;
  rec.residual = r.residual;
  rec.iterations = r.iterations;
  rec.converged = r.converged;
  rec.u = std::move(r.u);
  return rec;
}

template <class Solve>
std::vector<SweepRecord> sweep_with(const std::vector<double>& grid, const SweepOptions& opts,
                                    const Solve& solve) {
  check_sweep_grid(grid);
  std::vector<SweepRecord> out(grid.size());
  if (opts.warm_start) {
    const ScalarField* warm = nullptr;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      out[k] = to_record(grid[k], solve(grid[k], warm));
      warm = &out[k].u;
    }
  } else {
    const int jobs = std::clamp(opts.jobs, 1, static_cast<int>(grid.size()));
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
      for (std::size_t k = next++; k < grid.size(); k = next++) {
        out[k] = to_record(grid[k], solve(grid[k], nullptr));
      }
    };
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
  }
  fill_differences(out);
  return out;
}

bool within(double lo, double x, double hi) {
  return x >= lo * (1.0 - kSlack) && x <= hi * (1.0 + kSlack);
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Converged records nearest the endpoint, ordered toward it.
std::vector<const SweepRecord*> toward(const std::vector<SweepRecord>& records, Endpoint e) {
  std::vector<const SweepRecord*> v;
  for (const auto& r : records) {
    if (r.converged) v.push_back(&r);
  }
  std::sort(v.begin(), v.end(), [](auto* a, auto* b) { return a->alpha < b->alpha; });
  if (e == Endpoint::Zero) std::reverse(v.begin(), v.end());
  return v;
}

template <class SolveRef>
LimitEstimate limits_with(const YoungFunction& F, const std::vector<SweepRecord>& records,
                          Endpoint endpoint, double tol, const SolveRef& solve_reference) {
  LimitEstimate est;
  est.endpoint = endpoint;
  est.tolerance = tol;
  const MatuszewskaEstimate mz = matuszewska_exponent(F, endpoint);
  est.regime = mz.regime;
  if (mz.regime != MatuszewskaRegime::PowerLike || !mz.exponent_valid) {
    throw PreconditionError("estimate_limits: the Matuszewska function at " + to_string(endpoint) +
                            " is " + to_string(mz.regime) +
                            ", not a power; use the decay check instead");
  }
  est.exponent = mz.exponent;
  const auto v = toward(records, endpoint);
  if (v.size() < 3) throw ContractError("estimate_limits: need 3 converged records");
  const std::size_t n = v.size();
  est.last_quotient = v[n - 1]->quotient;
  est.extrapolated = aitken(v[n - 3]->quotient, v[n - 2]->quotient, v[n - 1]->quotient);
  est.reference = solve_reference(mz.exponent);
  est.gap = std::abs(est.extrapolated - est.reference) / est.reference;
  est.passed = est.gap <= tol;
  return est;
}

}  // namespace

void check_sweep_grid(const std::vector<double>& grid) {
  if (grid.size() < 3) throw ContractError("sweep: alpha grid needs at least 3 points");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0) || !std::isfinite(grid[k])) {
      throw ContractError("sweep: alpha values must be positive and finite");
    }
    if (k > 0 && !(grid[k] > grid[k - 1])) throw ContractError("sweep: alpha grid must increase");
  }
  const double step = std::log10(grid[1] / grid[0]);
  for (std::size_t k = 2; k < grid.size(); ++k) {
    if (std::abs(std::log10(grid[k] / grid[k - 1]) - step) > 1e-6 * step) {
      throw ContractError("sweep: alpha grid must be geometric");
    }
  }
  if (step > 1.0 / 3.0 + 1e-9) {
    throw ContractError("sweep: alpha grid needs at least 3 points per decade");
  }
}

std::vector<SweepRecord> run_sweep(const YoungFunction& F, const Mesh& m,
                                   const std::vector<double>& alpha_grid,
                                   const SweepOptions& opts) {
  return sweep_with(alpha_grid, opts, [&](double a, const ScalarField* warm) {
    return solve_E(F, m, a, opts.solve, warm);
  });
}

std::vector<SweepRecord> run_sweep(const YoungFunction& F, const NonlocalMesh& nm,
                                   const std::vector<double>& alpha_grid,
                                   const SweepOptions& opts) {
  return sweep_with(alpha_grid, opts, [&](double a, const ScalarField* warm) {
    return solve_Es(F, nm, a, opts.solve, warm);
  });
}

void fill_differences(std::vector<SweepRecord>& r) {
  for (std::size_t k = 0; k < r.size(); ++k) {
    r[k].dE_dalpha = (k == 0 || k + 1 == r.size())
                         ? kNaN
                         : (r[k + 1].energy - r[k - 1].energy) / (r[k + 1].alpha - r[k - 1].alpha);
  }
}

double energy_at_one(const std::vector<SweepRecord>& records) {
  for (const auto& r : records) {
    if (r.alpha == 1.0) return r.energy;
  }
  for (std::size_t k = 1; k < records.size(); ++k) {
    const auto& a = records[k - 1];
    const auto& b = records[k];
    if (a.alpha < 1.0 && b.alpha > 1.0) {
      const double t = -std::log(a.alpha) / std::log(b.alpha / a.alpha);
      return std::exp((1.0 - t) * std::log(a.energy) + t * std::log(b.energy));
    }
  }
  throw ContractError("energy_at_one: alpha = 1 is not inside the sweep");
}

BoundsReport check_bounds(std::vector<SweepRecord>& records, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ContractError("check_bounds: index p must be > 1");
  BoundsReport rep;
  rep.p = p;
  rep.E1 = energy_at_one(records);
  for (auto& r : records) {
    const double a = r.alpha;
    const double lo = std::min(std::pow(a, p), std::pow(a, 1.0 / p));
    const double hi = std::max(std::pow(a, p), std::pow(a, 1.0 / p));
    r.bounds.energy = within(lo * rep.E1, r.energy, hi * rep.E1);
    r.bounds.eigenvalue = within(r.energy / (p * a), r.lambda, p * r.energy / a);
    const double qlo = std::min(std::pow(a, p - 1.0), std::pow(a, 1.0 / p - 1.0));
    const double qhi = std::max(std::pow(a, p - 1.0), std::pow(a, 1.0 / p - 1.0));
    r.bounds.quotient = within(qlo * rep.E1, r.quotient, qhi * rep.E1);
    r.bounds_ok = r.bounds.all();
    if (!r.converged) continue;
    ++rep.checked;
    rep.failed_energy += !r.bounds.energy;
    rep.failed_eigenvalue += !r.bounds.eigenvalue;
    rep.failed_quotient += !r.bounds.quotient;
  }
  rep.passed = rep.checked > 0 && rep.failed_energy == 0 && rep.failed_eigenvalue == 0 &&
               rep.failed_quotient == 0;
  return rep;
}

bool negative_control_fails(std::vector<SweepRecord> records, double p) {
  const double E1 = energy_at_one(records);
  int perturbed = 0;
  for (auto& r : records) {
    if (r.alpha == 1.0) continue;
    r.energy = std::max(std::pow(r.alpha, p), std::pow(r.alpha, 1.0 / p)) * E1 * 1.01;
    r.quotient = r.energy / r.alpha;
    ++perturbed;
  }
  check_bounds(records, p);
  return perturbed > 0 && std::all_of(records.begin(), records.end(), [](const SweepRecord& r) {
           return r.alpha == 1.0 || !r.bounds.energy;
         });
}

DerivativeReport check_derivative(const std::vector<SweepRecord>& r, double median_tol) {
  DerivativeReport rep;
  rep.tolerance = median_tol;
  std::vector<double> gaps;
  std::vector<double> qgaps;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (r[k].converged) rep.sup_quotient = std::max(rep.sup_quotient, r[k].quotient);
    if (k > 0 && r[k].converged && r[k - 1].converged) {
      const double dE = r[k].energy - r[k - 1].energy;
      const double da = r[k].alpha - r[k - 1].alpha;
      if (!(dE > 0.0)) ++rep.monotone_violations;
      if (std::abs(dE) > 1.05 * std::max(r[k].lambda, r[k - 1].lambda) * da) {
        ++rep.lipschitz_violations;
      }
    }
    if (k == 0 || k + 1 == r.size()) continue;
    if (!(r[k - 1].converged && r[k].converged && r[k + 1].converged)) continue;
    const double d = r[k].dE_dalpha;
    const double lam = r[k].lambda;
    gaps.push_back(std::abs(d - lam) / lam);
    if (d < 0.0 || d > 1.05 * lam) ++rep.sandwich_violations;

    // d(E/a)/da against (lambda - E/a)/a, where the latter is not rounding noise.
    const double expect = (lam - r[k].quotient) / r[k].alpha;
    if (std::abs(lam - r[k].quotient) > 1e-8 * lam) {
      const double dq =
          (r[k + 1].quotient - r[k - 1].quotient) / (r[k + 1].alpha - r[k - 1].alpha);
      const double g = std::abs(dq - expect) / std::abs(expect);
      qgaps.push_back(g);
      ++rep.quotient_samples;
      if (g > 5e-2) ++rep.quotient_violations;
    }
  }
  rep.samples = static_cast<int>(gaps.size());
  if (!gaps.empty()) {
    rep.median_gap = median(gaps);
    rep.max_gap = *std::max_element(gaps.begin(), gaps.end());
  }
  if (!qgaps.empty()) rep.quotient_median_gap = median(qgaps);
  rep.passed = rep.samples > 0 && rep.median_gap <= median_tol && rep.sandwich_violations == 0 &&
               rep.lipschitz_violations == 0 && rep.monotone_violations == 0 &&
               rep.quotient_violations == 0;
  return rep;
}

double aitken(double q0, double q1, double q2) {
  const double d1 = q1 - q0;
  const double d2 = q2 - q1;
  if (d1 == 0.0 || d2 == 0.0) return q2;
  const double rho = d2 / d1;
  if (!(rho > 0.0 && rho < 1.0)) return q2;
  return q2 + d2 * rho / (1.0 - rho);
}

LimitEstimate estimate_limits(const YoungFunction& F, const Mesh& m,
                              const std::vector<SweepRecord>& records, Endpoint endpoint,
                              const SolveOptions& opts, double tol) {
  return limits_with(F, records, endpoint, tol, [&](double p) {
    return solve_E(YoungFunction::power(p), m, 1.0, opts).energy;
  });
}

LimitEstimate estimate_limits(const YoungFunction& F, const NonlocalMesh& nm,
                              const std::vector<SweepRecord>& records, Endpoint endpoint,
                              const SolveOptions& opts, double tol) {
  return limits_with(F, records, endpoint, tol, [&](double p) {
    return solve_Es(YoungFunction::power(p), nm, 1.0, opts).energy;
  });
}

DecayReport check_decay(const YoungFunction& F, const Mesh& m,
                        const std::vector<SweepRecord>& records, Endpoint endpoint,
                        double fraction) {
  DecayReport rep;
  rep.endpoint = endpoint;
  rep.fraction = fraction;
  rep.inner_radius = m.inner_radius();
  if (!(m.inner_radius() > 1.0)) {
    throw PreconditionError("check_decay: the decay result needs a domain of inner radius > 1 (got " +
                            std::to_string(m.inner_radius()) + ")");
  }
  const Delta2Report d2 = delta2_report(F, endpoint);
  if (!(d2.p_divergent || d2.doubling_divergent || d2.C_divergent)) {
    throw PreconditionError("check_decay: A satisfies the doubling condition at " +
                            to_string(endpoint) + "; the decay result needs it to fail there");
  }
  rep.quotient_at_one = energy_at_one(records);
  std::vector<const SweepRecord*> all;
  for (const auto& r : records) all.push_back(&r);
  std::sort(all.begin(), all.end(), [](auto* a, auto* b) { return a->alpha < b->alpha; });
  if (endpoint == Endpoint::Zero) std::reverse(all.begin(), all.end());
  const double last = all.back()->alpha;
  std::vector<const SweepRecord*> decade;
  for (auto* r : all) {
    const double span = std::abs(std::log10(r->alpha / last));
    if (span <= 1.0 + 1e-9) decade.push_back(r);
  }
  rep.decade_samples = static_cast<int>(decade.size());
  rep.strictly_decreasing = decade.size() >= 2;
  for (std::size_t k = 0; k < decade.size(); ++k) {
    if (!decade[k]->converged) rep.strictly_decreasing = false;
    if (k > 0 && !(decade[k]->quotient < decade[k - 1]->quotient)) rep.strictly_decreasing = false;
  }
  rep.final_quotient = all.back()->quotient;
  rep.ratio = rep.final_quotient / rep.quotient_at_one;
  rep.passed = rep.strictly_decreasing && rep.ratio <= fraction;
  return rep;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
  os << "alpha,energy,quotient,lambda,dE_dalpha,residual,iterations,converged,"
        "bound_energy,bound_eigenvalue,bound_quotient\n";
  char buf[512];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%d,%d,%d\n", r.alpha,
                  r.energy, r.quotient, r.lambda, r.dE_dalpha, r.residual, r.iterations,
                  int(r.converged), int(r.bounds.energy), int(r.bounds.eigenvalue),
                  int(r.bounds.quotient));
    os << buf;
  }
}

std::string plot_script(const std::string& csv_path, const std::string& title) {
  std::string s;
  s += "import csv\nimport sys\n\nimport matplotlib\nmatplotlib.use(\"Agg\")\n";
  s += "import matplotlib.pyplot as plt\n\n";
  s += "path = sys.argv[1] if len(sys.argv) > 1 else r\"" + csv_path + "\"\n";
  s += "with open(path) as f:\n    rows = list(csv.DictReader(f))\n";
  s += "alpha = [float(r[\"alpha\"]) for r in rows]\n";
  s += "quotient = [float(r[\"quotient\"]) for r in rows]\n";
  s += "lam = [float(r[\"lambda\"]) for r in rows]\n\n";
  s += "fig, ax = plt.subplots(figsize=(6, 4))\n";
  s += "ax.loglog(alpha, quotient, \"o-\", label=\"E(alpha)/alpha\")\n";
  s += "ax.loglog(alpha, lam, \"s--\", label=\"lambda(alpha)\")\n";
  s += "ax.set_xlabel(\"alpha\")\nax.set_title(r\"" + title + "\")\nax.legend()\n";
  s += "fig.tight_layout()\nout = path.rsplit(\".\", 1)[0] + \".png\"\nfig.savefig(out, dpi=150)\n";
  s += "print(out)\n";
  return s;
}

}  // namespace orlicz
