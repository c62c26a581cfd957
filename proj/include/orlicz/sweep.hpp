#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "orlicz/mesh.hpp"
#include "orlicz/nonlocal.hpp"
#include "orlicz/solver.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

struct SweepOptions {
  /// One start per alpha: the warm start (or the p = 2 mode for the first).
  SolveOptions solve = [] {
    SolveOptions o;
    o.restarts = 1;
    return o;
  }();
  /// Start each alpha from the previous minimizer. Forces a sequential sweep.
  bool warm_start = true;
  int jobs = 1;  ///< worker threads when warm_start is off
};

struct BoundFlags {
  bool energy = false;      ///< min{a^p, a^(1/p)} E(1) <= E(a) <= max{...} E(1)
  bool eigenvalue = false;  ///< E/(p a) <= lambda <= p E/a
  bool quotient = false;    ///< min{a^(p-1), a^(1/p-1)} E(1) <= E/a <= max{...} E(1)
  bool all() const { return energy && eigenvalue && quotient; }
};

struct SweepRecord {
  double alpha = 0.0;
  double energy = 0.0;
  double quotient = 0.0;  ///< energy / alpha
  double lambda = 0.0;
  double dE_dalpha = 0.0;  ///< central difference; NaN at the grid ends
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  BoundFlags bounds;       ///< filled by check_bounds
  bool bounds_ok = false;
  ScalarField u;
};

/// Throws ContractError unless the grid is increasing, geometric and has at
/// least 3 points per decade.
void check_sweep_grid(const std::vector<double>& alpha_grid);

std::vector<SweepRecord> run_sweep(const YoungFunction& F, const Mesh& m,
                                   const std::vector<double>& alpha_grid,
                                   const SweepOptions& opts = {});
std::vector<SweepRecord> run_sweep(const YoungFunction& F, const NonlocalMesh& nm,
                                   const std::vector<double>& alpha_grid,
                                   const SweepOptions& opts = {});

/// (E_{k+1} - E_{k-1}) / (alpha_{k+1} - alpha_{k-1}); NaN at both ends.
void fill_differences(std::vector<SweepRecord>& records);

/// E(1) from the record at alpha = 1, else linear interpolation of log E in
/// log alpha between the bracketing records.
double energy_at_one(const std::vector<SweepRecord>& records);

struct BoundsReport {
  double p = 0.0;
  double E1 = 0.0;
  int checked = 0;
  int failed_energy = 0;
  int failed_eigenvalue = 0;
  int failed_quotient = 0;
  bool passed = false;
};

/// Evaluates the three two-sided bounds on every record with index p and
/// stores the flags in the records. Passes when every converged record
/// passes. Slack 1e-9 relative.
BoundsReport check_bounds(std::vector<SweepRecord>& records, double p);

/// Copies the records, raises every E(alpha) with alpha != 1 to
/// max{a^p, a^(1/p)} E(1) * 1.01 and returns true when check_bounds flags
/// each of them on the energy bound.
bool negative_control_fails(std::vector<SweepRecord> records, double p);

struct DerivativeReport {
  double median_gap = 0.0;  ///< median |dE/dalpha - lambda| / lambda
  double max_gap = 0.0;
  int samples = 0;
  int sandwich_violations = 0;     ///< dE/dalpha < 0 or > 1.05 lambda
  int lipschitz_violations = 0;    ///< |dE| > 1.05 max(lambda) |d alpha|
  int monotone_violations = 0;     ///< E not strictly increasing
  int quotient_samples = 0;
  int quotient_violations = 0;     ///< d(E/a)/da vs (lambda - E/a)/a beyond 5%
  double quotient_median_gap = 0.0;
  double sup_quotient = 0.0;
  double tolerance = 2e-2;
  bool passed = false;
};

DerivativeReport check_derivative(const std::vector<SweepRecord>& records,
                                  double median_tol = 2e-2);

struct LimitEstimate {
  Endpoint endpoint = Endpoint::Zero;
  MatuszewskaRegime regime = MatuszewskaRegime::Oscillating;
  double exponent = 0.0;      ///< p_i from the Matuszewska fit
  double last_quotient = 0.0;
  double extrapolated = 0.0;  ///< Aitken extrapolation of the last 3 quotients
  double reference = 0.0;     ///< Power(p_i) quotient on the same grid
  double gap = 0.0;           ///< |extrapolated - reference| / reference
  double tolerance = 5e-2;
  bool passed = false;
};

/// Throws PreconditionError when the endpoint regime is not power-like.
LimitEstimate estimate_limits(const YoungFunction& F, const Mesh& m,
                              const std::vector<SweepRecord>& records, Endpoint endpoint,
                              const SolveOptions& opts = {}, double tol = 5e-2);
LimitEstimate estimate_limits(const YoungFunction& F, const NonlocalMesh& nm,
                              const std::vector<SweepRecord>& records, Endpoint endpoint,
                              const SolveOptions& opts = {}, double tol = 5e-2);

/// Aitken delta-squared value of three samples; falls back to the last one
/// when the differences do not contract geometrically.
double aitken(double q0, double q1, double q2);

struct DecayReport {
  Endpoint endpoint = Endpoint::Infinity;
  double inner_radius = 0.0;
  double quotient_at_one = 0.0;
  double final_quotient = 0.0;
  double ratio = 0.0;
  double fraction = 0.2;
  int decade_samples = 0;
  bool strictly_decreasing = false;
  bool passed = false;
};

/// Needs inner radius > 1 and a divergent Delta_2 report at the endpoint
/// (PreconditionError otherwise).
DecayReport check_decay(const YoungFunction& F, const Mesh& m,
                        const std::vector<SweepRecord>& records, Endpoint endpoint,
                        double fraction = 0.2);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records);

/// Python/matplotlib script plotting quotient and lambda against alpha.
std::string plot_script(const std::string& csv_path, const std::string& title);

}  // namespace orlicz
