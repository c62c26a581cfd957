#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "orlicz/mesh.hpp"
#include "orlicz/solver.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

/// Malformed configuration; key() names the offending entry ("young.params.p").
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Inline JSON (text starting with '{') or the path of a JSON file.
nlohmann::json load_json(const std::string& text_or_path);

/// {"family": name, "params": {...}}
///   power {p}, sum_of_powers {p, q}, power_log {p, k, r}, exp_minus_poly {n},
///   exp_neg_inv_power {k}, double_exp {},
///   custom {knots: [...], density: [...]}  piecewise-linear a through (0, 0)
///                                           and the knots, linear beyond,
///   complementary {of: <young spec>}.
YoungFunction parse_young(const nlohmann::json& j, const std::string& where = "young");

/// {"dim": 1|2, "extents": [...], "counts": [...], "holes": [[x0, y0, x1, y1], ...]}
Mesh parse_mesh(const nlohmann::json& j, const std::string& where = "mesh");

struct SweepConfig {
  double alpha_min = 1e-2;
  double alpha_max = 1e2;
  int per_decade = 5;
  std::vector<std::string> checks;  ///< bounds, derivative, limits, decay
  bool warm_start = true;
  int jobs = 1;
};

struct OutputConfig {
  std::string csv;
  std::string json;
  std::string plot;
};

struct RunConfig {
  std::optional<nlohmann::json> young;
  std::optional<nlohmann::json> mesh;
  SolveOptions solver;
  bool restarts_set = false;  ///< solver.restarts given explicitly
  SweepConfig sweep;
  OutputConfig output;
};

/// {"young", "mesh", "solver": {tol, max_iter, restarts, seed},
///  "sweep": {alpha_min, alpha_max, per_decade, checks, warm_start, jobs},
///  "output": {csv, json, plot}}; every key optional, unknown keys rejected,
/// numeric options must be positive.
RunConfig parse_run_config(const nlohmann::json& j);

/// Comma-separated check list; rejects unknown names.
std::vector<std::string> parse_checks(const std::string& list);

}  // namespace orlicz
