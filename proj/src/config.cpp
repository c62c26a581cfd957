#include "orlicz/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace orlicz {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ConfigError(where + "." + k, "unknown key");
  }
}

const json& need(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) throw ConfigError(where + "." + key, "missing");
  return j.at(key);
}

double positive(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  const double x = v.get<double>();
  if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(key, "must be positive");
  return x;
}

int positive_int(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() <= 0) {
    throw ConfigError(key, "expected a positive integer");
  }
  return v.get<int>();
}

std::vector<double> numbers(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(key, "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

/// Wraps constructor contract errors so the message names the key.
template <class Make>
YoungFunction build(const std::string& where, const Make& make) {
  try {
    return make();
  } catch (const ContractError& e) {
    throw ConfigError(where + ".params", e.what());
  }
}

YoungFunction piecewise_linear(std::vector<double> knots, std::vector<double> vals,
                               const std::string& where) {
  if (knots.empty() || knots.size() != vals.size()) {
    throw ConfigError(where, "knots and density need the same nonzero length");
  }
  double prev_t = 0.0;
  double prev_a = 0.0;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!(knots[i] > prev_t)) throw ConfigError(where + ".knots", "must be positive and increasing");
    if (!(vals[i] >= prev_a)) throw ConfigError(where + ".density", "must be nondecreasing");
    prev_t = knots[i];
    prev_a = vals[i];
  }
  if (!(vals.back() > 0.0)) throw ConfigError(where + ".density", "must become positive");
  knots.insert(knots.begin(), 0.0);
  vals.insert(vals.begin(), 0.0);
  const std::size_t n = knots.size();
  const double tail_slope =
      std::max((vals[n - 1] - vals[n - 2]) / (knots[n - 1] - knots[n - 2]), 0.0);
  std::ostringstream label;
  label << "PiecewiseLinear(" << (n - 1) << " knots)";
  return YoungFunction::custom(
      [knots, vals, tail_slope, n](double t) {
        if (t >= knots[n - 1]) return vals[n - 1] + tail_slope * (t - knots[n - 1]);
        const auto it = std::upper_bound(knots.begin(), knots.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - knots.begin());
        const double w = (t - knots[i - 1]) / (knots[i] - knots[i - 1]);
        return vals[i - 1] + w * (vals[i] - vals[i - 1]);
      },
      label.str());
}

}  // namespace

json load_json(const std::string& text_or_path) {
  const auto first = text_or_path.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string::npos && text_or_path[first] == '{') return json::parse(text_or_path);
    std::ifstream in(text_or_path);
    if (!in) throw ConfigError(text_or_path, "cannot open file");
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(text_or_path, std::string("invalid JSON: ") + e.what());
  }
}

YoungFunction parse_young(const json& j, const std::string& where) {
  only_keys(j, where, {"family", "params"});
  const json& fam = need(j, where, "family");
  if (!fam.is_string()) throw ConfigError(where + ".family", "expected a string");
  const std::string family = fam.get<std::string>();
  const json params = j.contains("params") ? j.at("params") : json::object();
  const std::string pw = where + ".params";
  const auto num = [&](const char* key) { return positive(need(params, pw, key), pw + "." + key); };

  if (family == "power") {
    only_keys(params, pw, {"p"});
    return build(where, [&] { return YoungFunction::power(num("p")); });
  }
  if (family == "sum_of_powers") {
    only_keys(params, pw, {"p", "q"});
    return build(where, [&] { return YoungFunction::sum_of_powers(num("p"), num("q")); });
  }
  if (family == "power_log") {
    only_keys(params, pw, {"p", "k", "r"});
    return build(where, [&] { return YoungFunction::power_log(num("p"), num("k"), num("r")); });
  }
  if (family == "exp_minus_poly") {
    only_keys(params, pw, {"n"});
    const int n = positive_int(need(params, pw, "n"), pw + ".n");
    return build(where, [&] { return YoungFunction::exp_minus_poly(n); });
  }
  if (family == "exp_neg_inv_power") {
    only_keys(params, pw, {"k"});
    return build(where, [&] { return YoungFunction::exp_neg_inv_power(num("k")); });
  }
  if (family == "double_exp") {
    only_keys(params, pw, {});
    return YoungFunction::double_exp();
  }
  if (family == "custom") {
    only_keys(params, pw, {"knots", "density"});
    return piecewise_linear(numbers(need(params, pw, "knots"), pw + ".knots"),
                            numbers(need(params, pw, "density"), pw + ".density"), pw);
  }
  if (family == "complementary") {
    only_keys(params, pw, {"of"});
    return complementary(parse_young(need(params, pw, "of"), pw + ".of"));
  }
  throw ConfigError(where + ".family", "unknown family '" + family + "'");
}

Mesh parse_mesh(const json& j, const std::string& where) {
  only_keys(j, where, {"dim", "extents", "counts", "holes"});
  const int dim = positive_int(need(j, where, "dim"), where + ".dim");
  if (dim != 1 && dim != 2) throw ConfigError(where + ".dim", "must be 1 or 2");
  const auto ext = numbers(need(j, where, "extents"), where + ".extents");
  const json& cj = need(j, where, "counts");
  if (!cj.is_array()) throw ConfigError(where + ".counts", "expected an array of integers");
  std::vector<int> counts;
  for (const auto& c : cj) counts.push_back(positive_int(c, where + ".counts"));
  if (static_cast<int>(ext.size()) != dim) throw ConfigError(where + ".extents", "needs dim entries");
  if (static_cast<int>(counts.size()) != dim) throw ConfigError(where + ".counts", "needs dim entries");
  for (double e : ext) {
    if (!(e > 0.0)) throw ConfigError(where + ".extents", "must be positive");
  }
  std::vector<Box> holes;
  if (j.contains("holes")) {
    if (dim != 2) throw ConfigError(where + ".holes", "only rectangles have holes");
    if (!j.at("holes").is_array()) throw ConfigError(where + ".holes", "expected an array");
    for (const auto& h : j.at("holes")) {
      const auto b = numbers(h, where + ".holes");
      if (b.size() != 4 || !(b[2] > b[0]) || !(b[3] > b[1])) {
        throw ConfigError(where + ".holes", "each hole is [x0, y0, x1, y1] with x0 < x1, y0 < y1");
      }
      holes.push_back({b[0], b[1], b[2], b[3]});
    }
  }
  try {
    if (dim == 1) return Mesh::interval(ext[0], counts[0]);
    return Mesh::rectangle(ext[0], ext[1], counts[0], counts[1], holes);
  } catch (const ContractError& e) {
    throw ConfigError(where, e.what());
  }
}

std::vector<std::string> parse_checks(const std::string& list) {
  static const std::set<std::string> known{"bounds", "derivative", "limits", "decay"};
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (!known.count(item)) throw ConfigError("check", "unknown check '" + item + "'");
    if (std::find(out.begin(), out.end(), item) == out.end()) out.push_back(item);
  }
  return out;
}

RunConfig parse_run_config(const json& j) {
  only_keys(j, "config", {"young", "mesh", "solver", "sweep", "output"});
  RunConfig rc;
  if (j.contains("young")) {
    parse_young(j.at("young"));
    rc.young = j.at("young");
  }
  if (j.contains("mesh")) {
    parse_mesh(j.at("mesh"));
    rc.mesh = j.at("mesh");
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    only_keys(s, "solver", {"tol", "max_iter", "restarts", "seed"});
    if (s.contains("tol")) rc.solver.tol = positive(s.at("tol"), "solver.tol");
    if (s.contains("max_iter")) rc.solver.max_iter = positive_int(s.at("max_iter"), "solver.max_iter");
    if (s.contains("restarts")) {
      rc.solver.restarts = positive_int(s.at("restarts"), "solver.restarts");
      rc.restarts_set = true;
    }
    if (s.contains("seed")) {
      if (!s.at("seed").is_number_unsigned()) throw ConfigError("solver.seed", "expected a nonnegative integer");
      rc.solver.seed = s.at("seed").get<std::uint64_t>();
    }
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    only_keys(s, "sweep", {"alpha_min", "alpha_max", "per_decade", "checks", "warm_start", "jobs"});
    if (s.contains("alpha_min")) rc.sweep.alpha_min = positive(s.at("alpha_min"), "sweep.alpha_min");
    if (s.contains("alpha_max")) rc.sweep.alpha_max = positive(s.at("alpha_max"), "sweep.alpha_max");
    if (s.contains("per_decade")) {
      rc.sweep.per_decade = positive_int(s.at("per_decade"), "sweep.per_decade");
    }
    if (s.contains("checks")) {
      const json& c = s.at("checks");
      if (!c.is_array()) throw ConfigError("sweep.checks", "expected an array of names");
      std::string joined;
      for (const auto& x : c) {
        if (!x.is_string()) throw ConfigError("sweep.checks", "expected an array of names");
        joined += x.get<std::string>() + ",";
      }
      try {
        rc.sweep.checks = parse_checks(joined);
      } catch (const ConfigError& e) {
        throw ConfigError("sweep.checks", e.what());
      }
    }
    if (s.contains("warm_start")) {
      if (!s.at("warm_start").is_boolean()) throw ConfigError("sweep.warm_start", "expected a boolean");
      rc.sweep.warm_start = s.at("warm_start").get<bool>();
    }
    if (s.contains("jobs")) rc.sweep.jobs = positive_int(s.at("jobs"), "sweep.jobs");
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    only_keys(o, "output", {"csv", "json", "plot"});
    const auto str = [&](const char* k, std::string& dst) {
      if (!o.contains(k)) return;
      if (!o.at(k).is_string()) throw ConfigError(std::string("output.") + k, "expected a path");
      dst = o.at(k).get<std::string>();
    };
    str("csv", rc.output.csv);
    str("json", rc.output.json);
    str("plot", rc.output.plot);
  }
  return rc;
}

}  // namespace orlicz
