#pragma once

// JSON and CSV plumbing. Kept apart from the numeric headers so the core
// library does not depend on the JSON package.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "irsplace/problem.hpp"
#include "irsplace/randomized.hpp"
#include "irsplace/solvers.hpp"

namespace irsplace {

using json = nlohmann::json;

/// Shortest text that reads back to the same double (17 significant digits).
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Input error that knows where in the document it happened.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

namespace detail {

template <class T>
T get_field(const json& obj, const std::string& key, const std::string& path) {
  const std::string where = path.empty() ? key : path + "." + key;
  if (!obj.contains(key)) throw ConfigError(where, "missing");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where, std::string("wrong type (") + e.what() + ")");
  }
}

template <class T>
T get_field_or(const json& obj, const std::string& key, const std::string& path, T fallback) {
  if (!obj.contains(key)) return fallback;
  return get_field<T>(obj, key, path);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Instances

inline json fade_to_json(const FadeDistribution& fade) {
  return std::visit([](const RayleighProduct& r) { return json{{"type", "rayleigh_product"}, {"sigma_sq", r.sigma_sq}}; },
                    fade);
}

inline FadeDistribution fade_from_json(const json& j, const std::string& path) {
  const auto type = detail::get_field<std::string>(j, "type", path);
  if (type != "rayleigh_product") throw ConfigError(path + ".type", "unknown fade model '" + type + "'");
  return RayleighProduct{detail::get_field<double>(j, "sigma_sq", path)};
}

inline json instance_to_json(const ProblemInstance& instance) {
  json sites = json::array();
  for (const IrsSite& s : instance.sites()) {
    sites.push_back({{"id", s.id},
                     {"x_m", s.position[0]},
                     {"y_m", s.position[1]},
                     {"l_min", s.l_min},
                     {"l_max", s.l_max},
                     {"fixed_cost", s.fixed_cost},
                     {"cost_rate", s.cost_rate},
                     {"beta", s.beta},
                     {"rho", s.rho}});
  }
  return {{"max_irs", instance.max_irs()},
          {"max_total_elements", instance.max_total_elements()},
          {"max_total_cost", instance.max_total_cost()},
          {"fade", fade_to_json(instance.fade())},
          {"sites", sites}};
}

inline ProblemInstance instance_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("$", "instance must be a JSON object");
  const json& arr = j.contains("sites") ? j.at("sites") : json();
  if (!arr.is_array()) throw ConfigError("sites", "must be an array");
  std::vector<IrsSite> sites;
  for (std::size_t n = 0; n < arr.size(); ++n) {
    const std::string p = "sites[" + std::to_string(n) + "]";
    const json& o = arr[n];
    IrsSite s;
    s.id = detail::get_field_or<std::size_t>(o, "id", p, n);
    s.position = {detail::get_field_or<double>(o, "x_m", p, 0.0), detail::get_field_or<double>(o, "y_m", p, 0.0)};
    s.l_min = detail::get_field<int>(o, "l_min", p);
    s.l_max = detail::get_field<int>(o, "l_max", p);
    s.fixed_cost = detail::get_field<double>(o, "fixed_cost", p);
    s.cost_rate = detail::get_field<double>(o, "cost_rate", p);
    s.beta = detail::get_field<double>(o, "beta", p);
    s.rho = detail::get_field_or<double>(o, "rho", p, 0.0);
    sites.push_back(s);
  }
  FadeDistribution fade = RayleighProduct{};
  if (j.contains("fade")) fade = fade_from_json(j.at("fade"), "fade");
  try {
    return ProblemInstance(std::move(sites), detail::get_field<int>(j, "max_irs", ""),
                           detail::get_field<double>(j, "max_total_elements", ""),
                           detail::get_field<double>(j, "max_total_cost", ""), fade);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("$", e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, e.what());
  }
}

// ---------------------------------------------------------------------------
// Results

inline json solution_to_json(const SolveResult& r) {
  json j{{"algorithm", to_string(r.meta.algorithm)},
         {"objective_g", r.objective},
         {"upper_bound", std::exp(r.objective)},
         {"feasible", r.feasibility.feasible},
         {"x", std::vector<int>(r.solution.x().begin(), r.solution.x().end())},
         {"elements", std::vector<int>(r.solution.elements().begin(), r.solution.elements().end())},
         {"candidates", r.meta.candidates}};
  if (r.meta.lp_gap) j["lp_gap"] = *r.meta.lp_gap;
  if (r.meta.trial_index) j["trial_index"] = *r.meta.trial_index;
  return j;
}

inline json guarantees_to_json(const GuaranteeBundle& g) {
  return {{"delta", g.delta},
          {"epsilon", g.epsilon},
          {"xi", g.xi},
          {"xi_prime", g.xi_prime},
          {"xi_double_prime", g.xi_double_prime},
          {"expectation",
           {{"objective", g.expectation.objective},
            {"cardinality", g.expectation.cardinality},
            {"total_elements", g.expectation.total_elements},
            {"total_cost", g.expectation.total_cost}}}};
}

}  // namespace irsplace
