#pragma once

// Parameter sweeps over random scenario ensembles.
//
// Every (sweep point, scenario) cell is independent: its instance and every
// random draw in it come from
//   derive_seed(master_seed, {sweep_index, scenario_id, tag})
// with tag 0 for the scenario itself and 1 + Algorithm for an algorithm's own
// randomness. Any single row can be replayed from those four numbers. FD and
// HD variants of a cell share the scenario seed and see the same geometry.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "irsplace/io.hpp"
#include "irsplace/lp.hpp"
#include "irsplace/problem.hpp"
#include "irsplace/randomized.hpp"
#include "irsplace/solvers.hpp"

namespace irsplace {

inline constexpr const char* kSweepParameters[] = {"max_total_cost", "element_max",    "n_sites",        "sinr_threshold_db",
                                                   "noise_dbm",      "tx_power_dbm",   "residual_li_dbm"};

struct ExperimentConfig {
  ScenarioConfig scenario;
  std::string sweep_parameter = "max_total_cost";
  std::vector<double> sweep_values;
  std::vector<Algorithm> algorithms{Algorithm::LPR, Algorithm::LPR_GA, Algorithm::LPR_RA, Algorithm::AEGA,
                                    Algorithm::MEGA};
  int ensemble_size = 1;
  int t_max = 50;
  std::uint64_t master_seed = 1;
  std::vector<Duplex> duplex{Duplex::FD};
  std::uint64_t exhaustive_cap = kDefaultExhaustiveCap;
  // Wall-clock times break byte-identical output, so they are opt-in.
  bool record_timing = false;
};

/// Scenario for one sweep point, without the duplex switch applied.
inline ScenarioConfig apply_sweep(ScenarioConfig s, const std::string& parameter, double value) {
  auto as_int = [&](const char* name) {
    if (value != std::floor(value)) throw ConfigError("sweep.values", std::string(name) + " needs integer values");
    return static_cast<int>(value);
  };
  if (parameter == "max_total_cost") {
    s.max_total_cost = value;
  } else if (parameter == "element_max") {
    s.element_max = as_int("element_max");
  } else if (parameter == "n_sites") {
    s.n_sites = as_int("n_sites");
  } else if (parameter == "sinr_threshold_db") {
    s.budget.sinr_threshold = db_to_linear(value);
  } else if (parameter == "noise_dbm") {
    s.budget.noise_mw = dbm_to_mw(value);
  } else if (parameter == "tx_power_dbm") {
    s.budget.tx_power_mw = dbm_to_mw(value);
  } else if (parameter == "residual_li_dbm") {
    s.budget.residual_li_mw = dbm_to_mw(value);
  } else {
    throw ConfigError("sweep.parameter", "unknown parameter '" + parameter + "'");
  }
  return s;
}

inline ScenarioConfig with_duplex(ScenarioConfig s, Duplex d) {
  if (d == Duplex::HD) s.budget = to_half_duplex(s.budget);
  return s;
}

namespace detail {

inline Rect rect_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 4) throw ConfigError(path, "expected [x_lo, x_hi, y_lo, y_hi]");
  return Rect{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

inline Point2 point_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected [x, y]");
  return Point2{j[0].get<double>(), j[1].get<double>()};
}

inline std::pair<double, double> range_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace detail

/// Scenario block. Every key is optional and falls back to the reference
/// setup; powers are given in dBm and thresholds in dB, converted here once.
inline ScenarioConfig scenario_from_json(const json& j, const std::string& path = "scenario") {
  using detail::get_field_or;
  if (!j.is_object()) throw ConfigError(path, "must be an object");
  static const char* known[] = {"ue1_m",          "ue2_m",           "rect_upper_m",      "rect_lower_m",
                                "n_sites",        "max_irs",         "element_min",       "element_max",
                                "max_total_elements", "max_total_cost", "fixed_cost_range", "cost_rate_range",
                                "path_loss_a0",   "path_loss_alpha", "tx_power_dbm",      "noise_dbm",
                                "residual_li_dbm", "sinr_threshold_db", "fade_sigma_sq"};
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known)) {
      throw ConfigError(path + "." + key, "unknown field");
    }
  }
  ScenarioConfig s;
  try {
    if (j.contains("ue1_m")) s.ue1 = detail::point_from_json(j["ue1_m"], path + ".ue1_m");
    if (j.contains("ue2_m")) s.ue2 = detail::point_from_json(j["ue2_m"], path + ".ue2_m");
    if (j.contains("rect_upper_m")) s.rect_upper = detail::rect_from_json(j["rect_upper_m"], path + ".rect_upper_m");
    if (j.contains("rect_lower_m")) s.rect_lower = detail::rect_from_json(j["rect_lower_m"], path + ".rect_lower_m");
    if (j.contains("fixed_cost_range")) {
      s.fixed_cost_range = detail::range_from_json(j["fixed_cost_range"], path + ".fixed_cost_range");
    }
    if (j.contains("cost_rate_range")) {
      s.cost_rate_range = detail::range_from_json(j["cost_rate_range"], path + ".cost_rate_range");
    }
  } catch (const json::exception& e) {
    throw ConfigError(path, std::string("wrong type (") + e.what() + ")");
  }
  s.n_sites = get_field_or<int>(j, "n_sites", path, s.n_sites);
  s.max_irs = get_field_or<int>(j, "max_irs", path, s.max_irs);
  s.element_min = get_field_or<int>(j, "element_min", path, s.element_min);
  s.element_max = get_field_or<int>(j, "element_max", path, s.element_max);
  s.max_total_elements = get_field_or<double>(j, "max_total_elements", path, s.max_total_elements);
  s.max_total_cost = get_field_or<double>(j, "max_total_cost", path, s.max_total_cost);
  s.path_loss.a0 = get_field_or<double>(j, "path_loss_a0", path, s.path_loss.a0);
  s.path_loss.alpha = get_field_or<double>(j, "path_loss_alpha", path, s.path_loss.alpha);
  s.budget.tx_power_mw = dbm_to_mw(get_field_or<double>(j, "tx_power_dbm", path, 25.0));
  s.budget.noise_mw = dbm_to_mw(get_field_or<double>(j, "noise_dbm", path, -80.0));
  s.budget.residual_li_mw = dbm_to_mw(get_field_or<double>(j, "residual_li_dbm", path, -70.0));
  s.budget.sinr_threshold = db_to_linear(get_field_or<double>(j, "sinr_threshold_db", path, 8.0));
  s.fade = RayleighProduct{get_field_or<double>(j, "fade_sigma_sq", path, 1.0)};
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path, e.what());
  }
  return s;
}

inline ExperimentConfig experiment_from_json(const json& j) {
  using detail::get_field;
  using detail::get_field_or;
  if (!j.is_object()) throw ConfigError("$", "config must be a JSON object");
  ExperimentConfig c;
  c.scenario = j.contains("scenario") ? scenario_from_json(j["scenario"]) : ScenarioConfig{};
  if (j.contains("sweep")) {
    const json& sw = j["sweep"];
    c.sweep_parameter = get_field<std::string>(sw, "parameter", "sweep");
    c.sweep_values = get_field<std::vector<double>>(sw, "values", "sweep");
  }
  if (j.contains("algorithms")) {
    c.algorithms.clear();
    const auto names = get_field<std::vector<std::string>>(j, "algorithms", "");
    for (std::size_t i = 0; i < names.size(); ++i) {
      const auto a = parse_algorithm(names[i]);
      if (!a) throw ConfigError("algorithms[" + std::to_string(i) + "]", "unknown algorithm '" + names[i] + "'");
      c.algorithms.push_back(*a);
    }
  }
  if (j.contains("duplex")) {
    c.duplex.clear();
    const auto names = get_field<std::vector<std::string>>(j, "duplex", "");
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == "FD") c.duplex.push_back(Duplex::FD);
      else if (names[i] == "HD") c.duplex.push_back(Duplex::HD);
      else throw ConfigError("duplex[" + std::to_string(i) + "]", "expected FD or HD");
    }
    if (c.duplex.empty()) throw ConfigError("duplex", "must not be empty");
  }
  c.ensemble_size = get_field_or<int>(j, "ensemble_size", "", c.ensemble_size);
  c.t_max = get_field_or<int>(j, "t_max", "", c.t_max);
  c.master_seed = get_field_or<std::uint64_t>(j, "master_seed", "", c.master_seed);
  c.exhaustive_cap = get_field_or<std::uint64_t>(j, "exhaustive_cap", "", c.exhaustive_cap);
  c.record_timing = get_field_or<bool>(j, "record_timing", "", c.record_timing);
  if (c.ensemble_size < 1) throw ConfigError("ensemble_size", "must be >= 1");
  if (c.t_max < 1) throw ConfigError("t_max", "must be >= 1");
  if (c.algorithms.empty()) throw ConfigError("algorithms", "must not be empty");

  const bool known = std::find_if(std::begin(kSweepParameters), std::end(kSweepParameters), [&](const char* p) {
                       return c.sweep_parameter == p;
                     }) != std::end(kSweepParameters);
  if (!known) throw ConfigError("sweep.parameter", "unknown parameter '" + c.sweep_parameter + "'");
  for (std::size_t i = 0; i < c.sweep_values.size(); ++i) {
    const std::string p = "sweep.values[" + std::to_string(i) + "]";
    try {
      for (Duplex d : c.duplex) with_duplex(apply_sweep(c.scenario, c.sweep_parameter, c.sweep_values[i]), d).validate();
    } catch (const ConfigError& e) {
      throw ConfigError(p, e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(p, e.what());
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Running

/// One CSV line. Optional numeric fields print as empty cells.
struct ResultRow {
  double sweep_value = 0.0;
  int scenario_id = 0;
  std::string algorithm;
  Duplex duplex = Duplex::FD;
  std::optional<double> objective_g;
  std::optional<bool> feasible;  // empty for LPR (fractional) and refused exhaustive rows
  std::optional<double> num_irs;
  std::optional<double> total_elements;
  std::optional<double> total_cost;
  double lpr_lower_bound = 0.0;
  std::optional<int> ra_trial_index;
  std::optional<std::int64_t> runtime_micros;
};

inline constexpr const char* kResultHeader =
    "sweep_value,scenario_id,algorithm,duplex,objective_g,upper_bound,feasible,num_irs,total_elements,total_cost,"
    "lpr_lower_bound,ra_trial_index,runtime_micros";

inline void write_row(std::ostream& os, const ResultRow& r) {
  auto opt = [](const std::optional<double>& v) { return v ? fmt_double(*v) : std::string(); };
  os << fmt_double(r.sweep_value) << ',' << r.scenario_id << ',' << r.algorithm << ',' << to_string(r.duplex) << ','
     << opt(r.objective_g) << ',' << (r.objective_g ? fmt_double(std::exp(*r.objective_g)) : std::string()) << ','
     << (r.feasible ? (*r.feasible ? "true" : "false") : "") << ',' << opt(r.num_irs) << ',' << opt(r.total_elements)
     << ',' << opt(r.total_cost) << ',' << fmt_double(r.lpr_lower_bound) << ','
     << (r.ra_trial_index ? std::to_string(*r.ra_trial_index) : std::string()) << ','
     << (r.runtime_micros ? std::to_string(*r.runtime_micros) : std::string()) << '\n';
}

struct AggregateRow {
  double sweep_value = 0.0;
  Duplex duplex = Duplex::FD;
  std::string algorithm;
  int scenarios = 0;  // rows that entered the means
  double mean_upper_bound = 0.0;
  double stderr_upper_bound = 0.0;
  double mean_objective_g = 0.0;
  std::optional<double> ra_feasible_pct;
};

inline constexpr const char* kAggregateHeader =
    "sweep_value,duplex,algorithm,scenarios,mean_upper_bound,stderr_upper_bound,mean_objective_g,ra_feasible_pct";

inline void write_aggregate(std::ostream& os, const AggregateRow& a) {
  os << fmt_double(a.sweep_value) << ',' << to_string(a.duplex) << ',' << a.algorithm << ',' << a.scenarios << ','
     << fmt_double(a.mean_upper_bound) << ',' << fmt_double(a.stderr_upper_bound) << ','
     << fmt_double(a.mean_objective_g) << ',' << (a.ra_feasible_pct ? fmt_double(*a.ra_feasible_pct) : "") << '\n';
}

struct ExperimentOutput {
  std::vector<ResultRow> rows;
  std::vector<AggregateRow> aggregates;
  std::vector<std::string> guarantee_lines;  // JSON Lines
};

inline std::uint64_t cell_seed(std::uint64_t master, std::size_t sweep_index, int scenario_id, std::uint64_t tag) {
  return derive_seed(master, {static_cast<std::uint64_t>(sweep_index), static_cast<std::uint64_t>(scenario_id), tag});
}

inline std::uint64_t algorithm_tag(Algorithm a) { return 1 + static_cast<std::uint64_t>(a); }

namespace detail {

struct CellOutput {
  std::vector<ResultRow> rows;
  std::vector<std::string> guarantee_lines;
};

inline ResultRow row_from(const SolveResult& r, const std::string& name, const ExperimentConfig& cfg) {
  ResultRow row;
  row.algorithm = name;
  row.objective_g = r.objective;
  row.feasible = r.feasibility.feasible;
  row.num_irs = r.feasibility.cardinality;
  row.total_elements = static_cast<double>(r.feasibility.total_elements);
  row.total_cost = r.feasibility.total_cost;
  if (r.meta.trial_index) row.ra_trial_index = *r.meta.trial_index;
  if (cfg.record_timing) row.runtime_micros = r.meta.runtime_micros;
  return row;
}

inline CellOutput run_cell(const ExperimentConfig& cfg, std::size_t sweep_index, int scenario_id) {
  CellOutput out;
  const double value = cfg.sweep_values[sweep_index];
  const ScenarioConfig base = apply_sweep(cfg.scenario, cfg.sweep_parameter, value);
  const std::uint64_t scen_seed = cell_seed(cfg.master_seed, sweep_index, scenario_id, 0);
  for (Duplex d : cfg.duplex) {
    const ProblemInstance inst = generate_scenario(with_duplex(base, d), scen_seed);
    detail::Stopwatch lp_watch;
    const LpSolution lpr = lower_bound(inst);
    const std::int64_t lp_micros = lp_watch.micros();
    if (lpr.status != LpStatus::Optimal) {
      throw std::runtime_error(std::string("relaxation failed: ") + to_string(lpr.status));
    }
    auto stamp = [&](ResultRow row) {
      row.sweep_value = value;
      row.scenario_id = scenario_id;
      row.duplex = d;
      row.lpr_lower_bound = lpr.g_dagger;
      out.rows.push_back(std::move(row));
    };
    for (Algorithm a : cfg.algorithms) {
      switch (a) {
        case Algorithm::LPR: {
          ResultRow row;
          row.algorithm = to_string(a);
          row.objective_g = lpr.g_dagger;
          double xs = 0.0, zs = 0.0, cs = 0.0;
          for (std::size_t n = 0; n < inst.size(); ++n) {
            xs += lpr.x_dagger[n];
            zs += lpr.z_dagger[n];
            cs += inst.site(n).fixed_cost * lpr.x_dagger[n] + inst.site(n).cost_rate * lpr.z_dagger[n];
          }
          row.num_irs = xs;
          row.total_elements = zs;
          row.total_cost = cs;
          if (cfg.record_timing) row.runtime_micros = lp_micros;
          stamp(std::move(row));
          break;
        }
        case Algorithm::LPR_GA:
          stamp(row_from(lpr_ga(inst, lpr), to_string(a), cfg));
          break;
        case Algorithm::LPR_RA: {
          const std::uint64_t seed = cell_seed(cfg.master_seed, sweep_index, scenario_id, algorithm_tag(a));
          const RandomizedRun run = lpr_ra(inst, lpr, cfg.t_max, seed);
          if (run.result) {
            stamp(row_from(*run.result, to_string(a), cfg));
          } else {
            // Report the last trial as the failed candidate, then the
            // deterministic greedy result that replaces it.
            const TrialOutcome& last = run.trials.back();
            ResultRow row;
            row.algorithm = to_string(a);
            row.objective_g = last.objective;
            row.feasible = false;
            row.num_irs = last.feasibility.cardinality;
            row.total_elements = static_cast<double>(last.feasibility.total_elements);
            row.total_cost = last.feasibility.total_cost;
            stamp(std::move(row));
            stamp(row_from(lpr_ga(inst, lpr), "LPR-RA-FALLBACK", cfg));
          }
          json line{{"sweep_value", value}, {"scenario_id", scenario_id}, {"duplex", to_string(d)},
                    {"seed", seed}, {"trials_run", run.trials.size()}, {"feasible", !run.failed()}};
          try {
            line["guarantees"] = guarantees_to_json(guarantees(inst, lpr));
          } catch (const DegenerateInstance& e) {
            line["guarantees"] = nullptr;
            line["error"] = e.what();
          }
          out.guarantee_lines.push_back(line.dump());
          break;
        }
        case Algorithm::AEGA:
          stamp(row_from(aega(inst), to_string(a), cfg));
          break;
        case Algorithm::MEGA:
          stamp(row_from(mega(inst), to_string(a), cfg));
          break;
        case Algorithm::EXHAUSTIVE: {
          try {
            stamp(row_from(exhaustive(inst, cfg.exhaustive_cap), to_string(a), cfg));
          } catch (const ExhaustiveRefused&) {
            ResultRow row;
            row.algorithm = "EXHAUSTIVE-REFUSED";
            stamp(std::move(row));
          }
          break;
        }
      }
    }
  }
  return out;
}

inline unsigned workers_from_env() {
  const char* v = std::getenv("IRSPLACE_WORKERS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) return 1;
  return static_cast<unsigned>(std::min(n, 256L));
}

}  // namespace detail

/// Means per (sweep point, duplex, algorithm). A failed LPR-RA scenario
/// enters the LPR-RA mean with its fallback result, so the mean describes
/// what the randomized pipeline delivers.
inline std::vector<AggregateRow> aggregate(const ExperimentConfig& cfg, const std::vector<ResultRow>& rows) {
  std::vector<AggregateRow> out;
  for (std::size_t si = 0; si < cfg.sweep_values.size(); ++si) {
    const double value = cfg.sweep_values[si];
    for (Duplex d : cfg.duplex) {
      for (Algorithm a : cfg.algorithms) {
        const std::string name = to_string(a);
        AggregateRow agg;
        agg.sweep_value = value;
        agg.duplex = d;
        agg.algorithm = name;
        double sum = 0.0, sum_sq = 0.0, sum_g = 0.0;
        int ra_ok = 0, ra_total = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
          const ResultRow& r = rows[i];
          if (r.sweep_value != value || r.duplex != d || r.algorithm != name || !r.objective_g) continue;
          double g = *r.objective_g;
          if (a == Algorithm::LPR_RA) {
            ++ra_total;
            if (r.feasible.value_or(false)) {
              ++ra_ok;
            } else if (i + 1 < rows.size() && rows[i + 1].algorithm == "LPR-RA-FALLBACK") {
              g = *rows[i + 1].objective_g;
            }
          }
          const double ub = std::exp(g);
          sum += ub;
          sum_sq += ub * ub;
          sum_g += g;
          ++agg.scenarios;
        }
        if (agg.scenarios > 0) {
          const double k = agg.scenarios;
          agg.mean_upper_bound = sum / k;
          agg.mean_objective_g = sum_g / k;
          const double var = agg.scenarios > 1 ? std::max(0.0, (sum_sq - k * agg.mean_upper_bound * agg.mean_upper_bound) / (k - 1)) : 0.0;
          agg.stderr_upper_bound = std::sqrt(var / k);
        }
        if (a == Algorithm::LPR_RA && ra_total > 0) agg.ra_feasible_pct = 100.0 * ra_ok / ra_total;
        out.push_back(agg);
      }
    }
  }
  return out;
}

/// Runs the whole grid. Cells are spread over `workers` threads (0: read
/// IRSPLACE_WORKERS) but rows are always emitted in grid order.
inline ExperimentOutput run_experiment(const ExperimentConfig& cfg, unsigned workers = 0) {
  if (workers == 0) workers = detail::workers_from_env();
  const std::size_t n_cells = cfg.sweep_values.size() * static_cast<std::size_t>(cfg.ensemble_size);
  std::vector<detail::CellOutput> cells(n_cells);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n_cells; i = next++) {
      try {
        cells[i] = detail::run_cell(cfg, i / cfg.ensemble_size, static_cast<int>(i % cfg.ensemble_size));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  workers = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(workers, n_cells)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentOutput out;
  for (auto& c : cells) {
    for (auto& r : c.rows) out.rows.push_back(std::move(r));
    for (auto& g : c.guarantee_lines) out.guarantee_lines.push_back(std::move(g));
  }
  out.aggregates = aggregate(cfg, out.rows);
  return out;
}

inline void write_results_csv(std::ostream& os, const ExperimentOutput& out) {
  os << kResultHeader << '\n';
  for (const auto& r : out.rows) write_row(os, r);
}

inline void write_aggregates_csv(std::ostream& os, const ExperimentOutput& out) {
  os << kAggregateHeader << '\n';
  for (const auto& a : out.aggregates) write_aggregate(os, a);
}

/// results.csv, aggregates.csv and guarantees.jsonl under `dir`.
inline void write_outputs(const std::filesystem::path& dir, const ExperimentOutput& out) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("results.csv");
    write_results_csv(f, out);
  }
  {
    auto f = open("aggregates.csv");
    write_aggregates_csv(f, out);
  }
  {
    auto f = open("guarantees.jsonl");
    for (const auto& line : out.guarantee_lines) f << line << '\n';
  }
}

}  // namespace irsplace
