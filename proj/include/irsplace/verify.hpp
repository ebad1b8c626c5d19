#pragma once

// Self-check suites behind `irsplace verify`. Each returns a list of named
// checks with a JSON detail blob; the CLI turns any failure into exit code 1.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "irsplace/io.hpp"
#include "irsplace/lp.hpp"
#include "irsplace/mcsim.hpp"
#include "irsplace/problem.hpp"
#include "irsplace/randomized.hpp"
#include "irsplace/solvers.hpp"

namespace irsplace {

struct Check {
  std::string name;
  bool passed = true;
  json detail;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::vector<Check> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
  }

  json to_json() const {
    json arr = json::array();
    for (const auto& c : checks) arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return {{"suite", suite}, {"seed", seed}, {"trials", trials}, {"passed", passed()}, {"checks", arr}};
  }
};

// ---------------------------------------------------------------------------
// Random small instances for oracle comparisons

/// Small instance with N <= max_sites and L ranges at most `max_width` wide.
/// Budgets are drawn so that each constraint binds on a good share of draws.
inline ProblemInstance random_small_instance(std::uint64_t seed, int max_sites = 6, int max_width = 4) {
  Rng rng = Rng::stream(seed, {0x5A11ULL});
  ScenarioConfig cfg;
  cfg.n_sites = static_cast<int>(rng.uniform_int(1, max_sites));
  cfg.max_irs = static_cast<int>(rng.uniform_int(1, cfg.n_sites));
  cfg.element_min = static_cast<int>(rng.uniform_int(1, 30));
  cfg.element_max = cfg.element_min + static_cast<int>(rng.uniform_int(0, max_width - 1));
  const double l_hi = static_cast<double>(cfg.element_max) * cfg.max_irs;
  cfg.max_total_elements = std::floor(rng.uniform(0.3, 1.1) * l_hi);
  cfg.max_total_cost = rng.uniform(0.2, 1.1) * cfg.max_irs * (5.0 + 0.5 * cfg.element_max);
  cfg.budget.sinr_threshold = db_to_linear(rng.uniform(0.0, 10.0));
  return generate_scenario(cfg, rng());
}

/// 0/1 knapsack optimum by dynamic programming over capacity.
inline long long knapsack_dp(const std::vector<long long>& values, const std::vector<long long>& weights,
                             long long capacity) {
  std::vector<long long> best(static_cast<std::size_t>(capacity) + 1, 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (long long c = capacity; c >= weights[i]; --c) {
      best[c] = std::max(best[c], best[c - weights[i]] + values[i]);
    }
  }
  return best[static_cast<std::size_t>(capacity)];
}

// ---------------------------------------------------------------------------
// Suites

/// LP value <= exhaustive optimum <= rounded heuristics on random small
/// instances, and exhaustive == knapsack DP on reduction instances.
inline SuiteReport verify_oracle(std::uint64_t instances = 200, std::uint64_t seed = 1) {
  SuiteReport rep{"oracle", seed, instances, {}};
  constexpr double kLpTol = 1e-7;
  int sandwich_fail = 0, ra_runs = 0;
  json failures = json::array();
  for (std::uint64_t i = 0; i < instances; ++i) {
    const ProblemInstance inst = random_small_instance(derive_seed(seed, {i}));
    const LpSolution lp = lower_bound(inst);
    const SolveResult opt = exhaustive(inst);
    const SolveResult ga = lpr_ga(inst, lp);
    const RandomizedRun ra = lpr_ra(inst, lp, 50, derive_seed(seed, {i, 1}));
    bool ok = lp.status == LpStatus::Optimal && lp.g_dagger <= opt.objective + kLpTol &&
              ga.feasibility.feasible && opt.objective <= ga.objective;
    if (ra.result) {
      ++ra_runs;
      ok = ok && opt.objective <= ra.result->objective;
    }
    if (!ok) {
      ++sandwich_fail;
      if (failures.size() < 10) {
        failures.push_back({{"instance", i}, {"g_dagger", lp.g_dagger}, {"g_star", opt.objective},
                            {"g_ga", ga.objective}});
      }
    }
  }
  rep.checks.push_back({"sandwich", sandwich_fail == 0,
                        {{"instances", instances}, {"failures", sandwich_fail}, {"ra_feasible", ra_runs},
                         {"examples", failures}}});

  int knap_fail = 0;
  const std::uint64_t knap_count = std::max<std::uint64_t>(1, instances / 2);
  for (std::uint64_t i = 0; i < knap_count; ++i) {
    Rng rng = Rng::stream(seed, {0x4B4EULL, i});
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 12));
    std::vector<long long> v(n), w(n);
    long long wsum = 0;
    for (std::size_t k = 0; k < n; ++k) {
      v[k] = rng.uniform_int(1, 100);
      w[k] = rng.uniform_int(1, 30);
      wsum += w[k];
    }
    const long long cap = rng.uniform_int(0, wsum);
    const ProblemInstance inst = knapsack_reduction(v, w, cap);
    const SolveResult opt = exhaustive(inst);
    if (static_cast<long long>(-opt.objective) != knapsack_dp(v, w, cap)) ++knap_fail;
  }
  rep.checks.push_back({"knapsack", knap_fail == 0, {{"instances", knap_count}, {"failures", knap_fail}}});
  return rep;
}

/// Sample means of many rounding draws against the relaxation, and the
/// frequency of each deviation event against its Hoeffding bound.
inline SuiteReport verify_guarantees(std::uint64_t trials = 100000, std::uint64_t seed = 1) {
  SuiteReport rep{"guarantees", seed, trials, {}};
  const ProblemInstance inst = generate_scenario(ScenarioConfig{}, seed);
  const LpSolution lp = lower_bound(inst);
  const GuaranteeBundle g = guarantees(inst, lp);
  const RoundingPlan plan = make_rounding_plan(inst, lp);

  std::array<double, 4> sum{}, sum_sq{};
  std::array<std::uint64_t, 4> hits{};
  std::uint64_t joint3 = 0, joint4 = 0;
  for (std::uint64_t t = 1; t <= trials; ++t) {
    Rng rng = trial_stream(seed, static_cast<int>(t));
    const TrialOutcome o = round_once(inst, plan, rng, static_cast<int>(t));
    const std::array<double, 4> v{o.objective, static_cast<double>(o.feasibility.cardinality),
                                  static_cast<double>(o.feasibility.total_elements), o.feasibility.total_cost};
    for (std::size_t k = 0; k < 4; ++k) {
      sum[k] += v[k];
      sum_sq[k] += v[k] * v[k];
    }
    const auto ev = deviation_events(inst, g, lp.g_dagger, o);
    for (std::size_t k = 0; k < 4; ++k) hits[k] += ev[k] ? 1 : 0;
    joint3 += (ev[1] && ev[2] && ev[3]) ? 1 : 0;
    joint4 += (ev[0] && ev[1] && ev[2] && ev[3]) ? 1 : 0;
  }
  const double k_trials = static_cast<double>(trials);
  const std::array<double, 4> target{g.expectation.objective, g.expectation.cardinality,
                                     g.expectation.total_elements, g.expectation.total_cost};
  const char* names[] = {"objective", "cardinality", "total_elements", "total_cost"};
  for (std::size_t k = 0; k < 4; ++k) {
    const double mean = sum[k] / k_trials;
    const double var = std::max(0.0, (sum_sq[k] - k_trials * mean * mean) / (k_trials - 1.0));
    const double se = std::sqrt(var / k_trials);
    const double tol = 4.0 * se + 1e-9 * (1.0 + std::abs(target[k]));
    rep.checks.push_back({std::string("mean_") + names[k], std::abs(mean - target[k]) <= tol,
                          {{"mean", mean}, {"target", target[k]}, {"stderr", se}}});
  }
  for (std::size_t k = 0; k < 4; ++k) {
    const double freq = static_cast<double>(hits[k]) / k_trials;
    rep.checks.push_back({"event_E" + std::to_string(k), freq >= 1.0 - g.xi,
                          {{"frequency", freq}, {"required", 1.0 - g.xi}, {"epsilon", g.epsilon[k]}}});
  }
  const double f3 = static_cast<double>(joint3) / k_trials;
  const double f4 = static_cast<double>(joint4) / k_trials;
  rep.checks.push_back({"joint_budgets", f3 >= 1.0 - g.xi_prime, {{"frequency", f3}, {"required", 1.0 - g.xi_prime}}});
  rep.checks.push_back({"joint_all", f4 >= 1.0 - g.xi_double_prime,
                        {{"frequency", f4}, {"required", 1.0 - g.xi_double_prime}}});
  return rep;
}

/// Simulated outage against the closed-form bounds for random installations
/// with equal element counts L in {1, 2, 5, 10}.
inline SuiteReport verify_bounds(std::uint64_t trials = 100000, std::uint64_t seed = 1, int pairs = 20) {
  SuiteReport rep{"bounds", seed, trials, {}};
  for (int p = 0; p < pairs; ++p) {
    Rng rng = Rng::stream(seed, {0xB0D5ULL, static_cast<std::uint64_t>(p)});
    ScenarioConfig cfg;
    cfg.n_sites = 8;
    cfg.element_min = 1;
    cfg.element_max = 10;
    cfg.budget.sinr_threshold = db_to_linear(rng.uniform(3.0, 9.0));
    const ProblemInstance inst = generate_scenario(cfg, rng());
    const auto k = static_cast<std::size_t>(rng.uniform_int(1, 3));
    std::vector<std::size_t> ids(inst.size());
    std::iota(ids.begin(), ids.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(ids.size() - i - 1)));
      std::swap(ids[i], ids[j]);
    }
    for (int l : {1, 2, 5, 10}) {
      std::vector<std::uint8_t> x(inst.size(), 0);
      std::vector<int> el(inst.size(), l);
      for (std::size_t i = 0; i < k; ++i) x[ids[i]] = 1;
      const Solution sol(inst, x, el);
      const BoundReport r = validate_bound(inst, sol, cfg.budget, trials, rng());
      bool ok = r.ok();
      const double gap = std::abs(r.system.p_hat - r.system_bound);
      if (l == 1) ok = ok && gap <= 4.0 * r.system.std_error;
      rep.checks.push_back({"pair" + std::to_string(p) + "_L" + std::to_string(l), ok,
                            {{"installed", k}, {"p_hat", r.system.p_hat}, {"stderr", r.system.std_error},
                             {"bound", r.system_bound}}});
    }
  }
  return rep;
}

/// Residual LI at which the FD and HD per-link bounds coincide, in dBm, by
/// bisection on beta_FD - beta_HD for one representative site.
inline double crossover_by_bisection(double tx_dbm, double noise_dbm, double gamma_db, double delta) {
  const FadeDistribution fade = RayleighProduct{1.0};
  LinkBudget fd{dbm_to_mw(tx_dbm), dbm_to_mw(noise_dbm), 0.0, db_to_linear(gamma_db), Duplex::FD};
  const LinkBudget hd = to_half_duplex(fd);
  const double beta_hd = beta_coeff(fade, hd, effective_gain(hd, delta));
  auto diff = [&](double li_dbm) {
    fd.residual_li_mw = dbm_to_mw(li_dbm);
    return beta_coeff(fade, fd, effective_gain(fd, delta)) - beta_hd;
  };
  double lo = -120.0, hi = -40.0;  // FD better at lo, worse at hi
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    (diff(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline SuiteReport verify_crossover() {
  SuiteReport rep{"crossover", 0, 0, {}};
  constexpr double tx = 25.0, noise = -80.0, gamma_db = 9.0;
  constexpr double expected = -70.49, tol = 0.2;
  const double closed = mw_to_dbm(fd_hd_crossover_li_mw(dbm_to_mw(noise), db_to_linear(gamma_db)));
  rep.checks.push_back({"closed_form", std::abs(closed - expected) <= tol, {{"li_dbm", closed}}});
  const PathLossParams pl;
  for (double d1 : {30.0, 50.0, 80.0}) {
    const double delta = path_loss(pl, std::hypot(d1, 30.0)) * path_loss(pl, std::hypot(100.0 - d1, 30.0));
    const double b = crossover_by_bisection(tx, noise, gamma_db, delta);
    rep.checks.push_back({"bisection_d" + fmt_double(d1), std::abs(b - closed) <= 1e-6,
                          {{"li_dbm", b}, {"closed_form", closed}}});
  }
  return rep;
}

}  // namespace irsplace
