#pragma once

// LP-guided randomized rounding, the retry wrapper, and the closed-form
// expectation/deviation guarantees that come with it.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "irsplace/lp.hpp"
#include "irsplace/problem.hpp"
#include "irsplace/random.hpp"
#include "irsplace/solvers.hpp"

namespace irsplace {

/// Per-site rounding parameters derived once from the relaxation.
///
/// Sites with x_dagger <= kLpZero use the uniform element rule and are never
/// installed. Otherwise x~ ~ Bernoulli(p_install) and
/// L~ = floor + Bernoulli(frac), with L_dagger = z/x clamped into
/// [l_min, l_max] and snapped to an integer within kLpZero.
struct RoundingPlan {
  struct Site {
    bool lp_zero = true;
    double p_install = 0.0;
    int floor = 0;
    double frac = 0.0;
    int l_min = 0;
    int l_max = 0;
  };
  std::vector<Site> sites;
};

inline RoundingPlan make_rounding_plan(const ProblemInstance& instance, const LpSolution& lpr) {
  if (lpr.status != LpStatus::Optimal) throw std::invalid_argument("rounding: relaxation not optimal");
  if (lpr.x_dagger.size() != instance.size()) throw std::invalid_argument("rounding: relaxation size mismatch");
  RoundingPlan plan;
  plan.sites.resize(instance.size());
  for (std::size_t n = 0; n < instance.size(); ++n) {
    const IrsSite& s = instance.site(n);
    RoundingPlan::Site& p = plan.sites[n];
    p.l_min = s.l_min;
    p.l_max = s.l_max;
    const double x = lpr.x_dagger[n];
    if (x <= kLpZero) continue;
    p.lp_zero = false;
    p.p_install = x >= 1.0 - kLpZero ? 1.0 : x;
    double ld = std::clamp(lpr.z_dagger[n] / x, double(s.l_min), double(s.l_max));
    if (std::abs(ld - std::round(ld)) < kLpZero) ld = std::round(ld);
    p.floor = static_cast<int>(std::floor(ld));
    p.frac = ld - p.floor;
  }
  return plan;
}

struct TrialOutcome {
  Solution candidate;
  FeasibilityReport feasibility;
  double objective = 0.0;
  int trial_index = 0;
};

/// One rounding draw. Per site the generator is consumed in a fixed order:
/// one uniform for x~, then one uniform (x_dagger > 0) or one integer draw.
inline TrialOutcome round_once(const ProblemInstance& instance, const RoundingPlan& plan, Rng& rng,
                               int trial_index = 1) {
  std::vector<std::uint8_t> x(instance.size(), 0);
  std::vector<int> l(instance.size(), 0);
  for (std::size_t n = 0; n < instance.size(); ++n) {
    const RoundingPlan::Site& p = plan.sites[n];
    const double r = rng.uniform();
    x[n] = (!p.lp_zero && r < p.p_install) ? 1 : 0;
    if (p.lp_zero) {
      l[n] = static_cast<int>(rng.uniform_int(p.l_min, p.l_max));
    } else {
      const double s = rng.uniform();
      l[n] = p.floor + (s < p.frac ? 1 : 0);
    }
  }
  Solution sol(instance, std::move(x), std::move(l));
  const double g = objective_g(instance, sol);
  FeasibilityReport f = check_feasibility(instance, sol);
  return TrialOutcome{std::move(sol), std::move(f), g, trial_index};
}

inline TrialOutcome lpr_ra_round(const ProblemInstance& instance, const LpSolution& lpr, Rng& rng,
                                 int trial_index = 1) {
  return round_once(instance, make_rounding_plan(instance, lpr), rng, trial_index);
}

/// Stream for trial t (1-based) of a rounding run seeded with `seed`.
inline Rng trial_stream(std::uint64_t seed, int trial_index) {
  return Rng::stream(seed, {0x7A1A15ULL, static_cast<std::uint64_t>(trial_index)});
}

struct RandomizedRun {
  std::optional<SolveResult> result;  // empty: no feasible trial within t_max
  std::vector<TrialOutcome> trials;

  bool failed() const noexcept { return !result.has_value(); }
};

/// Repeats independent rounding trials until one is feasible or t_max trials
/// have run. The accepted candidate is the first feasible one by trial index.
inline RandomizedRun lpr_ra(const ProblemInstance& instance, const LpSolution& lpr, int t_max, std::uint64_t seed) {
  if (t_max < 1) throw std::invalid_argument("lpr_ra: t_max must be >= 1");
  detail::Stopwatch watch;
  const RoundingPlan plan = make_rounding_plan(instance, lpr);
  RandomizedRun run;
  for (int t = 1; t <= t_max; ++t) {
    Rng rng = trial_stream(seed, t);
    run.trials.push_back(round_once(instance, plan, rng, t));
    const TrialOutcome& out = run.trials.back();
    if (out.feasibility.feasible) {
      SolveMeta meta;
      meta.algorithm = Algorithm::LPR_RA;
      meta.trial_index = t;
      meta.lp_gap = out.objective - lpr.g_dagger;
      meta.candidates = static_cast<std::uint64_t>(t);
      run.result = SolveResult{out.candidate, out.objective, out.feasibility, meta};
      break;
    }
  }
  if (run.result) run.result->meta.runtime_micros = watch.micros();
  return run;
}

// ---------------------------------------------------------------------------
// Guarantees

struct ExpectationTargets {
  double objective = 0.0;       // G_dagger
  double cardinality = 0.0;     // sum x_dagger
  double total_elements = 0.0;  // sum z_dagger
  double total_cost = 0.0;      // sum c x_dagger + sum lambda z_dagger
};

/// Hoeffding-based deviation tolerances for one rounding draw.
///
/// Index k: 0 objective, 1 cardinality, 2 total elements, 3 total cost.
/// Each event {value_k <= reference_k + epsilon_k} holds with probability at
/// least 1 - xi; the three budget events jointly with 1 - xi_prime, all four
/// with 1 - xi_double_prime.
struct GuaranteeBundle {
  std::array<double, 4> delta{};
  std::array<double, 4> epsilon{};
  double xi = 0.0;
  double xi_prime = 0.0;
  double xi_double_prime = 0.0;
  ExpectationTargets expectation;
};

class DegenerateInstance : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline GuaranteeBundle guarantees(const ProblemInstance& instance, const LpSolution& lpr) {
  if (lpr.status != LpStatus::Optimal) throw std::invalid_argument("guarantees: relaxation not optimal");
  const std::size_t n_sites = instance.size();
  GuaranteeBundle g;
  for (std::size_t n = 0; n < n_sites; ++n) {
    const IrsSite& s = instance.site(n);
    const double lmax = s.l_max;
    g.delta[0] += (s.beta * lmax) * (s.beta * lmax);
    g.delta[2] += lmax * lmax;
    g.delta[3] += s.cost(s.l_max) * s.cost(s.l_max);
  }
  g.delta[1] = static_cast<double>(n_sites);
  for (int k : {0, 2, 3}) {
    if (!(g.delta[static_cast<std::size_t>(k)] > 0.0)) {
      throw DegenerateInstance("guarantees: Delta_" + std::to_string(k) + " is zero");
    }
  }
  if (n_sites == 0) throw DegenerateInstance("guarantees: empty instance");
  const double log_n1 = std::log(static_cast<double>(n_sites) + 1.0);
  for (std::size_t k = 0; k < 4; ++k) g.epsilon[k] = std::sqrt(g.delta[k] * log_n1);
  g.xi = 1.0 / ((n_sites + 1.0) * (n_sites + 1.0));
  g.xi_prime = 3.0 * g.xi;
  g.xi_double_prime = 4.0 * g.xi;

  ExpectationTargets& e = g.expectation;
  e.objective = lpr.g_dagger;
  for (std::size_t n = 0; n < n_sites; ++n) {
    const IrsSite& s = instance.site(n);
    e.cardinality += lpr.x_dagger[n];
    e.total_elements += lpr.z_dagger[n];
    e.total_cost += s.fixed_cost * lpr.x_dagger[n] + s.cost_rate * lpr.z_dagger[n];
  }
  return g;
}

/// Which deviation events a candidate satisfies. `objective_reference`
/// stands in for the unknown global optimum; passing G_dagger <= G* gives a
/// subset of the true objective event.
inline std::array<bool, 4> deviation_events(const ProblemInstance& instance, const GuaranteeBundle& g,
                                            double objective_reference, const TrialOutcome& outcome) {
  return {
      outcome.objective <= objective_reference + g.epsilon[0],
      outcome.feasibility.cardinality <= instance.max_irs() + g.epsilon[1],
      static_cast<double>(outcome.feasibility.total_elements) <= instance.max_total_elements() + g.epsilon[2],
      outcome.feasibility.total_cost <= instance.max_total_cost() + g.epsilon[3],
  };
}

/// 1 - xi'^t: chance that t independent trials produce at least one draw
/// inside all three budget tolerances.
inline double multi_trial_success_bound(double xi_prime, int t) {
  if (!(xi_prime > 0.0 && xi_prime <= 0.75)) throw std::domain_error("xi_prime must lie in (0, 3/4]");
  if (t < 1) throw std::domain_error("t must be >= 1");
  return 1.0 - std::pow(xi_prime, t);
}

/// exp(-2 u^2 / delta): tail bound for a sum of independent bounded terms
/// whose squared ranges add up to delta.
inline double hoeffding_tail(double delta, double u) {
  if (!(delta > 0.0)) throw std::domain_error("hoeffding_tail: delta must be > 0");
  if (!(u > 0.0)) throw std::domain_error("hoeffding_tail: u must be > 0");
  return std::exp(-2.0 * u * u / delta);
}

}  // namespace irsplace
