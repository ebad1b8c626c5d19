#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "irsplace/randomized.hpp"

using namespace irsplace;

namespace {

IrsSite site(std::size_t id, int lmin, int lmax, double c, double lambda, double beta) {
  IrsSite s;
  s.id = id;
  s.l_min = lmin;
  s.l_max = lmax;
  s.fixed_cost = c;
  s.cost_rate = lambda;
  s.beta = beta;
  return s;
}

LpSolution fake_lp(std::vector<double> x, std::vector<double> z, const ProblemInstance& inst) {
  LpSolution s;
  s.status = LpStatus::Optimal;
  s.x_dagger = std::move(x);
  s.z_dagger = std::move(z);
  for (std::size_t n = 0; n < inst.size(); ++n) s.g_dagger += inst.site(n).beta * s.z_dagger[n];
  return s;
}

}  // namespace

TEST(Rounding, DegenerateAndHalfCases) {
  ProblemInstance inst({site(0, 5, 40, 1, 0.5, -1), site(1, 5, 40, 1, 0.5, -1), site(2, 5, 40, 1, 0.5, -1)}, 3, 250, 75);
  const LpSolution lp = fake_lp({1.0, 0.5, 0.0}, {40.0, 10.0, 0.0}, inst);
  const RoundingPlan plan = make_rounding_plan(inst, lp);
  constexpr int kTrials = 200000;
  double x1 = 0, z1 = 0, l2 = 0, xz2 = 0;
  for (int t = 1; t <= kTrials; ++t) {
    Rng rng = trial_stream(3, t);
    const TrialOutcome o = round_once(inst, plan, rng, t);
    ASSERT_TRUE(o.candidate.installed(0));
    ASSERT_EQ(o.candidate.elements()[0], 40);
    ASSERT_EQ(o.candidate.elements()[1], 20);
    ASSERT_FALSE(o.candidate.installed(2));
    x1 += o.candidate.installed(1);
    z1 += o.candidate.installed(1) * o.candidate.elements()[1];
    l2 += o.candidate.elements()[2];
    xz2 += o.candidate.installed(2) * o.candidate.elements()[2];
  }
  // Bernoulli(1/2): sd 0.5 / sqrt(K); x L has sd 10 / sqrt(K);
  // uniform{5..40}: sd ~10.39 / sqrt(K). Four standard errors each.
  EXPECT_NEAR(x1 / kTrials, 0.5, 4 * 0.5 / std::sqrt(kTrials));
  EXPECT_NEAR(z1 / kTrials, 10.0, 4 * 10.0 / std::sqrt(kTrials));
  EXPECT_NEAR(l2 / kTrials, 22.5, 4 * 10.39 / std::sqrt(kTrials));
  EXPECT_EQ(xz2, 0.0);
}

TEST(Rounding, FractionalElementsHitFloorOrCeiling) {
  ProblemInstance inst({site(0, 5, 40, 1, 0.5, -1)}, 1, 250, 75);
  // L_dagger = 13.3 / 0.5 = 26.6: 27 with probability 0.6.
  const RoundingPlan plan = make_rounding_plan(inst, fake_lp({0.5}, {13.3}, inst));
  int ceil_hits = 0;
  constexpr int kTrials = 100000;
  for (int t = 1; t <= kTrials; ++t) {
    Rng rng = trial_stream(9, t);
    const int l = round_once(inst, plan, rng).candidate.elements()[0];
    ASSERT_TRUE(l == 26 || l == 27);
    ceil_hits += l == 27;
  }
  EXPECT_NEAR(static_cast<double>(ceil_hits) / kTrials, 0.6, 4 * std::sqrt(0.24 / kTrials));
}

TEST(Rounding, ElementBoundsOverAMillionTrials) {
  const ProblemInstance inst = generate_scenario(ScenarioConfig{}, 17);
  Rng noise(4);
  std::vector<double> x(inst.size()), z(inst.size());
  for (std::size_t n = 0; n < inst.size(); ++n) {
    const double r = noise.uniform();
    x[n] = r < 0.2 ? 0.0 : (r < 0.3 ? 1.0 : noise.uniform());
    const IrsSite& s = inst.site(n);
    // LP-noise outside the linking band on purpose.
    z[n] = x[n] * noise.uniform(s.l_min - 1e-10, s.l_max + 1e-10);
  }
  const RoundingPlan plan = make_rounding_plan(inst, fake_lp(x, z, inst));
  for (int t = 1; t <= 1000000 / 25; ++t) {
    Rng rng = trial_stream(1, t);
    for (int rep = 0; rep < 25; ++rep) {
      const TrialOutcome o = round_once(inst, plan, rng, t);  // throws on any bound violation
      for (std::size_t n = 0; n < inst.size(); ++n) {
        ASSERT_GE(o.candidate.elements()[n], inst.site(n).l_min);
        ASSERT_LE(o.candidate.elements()[n], inst.site(n).l_max);
      }
    }
  }
}

TEST(LprRa, IntegralRelaxationSucceedsFirstTrial) {
  ProblemInstance inst({site(0, 5, 40, 1, 0.5, -1)}, 1, 250, 75);
  const RandomizedRun run = lpr_ra(inst, lower_bound(inst), 50, 123);
  ASSERT_TRUE(run.result.has_value());
  EXPECT_EQ(*run.result->meta.trial_index, 1);
  EXPECT_EQ(run.result->objective, -40.0);
  EXPECT_EQ(run.trials.size(), 1u);
}

TEST(LprRa, FailureKeepsAllTrials) {
  // x = (1, 1) with M = 1 can never round to a feasible point.
  ProblemInstance inst({site(0, 5, 40, 1, 0.5, -1), site(1, 5, 40, 1, 0.5, -1)}, 1, 250, 75);
  const RandomizedRun run = lpr_ra(inst, fake_lp({1, 1}, {40, 40}, inst), 7, 5);
  EXPECT_TRUE(run.failed());
  EXPECT_EQ(run.trials.size(), 7u);
  for (int t = 0; t < 7; ++t) EXPECT_EQ(run.trials[t].trial_index, t + 1);
  EXPECT_THROW(lpr_ra(inst, fake_lp({1, 1}, {40, 40}, inst), 0, 5), std::invalid_argument);
}

TEST(LprRa, DeterministicPerSeed) {
  const ProblemInstance inst = generate_scenario(ScenarioConfig{}, 2);
  const LpSolution lp = lower_bound(inst);
  const RandomizedRun a = lpr_ra(inst, lp, 50, 99), b = lpr_ra(inst, lp, 50, 99);
  ASSERT_EQ(a.trials.size(), b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) EXPECT_EQ(a.trials[i].candidate, b.trials[i].candidate);
  // Trial t of a longer run is the same draw as trial t replayed on its own.
  Rng rng = trial_stream(99, 1);
  EXPECT_EQ(round_once(inst, make_rounding_plan(inst, lp), rng).candidate, a.trials[0].candidate);
}

TEST(LprRa, FirstFeasibleByIndex) {
  const ProblemInstance inst = generate_scenario(ScenarioConfig{}, 6);
  const LpSolution lp = lower_bound(inst);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const RandomizedRun run = lpr_ra(inst, lp, 50, seed);
    if (!run.result) continue;
    const int idx = *run.result->meta.trial_index;
    EXPECT_EQ(static_cast<std::size_t>(idx), run.trials.size());
    for (int t = 0; t + 1 < idx; ++t) EXPECT_FALSE(run.trials[t].feasibility.feasible);
    EXPECT_TRUE(run.result->feasibility.feasible);
  }
}

TEST(Guarantees, ReferenceSizeConstants) {
  const ProblemInstance inst = generate_scenario(ScenarioConfig{}, 1);
  const GuaranteeBundle g = guarantees(inst, lower_bound(inst));
  EXPECT_NEAR(g.xi, 1.0 / 676.0, 1e-18);
  EXPECT_NEAR(g.xi, 1.479e-3, 1e-6);
  EXPECT_NEAR(g.xi_prime, 4.438e-3, 1e-6);
  EXPECT_NEAR(g.xi_double_prime, 5.917e-3, 1e-6);
  EXPECT_EQ(g.delta[1], 25.0);
  EXPECT_NEAR(g.epsilon[1], std::sqrt(25 * std::log(26.0)), 1e-12);
  EXPECT_NEAR(g.epsilon[1], 9.03, 0.01);
  double d0 = 0, d2 = 0, d3 = 0;
  for (const IrsSite& s : inst.sites()) {
    d0 += std::pow(s.beta * s.l_max, 2);
    d2 += std::pow(s.l_max, 2);
    d3 += std::pow(s.fixed_cost + s.cost_rate * s.l_max, 2);
  }
  EXPECT_NEAR(g.delta[0], d0, 1e-9 * d0);
  EXPECT_EQ(g.delta[2], d2);
  EXPECT_NEAR(g.delta[3], d3, 1e-9 * d3);
}

TEST(Guarantees, DegenerateInstanceRejected) {
  ProblemInstance flat({site(0, 5, 40, 1, 0.5, 0.0)}, 1, 250, 75);
  EXPECT_THROW(guarantees(flat, lower_bound(flat)), DegenerateInstance);
  ProblemInstance free({site(0, 5, 40, 0, 0, -1)}, 1, 250, 75);
  EXPECT_THROW(guarantees(free, lower_bound(free)), DegenerateInstance);
}

TEST(Bounds, MultiTrial) {
  EXPECT_DOUBLE_EQ(multi_trial_success_bound(0.2, 1), 0.8);
  EXPECT_NEAR(1.0 - multi_trial_success_bound(4.438e-3, 2), 1.97e-5, 1e-7);
  double prev = 0.0;
  for (int t = 1; t < 200; ++t) {
    const double b = multi_trial_success_bound(0.75, t);
    // 0.75^t drops below half an ulp of 1 near t = 128.
    if (t < 100) {
      EXPECT_GT(b, prev);
    } else {
      EXPECT_GE(b, prev);
    }
    prev = b;
  }
  EXPECT_NEAR(prev, 1.0, 1e-20);
  EXPECT_THROW(multi_trial_success_bound(0.8, 1), std::domain_error);
  EXPECT_THROW(multi_trial_success_bound(0.5, 0), std::domain_error);
}

TEST(Bounds, Hoeffding) {
  const double delta = 123.4;
  const double n_sites = 25;
  EXPECT_NEAR(hoeffding_tail(delta, std::sqrt(delta * std::log(n_sites + 1))), 1.0 / 676.0, 1e-15);
  EXPECT_NEAR(hoeffding_tail(delta, 1e-9), 1.0, 1e-12);
  const double u = 3.7;
  EXPECT_NEAR(hoeffding_tail(delta / 2, u), std::pow(hoeffding_tail(delta, u), 2), 1e-15);
}
