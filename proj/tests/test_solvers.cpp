#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "irsplace/lp.hpp"
#include "irsplace/solvers.hpp"
#include "irsplace/verify.hpp"

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

struct Brute {
  double g = 0.0;
  std::vector<std::uint8_t> x;
  std::vector<int> l;
  std::uint64_t candidates = 0;
};

// Every (x, L) with L only varying on installed sites; the first minimum met
// in lexicographic (x, L) order wins.
Brute brute_force(const ProblemInstance& inst) {
  const std::size_t n = inst.size();
  Brute best;
  best.x.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) best.l.push_back(inst.site(i).l_min);
  bool have = false;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<std::uint8_t> x(n);
    int card = 0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = (mask >> (n - 1 - i)) & 1u;
      card += x[i];
    }
    if (card > inst.max_irs()) continue;
    std::vector<int> l(n);
    for (std::size_t i = 0; i < n; ++i) l[i] = inst.site(i).l_min;
    while (true) {
      ++best.candidates;
      const Solution s(inst, x, l);
      if (check_feasibility(inst, s).feasible) {
        const double g = objective_g(inst, s);
        const bool better = !have || g < best.g || (g == best.g && std::make_pair(x, l) < std::make_pair(best.x, best.l));
        if (better) {
          have = true;
          best.g = g;
          best.x = x;
          best.l = l;
        }
      }
      std::size_t p = n;
      bool done = true;
      while (p > 0) {
        --p;
        if (!x[p]) continue;
        if (l[p] < inst.site(p).l_max) {
          ++l[p];
          done = false;
          break;
        }
        l[p] = inst.site(p).l_min;
      }
      if (done) break;
    }
  }
  return best;
}

}  // namespace

TEST(Exhaustive, HandExample) {
  ProblemInstance inst({site(0, 1, 2, 0, 1, -1), site(1, 1, 2, 0, 1, -2)}, 2, 3, 3);
  const SolveResult r = exhaustive(inst);
  EXPECT_EQ(r.objective, -5.0);
  EXPECT_EQ(std::vector<std::uint8_t>(r.solution.x().begin(), r.solution.x().end()), (std::vector<std::uint8_t>{1, 1}));
  EXPECT_EQ(std::vector<int>(r.solution.elements().begin(), r.solution.elements().end()), (std::vector<int>{1, 2}));
  EXPECT_EQ(exhaustive_candidate_count(inst), 9u);
  EXPECT_EQ(r.meta.candidates, 9u);
}

TEST(Exhaustive, CandidateCount) {
  ProblemInstance inst({site(0, 1, 2, 0, 0, -1), site(1, 1, 2, 0, 0, -1), site(2, 1, 2, 0, 0, -1)}, 2, 100, 100);
  EXPECT_EQ(exhaustive_candidate_count(inst), 19u);
  EXPECT_EQ(exhaustive(inst).meta.candidates, 19u);
}

TEST(Exhaustive, ZeroCardinality) {
  ProblemInstance inst({site(0, 1, 2, 0, 0, -1), site(1, 1, 2, 0, 0, -3)}, 0, 100, 100);
  const SolveResult r = exhaustive(inst);
  EXPECT_EQ(r.objective, 0.0);
  EXPECT_EQ(r.feasibility.cardinality, 0);
}

TEST(Exhaustive, RefusesAboveCap) {
  ProblemInstance inst({site(0, 1, 10, 0, 0, -1), site(1, 1, 10, 0, 0, -1)}, 2, 100, 100);
  EXPECT_EQ(exhaustive_candidate_count(inst), 121u);
  try {
    exhaustive(inst, 100);
    FAIL() << "expected refusal";
  } catch (const ExhaustiveRefused& e) {
    EXPECT_EQ(e.candidates(), 121u);
  }
}

TEST(Exhaustive, MatchesBruteForceIncludingTies) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    ProblemInstance inst = random_small_instance(seed, 5, 3);
    if (seed % 3 == 0) {
      // Integer betas and costs make exact ties common.
      std::vector<IrsSite> sites(inst.sites().begin(), inst.sites().end());
      for (auto& s : sites) {
        s.beta = -static_cast<double>(1 + (s.id % 2));
        s.fixed_cost = 1.0;
        s.cost_rate = 0.0;
      }
      inst = ProblemInstance(sites, inst.max_irs(), inst.max_total_elements(), 2.0);
    }
    const SolveResult r = exhaustive(inst);
    const Brute b = brute_force(inst);
    EXPECT_EQ(r.objective, b.g) << "seed " << seed;
    EXPECT_EQ(std::vector<std::uint8_t>(r.solution.x().begin(), r.solution.x().end()), b.x) << "seed " << seed;
    EXPECT_EQ(std::vector<int>(r.solution.elements().begin(), r.solution.elements().end()), b.l) << "seed " << seed;
    EXPECT_EQ(r.meta.candidates, b.candidates);
    EXPECT_EQ(exhaustive_candidate_count(inst), b.candidates);
    EXPECT_TRUE(r.feasibility.feasible);
  }
}

TEST(Exhaustive, KnapsackExamples) {
  const std::vector<long long> v{6, 10, 12}, w{1, 2, 3};
  EXPECT_EQ(exhaustive(knapsack_reduction(v, w, 5)).objective, -22.0);
  EXPECT_EQ(exhaustive(knapsack_reduction(v, w, 6)).objective, -28.0);
  EXPECT_EQ(exhaustive(knapsack_reduction(v, w, 0)).objective, 0.0);
}

TEST(Exhaustive, KnapsackMatchesDp) {
  // Independent DP, written separately from the one in verify.hpp.
  auto dp = [](const std::vector<long long>& v, const std::vector<long long>& w, long long cap) {
    std::vector<std::vector<long long>> t(v.size() + 1, std::vector<long long>(cap + 1, 0));
    for (std::size_t i = 1; i <= v.size(); ++i) {
      for (long long c = 0; c <= cap; ++c) {
        t[i][c] = t[i - 1][c];
        if (w[i - 1] <= c) t[i][c] = std::max(t[i][c], t[i - 1][c - w[i - 1]] + v[i - 1]);
      }
    }
    return t[v.size()][cap];
  };
  Rng rng(77);
  for (int k = 0; k < 100; ++k) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 12));
    std::vector<long long> v(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = rng.uniform_int(1, 60);
      w[i] = rng.uniform_int(1, 20);
    }
    const long long cap = rng.uniform_int(0, 50);
    const SolveResult r = exhaustive(knapsack_reduction(v, w, cap));
    EXPECT_EQ(static_cast<long long>(-r.objective), dp(v, w, cap));
    EXPECT_EQ(static_cast<long long>(-r.objective), knapsack_dp(v, w, cap));
  }
}

TEST(LprGa, SingleSiteHasZeroGap) {
  ProblemInstance inst({site(0, 5, 40, 1, 0.5, -1)}, 1, 250, 75);
  const SolveResult r = lpr_ga(inst, lower_bound(inst));
  EXPECT_EQ(r.solution.elements()[0], 40);
  EXPECT_TRUE(r.solution.installed(0));
  EXPECT_EQ(r.objective, -40.0);
  ASSERT_TRUE(r.meta.lp_gap.has_value());
  EXPECT_NEAR(*r.meta.lp_gap, 0.0, 1e-12);
}

TEST(LprGa, ElementRounding) {
  ProblemInstance inst({site(0, 5, 40, 1, 0.5, -1), site(1, 5, 40, 1, 0.5, -1), site(2, 5, 40, 1, 0.5, -1)}, 3, 250, 75);
  const auto l = lpr_rounded_elements(inst, fake_lp({0.5, 0.0, 1e-12}, {10.0, 0.0, 0.0}, inst));
  EXPECT_EQ(l[0], 20);
  EXPECT_EQ(l[1], 23);  // floor(22.5 + 0.5)
  EXPECT_EQ(l[2], 23);  // below the zero threshold
  // Ratio drifting just outside the range is clamped, not rejected.
  const auto l2 = lpr_rounded_elements(inst, fake_lp({1.0, 0.5, 0.5}, {40.0 + 1e-10, 2.5 - 1e-10, 12.25}, inst));
  EXPECT_EQ(l2[0], 40);
  EXPECT_EQ(l2[1], 5);
  EXPECT_EQ(l2[2], 25);  // 24.5 rounds up
  EXPECT_EQ(round_half_up(-0.5), 0);
  EXPECT_EQ(round_half_up(2.4999), 2);
}

TEST(LprGa, OrderFollowsRelaxationWithIdTieBreak) {
  // Cardinality 1: the single site with the largest x wins; equal x goes to
  // the lower id.
  ProblemInstance inst({site(0, 5, 10, 1, 0, -1), site(1, 5, 10, 1, 0, -5), site(2, 5, 10, 1, 0, -9)}, 1, 250, 75);
  const SolveResult a = lpr_ga(inst, fake_lp({0.2, 0.7, 0.1}, {2, 7, 1}, inst));
  EXPECT_TRUE(a.solution.installed(1));
  const SolveResult b = lpr_ga(inst, fake_lp({0.5, 0.5, 0.5}, {5, 5, 5}, inst));
  EXPECT_TRUE(b.solution.installed(0));
  EXPECT_EQ(b.feasibility.cardinality, 1);
}

TEST(Greedy, DropsLastSiteThatBreaksBudget) {
  // Two identical sites at L = 40 with an element budget of 60: the second
  // one overshoots and is removed again.
  ProblemInstance inst({site(0, 5, 40, 1, 0, -1), site(1, 5, 40, 1, 0, -1)}, 2, 60, 75);
  const SolveResult r = mega(inst);
  EXPECT_EQ(r.feasibility.cardinality, 1);
  EXPECT_TRUE(r.solution.installed(0));
  EXPECT_TRUE(r.feasibility.feasible);
}

TEST(Baselines, ElementChoices) {
  ProblemInstance inst({site(0, 5, 40, 1, 0.1, -1), site(1, 5, 40, 1, 0.1, -2)}, 2, 250, 75);
  const SolveResult a = aega(inst), m = mega(inst);
  for (std::size_t n = 0; n < 2; ++n) {
    EXPECT_EQ(a.solution.elements()[n], 23);
    EXPECT_EQ(m.solution.elements()[n], 40);
  }
}

TEST(Baselines, OrderingAndCardinality) {
  ProblemInstance inst({site(0, 5, 40, 1, 0.1, -2), site(1, 5, 40, 1, 0.1, -1)}, 1, 250, 75);
  EXPECT_TRUE(aega(inst).solution.installed(0));
  EXPECT_FALSE(aega(inst).solution.installed(1));
  ProblemInstance flipped({site(0, 5, 40, 1, 0.1, -1), site(1, 5, 40, 1, 0.1, -2)}, 1, 250, 75);
  EXPECT_TRUE(mega(flipped).solution.installed(1));
  ProblemInstance none({site(0, 5, 40, 1, 0.1, -1)}, 0, 250, 75);
  EXPECT_EQ(mega(none).objective, 0.0);
  EXPECT_EQ(aega(none).objective, 0.0);
}

TEST(Baselines, MegaSelectsFewerUnderTightElementBudget) {
  std::vector<IrsSite> sites;
  for (std::size_t n = 0; n < 5; ++n) sites.push_back(site(n, 5, 40, 1, 0.0, -1));
  ProblemInstance inst(sites, 5, 100, 1000);
  EXPECT_EQ(mega(inst).feasibility.cardinality, 2);
  EXPECT_EQ(aega(inst).feasibility.cardinality, 4);
}

TEST(Heuristics, AlwaysFeasibleAndAboveOptimum) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const ProblemInstance inst = random_small_instance(seed + 1000);
    const LpSolution lp = lower_bound(inst);
    const SolveResult opt = exhaustive(inst);
    for (const SolveResult& r : {lpr_ga(inst, lp), aega(inst), mega(inst)}) {
      EXPECT_TRUE(r.feasibility.feasible) << to_string(r.meta.algorithm) << " seed " << seed;
      EXPECT_GE(r.objective, opt.objective);
      EXPECT_NEAR(r.objective, objective_g(inst, r.solution), 0.0);
    }
    EXPECT_LE(lp.g_dagger, opt.objective + 1e-7);
  }
}

TEST(Heuristics, FeasibleOnReferenceScenarios) {
  Rng rng(5);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    ScenarioConfig cfg;
    cfg.max_total_cost = rng.uniform(5, 200);
    cfg.max_total_elements = rng.uniform(20, 400);
    const ProblemInstance inst = generate_scenario(cfg, seed);
    const LpSolution lp = lower_bound(inst);
    EXPECT_TRUE(lpr_ga(inst, lp).feasibility.feasible);
    EXPECT_TRUE(aega(inst).feasibility.feasible);
    EXPECT_TRUE(mega(inst).feasibility.feasible);
  }
}

TEST(Algorithms, NamesRoundTrip) {
  for (Algorithm a : {Algorithm::LPR, Algorithm::LPR_GA, Algorithm::LPR_RA, Algorithm::AEGA, Algorithm::MEGA,
                      Algorithm::EXHAUSTIVE}) {
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
  }
  EXPECT_FALSE(parse_algorithm("GA").has_value());
}
