#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "irsplace/mcsim.hpp"

using namespace irsplace;

namespace {

// Two sites on the reference geometry with controllable gains.
ProblemInstance two_sites(double rho0, double rho1, int lmax = 10) {
  std::vector<IrsSite> sites(2);
  for (std::size_t n = 0; n < 2; ++n) {
    sites[n].id = n;
    sites[n].l_min = 1;
    sites[n].l_max = lmax;
    sites[n].fixed_cost = 1;
  }
  sites[0].rho = rho0;
  sites[1].rho = rho1;
  const LinkBudget b{1, 1, 0, 6.0, Duplex::FD};
  for (auto& s : sites) s.beta = beta_coeff(RayleighProduct{1.0}, b, s.rho);
  return ProblemInstance(sites, 2, 100, 100);
}

const LinkBudget kBudget{1, 1, 0, 6.0, Duplex::FD};

}  // namespace

TEST(Zeta, EmpiricalCdfMatchesClosedForm) {
  const FadeDistribution d = RayleighProduct{1.0};
  Rng rng(2024);
  constexpr int kDraws = 1000000;
  int below = 0;
  for (int i = 0; i < kDraws; ++i) {
    const double z = sample_zeta(d, rng);
    ASSERT_GE(z, 0.0);
    below += z <= 0.5;
  }
  const double p = fade_cdf(d, 0.5);
  EXPECT_NEAR(p, 0.39809, 1e-5);
  EXPECT_NEAR(static_cast<double>(below) / kDraws, p, 3 * std::sqrt(p * (1 - p) / kDraws));
}

TEST(Zeta, KolmogorovSmirnov) {
  for (double sigma_sq : {1.0, 0.3, 4.0}) {
    const FadeDistribution d = RayleighProduct{sigma_sq};
    Rng rng(static_cast<std::uint64_t>(sigma_sq * 1000));
    constexpr int kN = 100000;
    std::vector<double> s(kN);
    for (auto& v : s) v = sample_zeta(d, rng);
    std::sort(s.begin(), s.end());
    double dmax = 0.0;
    for (int i = 0; i < kN; ++i) {
      const double f = fade_cdf(d, s[i]);
      dmax = std::max({dmax, std::abs(f - static_cast<double>(i) / kN), std::abs(f - static_cast<double>(i + 1) / kN)});
    }
    // Asymptotic 1% critical value.
    EXPECT_LT(dmax, 1.628 / std::sqrt(kN)) << "sigma^2=" << sigma_sq;
  }
}

TEST(MaxSinr, Arithmetic) {
  EXPECT_EQ(max_sinr(1.92, 0.0), 0.0);
  EXPECT_NEAR(max_sinr(1.92, 2.0), 7.68, 1e-12);
  EXPECT_NEAR(max_sinr(1.92, 3.0 * 1.7), 9.0 * max_sinr(1.92, 1.7), 1e-12);
  EXPECT_THROW(max_sinr(0.0, 1.0), std::domain_error);
}

TEST(Outage, EmptyInstallationAlwaysOutage) {
  const ProblemInstance inst = two_sites(2.0, 3.0);
  const OutageEstimate e = estimate_outage(inst, Solution::empty(inst), kBudget, 1000, 1);
  EXPECT_EQ(e.p_hat, 1.0);
  EXPECT_EQ(e.std_error, 0.0);
}

TEST(Outage, SingleElementMatchesCdf) {
  const ProblemInstance inst = two_sites(2.0, 3.0);
  const OutageEstimate e = estimate_outage(inst, Solution(inst, {1, 0}, {1, 1}), kBudget, 200000, 7);
  const double f = fade_cdf(RayleighProduct{1.0}, std::sqrt(6.0 / 2.0));
  EXPECT_NEAR(e.p_hat, f, 4 * e.std_error);
}

TEST(Outage, JointIsProductOfMarginals) {
  const ProblemInstance inst = two_sites(0.8, 1.5);
  const Solution both(inst, {1, 1}, {4, 3});
  constexpr std::uint64_t kT = 200000;
  const OutageEstimate j = estimate_outage(inst, both, kBudget, kT, 100);
  const OutageEstimate a = estimate_site_outage(inst, 0, 4, kBudget, kT, 200);
  const OutageEstimate b = estimate_site_outage(inst, 1, 3, kBudget, kT, 300);
  const double prod = a.p_hat * b.p_hat;
  const double se_prod = std::hypot(b.p_hat * a.std_error, a.p_hat * b.std_error);
  EXPECT_NEAR(j.p_hat, prod, 4 * std::hypot(j.std_error, se_prod));
}

TEST(Outage, MonotoneUnderCommonRandomNumbers) {
  const ProblemInstance inst = two_sites(0.5, 0.9);
  double prev = 1.0;
  for (int l = 1; l <= 10; ++l) {
    const OutageEstimate e = estimate_outage(inst, Solution(inst, {1, 0}, {l, 1}), kBudget, 20000, 42);
    EXPECT_LE(e.p_hat, prev) << "L=" << l;
    prev = e.p_hat;
  }
  // A superset of installed IRSs never loses a trial.
  const OutageEstimate one = estimate_outage(inst, Solution(inst, {1, 0}, {5, 5}), kBudget, 20000, 42);
  const OutageEstimate two = estimate_outage(inst, Solution(inst, {1, 1}, {5, 5}), kBudget, 20000, 42);
  EXPECT_LE(two.p_hat, one.p_hat);
  EXPECT_LT(two.p_hat, one.p_hat);
}

TEST(Outage, WorkerCountDoesNotChangeResult) {
  const ProblemInstance inst = two_sites(0.5, 0.9);
  const Solution s(inst, {1, 1}, {3, 7});
  const OutageEstimate a = estimate_outage(inst, s, kBudget, 30001, 5, 1);
  const OutageEstimate b = estimate_outage(inst, s, kBudget, 30001, 5, 4);
  EXPECT_EQ(a.outages, b.outages);
}

TEST(Outage, HdThresholdUsedForHdBudget) {
  const ProblemInstance inst = two_sites(2.0, 3.0);
  LinkBudget hd = kBudget;
  hd.duplex = Duplex::HD;
  const Solution s(inst, {1, 0}, {1, 1});
  const OutageEstimate e = estimate_outage(inst, s, hd, 100000, 3);
  const double f = fade_cdf(RayleighProduct{1.0}, std::sqrt(hd_threshold(6.0) / 2.0));
  EXPECT_NEAR(e.p_hat, f, 4 * e.std_error);
}

TEST(ValidateBound, TightAtOneElementLooseAboveIt) {
  const ProblemInstance inst = two_sites(0.8, 1.5);
  const BoundReport r1 = validate_bound(inst, Solution(inst, {1, 1}, {1, 1}), kBudget, 100000, 9);
  EXPECT_TRUE(r1.ok());
  EXPECT_NEAR(r1.system.p_hat, r1.system_bound, 4 * r1.system.std_error);
  for (const auto& s : r1.sites) EXPECT_NEAR(s.slack, 0.0, 4 * s.estimate.std_error);

  const BoundReport r10 = validate_bound(inst, Solution(inst, {1, 1}, {10, 10}), kBudget, 100000, 9);
  EXPECT_TRUE(r10.ok());
  EXPECT_GT(r10.system_slack, 4 * r10.system.std_error);
  EXPECT_THROW(validate_bound(inst, Solution(inst, {1, 1}, {1, 1}), kBudget, 9999, 9), std::invalid_argument);
}
