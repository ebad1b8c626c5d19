#pragma once

// Discrete IRS placement problem: candidate sites, budgets, solutions,
// objective/feasibility evaluation, random scenario generation and the
// knapsack special case.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iostream>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "irsplace/channel.hpp"
#include "irsplace/random.hpp"

namespace irsplace {

template <std::size_t D>
using Point = std::array<double, D>;
using Point2 = Point<2>;

template <std::size_t D>
double distance(const Point<D>& a, const Point<D>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < D; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

struct IrsSite {
  std::size_t id = 0;
  Point2 position{0.0, 0.0};
  int l_min = 0;
  int l_max = 0;
  double fixed_cost = 0.0;
  double cost_rate = 0.0;
  double beta = 0.0;
  // Effective SINR gain of the two-hop link; 0 when the site was not built
  // from a link budget (e.g. knapsack instances). Only the simulator needs it.
  double rho = 0.0;

  int range() const noexcept { return l_max - l_min + 1; }
  double cost(int elements) const noexcept { return fixed_cost + cost_rate * elements; }
};

class ProblemInstance {
 public:
  ProblemInstance() = default;

  ProblemInstance(std::vector<IrsSite> sites, int max_irs, double max_total_elements,
                  double max_total_cost, FadeDistribution fade = RayleighProduct{})
      : sites_(std::move(sites)),
        max_irs_(max_irs),
        max_total_elements_(max_total_elements),
        max_total_cost_(max_total_cost),
        fade_(fade) {
    for (std::size_t n = 0; n < sites_.size(); ++n) {
      const IrsSite& s = sites_[n];
      const std::string where = "site " + std::to_string(n);
      if (s.id != n) throw std::invalid_argument(where + ": ids must be contiguous 0..N-1");
      if (s.l_min < 0 || s.l_min > s.l_max) throw std::invalid_argument(where + ": need 0 <= l_min <= l_max");
      if (!(s.fixed_cost >= 0.0)) throw std::invalid_argument(where + ": fixed_cost must be >= 0");
      if (!(s.cost_rate >= 0.0)) throw std::invalid_argument(where + ": cost_rate must be >= 0");
      if (!(s.beta <= 0.0)) throw std::invalid_argument(where + ": beta must be <= 0");
      if (!(s.rho >= 0.0)) throw std::invalid_argument(where + ": rho must be >= 0");
    }
    if (max_irs_ < 0 || static_cast<std::size_t>(max_irs_) > sites_.size()) {
      throw std::invalid_argument("max_irs must lie in [0, N]");
    }
    if (!(max_total_elements_ >= 0.0)) throw std::invalid_argument("max_total_elements must be >= 0");
    if (!(max_total_cost_ >= 0.0)) throw std::invalid_argument("max_total_cost must be >= 0");
    validate(fade_);
  }

  std::size_t size() const noexcept { return sites_.size(); }
  std::span<const IrsSite> sites() const noexcept { return sites_; }
  const IrsSite& site(std::size_t n) const { return sites_.at(n); }
  int max_irs() const noexcept { return max_irs_; }
  double max_total_elements() const noexcept { return max_total_elements_; }
  double max_total_cost() const noexcept { return max_total_cost_; }
  const FadeDistribution& fade() const noexcept { return fade_; }

  std::vector<double> betas() const {
    std::vector<double> b;
    b.reserve(sites_.size());
    for (const auto& s : sites_) b.push_back(s.beta);
    return b;
  }

 private:
  std::vector<IrsSite> sites_;
  int max_irs_ = 0;
  double max_total_elements_ = 0.0;
  double max_total_cost_ = 0.0;
  FadeDistribution fade_ = RayleighProduct{};
};

/// Binary installation vector plus per-site element counts.
///
/// Element counts must lie within each site's [l_min, l_max] (also for sites
/// that are not installed); construction rejects anything else.
class Solution {
 public:
  Solution(const ProblemInstance& instance, std::vector<std::uint8_t> x, std::vector<int> elements)
      : x_(std::move(x)), elements_(std::move(elements)) {
    if (x_.size() != instance.size() || elements_.size() != instance.size()) {
      throw std::invalid_argument("solution dimension does not match instance");
    }
    for (std::size_t n = 0; n < x_.size(); ++n) {
      if (x_[n] > 1) throw std::invalid_argument("x must be binary");
      const IrsSite& s = instance.site(n);
      if (elements_[n] < s.l_min || elements_[n] > s.l_max) {
        throw std::out_of_range("element count of site " + std::to_string(n) + " outside [" +
                                std::to_string(s.l_min) + ", " + std::to_string(s.l_max) + "]");
      }
    }
  }

  /// Nothing installed, every L at its minimum. Always feasible.
  static Solution empty(const ProblemInstance& instance) {
    std::vector<int> l(instance.size());
    for (std::size_t n = 0; n < l.size(); ++n) l[n] = instance.site(n).l_min;
    return Solution(instance, std::vector<std::uint8_t>(instance.size(), 0), std::move(l));
  }

  std::size_t size() const noexcept { return x_.size(); }
  std::span<const std::uint8_t> x() const noexcept { return x_; }
  std::span<const int> elements() const noexcept { return elements_; }
  bool installed(std::size_t n) const { return x_.at(n) != 0; }

  friend bool operator==(const Solution&, const Solution&) = default;

 private:
  std::vector<std::uint8_t> x_;
  std::vector<int> elements_;
};

enum class Constraint { Cardinality, TotalElements, TotalCost };

inline const char* to_string(Constraint c) noexcept {
  switch (c) {
    case Constraint::Cardinality: return "cardinality";
    case Constraint::TotalElements: return "total_elements";
    case Constraint::TotalCost: return "total_cost";
  }
  return "?";
}

struct FeasibilityReport {
  bool feasible = true;
  int cardinality = 0;
  long long total_elements = 0;
  double total_cost = 0.0;
  std::vector<Constraint> violated;
};

/// G(x, L) = sum_n beta_n x_n L_n = ln of the system outage upper bound.
inline double objective_g(const ProblemInstance& instance, const Solution& solution) {
  if (solution.size() != instance.size()) throw std::invalid_argument("objective_g: dimension mismatch");
  double g = 0.0;
  for (std::size_t n = 0; n < instance.size(); ++n) {
    if (solution.installed(n)) g += instance.site(n).beta * solution.elements()[n];
  }
  return g;
}

inline FeasibilityReport check_feasibility(const ProblemInstance& instance, const Solution& solution) {
  if (solution.size() != instance.size()) throw std::invalid_argument("check_feasibility: dimension mismatch");
  FeasibilityReport r;
  for (std::size_t n = 0; n < instance.size(); ++n) {
    if (!solution.installed(n)) continue;
    const int l = solution.elements()[n];
    r.cardinality += 1;
    r.total_elements += l;
    r.total_cost += instance.site(n).cost(l);
  }
  if (r.cardinality > instance.max_irs()) r.violated.push_back(Constraint::Cardinality);
  if (static_cast<double>(r.total_elements) > instance.max_total_elements()) {
    r.violated.push_back(Constraint::TotalElements);
  }
  if (r.total_cost > instance.max_total_cost()) r.violated.push_back(Constraint::TotalCost);
  r.feasible = r.violated.empty();
  return r;
}

// ---------------------------------------------------------------------------
// Scenario generation

struct Rect {
  double x_lo, x_hi, y_lo, y_hi;

  bool contains(const Point2& p) const noexcept {
    return p[0] >= x_lo && p[0] <= x_hi && p[1] >= y_lo && p[1] <= y_hi;
  }
};

/// Random placement scenario. Defaults are the reference simulation setup.
struct ScenarioConfig {
  Point2 ue1{0.0, 0.0};
  Point2 ue2{100.0, 0.0};
  Rect rect_upper{30.0, 70.0, 20.0, 40.0};
  Rect rect_lower{30.0, 70.0, -40.0, -20.0};
  int n_sites = 25;
  int max_irs = 7;
  int element_min = 5;
  int element_max = 40;
  double max_total_elements = 250.0;
  double max_total_cost = 75.0;
  std::pair<double, double> fixed_cost_range{1.0, 5.0};
  std::pair<double, double> cost_rate_range{0.1, 0.5};
  PathLossParams path_loss{1.0, 2.7};
  LinkBudget budget{dbm_to_mw(25.0), dbm_to_mw(-80.0), dbm_to_mw(-70.0), db_to_linear(8.0), Duplex::FD};
  FadeDistribution fade = RayleighProduct{1.0};

  void validate() const {
    for (const Rect* r : {&rect_upper, &rect_lower}) {
      if (!(r->x_lo < r->x_hi && r->y_lo < r->y_hi)) throw std::invalid_argument("degenerate placement rectangle");
    }
    if (n_sites < 0) throw std::invalid_argument("n_sites must be >= 0");
    if (max_irs < 0 || max_irs > n_sites) throw std::invalid_argument("max_irs must lie in [0, n_sites]");
    if (element_min < 0 || element_min > element_max) throw std::invalid_argument("need 0 <= element_min <= element_max");
    if (!(max_total_elements >= 0.0)) throw std::invalid_argument("max_total_elements must be >= 0");
    if (!(max_total_cost >= 0.0)) throw std::invalid_argument("max_total_cost must be >= 0");
    if (!(fixed_cost_range.first >= 0.0 && fixed_cost_range.first <= fixed_cost_range.second)) {
      throw std::invalid_argument("fixed_cost_range must be ordered and nonnegative");
    }
    if (!(cost_rate_range.first >= 0.0 && cost_rate_range.first <= cost_rate_range.second)) {
      throw std::invalid_argument("cost_rate_range must be ordered and nonnegative");
    }
    path_loss.validate();
    budget.validate();
    irsplace::validate(fade);
  }
};

struct ScenarioStats {
  int clamped_betas = 0;
};

/// Draws a scenario: per site, the upper or lower rectangle with probability
/// 1/2, a uniform position inside it, then c_n and lambda_n. Draw order per
/// site is fixed (rectangle, x, y, c, lambda) so a seed pins the instance.
inline ProblemInstance generate_scenario(const ScenarioConfig& config, std::uint64_t seed,
                                         ScenarioStats* stats = nullptr) {
  config.validate();
  Rng rng(derive_seed(seed, {0x5CE7A210ULL}));
  std::vector<IrsSite> sites;
  sites.reserve(static_cast<std::size_t>(config.n_sites));
  int clamped = 0;
  for (int n = 0; n < config.n_sites; ++n) {
    IrsSite s;
    s.id = static_cast<std::size_t>(n);
    const Rect& r = rng.uniform() < 0.5 ? config.rect_upper : config.rect_lower;
    s.position[0] = rng.uniform(r.x_lo, r.x_hi);
    s.position[1] = rng.uniform(r.y_lo, r.y_hi);
    s.fixed_cost = rng.uniform(config.fixed_cost_range.first, config.fixed_cost_range.second);
    s.cost_rate = rng.uniform(config.cost_rate_range.first, config.cost_rate_range.second);
    s.l_min = config.element_min;
    s.l_max = config.element_max;
    const double delta = path_loss(config.path_loss, distance(s.position, config.ue1)) *
                         path_loss(config.path_loss, distance(s.position, config.ue2));
    s.rho = effective_gain(config.budget, delta);
    const BetaEval b = beta_eval(config.fade, config.budget, s.rho);
    s.beta = b.beta;
    clamped += b.clamped ? 1 : 0;
    sites.push_back(s);
  }
  if (clamped > 0) {
    std::clog << "irsplace: " << clamped << " site beta(s) clamped at " << kBetaFloor << "\n";
  }
  if (stats) stats->clamped_betas = clamped;
  return ProblemInstance(std::move(sites), config.max_irs, config.max_total_elements,
                         config.max_total_cost, config.fade);
}

/// Knapsack as a placement problem: one element per site, M = N, element
/// budget slack, beta_n = -value_n, site cost = weight_n, cost budget = capacity.
inline ProblemInstance knapsack_reduction(std::span<const long long> values,
                                          std::span<const long long> weights, long long capacity) {
  if (values.size() != weights.size()) throw std::invalid_argument("knapsack_reduction: size mismatch");
  if (capacity < 0) throw std::invalid_argument("knapsack_reduction: capacity must be >= 0");
  constexpr int kElements = 1;
  std::vector<IrsSite> sites(values.size());
  for (std::size_t n = 0; n < values.size(); ++n) {
    if (values[n] <= 0 || weights[n] <= 0) {
      throw std::invalid_argument("knapsack_reduction: values and weights must be positive");
    }
    sites[n].id = n;
    sites[n].l_min = kElements;
    sites[n].l_max = kElements;
    sites[n].beta = -static_cast<double>(values[n]) / kElements;
    sites[n].fixed_cost = static_cast<double>(weights[n]);
    sites[n].cost_rate = 0.0;
  }
  const double total_elements = static_cast<double>(values.size()) * kElements;
  return ProblemInstance(std::move(sites), static_cast<int>(values.size()), total_elements,
                         static_cast<double>(capacity));
}

}  // namespace irsplace
