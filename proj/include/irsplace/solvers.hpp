#pragma once

// Deterministic placement algorithms: exhaustive enumeration (global
// optimum), LP-guided greedy rounding, and the average/maximum-element
// greedy baselines.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "irsplace/lp.hpp"
#include "irsplace/problem.hpp"

namespace irsplace {

enum class Algorithm { LPR, LPR_GA, LPR_RA, AEGA, MEGA, EXHAUSTIVE };

inline const char* to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::LPR: return "LPR";
    case Algorithm::LPR_GA: return "LPR-GA";
    case Algorithm::LPR_RA: return "LPR-RA";
    case Algorithm::AEGA: return "AEGA";
    case Algorithm::MEGA: return "MEGA";
    case Algorithm::EXHAUSTIVE: return "EXHAUSTIVE";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(const std::string& s) {
  for (Algorithm a : {Algorithm::LPR, Algorithm::LPR_GA, Algorithm::LPR_RA, Algorithm::AEGA, Algorithm::MEGA,
                      Algorithm::EXHAUSTIVE}) {
    if (s == to_string(a)) return a;
  }
  return std::nullopt;
}

struct SolveMeta {
  Algorithm algorithm = Algorithm::EXHAUSTIVE;
  std::uint64_t candidates = 0;
  std::int64_t runtime_micros = 0;
  // G' - G_dagger for LP-guided results: a posteriori bound on G' - G*.
  std::optional<double> lp_gap;
  // 1-based index of the accepted randomized-rounding trial.
  std::optional<int> trial_index;
};

struct SolveResult {
  Solution solution;
  double objective = 0.0;
  FeasibilityReport feasibility;
  SolveMeta meta;
};

inline SolveResult make_result(const ProblemInstance& instance, Solution solution, SolveMeta meta) {
  const double g = objective_g(instance, solution);
  FeasibilityReport f = check_feasibility(instance, solution);
  return SolveResult{std::move(solution), g, std::move(f), meta};
}

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  std::int64_t micros() const {
    return std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Lexicographic (x, L) comparison used to break exact objective ties.
inline bool lex_less(const std::vector<std::uint8_t>& xa, const std::vector<int>& la,
                     const std::vector<std::uint8_t>& xb, const std::vector<int>& lb) {
  if (xa != xb) return xa < xb;
  return la < lb;
}

}  // namespace detail

/// Selection loop shared by the greedy algorithms: walk `order`, install each
/// site while the cardinality, element and cost totals stay within budget,
/// then drop the last site if the final addition broke the element or cost
/// budget. The cardinality limit is enforced by the loop bound itself.
inline std::vector<std::uint8_t> greedy_select(const ProblemInstance& instance, const std::vector<std::size_t>& order,
                                               const std::vector<int>& elements) {
  std::vector<std::uint8_t> x(instance.size(), 0);
  auto totals = [&](const std::vector<std::uint8_t>& sel) {
    return check_feasibility(instance, Solution(instance, sel, elements));
  };
  std::size_t m = 0;
  std::optional<std::size_t> last;
  FeasibilityReport r = totals(x);
  const auto max_irs = static_cast<std::size_t>(instance.max_irs());
  while (m < max_irs && m < order.size() &&
         static_cast<double>(r.total_elements) <= instance.max_total_elements() &&
         r.total_cost <= instance.max_total_cost()) {
    const std::size_t i = order[m];
    x[i] = 1;
    last = i;
    ++m;
    r = totals(x);
  }
  if (last && (static_cast<double>(r.total_elements) > instance.max_total_elements() ||
               r.total_cost > instance.max_total_cost())) {
    x[*last] = 0;
  }
  return x;
}

inline constexpr double kLpZero = 1e-9;

/// round(v) = floor(v + 1/2).
inline int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

/// LP-guided element counts: round(z/x) for x > 0, else round of the midpoint.
inline std::vector<int> lpr_rounded_elements(const ProblemInstance& instance, const LpSolution& lpr) {
  std::vector<int> l(instance.size());
  for (std::size_t n = 0; n < instance.size(); ++n) {
    const IrsSite& s = instance.site(n);
    if (lpr.x_dagger[n] > kLpZero) {
      const double ratio = std::clamp(lpr.z_dagger[n] / lpr.x_dagger[n], double(s.l_min), double(s.l_max));
      l[n] = std::clamp(round_half_up(ratio), s.l_min, s.l_max);
    } else {
      l[n] = round_half_up(0.5 * (s.l_min + s.l_max));
    }
  }
  return l;
}

inline SolveResult lpr_ga(const ProblemInstance& instance, const LpSolution& lpr) {
  if (lpr.status != LpStatus::Optimal) throw std::invalid_argument("lpr_ga: relaxation not optimal");
  if (lpr.x_dagger.size() != instance.size()) throw std::invalid_argument("lpr_ga: relaxation size mismatch");
  detail::Stopwatch watch;
  std::vector<int> l = lpr_rounded_elements(instance, lpr);
  std::vector<std::size_t> order(instance.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lpr.x_dagger[a] > lpr.x_dagger[b]; });
  std::vector<std::uint8_t> x = greedy_select(instance, order, l);
  SolveMeta meta;
  meta.algorithm = Algorithm::LPR_GA;
  SolveResult res = make_result(instance, Solution(instance, std::move(x), std::move(l)), meta);
  res.meta.lp_gap = res.objective - lpr.g_dagger;
  res.meta.runtime_micros = watch.micros();
  return res;
}

namespace detail {

inline SolveResult fixed_element_greedy(const ProblemInstance& instance, std::vector<int> l, Algorithm tag) {
  Stopwatch watch;
  std::vector<std::size_t> order(instance.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return instance.site(a).beta * l[a] < instance.site(b).beta * l[b];
  });
  std::vector<std::uint8_t> x = greedy_select(instance, order, l);
  SolveMeta meta;
  meta.algorithm = tag;
  SolveResult res = make_result(instance, Solution(instance, std::move(x), std::move(l)), meta);
  res.meta.runtime_micros = watch.micros();
  return res;
}

}  // namespace detail

/// Average-element greedy: L_n = ceil((l_min + l_max) / 2), most negative
/// beta_n L_n first.
inline SolveResult aega(const ProblemInstance& instance) {
  std::vector<int> l(instance.size());
  for (std::size_t n = 0; n < l.size(); ++n) {
    const IrsSite& s = instance.site(n);
    l[n] = (s.l_min + s.l_max + 1) / 2;
  }
  return detail::fixed_element_greedy(instance, std::move(l), Algorithm::AEGA);
}

/// Maximum-element greedy: as aega with L_n = l_max.
inline SolveResult mega(const ProblemInstance& instance) {
  std::vector<int> l(instance.size());
  for (std::size_t n = 0; n < l.size(); ++n) l[n] = instance.site(n).l_max;
  return detail::fixed_element_greedy(instance, std::move(l), Algorithm::MEGA);
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration

inline constexpr std::uint64_t kCountSaturated = std::numeric_limits<std::uint64_t>::max();

/// sum over subsets I with |I| <= M of prod_{i in I} R_i (empty set counts 1),
/// via elementary symmetric polynomials. Saturates at kCountSaturated.
inline std::uint64_t exhaustive_candidate_count(const ProblemInstance& instance) {
  const auto m = static_cast<std::size_t>(instance.max_irs());
  using u128 = unsigned __int128;
  const u128 cap = kCountSaturated;
  std::vector<u128> e(m + 1, 0);
  e[0] = 1;
  for (const IrsSite& s : instance.sites()) {
    const u128 r = static_cast<u128>(s.range());
    for (std::size_t k = m; k >= 1; --k) {
      u128 add = e[k - 1] * r;
      if (e[k - 1] != 0 && add / e[k - 1] != r) add = cap;
      e[k] = std::min<u128>(cap, e[k] + std::min(add, cap));
    }
  }
  u128 total = 0;
  for (u128 v : e) total = std::min<u128>(cap, total + v);
  return static_cast<std::uint64_t>(total);
}

class ExhaustiveRefused : public std::runtime_error {
 public:
  ExhaustiveRefused(std::uint64_t candidates, std::uint64_t cap)
      : std::runtime_error("exhaustive search needs " + std::to_string(candidates) +
                           " candidates, above the work cap of " + std::to_string(cap)),
        candidates_(candidates),
        cap_(cap) {}

  std::uint64_t candidates() const noexcept { return candidates_; }
  std::uint64_t cap() const noexcept { return cap_; }

 private:
  std::uint64_t candidates_;
  std::uint64_t cap_;
};

inline constexpr std::uint64_t kDefaultExhaustiveCap = 200'000'000ULL;

/// Global minimum over every subset with |I| <= M and every element
/// arrangement. Subsets are visited by increasing size, lexicographically
/// within a size; arrangements by an odometer over [l_min, l_max]. Exact
/// objective ties go to the lexicographically smallest (x, L), with L = l_min
/// on sites that are not installed.
inline SolveResult exhaustive(const ProblemInstance& instance, std::uint64_t work_cap = kDefaultExhaustiveCap) {
  const std::uint64_t count = exhaustive_candidate_count(instance);
  if (count > work_cap) throw ExhaustiveRefused(count, work_cap);
  detail::Stopwatch watch;

  const std::size_t n_sites = instance.size();
  const auto max_k = static_cast<std::size_t>(instance.max_irs());
  std::vector<int> base_l(n_sites);
  for (std::size_t n = 0; n < n_sites; ++n) base_l[n] = instance.site(n).l_min;

  std::vector<std::uint8_t> best_x(n_sites, 0);
  std::vector<int> best_l = base_l;
  double best_g = 0.0;
  std::uint64_t examined = 1;  // the empty installation

  std::vector<std::uint8_t> cand_x;
  std::vector<int> cand_l;
  std::vector<std::size_t> subset;
  std::vector<int> odo;
  for (std::size_t k = 1; k <= max_k && k <= n_sites; ++k) {
    subset.resize(k);
    std::iota(subset.begin(), subset.end(), 0);
    while (true) {
      odo.assign(k, 0);
      for (std::size_t j = 0; j < k; ++j) odo[j] = instance.site(subset[j]).l_min;
      bool done = false;
      while (!done) {
        ++examined;
        long long l_tot = 0;
        double c_tot = 0.0;
        double g = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
          const IrsSite& s = instance.site(subset[j]);
          l_tot += odo[j];
          c_tot += s.cost(odo[j]);
          g += s.beta * odo[j];
        }
        const bool feasible = static_cast<double>(l_tot) <= instance.max_total_elements() &&
                              c_tot <= instance.max_total_cost();
        if (feasible && g <= best_g) {
          bool take = g < best_g;
          if (!take) {
            cand_x.assign(n_sites, 0);
            cand_l = base_l;
            for (std::size_t j = 0; j < k; ++j) {
              cand_x[subset[j]] = 1;
              cand_l[subset[j]] = odo[j];
            }
            take = detail::lex_less(cand_x, cand_l, best_x, best_l);
          }
          if (take) {
            best_g = g;
            best_x.assign(n_sites, 0);
            best_l = base_l;
            for (std::size_t j = 0; j < k; ++j) {
              best_x[subset[j]] = 1;
              best_l[subset[j]] = odo[j];
            }
          }
        }
        // Odometer step, last position fastest.
        std::size_t pos = k;
        while (true) {
          if (pos == 0) {
            done = true;
            break;
          }
          --pos;
          const IrsSite& s = instance.site(subset[pos]);
          if (odo[pos] < s.l_max) {
            ++odo[pos];
            break;
          }
          odo[pos] = s.l_min;
        }
      }
      // Next k-combination in lexicographic order.
      std::size_t i = k;
      while (i > 0 && subset[i - 1] == n_sites - k + (i - 1)) --i;
      if (i == 0) break;
      ++subset[i - 1];
      for (std::size_t j = i; j < k; ++j) subset[j] = subset[j - 1] + 1;
    }
  }

  SolveMeta meta;
  meta.algorithm = Algorithm::EXHAUSTIVE;
  meta.candidates = examined;
  SolveResult res = make_result(instance, Solution(instance, std::move(best_x), std::move(best_l)), meta);
  res.meta.runtime_micros = watch.micros();
  return res;
}

}  // namespace irsplace
