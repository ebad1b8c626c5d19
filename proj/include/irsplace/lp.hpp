#pragma once

// Linear-programming relaxation of the placement problem and the dense
// bounded-variable revised simplex that solves it.
//
// The solver handles   min c'v  s.t.  A v <= b,  lo <= v <= hi
// with finite bounds on every structural variable. Phase 1 adds one
// artificial per row whose start slack is negative; phase 2 optimises the
// real objective from the phase-1 basis. Pricing is Dantzig (largest
// reduced cost, lowest index on ties) and switches to Bland's rule for good
// after 2*(rows+cols) consecutive degenerate pivots.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "irsplace/problem.hpp"

namespace irsplace {

struct LinearProgram {
  std::vector<double> objective;
  std::vector<std::vector<double>> rows;  // each row: A_i, sense <=
  std::vector<double> rhs;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::string> var_names;
  std::vector<std::string> row_names;

  std::size_t num_vars() const noexcept { return objective.size(); }
  std::size_t num_rows() const noexcept { return rows.size(); }

  void validate() const {
    const std::size_t n = num_vars();
    if (lower.size() != n || upper.size() != n) throw std::invalid_argument("lp: bound vectors must match objective");
    if (rhs.size() != rows.size()) throw std::invalid_argument("lp: rhs must match row count");
    for (const auto& r : rows) {
      if (r.size() != n) throw std::invalid_argument("lp: row width must match objective");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(lower[j]) || !std::isfinite(upper[j])) throw std::invalid_argument("lp: bounds must be finite");
      if (lower[j] > upper[j]) throw std::invalid_argument("lp: lower bound above upper bound");
    }
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_string(LpStatus s) noexcept {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "?";
}

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-11;
  int refactor_interval = 64;
  int max_iterations = 200000;
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> values;         // structural variables
  double objective = 0.0;
  std::vector<double> duals;          // one per row, <= 0 at optimality
  std::vector<double> reduced_costs;  // structural variables
  double dual_objective = -std::numeric_limits<double>::infinity();
  int iterations = 0;
  int degenerate_pivots = 0;
  bool bland_engaged = false;
};

namespace detail {

class BoundedSimplex {
 public:
  BoundedSimplex(const LinearProgram& lp, const SimplexOptions& opt)
      : lp_(lp), opt_(opt), n_(lp.num_vars()), m_(lp.num_rows()) {}

  LpResult run() {
    setup();
    LpResult res;

    // Phase 1
    if (!artificial_rows_.empty()) {
      std::vector<double> cost(total_, 0.0);
      for (std::size_t k = 0; k < artificial_rows_.size(); ++k) cost[n_ + m_ + k] = 1.0;
      const LpStatus s = iterate(cost);
      if (s == LpStatus::IterationLimit) return finish(res, s);
      double infeas = 0.0;
      for (std::size_t k = 0; k < artificial_rows_.size(); ++k) infeas += value_[n_ + m_ + k];
      double scale = 1.0;
      for (double b : lp_.rhs) scale = std::max(scale, std::abs(b));
      if (infeas > opt_.feasibility_tol * scale) return finish(res, LpStatus::Infeasible);
      for (std::size_t k = 0; k < artificial_rows_.size(); ++k) {
        const std::size_t j = n_ + m_ + k;
        upper_[j] = 0.0;
        if (state_[j] != State::Basic) {
          value_[j] = 0.0;
          state_[j] = State::AtLower;
        }
      }
    }

    // Phase 2
    std::vector<double> cost(total_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) cost[j] = lp_.objective[j];
    const LpStatus s = iterate(cost);
    if (s != LpStatus::Optimal) return finish(res, s);
    refactor();
    fill_solution(res, cost);
    return finish(res, LpStatus::Optimal);
  }

 private:
  enum class State : unsigned char { Basic, AtLower, AtUpper };

  void setup() {
    std::vector<double> start(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      double r = lp_.rhs[i];
      for (std::size_t j = 0; j < n_; ++j) r -= lp_.rows[i][j] * lp_.lower[j];
      start[i] = r;
      if (r < 0.0) artificial_rows_.push_back(i);
    }
    total_ = n_ + m_ + artificial_rows_.size();
    lower_.assign(total_, 0.0);
    upper_.assign(total_, std::numeric_limits<double>::infinity());
    value_.assign(total_, 0.0);
    state_.assign(total_, State::AtLower);
    artificial_of_row_.assign(m_, kNone);
    for (std::size_t j = 0; j < n_; ++j) {
      lower_[j] = lp_.lower[j];
      upper_[j] = lp_.upper[j];
      value_[j] = lp_.lower[j];
    }
    for (std::size_t k = 0; k < artificial_rows_.size(); ++k) artificial_of_row_[artificial_rows_[k]] = k;

    basis_.assign(m_, 0);
    binv_.assign(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (artificial_of_row_[i] == kNone) {
        basis_[i] = n_ + i;
        value_[n_ + i] = start[i];
        binv_[i * m_ + i] = 1.0;
      } else {
        const std::size_t j = n_ + m_ + artificial_of_row_[i];
        basis_[i] = j;
        value_[j] = -start[i];
        binv_[i * m_ + i] = -1.0;
      }
      state_[basis_[i]] = State::Basic;
    }
  }

  // Column j of [A | I | -E_art] as a dense vector.
  void column(std::size_t j, std::vector<double>& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    if (j < n_) {
      for (std::size_t i = 0; i < m_; ++i) out[i] = lp_.rows[i][j];
    } else if (j < n_ + m_) {
      out[j - n_] = 1.0;
    } else {
      out[artificial_rows_[j - n_ - m_]] = -1.0;
    }
  }

  double column_dot(std::size_t j, const std::vector<double>& y) const {
    if (j < n_) {
      double s = 0.0;
      for (std::size_t i = 0; i < m_; ++i) s += y[i] * lp_.rows[i][j];
      return s;
    }
    if (j < n_ + m_) return y[j - n_];
    return -y[artificial_rows_[j - n_ - m_]];
  }

  void prices(const std::vector<double>& cost, std::vector<double>& y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &binv_[i * m_];
      for (std::size_t k = 0; k < m_; ++k) y[k] += cb * row[k];
    }
  }

  LpStatus iterate(const std::vector<double>& cost) {
    std::vector<double> y(m_), a(m_), alpha(m_);
    int since_refactor = 0;
    int consecutive_degenerate = 0;
    const int degenerate_limit = static_cast<int>(2 * (m_ + n_));
    while (true) {
      if (iterations_ >= opt_.max_iterations) return LpStatus::IterationLimit;
      prices(cost, y);

      // Pricing.
      std::size_t entering = kNone;
      double best = 0.0;
      for (std::size_t j = 0; j < total_; ++j) {
        if (state_[j] == State::Basic || upper_[j] - lower_[j] <= 0.0) continue;
        const double d = cost[j] - column_dot(j, y);
        const bool eligible = (state_[j] == State::AtLower && d < -opt_.optimality_tol) ||
                              (state_[j] == State::AtUpper && d > opt_.optimality_tol);
        if (!eligible) continue;
        if (bland_) {
          entering = j;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          entering = j;
        }
      }
      if (entering == kNone) return LpStatus::Optimal;

      column(entering, a);
      for (std::size_t i = 0; i < m_; ++i) {
        const double* row = &binv_[i * m_];
        double s = 0.0;
        for (std::size_t k = 0; k < m_; ++k) s += row[k] * a[k];
        alpha[i] = s;
      }
      const double dir = state_[entering] == State::AtLower ? 1.0 : -1.0;

      // Ratio test: basic i moves by -dir * t * alpha_i.
      double t_best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double delta = dir * alpha[i];
        const std::size_t b = basis_[i];
        double limit = std::numeric_limits<double>::infinity();
        if (delta > opt_.pivot_tol && std::isfinite(lower_[b])) {
          limit = (value_[b] - lower_[b]) / delta;
        } else if (delta < -opt_.pivot_tol && std::isfinite(upper_[b])) {
          limit = (upper_[b] - value_[b]) / -delta;
        }
        t_best = std::min(t_best, std::max(limit, 0.0));
      }
      std::size_t leave_row = kNone;
      if (std::isfinite(t_best)) {
        const double tie = t_best + 1e-12 * std::max(1.0, t_best);
        double best_pivot = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
          const double delta = dir * alpha[i];
          const std::size_t b = basis_[i];
          double limit = std::numeric_limits<double>::infinity();
          if (delta > opt_.pivot_tol && std::isfinite(lower_[b])) {
            limit = (value_[b] - lower_[b]) / delta;
          } else if (delta < -opt_.pivot_tol && std::isfinite(upper_[b])) {
            limit = (upper_[b] - value_[b]) / -delta;
          }
          if (std::max(limit, 0.0) > tie) continue;
          if (leave_row == kNone) {
            leave_row = i;
            best_pivot = std::abs(alpha[i]);
            continue;
          }
          if (bland_) {
            if (b < basis_[leave_row]) leave_row = i;
          } else if (std::abs(alpha[i]) > best_pivot ||
                     (std::abs(alpha[i]) == best_pivot && b < basis_[leave_row])) {
            leave_row = i;
            best_pivot = std::abs(alpha[i]);
          }
        }
      }
      const double span = upper_[entering] - lower_[entering];
      ++iterations_;

      if (span <= t_best) {
        // Bound flip, basis unchanged.
        const double t = span;
        for (std::size_t i = 0; i < m_; ++i) value_[basis_[i]] -= dir * t * alpha[i];
        if (state_[entering] == State::AtLower) {
          state_[entering] = State::AtUpper;
          value_[entering] = upper_[entering];
        } else {
          state_[entering] = State::AtLower;
          value_[entering] = lower_[entering];
        }
        consecutive_degenerate = 0;
        continue;
      }
      if (leave_row == kNone) return LpStatus::Unbounded;

      const double t = std::max(t_best, 0.0);
      for (std::size_t i = 0; i < m_; ++i) value_[basis_[i]] -= dir * t * alpha[i];
      value_[entering] += dir * t;

      const std::size_t leaving = basis_[leave_row];
      const double delta = dir * alpha[leave_row];
      if (delta > 0.0) {
        value_[leaving] = lower_[leaving];
        state_[leaving] = State::AtLower;
      } else {
        value_[leaving] = upper_[leaving];
        state_[leaving] = State::AtUpper;
      }
      basis_[leave_row] = entering;
      state_[entering] = State::Basic;

      // Eta update of the explicit inverse.
      const double piv = alpha[leave_row];
      double* prow = &binv_[leave_row * m_];
      for (std::size_t k = 0; k < m_; ++k) prow[k] /= piv;
      for (std::size_t i = 0; i < m_; ++i) {
        if (i == leave_row || alpha[i] == 0.0) continue;
        double* row = &binv_[i * m_];
        const double f = alpha[i];
        for (std::size_t k = 0; k < m_; ++k) row[k] -= f * prow[k];
      }

      if (t <= 1e-12) {
        ++degenerate_pivots_;
        if (++consecutive_degenerate >= degenerate_limit) bland_ = true;
      } else {
        consecutive_degenerate = 0;
      }
      if (++since_refactor >= opt_.refactor_interval) {
        refactor();
        since_refactor = 0;
      }
    }
  }

  // Rebuilds B^-1 by Gauss-Jordan with partial pivoting and recomputes the
  // basic values from the nonbasic ones.
  void refactor() {
    std::vector<double> b(m_ * m_, 0.0), col(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      column(basis_[i], col);
      for (std::size_t r = 0; r < m_; ++r) b[r * m_ + i] = col[r];
    }
    std::vector<double> inv(m_ * m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) inv[i * m_ + i] = 1.0;
    for (std::size_t c = 0; c < m_; ++c) {
      std::size_t p = c;
      for (std::size_t r = c + 1; r < m_; ++r) {
        if (std::abs(b[r * m_ + c]) > std::abs(b[p * m_ + c])) p = r;
      }
      if (std::abs(b[p * m_ + c]) < 1e-14) return;  // keep the eta-updated inverse
      if (p != c) {
        for (std::size_t k = 0; k < m_; ++k) {
          std::swap(b[p * m_ + k], b[c * m_ + k]);
          std::swap(inv[p * m_ + k], inv[c * m_ + k]);
        }
      }
      const double d = b[c * m_ + c];
      for (std::size_t k = 0; k < m_; ++k) {
        b[c * m_ + k] /= d;
        inv[c * m_ + k] /= d;
      }
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == c) continue;
        const double f = b[r * m_ + c];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < m_; ++k) {
          b[r * m_ + k] -= f * b[c * m_ + k];
          inv[r * m_ + k] -= f * inv[c * m_ + k];
        }
      }
    }
    binv_ = std::move(inv);

    std::vector<double> resid(lp_.rhs);
    for (std::size_t j = 0; j < total_; ++j) {
      if (state_[j] == State::Basic || value_[j] == 0.0) continue;
      column(j, col);
      for (std::size_t r = 0; r < m_; ++r) resid[r] -= col[r] * value_[j];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < m_; ++k) s += binv_[i * m_ + k] * resid[k];
      value_[basis_[i]] = s;
    }
  }

  void fill_solution(LpResult& res, const std::vector<double>& cost) const {
    res.values.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      double v = value_[j];
      if (v < lower_[j] && v > lower_[j] - opt_.feasibility_tol) v = lower_[j];
      if (v > upper_[j] && v < upper_[j] + opt_.feasibility_tol) v = upper_[j];
      res.values[j] = v;
    }
    res.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) res.objective += lp_.objective[j] * res.values[j];

    std::vector<double> y(m_);
    prices(cost, y);
    res.duals.assign(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) res.duals[i] = std::min(y[i], 0.0);

    // Lagrangian dual bound for the projected multipliers; valid for any y <= 0.
    double dual = 0.0;
    for (std::size_t i = 0; i < m_; ++i) dual += lp_.rhs[i] * res.duals[i];
    res.reduced_costs.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      double d = lp_.objective[j];
      for (std::size_t i = 0; i < m_; ++i) d -= res.duals[i] * lp_.rows[i][j];
      res.reduced_costs[j] = d;
      dual += d >= 0.0 ? d * lp_.lower[j] : d * lp_.upper[j];
    }
    res.dual_objective = dual;
  }

  LpResult& finish(LpResult& res, LpStatus s) const {
    res.status = s;
    res.iterations = iterations_;
    res.degenerate_pivots = degenerate_pivots_;
    res.bland_engaged = bland_;
    return res;
  }

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  const LinearProgram& lp_;
  SimplexOptions opt_;
  std::size_t n_;
  std::size_t m_;
  std::size_t total_ = 0;
  std::vector<std::size_t> artificial_rows_;
  std::vector<std::size_t> artificial_of_row_;
  std::vector<double> lower_, upper_, value_;
  std::vector<State> state_;
  std::vector<std::size_t> basis_;
  std::vector<double> binv_;  // row-major m x m
  int iterations_ = 0;
  int degenerate_pivots_ = 0;
  bool bland_ = false;
};

}  // namespace detail

inline LpResult solve(const LinearProgram& lp, const SimplexOptions& options = {}) {
  lp.validate();
  return detail::BoundedSimplex(lp, options).run();
}

// ---------------------------------------------------------------------------
// The placement relaxation

/// Variables (x_0..x_{N-1}, z_0..z_{N-1}); per site the two linking rows
/// l_min x - z <= 0 and z - l_max x <= 0, then the cardinality, total-element
/// and total-cost rows. x in [0, 1], z in [0, l_max].
inline LinearProgram build_lpr(const ProblemInstance& instance) {
  const std::size_t n_sites = instance.size();
  const std::size_t nv = 2 * n_sites;
  LinearProgram lp;
  lp.objective.assign(nv, 0.0);
  lp.lower.assign(nv, 0.0);
  lp.upper.assign(nv, 0.0);
  lp.var_names.resize(nv);
  for (std::size_t n = 0; n < n_sites; ++n) {
    const IrsSite& s = instance.site(n);
    lp.objective[n_sites + n] = s.beta;
    lp.upper[n] = 1.0;
    lp.upper[n_sites + n] = s.l_max;
    lp.var_names[n] = "x" + std::to_string(n);
    lp.var_names[n_sites + n] = "z" + std::to_string(n);
  }
  auto add_row = [&](std::vector<double> row, double rhs, std::string name) {
    lp.rows.push_back(std::move(row));
    lp.rhs.push_back(rhs);
    lp.row_names.push_back(std::move(name));
  };
  for (std::size_t n = 0; n < n_sites; ++n) {
    const IrsSite& s = instance.site(n);
    std::vector<double> lo(nv, 0.0), hi(nv, 0.0);
    lo[n] = s.l_min;
    lo[n_sites + n] = -1.0;
    hi[n] = -static_cast<double>(s.l_max);
    hi[n_sites + n] = 1.0;
    add_row(std::move(lo), 0.0, "link_min" + std::to_string(n));
    add_row(std::move(hi), 0.0, "link_max" + std::to_string(n));
  }
  std::vector<double> card(nv, 0.0), elems(nv, 0.0), cost(nv, 0.0);
  for (std::size_t n = 0; n < n_sites; ++n) {
    const IrsSite& s = instance.site(n);
    card[n] = 1.0;
    elems[n_sites + n] = 1.0;
    cost[n] = s.fixed_cost;
    cost[n_sites + n] = s.cost_rate;
  }
  add_row(std::move(card), instance.max_irs(), "cardinality");
  add_row(std::move(elems), instance.max_total_elements(), "total_elements");
  add_row(std::move(cost), instance.max_total_cost(), "total_cost");
  return lp;
}

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x_dagger;
  std::vector<double> z_dagger;
  double g_dagger = 0.0;
  LpResult raw;
};

inline LpSolution lower_bound(const ProblemInstance& instance, const SimplexOptions& options = {}) {
  const LinearProgram lp = build_lpr(instance);
  LpSolution sol;
  sol.raw = solve(lp, options);
  sol.status = sol.raw.status;
  if (sol.status == LpStatus::Unbounded) {
    throw std::logic_error("relaxation reported unbounded although every variable is boxed");
  }
  if (sol.status != LpStatus::Optimal) return sol;
  const std::size_t n_sites = instance.size();
  sol.x_dagger.assign(sol.raw.values.begin(), sol.raw.values.begin() + static_cast<std::ptrdiff_t>(n_sites));
  sol.z_dagger.assign(sol.raw.values.begin() + static_cast<std::ptrdiff_t>(n_sites), sol.raw.values.end());
  for (std::size_t n = 0; n < n_sites; ++n) sol.g_dagger += instance.site(n).beta * sol.z_dagger[n];
  return sol;
}

/// Plain-text tabular dump, one line per variable and per row.
inline void dump_text(const LinearProgram& lp, std::ostream& os) {
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "# minimize c'v subject to A v <= b, lo <= v <= hi\n";
  os << "vars " << lp.num_vars() << " rows " << lp.num_rows() << "\n";
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    const std::string name = j < lp.var_names.size() ? lp.var_names[j] : "v" + std::to_string(j);
    os << "var " << name << ' ' << num(lp.lower[j]) << ' ' << num(lp.upper[j]) << ' ' << num(lp.objective[j]) << "\n";
  }
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const std::string name = i < lp.row_names.size() ? lp.row_names[i] : "r" + std::to_string(i);
    os << "row " << name << " <= " << num(lp.rhs[i]);
    for (double a : lp.rows[i]) os << ' ' << num(a);
    os << "\n";
  }
}

}  // namespace irsplace
