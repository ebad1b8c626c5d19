#pragma once

// Physical-layer math for IRS-assisted two-way links: path loss, effective
// SINR gain, the Rayleigh-product fading CDF, per-site beta coefficients and
// the outage upper bounds built on them.
//
// All powers are linear milliwatts. dB quantities only appear in the
// conversion helpers at the bottom of this header.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>

namespace irsplace {

struct PathLossParams {
  double a0 = 1.0;
  double alpha = 2.7;

  void validate() const {
    if (!(a0 > 0.0)) throw std::invalid_argument("path loss a0 must be > 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("path loss alpha must be > 0");
  }
};

enum class Duplex { FD, HD };

inline const char* to_string(Duplex d) noexcept { return d == Duplex::FD ? "FD" : "HD"; }

/// Transmit/noise powers and the target SINR.
///
/// `sinr_threshold` is the configured full-duplex target. In HD mode the
/// effective threshold is raised to match spectral efficiency, see threshold().
struct LinkBudget {
  double tx_power_mw = 0.0;
  double noise_mw = 0.0;
  double residual_li_mw = 0.0;
  double sinr_threshold = 0.0;
  Duplex duplex = Duplex::FD;

  void validate() const {
    if (!(tx_power_mw > 0.0)) throw std::invalid_argument("tx_power_mw must be > 0");
    if (!(noise_mw > 0.0)) throw std::invalid_argument("noise_mw must be > 0");
    if (!(residual_li_mw >= 0.0)) throw std::invalid_argument("residual_li_mw must be >= 0");
    if (!(sinr_threshold > 0.0)) throw std::invalid_argument("sinr_threshold must be > 0");
    if (duplex == Duplex::HD && residual_li_mw != 0.0) {
      throw std::invalid_argument("HD budget must carry zero residual LI");
    }
  }

  double threshold() const;
};

struct LiModel {
  double omega = 0.0;
  double nu = 0.0;

  void validate() const {
    if (!(omega > 0.0)) throw std::invalid_argument("LI model omega must be > 0");
    if (!(nu >= 0.0 && nu <= 1.0)) throw std::invalid_argument("LI model nu must lie in [0, 1]");
  }
};

/// Product of two independent Rayleigh(sigma/sqrt 2) magnitudes.
struct RayleighProduct {
  double sigma_sq = 1.0;
};

using FadeDistribution = std::variant<RayleighProduct>;

inline void validate(const FadeDistribution& dist) {
  std::visit(
      [](const RayleighProduct& r) {
        if (!(r.sigma_sq > 0.0)) throw std::invalid_argument("sigma_sq must be > 0");
      },
      dist);
}

// ---------------------------------------------------------------------------
// Bessel K1

namespace detail {

inline constexpr double kEulerGamma = 0.57721566490153286061;

// Ascending series around the origin. Returns {I1(x), S(x)} where
//   K1(x) = 1/x + ln(x/2) I1(x) - (x/4) S(x),
//   S(x)  = sum_k [psi(k+1) + psi(k+2)] (x^2/4)^k / (k! (k+1)!).
struct K1Series {
  double i1;
  double s;
};

inline K1Series k1_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;  // (x^2/4)^k / (k! (k+1)!)
  double psi_k1 = -kEulerGamma;        // psi(k+1)
  double psi_k2 = 1.0 - kEulerGamma;   // psi(k+2)
  double i1_sum = 0.0;
  double s_sum = 0.0;
  for (int k = 0; k < 200; ++k) {
    i1_sum += term;
    const double ds = (psi_k1 + psi_k2) * term;
    s_sum += ds;
    if (term < 1e-18 * i1_sum && std::abs(ds) < 1e-18 * std::abs(s_sum)) break;
    psi_k1 += 1.0 / (k + 1);
    psi_k2 += 1.0 / (k + 2);
    term *= q / ((k + 1.0) * (k + 2.0));
  }
  return {0.5 * x * i1_sum, s_sum};
}

// Steed's continued fraction (Temme's normalisation) for K0, K1 at x > 2.
inline double k1_continued_fraction(double x) {
  constexpr double kEps = 1e-16;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i < 100000; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  h = a1 * h;
  const double k0 = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
  return k0 * (x + 0.5 - h) / x;
}

inline constexpr double kSeriesSwitch = 2.0;

}  // namespace detail

/// Modified Bessel function of the second kind, order one.
inline double bessel_k1(double x) {
  if (!(x > 0.0)) throw std::domain_error("bessel_k1: argument must be > 0");
  if (x <= detail::kSeriesSwitch) {
    const auto [i1, s] = detail::k1_series(x);
    return 1.0 / x + std::log(0.5 * x) * i1 - 0.25 * x * s;
  }
  if (x > 745.0) return 0.0;
  return detail::k1_continued_fraction(x);
}

/// 1 - x K1(x), computed without cancellation near the origin.
inline double one_minus_x_k1(double x) {
  if (x < 0.0) throw std::domain_error("one_minus_x_k1: argument must be >= 0");
  if (x == 0.0) return 0.0;
  if (x <= detail::kSeriesSwitch) {
    const auto [i1, s] = detail::k1_series(x);
    return -x * std::log(0.5 * x) * i1 + 0.25 * x * x * s;
  }
  return 1.0 - x * bessel_k1(x);
}

// ---------------------------------------------------------------------------
// Link-level quantities

inline double path_loss(const PathLossParams& params, double distance_m) {
  if (!(distance_m > 0.0)) throw std::domain_error("path_loss: distance must be > 0");
  return params.a0 * std::pow(distance_m, -params.alpha);
}

/// rho_n = P delta_n / (sigma_LI^2 + sigma_w^2); HD drops the LI term.
inline double effective_gain(const LinkBudget& budget, double delta_n) {
  if (!(delta_n > 0.0)) throw std::domain_error("effective_gain: delta_n must be > 0");
  const double interference =
      budget.duplex == Duplex::HD ? budget.noise_mw : budget.residual_li_mw + budget.noise_mw;
  return budget.tx_power_mw * delta_n / interference;
}

inline double residual_li_power(const LiModel& model, double tx_power_mw) {
  if (!(tx_power_mw > 0.0)) throw std::domain_error("residual_li_power: power must be > 0");
  return model.omega * std::pow(tx_power_mw, model.nu);
}

/// HD threshold giving the same spectral efficiency as gamma_th in FD.
inline double hd_threshold(double gamma_th) {
  if (gamma_th < 0.0) throw std::domain_error("hd_threshold: threshold must be >= 0");
  return (1.0 + gamma_th) * (1.0 + gamma_th) - 1.0;
}

inline double LinkBudget::threshold() const {
  return duplex == Duplex::HD ? hd_threshold(sinr_threshold) : sinr_threshold;
}

/// Same link in HD mode: no residual LI, threshold raised via hd_threshold.
inline LinkBudget to_half_duplex(LinkBudget budget) {
  budget.residual_li_mw = 0.0;
  budget.duplex = Duplex::HD;
  return budget;
}

/// Residual-LI power at which FD and HD per-link outage bounds coincide.
/// Below it FD has the smaller bound. Independent of tx power and distances.
inline double fd_hd_crossover_li_mw(double noise_mw, double gamma_th) {
  return noise_mw * (hd_threshold(gamma_th) / gamma_th - 1.0);
}

// ---------------------------------------------------------------------------
// Fading CDF and outage bounds

inline double fade_cdf(const FadeDistribution& dist, double u) {
  if (u < 0.0) throw std::domain_error("fade_cdf: u must be >= 0");
  return std::visit(
      [u](const RayleighProduct& r) {
        const double f = one_minus_x_k1(2.0 * u / r.sigma_sq);
        return std::clamp(f, 0.0, 1.0);
      },
      dist);
}

inline constexpr double kBetaFloor = -700.0;

struct BetaEval {
  double beta;
  bool clamped;
};

/// beta_n = ln F(sqrt(gamma_th / rho_n)), clamped below at kBetaFloor.
///
/// Throws std::domain_error when F is exactly zero at the threshold point: such
/// a site would make the outage bound vanish for any L >= 1.
inline BetaEval beta_eval(const FadeDistribution& dist, const LinkBudget& budget, double rho_n) {
  if (!(rho_n > 0.0)) throw std::domain_error("beta_coeff: rho_n must be > 0");
  const double u = std::sqrt(budget.threshold() / rho_n);
  const double f = fade_cdf(dist, u);
  if (!(f > 0.0)) {
    throw std::domain_error("beta_coeff: F evaluates to 0 (infinitely good site)");
  }
  const double beta = std::log(f);
  if (beta < kBetaFloor) return {kBetaFloor, true};
  return {std::min(beta, 0.0), false};
}

inline double beta_coeff(const FadeDistribution& dist, const LinkBudget& budget, double rho_n) {
  return beta_eval(dist, budget, rho_n).beta;
}

/// f^L: outage bound for one IRS with L elements.
inline double outage_bound_single(double f_val, int elements) {
  if (!(f_val > 0.0 && f_val <= 1.0)) throw std::domain_error("outage_bound_single: f in (0, 1]");
  if (elements < 0) throw std::domain_error("outage_bound_single: L must be >= 0");
  double result = 1.0;
  for (int l = 0; l < elements; ++l) result *= f_val;
  return result;
}

/// exp(sum_n beta_n x_n L_n).
template <class X, class L>
double outage_bound_system(std::span<const double> betas, std::span<const X> x, std::span<const L> elements) {
  if (betas.size() != x.size() || betas.size() != elements.size()) {
    throw std::invalid_argument("outage_bound_system: dimension mismatch");
  }
  double g = 0.0;
  for (std::size_t n = 0; n < betas.size(); ++n) {
    if (x[n]) g += betas[n] * static_cast<double>(elements[n]);
  }
  return std::exp(g);
}

// ---------------------------------------------------------------------------
// Units

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_mw(double dbm) { return db_to_linear(dbm); }
inline double mw_to_dbm(double mw) { return linear_to_db(mw); }

}  // namespace irsplace
