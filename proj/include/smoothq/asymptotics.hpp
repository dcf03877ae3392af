#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "smoothq/distributions.hpp"
#include "smoothq/errors.hpp"
#include "smoothq/population.hpp"

namespace smoothq {

/// Asymptotic variance of the smoothed estimator at fixed (z,h), side by side
/// with the classical quantile variance at the induced level tau(z,h).
/// ratio < 1 means smoothing beats the classical estimator of the same
/// population quantile.
struct VarianceReport {
  double score_var = 0.0;      // variance of the score at the solution
  double slope = 0.0;          // 2 f(q) + h
  double asym_var = 0.0;       // score_var / slope^2
  double classical_var = 0.0;  // tau (1 - tau) / f(q)^2
  double ratio = 0.0;          // asym_var / classical_var
  double q = 0.0;
  double tau = 0.0;
};

/// Variance of the score psi(q(z,h) - Y; z, h):
///   4 F(q)(1-F(q)) + 2h [E|Y-q| - (m-q)(1-2F(q))] + h^2 Var(Y).
inline double score_variance(const DistributionModel& model, SmoothParams p) {
  const PopulationSolution sol = solve_population(model, p);
  const double tau = sol.tau;
  const double m = model.mean();
  return 4.0 * tau * (1.0 - tau) +
         2.0 * p.h * (model.mean_abs_dev(sol.q) - (m - sol.q) * (1.0 - 2.0 * tau)) +
         p.h * p.h * model.variance();
}

inline VarianceReport asym_variance(const DistributionModel& model, SmoothParams p) {
  const PopulationSolution sol = solve_population(model, p);
  const double tau = sol.tau;
  const double m = model.mean();
  const double f_q = model.pdf(sol.q);
  VarianceReport rep;
  rep.q = sol.q;
  rep.tau = tau;
  rep.score_var = 4.0 * tau * (1.0 - tau) +
                  2.0 * p.h * (model.mean_abs_dev(sol.q) - (m - sol.q) * (1.0 - 2.0 * tau)) +
                  p.h * p.h * model.variance();
  rep.slope = 2.0 * f_q + p.h;
  rep.asym_var = rep.score_var / (rep.slope * rep.slope);
  rep.classical_var = tau * (1.0 - tau) / (f_q * f_q);
  rep.ratio = rep.asym_var / rep.classical_var;
  return rep;
}

/// Coefficients of the variance v(tau,h) = (a + b h + c h^2) / (d + h)^2
/// along a constant-quantile line.
struct LineCoefficients {
  double a = 0.0;  // 4 tau (1 - tau)
  double b = 0.0;  // 2 [E|Y - q(tau)| - (m - q(tau)) (1 - 2 tau)]
  double c = 0.0;  // Var(Y)
  double d = 0.0;  // 2 f(q(tau))
};

inline LineCoefficients line_coefficients(const DistributionModel& model, double tau) {
  detail::require_analytic_model(model, "line_coefficients");
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must lie in (0,1)");
  const double q = model.quantile(tau);
  LineCoefficients k;
  k.a = 4.0 * tau * (1.0 - tau);
  k.b = 2.0 * (model.mean_abs_dev(q) - (model.mean() - q) * (1.0 - 2.0 * tau));
  k.c = model.variance();
  k.d = 2.0 * model.pdf(q);
  return k;
}

/// Asymptotic variance along the constant-quantile line at level tau. Defined
/// from the coefficients for every h >= 0, including h where the line itself
/// leaves the admissible strip.
inline double line_variance(const DistributionModel& model, double tau, double h) {
  if (!(h >= 0.0)) throw std::invalid_argument("h must be nonnegative");
  const LineCoefficients k = line_coefficients(model, tau);
  const double denom = k.d + h;
  return (k.a + k.b * h + k.c * h * h) / (denom * denom);
}

/// Behaviour of h -> v(tau,h).
enum class VarianceTrend {
  MinAtZero,       // v nondecreasing: no smoothing level beats h = 0
  MinAtInfinity,   // v nonincreasing: every h > 0 improves, no finite argmin
  InteriorMinimum  // finite h_star > 0 strictly improves on h = 0
};

struct HStarRegime {
  VarianceTrend trend = VarianceTrend::MinAtZero;
  std::optional<double> h_star;  // present only for InteriorMinimum
  bool boundary_flag = false;    // sign analysis hit a degenerate boundary
};

/// Classify h -> v(tau,h) by the sign pattern of its derivative
/// ((2cd - b) h + (bd - 2a)) / (d + h)^3.
inline HStarRegime classify_hstar(const DistributionModel& model, double tau) {
  const LineCoefficients k = line_coefficients(model, tau);
  const double s0 = k.b * k.d - 2.0 * k.a;  // derivative numerator at h = 0
  const double s1 = 2.0 * k.c * k.d - k.b;  // slope of the numerator in h
  HStarRegime regime;
  if (s0 == 0.0 && s1 == 0.0) {
    // v is constant in h.
    regime.trend = VarianceTrend::MinAtZero;
    regime.boundary_flag = true;
  } else if (s0 >= 0.0 && s1 >= 0.0) {
    regime.trend = VarianceTrend::MinAtZero;
    regime.boundary_flag = (s0 == 0.0);
  } else if (s0 <= 0.0 && s1 <= 0.0) {
    regime.trend = VarianceTrend::MinAtInfinity;
    regime.boundary_flag = (s0 == 0.0);
  } else if (s0 < 0.0 && s1 > 0.0) {
    regime.trend = VarianceTrend::InteriorMinimum;
    regime.h_star = (2.0 * k.a - k.b * k.d) / (2.0 * k.c * k.d - k.b);
  } else {
    // s0 > 0, s1 < 0: v rises to an interior maximum and then falls toward
    // Var(Y); the minimum sits at one of the boundaries.
    const double v0 = k.a / (k.d * k.d);
    regime.trend = v0 <= k.c ? VarianceTrend::MinAtZero : VarianceTrend::MinAtInfinity;
    regime.boundary_flag = true;
  }
  return regime;
}

/// Asymptotic variance of the plug-in estimator of the tau-quantile:
/// tau (1 - tau) / f(q(tau))^2, independent of h.
inline double plugin_variance(const DistributionModel& model, double tau) {
  detail::require_analytic_model(model, "plugin_variance");
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must lie in (0,1)");
  const double f_q = model.pdf(model.quantile(tau));
  return tau * (1.0 - tau) / (f_q * f_q);
}

/// Asymptotic variance of the mean-estimating family: Var(Y) for every h.
inline double mean_family_variance(const DistributionModel& model) {
  detail::require_analytic_model(model, "mean_family_variance");
  return model.variance();
}

/// Influence function of the plug-in quantile estimator, simplified form:
/// (1{y <= q(tau)} - tau) / f(q(tau)).
inline double influence_plugin(const DistributionModel& model, double tau, double y) {
  detail::require_analytic_model(model, "influence_plugin");
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must lie in (0,1)");
  const double q = model.quantile(tau);
  const double indicator = y <= q ? 1.0 : 0.0;
  return (indicator - tau) / model.pdf(q);
}

/// Unsimplified two-term influence function at smoothing level h: the score
/// contribution psi(q - y; z(tau,h), h) / (2f + h) plus the h-weighted
/// correction for estimating the line parameter from the sample mean and
/// sample quantile. The h-dependent terms cancel against the simplified form
/// for every y and h. The sign uses the indicator identity
/// sgn(q - y) = 2 * 1{y <= q} - 1, so the cancellation holds pointwise,
/// including at y = q(tau). The line value 1 - 2 tau + h (m - q) enters
/// unvalidated: only the algebraic combination matters here.
inline double influence_plugin_unsimplified(const DistributionModel& model, double tau,
                                            double y, double h) {
  detail::require_analytic_model(model, "influence_plugin_unsimplified");
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must lie in (0,1)");
  if (!(h >= 0.0)) throw std::invalid_argument("h must be nonnegative");
  const double q = model.quantile(tau);
  const double m = model.mean();
  const double f_q = model.pdf(q);
  const double indicator = y <= q ? 1.0 : 0.0;
  const double z_line = 1.0 - 2.0 * tau + h * (m - q);
  const double score = (2.0 * indicator - 1.0) + h * (q - y) + z_line;
  const double denom = 2.0 * f_q + h;
  return score / denom + (h / denom) * ((y - m) + (indicator - tau) / f_q);
}

/// Defect of the exact decomposition of |y-(q+delta)| - |y-q| into a linear
/// term and an indicator integral; identically zero up to rounding. The
/// integral over s in [0, delta] of (1{y <= q+s} - 1{y <= q}) has the closed
/// form below: zero unless y lies between q and q+delta, otherwise the signed
/// overlap length.
inline double knight_gap(double y, double q, double delta) {
  const double sign = y - q > 0.0 ? 1.0 : -1.0;  // sgn(0) = -1, indicator convention
  double integral;
  if (delta >= 0.0) {
    integral = y > q ? std::max(0.0, delta - (y - q)) : 0.0;
  } else {
    integral = y <= q ? std::clamp((y - q) - delta, 0.0, -delta) : 0.0;
  }
  return std::abs(y - (q + delta)) - std::abs(y - q) + delta * sign - 2.0 * integral;
}

}  // namespace smoothq
