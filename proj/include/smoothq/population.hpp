#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "smoothq/distributions.hpp"
#include "smoothq/errors.hpp"

namespace smoothq {

/// Parameter pair of the smoothed quantile family. Population routines
/// require z in (-1,1); the empirical solver additionally accepts data-driven
/// z outside that interval when h > 0 (see estimators.hpp).
struct SmoothParams {
  double z = 0.0;
  double h = 0.0;
};

/// Root of the population equation F(q) + (h/2) q = (1 - z + h m)/2 together
/// with the induced quantile level tau = F(q) and the local score slope.
struct PopulationSolution {
  double q = 0.0;
  double tau = 0.0;
  double score_slope = 0.0;  // 2 f(q) + h
};

namespace detail {

inline void require_population_params(const SmoothParams& p) {
  if (!(p.z > -1.0 && p.z < 1.0)) throw std::invalid_argument("z must lie in (-1,1)");
  if (!(p.h >= 0.0)) throw std::invalid_argument("h must be nonnegative");
}

inline void require_analytic_model(const DistributionModel& model, const char* op) {
  if (!model.analytic())
    throw UnsupportedOperation(std::string(op) + " requires an analytic model");
}

}  // namespace detail

/// Solve the population equation for q(z,h). The residual g(q) = F(q) +
/// (h/2) q - (1 - z + h m)/2 is strictly increasing, and the root always lies
/// between the h=0 quantile and the mean, which anchors the initial bracket.
inline PopulationSolution solve_population(const DistributionModel& model, SmoothParams p) {
  detail::require_analytic_model(model, "solve_population");
  detail::require_population_params(p);

  const double m = model.mean();
  const double target = 0.5 * (1.0 - p.z + p.h * m);
  auto g = [&](double q) { return model.cdf(q) + 0.5 * p.h * q - target; };

  const double q0 = model.quantile(0.5 * (1.0 - p.z));
  if (p.h == 0.0) {
    // Equation reduces to F(q) = (1-z)/2.
    if (!(model.pdf(q0) > 0.0)) throw NoRootError("density vanishes at the h=0 solution");
    return {q0, model.cdf(q0), 2.0 * model.pdf(q0)};
  }

  double lo = std::min(q0, m) - 1.0;
  double hi = std::max(q0, m) + 1.0;
  double glo = g(lo);
  double ghi = g(hi);
  int expansions = 0;
  while (glo > 0.0 || ghi < 0.0) {
    if (++expansions > 200) throw NoRootError("population score has no bracketed root");
    const double width = hi - lo;
    if (glo > 0.0) {
      lo -= width;
      glo = g(lo);
    }
    if (ghi < 0.0) {
      hi += width;
      ghi = g(hi);
    }
  }

  // Newton from the bracket midpoint, safeguarded by bisection.
  double q = 0.5 * (lo + hi);
  double gq = g(q);
  for (int iter = 0; iter < 200; ++iter) {
    const double tol_width = 1e-12 * std::max(1.0, std::abs(q));
    if (std::abs(gq) <= 1e-12 && hi - lo <= tol_width) break;
    if (gq > 0.0) hi = q; else lo = q;
    const double slope = model.pdf(q) + 0.5 * p.h;
    double next = q - gq / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == q) break;  // bracket down to adjacent doubles
    q = next;
    gq = g(q);
  }

  return {q, model.cdf(q), 2.0 * model.pdf(q) + p.h};
}

/// z-coordinate of the constant-quantile line: all (z(tau,h), h) pairs share
/// the population solution F^{-1}(tau). Throws when the line leaves the
/// admissible strip z in (-1,1) rather than clamping, since clamping would
/// silently change the target quantile.
inline double line_z(const DistributionModel& model, double tau, double h) {
  detail::require_analytic_model(model, "line_z");
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must lie in (0,1)");
  if (!(h >= 0.0)) throw std::invalid_argument("h must be nonnegative");
  const double z = 1.0 - 2.0 * tau + h * (model.mean() - model.quantile(tau));
  auto fmt = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::string(buf);
  };
  if (z >= 1.0)
    throw OutOfRangeError("z(tau,h) = " + fmt(z) + " reaches the upper bound 1");
  if (z <= -1.0)
    throw OutOfRangeError("z(tau,h) = " + fmt(z) + " reaches the lower bound -1");
  return z;
}

/// dq/dh = (m - q) / (2 f(q) + h).
inline double dq_dh(const DistributionModel& model, SmoothParams p) {
  const PopulationSolution sol = solve_population(model, p);
  return (model.mean() - sol.q) / sol.score_slope;
}

/// dq/dz = -1 / (2 f(q) + h); always negative.
inline double dq_dz(const DistributionModel& model, SmoothParams p) {
  const PopulationSolution sol = solve_population(model, p);
  return -1.0 / sol.score_slope;
}

/// The z level whose population solution equals the mean for every h:
/// zm = 1 - 2 F(m).
inline double zm(const DistributionModel& model) {
  detail::require_analytic_model(model, "zm");
  return 1.0 - 2.0 * model.cdf(model.mean());
}

}  // namespace smoothq
