#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "smoothq/errors.hpp"
#include "smoothq/population.hpp"
#include "smoothq/sample.hpp"

namespace smoothq {

struct EstimatorOutput {
  double q_hat = 0.0;
  double z_used = 0.0;
  double h = 0.0;
  double tau_induced = 0.0;  // empirical CDF at q_hat
  int iterations = 0;
  // Set when h = 0 met a data-driven z outside (-1,1) and a boundary order
  // statistic was returned instead of a proper quantile.
  bool z_out_of_range = false;
};

/// Smoothed quantile loss m(u; z, h) = |u| + z u + (h/2) u^2.
inline double loss(double u, SmoothParams p) {
  return std::abs(u) + p.z * u + 0.5 * p.h * u * u;
}

/// Empirical objective (1/n) sum_i m(q - Y_i; z, h); convex in q.
inline double objective(const Sample& sample, double q, SmoothParams p) {
  long double acc = 0.0L;
  for (double y : sample.values()) acc += loss(q - y, p);
  return static_cast<double>(acc / static_cast<long double>(sample.size()));
}

/// Empirical score 2 F(q) - 1 + z + h (q - mean); nondecreasing in q and
/// strictly increasing when h > 0.
inline double empirical_score(const Sample& sample, double q, SmoothParams p) {
  return 2.0 * sample.ecdf(q) - 1.0 + p.z + p.h * (q - sample.mean());
}

/// Zero of the empirical score. For h > 0 the score is a strictly increasing
/// step-plus-linear function: binary search locates the first data point with
/// nonnegative score, then the linear piece to its left is solved exactly; if
/// the score jumps across zero at that data point, the data point itself is
/// the answer. For h = 0 this is the sample quantile of order (1-z)/2.
/// Data-driven z outside (-1,1) passes through unclamped: with h > 0 the
/// linear term still forces a root (possibly beyond the data range), and with
/// h = 0 the boundary order statistic is returned with a diagnostic flag.
inline EstimatorOutput solve_empirical(const Sample& sample, SmoothParams p) {
  if (!(p.h >= 0.0)) throw std::invalid_argument("h must be nonnegative");
  const std::vector<double>& ys = sample.sorted();
  const std::size_t n = ys.size();
  const double ybar = sample.mean();

  EstimatorOutput out;
  out.z_used = p.z;
  out.h = p.h;

  if (p.h == 0.0) {
    if (p.z >= 1.0) {
      out.q_hat = ys.front();
      out.z_out_of_range = true;
    } else if (p.z <= -1.0) {
      out.q_hat = ys.back();
      out.z_out_of_range = true;
    } else {
      out.q_hat = sample.quantile(0.5 * (1.0 - p.z));
    }
    out.tau_induced = sample.ecdf(out.q_hat);
    return out;
  }

  int iterations = 0;
  auto score_at = [&](double q) {
    ++iterations;
    return 2.0 * sample.ecdf(q) - 1.0 + p.z + p.h * (q - ybar);
  };

  // First index whose data point carries a nonnegative score (n if none).
  std::size_t lo = 0, hi = n;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (score_at(ys[mid]) >= 0.0) hi = mid; else lo = mid + 1;
  }

  const double cdf_left = lo == 0 ? 0.0 : sample.ecdf(ys[lo - 1]);
  const double q_linear = ybar + (1.0 - p.z - 2.0 * cdf_left) / p.h;
  out.q_hat = lo == n ? q_linear : std::min(q_linear, ys[lo]);
  out.tau_induced = sample.ecdf(out.q_hat);
  out.iterations = iterations;
  return out;
}

/// inf{y : F(y) >= tau}, the order statistic of rank ceil(n*tau).
inline double sample_quantile(const Sample& sample, double tau) {
  return sample.quantile(tau);
}

/// Data-driven line parameter targeting the tau-quantile:
/// 1 - 2 tau + h (mean - q(tau)). Not clamped to (-1,1).
inline double plugin_z(const Sample& sample, double tau, double h) {
  if (!(h >= 0.0)) throw std::invalid_argument("h must be nonnegative");
  return 1.0 - 2.0 * tau + h * (sample.mean() - sample.quantile(tau));
}

/// Plug-in estimator of the tau-quantile: the smoothed estimator evaluated at
/// the data-driven line parameter. At h = 0 this is exactly the sample
/// quantile.
inline EstimatorOutput plugin_estimator(const Sample& sample, double tau, double h) {
  if (h == 0.0) {
    EstimatorOutput out;
    out.q_hat = sample.quantile(tau);
    out.z_used = 1.0 - 2.0 * tau;
    out.tau_induced = sample.ecdf(out.q_hat);
    return out;
  }
  return solve_empirical(sample, {plugin_z(sample, tau, h), h});
}

/// Data-driven parameter of the mean-estimating family:
/// 1 - 2 F(mean) + h (mean - q(F(mean))). Degenerate samples (every
/// observation equal) leave F(mean) outside (0,1) and are rejected.
inline double mean_family_z(const Sample& sample, double h) {
  if (!(h >= 0.0)) throw std::invalid_argument("h must be nonnegative");
  if (sample.size() < 2) throw DegenerateSampleError("mean family needs at least two observations");
  const double tau = sample.ecdf(sample.mean());
  if (!(tau > 0.0 && tau < 1.0))
    throw DegenerateSampleError("all observations equal: empirical CDF at the mean is degenerate");
  return 1.0 - 2.0 * tau + h * (sample.mean() - sample.quantile(tau));
}

/// Mean-estimating family member at smoothing level h; at h = 0 it reduces to
/// the sample quantile of order F(mean).
inline EstimatorOutput mean_estimator(const Sample& sample, double h) {
  const double z = mean_family_z(sample, h);
  if (h == 0.0) {
    EstimatorOutput out;
    out.q_hat = sample.quantile(sample.ecdf(sample.mean()));
    out.z_used = z;
    out.tau_induced = sample.ecdf(out.q_hat);
    return out;
  }
  return solve_empirical(sample, {z, h});
}

/// Trajectory h -> q_hat(z,h) over an ascending grid that starts at 0.
struct HPath {
  std::vector<double> h_grid;
  std::vector<double> q_values;
  double q_start = 0.0;     // q_hat(z, 0)
  double sample_mean = 0.0;  // large-h limit of the trajectory
};

inline HPath h_path(const Sample& sample, double z, std::vector<double> h_grid) {
  if (h_grid.empty() || h_grid.front() != 0.0)
    throw std::invalid_argument("h grid must start at 0");
  if (!std::is_sorted(h_grid.begin(), h_grid.end()))
    throw std::invalid_argument("h grid must be ascending");
  HPath path;
  path.q_values.reserve(h_grid.size());
  for (double h : h_grid) path.q_values.push_back(solve_empirical(sample, {z, h}).q_hat);
  path.h_grid = std::move(h_grid);
  path.q_start = path.q_values.front();
  path.sample_mean = sample.mean();
  return path;
}

}  // namespace smoothq
