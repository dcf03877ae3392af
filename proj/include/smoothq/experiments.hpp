#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "smoothq/asymptotics.hpp"
#include "smoothq/distributions.hpp"
#include "smoothq/estimators.hpp"
#include "smoothq/population.hpp"
#include "smoothq/result_table.hpp"
#include "smoothq/returns.hpp"
#include "smoothq/rng.hpp"

namespace smoothq {

/// Shared configuration for the experiment drivers. Empty grids and n = 0
/// fall back to per-driver defaults. The master seed must be supplied
/// explicitly; every replication derives its own stream from
/// (master_seed, replication index).
struct MonteCarloConfig {
  DistributionModel model = DistributionModel::normal(0.0, 1.0);
  std::size_t n = 0;  // 0 -> driver default; otherwise must be >= 2
  std::size_t replications = 500;
  std::uint64_t master_seed = 1;
  std::vector<double> h_grid;
  std::vector<double> z_values;
  std::vector<double> tau_values;
  double fixed_z = 0.5;  // z of the fixed-parameter comparator
  unsigned workers = 0;  // 0 -> hardware concurrency
};

inline std::vector<double> linear_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("bad grid bounds");
  const auto count = static_cast<std::size_t>(std::llround((hi - lo) / step));
  std::vector<double> grid;
  grid.reserve(count + 1);
  for (std::size_t i = 0; i < count; ++i) grid.push_back(lo + static_cast<double>(i) * step);
  grid.push_back(hi);
  return grid;
}

/// Mean, unbiased variance, and fourth central moment of a batch of
/// replication values, plus the standard error of the variance estimate.
struct SummaryStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double m4 = 0.0;        // fourth central moment
  std::size_t count = 0;

  double variance_se() const {
    if (count < 2) return 0.0;
    const double r = static_cast<double>(count);
    const double v = m4 - variance * variance * (r - 3.0) / (r - 1.0);
    return std::sqrt(std::max(v, 0.0) / r);
  }
};

inline SummaryStats summarize(const std::vector<double>& values) {
  SummaryStats s;
  s.count = values.size();
  if (values.empty()) return s;
  long double acc = 0.0L;
  for (double v : values) acc += v;
  s.mean = static_cast<double>(acc / static_cast<long double>(values.size()));
  if (values.size() < 2) return s;
  long double m2 = 0.0L, m4 = 0.0L;
  for (double v : values) {
    const long double d = static_cast<long double>(v) - s.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  s.variance = static_cast<double>(m2 / static_cast<long double>(values.size() - 1));
  s.m4 = static_cast<double>(m4 / static_cast<long double>(values.size()));
  return s;
}

/// Run `fn(k)` for k = 0..replications-1 across the given number of worker
/// threads. Results are stored by replication index, so the output is
/// identical for every worker count.
template <typename Fn>
auto run_replications(std::size_t replications, unsigned workers, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using T = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<T> results(replications);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, replications));
  if (workers <= 1) {
    for (std::size_t k = 0; k < replications; ++k) results[k] = fn(k);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= replications) return;
      try {
        results[k] = fn(k);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return results;
}

namespace detail {

inline std::string fmt_param(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return std::string(buf);
}

inline void require_config(const MonteCarloConfig& cfg) {
  if (cfg.replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (cfg.n == 1) throw std::invalid_argument("sample size must be >= 2");
  if (!cfg.h_grid.empty()) {
    if (!std::is_sorted(cfg.h_grid.begin(), cfg.h_grid.end()))
      throw std::invalid_argument("h grid must be ascending");
    if (cfg.h_grid.front() < 0.0) throw std::invalid_argument("h grid must be nonnegative");
  }
}

inline std::vector<double> or_default(const std::vector<double>& v, std::vector<double> fallback) {
  return v.empty() ? std::move(fallback) : v;
}

}  // namespace detail

/// Asymptotic efficiency of the fixed-(z,h) estimator against the classical
/// quantile estimator of the same population quantile. Purely analytic.
inline ExperimentResult experiment1(const MonteCarloConfig& cfg) {
  detail::require_config(cfg);
  const auto h_grid = detail::or_default(cfg.h_grid, linear_grid(0.0, 5.0, 0.1));
  const auto zs = detail::or_default(cfg.z_values, {-0.5, 0.0, 0.5});
  ExperimentResult result;
  const std::string model_key = "model=" + cfg.model.name();
  for (double z : zs) {
    const std::string scenario = model_key + ";z=" + detail::fmt_param(z);
    for (double h : h_grid) {
      const VarianceReport rep = asym_variance(cfg.model, {z, h});
      result.add("1", scenario, h, "theory", "asym_variance", rep.asym_var);
      result.add("1", scenario, h, "theory", "classical_variance", rep.classical_var);
      result.add("1", scenario, h, "theory", "ratio", rep.ratio);
    }
  }
  return result;
}

/// Large-h comparison of the fixed-(z,h) variance against the h-independent
/// plug-in variance, its limit at F(mean), and Var(Y). Purely analytic.
inline ExperimentResult experiment2(const MonteCarloConfig& cfg) {
  detail::require_config(cfg);
  const auto h_grid = detail::or_default(cfg.h_grid, linear_grid(0.0, 5.0, 0.1));
  const auto zs = detail::or_default(cfg.z_values, {-0.5, 0.0, 0.5});
  ExperimentResult result;
  const std::string model_key = "model=" + cfg.model.name();
  const double tau_at_mean = cfg.model.cdf(cfg.model.mean());
  const double limit_plugin = plugin_variance(cfg.model, tau_at_mean);
  const double var_y = cfg.model.variance();
  for (double h : h_grid) {
    result.add("2", model_key, h, "theory", "plugin_variance_limit", limit_plugin);
    result.add("2", model_key, h, "theory", "mean_variance", var_y);
  }
  for (double z : zs) {
    const std::string scenario = model_key + ";z=" + detail::fmt_param(z);
    for (double h : h_grid) {
      const VarianceReport rep = asym_variance(cfg.model, {z, h});
      result.add("2", scenario, h, "theory", "smoothed_variance", rep.asym_var);
      result.add("2", scenario, h, "theory", "plugin_variance", rep.classical_var);
    }
  }
  return result;
}

/// Finite-sample trajectories of the fixed-line estimator q(z(tau,h),h) and
/// the plug-in estimator over the h grid, one simulated sample per call.
/// Grid points where the population line leaves the admissible strip are
/// recorded with a skip marker instead of being dropped.
inline ExperimentResult experiment2_finite(const MonteCarloConfig& cfg) {
  detail::require_config(cfg);
  const auto h_grid = detail::or_default(cfg.h_grid, linear_grid(0.0, 5.0, 0.1));
  const auto taus = detail::or_default(cfg.tau_values, {0.25, 0.5, 0.75});
  const std::size_t n = cfg.n ? cfg.n : 10000;
  const Sample sample = cfg.model.sample(n, replication_seed(cfg.master_seed, 0));
  ExperimentResult result;
  const std::string model_key = "model=" + cfg.model.name();
  for (double tau : taus) {
    const std::string scenario = model_key + ";tau=" + detail::fmt_param(tau);
    const double target = cfg.model.quantile(tau);
    for (double h : h_grid) {
      result.add("2f", scenario, h, "population", "target", target);
      try {
        const double z = line_z(cfg.model, tau, h);
        result.add("2f", scenario, h, "fixed_line", "estimate",
                   solve_empirical(sample, {z, h}).q_hat);
      } catch (const OutOfRangeError&) {
        result.add("2f", scenario, h, "fixed_line", "line_z_out_of_range", 1.0);
      }
      result.add("2f", scenario, h, "plugin", "estimate",
                 plugin_estimator(sample, tau, h).q_hat);
    }
  }
  return result;
}

/// Monte Carlo variance/bias/MSE of three mean estimators as functions of h:
/// the sample mean, the fixed-z smoothed estimator, and the mean-estimating
/// family. Bias and MSE are taken against the population mean.
inline ExperimentResult experiment3(const MonteCarloConfig& cfg) {
  detail::require_config(cfg);
  const auto h_grid = detail::or_default(cfg.h_grid, {0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0});
  const std::size_t n = cfg.n ? cfg.n : 1000;
  const double fixed_z = cfg.fixed_z;

  struct Replication {
    double ybar = 0.0;
    std::vector<double> fixed;
    std::vector<double> mean_family;
  };
  const auto reps = run_replications(
      cfg.replications, cfg.workers, [&](std::size_t k) {
        const Sample sample = cfg.model.sample(n, replication_seed(cfg.master_seed, k));
        Replication rep;
        rep.ybar = sample.mean();
        rep.fixed.reserve(h_grid.size());
        rep.mean_family.reserve(h_grid.size());
        for (double h : h_grid) {
          rep.fixed.push_back(solve_empirical(sample, {fixed_z, h}).q_hat);
          rep.mean_family.push_back(mean_estimator(sample, h).q_hat);
        }
        return rep;
      });

  const double m = cfg.model.mean();
  ExperimentResult result;
  const std::string model_key = "model=" + cfg.model.name();
  const std::string fixed_name = "smoothed(z=" + detail::fmt_param(fixed_z) + ")";
  auto emit = [&](const std::string& estimator, double h, const std::vector<double>& values) {
    const SummaryStats stats = summarize(values);
    long double sq = 0.0L;
    for (double v : values) sq += (static_cast<long double>(v) - m) * (v - m);
    const double mse = static_cast<double>(sq / static_cast<long double>(values.size()));
    result.add("3", model_key, h, estimator, "variance", stats.variance);
    result.add("3", model_key, h, estimator, "variance_se", stats.variance_se());
    result.add("3", model_key, h, estimator, "bias", stats.mean - m);
    result.add("3", model_key, h, estimator, "mse", mse);
  };

  std::vector<double> ybar_values;
  ybar_values.reserve(reps.size());
  for (const Replication& rep : reps) ybar_values.push_back(rep.ybar);
  std::vector<double> column(reps.size());
  for (std::size_t hi = 0; hi < h_grid.size(); ++hi) {
    emit("sample_mean", h_grid[hi], ybar_values);
    for (std::size_t k = 0; k < reps.size(); ++k) column[k] = reps[k].fixed[hi];
    emit(fixed_name, h_grid[hi], column);
    for (std::size_t k = 0; k < reps.size(); ++k) column[k] = reps[k].mean_family[hi];
    emit("mean_family", h_grid[hi], column);
  }
  return result;
}

/// Empirical h-trajectories for quantile levels below, at, and above the
/// mean, with a direction flag per scenario.
inline ExperimentResult experiment_monotonicity(const MonteCarloConfig& cfg) {
  detail::require_config(cfg);
  const auto h_grid = detail::or_default(cfg.h_grid, linear_grid(0.0, 200.0, 0.5));
  const auto zs = detail::or_default(cfg.z_values, {0.5, 0.0, -0.5});
  const std::size_t n = cfg.n ? cfg.n : 5000;
  const Sample sample = cfg.model.sample(n, replication_seed(cfg.master_seed, 0));
  ExperimentResult result;
  const std::string model_key = "model=" + cfg.model.name();
  for (double z : zs) {
    const std::string scenario = model_key + ";z=" + detail::fmt_param(z);
    const HPath path = h_path(sample, z, h_grid);
    for (std::size_t i = 0; i < path.h_grid.size(); ++i)
      result.add("mono", scenario, path.h_grid[i], "smoothed", "estimate", path.q_values[i]);
    const double gap = path.sample_mean - path.q_start;
    result.add("mono", scenario, 0.0, "smoothed", "direction",
               gap > 0.0 ? 1.0 : (gap < 0.0 ? -1.0 : 0.0));
    result.add("mono", scenario, 0.0, "smoothed", "sample_mean", path.sample_mean);
  }
  return result;
}

/// Smoothed-estimator trajectories on a cleaned returns series, plus the
/// sample-mean reference line. The default grid is h = 0, 0.1, ..., 200.
inline ExperimentResult experiment_realdata(const ReturnsSeries& series,
                                            std::vector<double> z_values = {},
                                            std::vector<double> h_grid = {}) {
  if (series.returns.size() < 2) throw InsufficientDataError("need at least two returns");
  if (z_values.empty()) z_values = {-0.5, 0.0, 0.5};
  if (h_grid.empty()) h_grid = linear_grid(0.0, 200.0, 0.1);
  const Sample sample{std::vector<double>(series.returns)};
  // Conservative root bracket; the exact segment solver always lands inside.
  const double sigma = sample.stddev();
  const double bracket_lo = sample.min() - 10.0 * sigma;
  const double bracket_hi = sample.max() + 10.0 * sigma;
  ExperimentResult result;
  for (double h : h_grid)
    result.add("realdata", "series", h, "sample_mean", "estimate", sample.mean());
  for (double z : z_values) {
    const std::string scenario = "z=" + detail::fmt_param(z);
    const HPath path = h_path(sample, z, h_grid);
    for (std::size_t i = 0; i < path.h_grid.size(); ++i) {
      const double q = path.q_values[i];
      if (q < bracket_lo || q > bracket_hi)
        throw Error("estimate escaped the conservative bracket");
      result.add("realdata", scenario, path.h_grid[i], "smoothed", "estimate", q);
    }
  }
  return result;
}

}  // namespace smoothq
