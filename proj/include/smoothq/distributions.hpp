#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "smoothq/errors.hpp"
#include "smoothq/rng.hpp"
#include "smoothq/sample.hpp"

namespace smoothq {

namespace detail {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779;
inline constexpr double kSqrt2Pi = 2.5066282746310005024;
inline constexpr double kInvSqrt2 = 0.7071067811865475244;

inline double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

/// Inverse standard normal CDF: Acklam's rational approximation followed by
/// one Halley step on the erfc-based CDF. Absolute error is a few ulp,
/// comfortably below 1e-12.
inline double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile level must lie in (0,1)");
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  constexpr double p_high = 1.0 - p_low;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= p_high) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // exp(x^2/2) overflows past |x| ~ 37.6; the rational approximation alone
  // is already accurate to ~1e-9 relative that far out.
  if (std::abs(x) < 37.0) {
    const double e = std_normal_cdf(x) - p;
    const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

/// E|Y - q| for standard normal Y.
inline double std_normal_mean_abs_dev(double q) {
  return 2.0 * std_normal_pdf(q) + q * (2.0 * std_normal_cdf(q) - 1.0);
}

inline double std_laplace_pdf(double x) { return 0.5 * std::exp(-std::abs(x)); }

inline double std_laplace_cdf(double x) {
  return x < 0.0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
}

inline double std_laplace_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile level must lie in (0,1)");
  return p < 0.5 ? std::log(2.0 * p) : -std::log(2.0 * (1.0 - p));
}

/// E|Y - q| for standard Laplace Y.
inline double std_laplace_mean_abs_dev(double q) {
  return std::abs(q) + std::exp(-std::abs(q));
}

}  // namespace detail

enum class DistKind { Normal, Laplace, Empirical };

/// Analytic (normal / Laplace location-scale) or empirical distribution model.
/// Supplies the population quantities used throughout: CDF, density, quantile,
/// mean, variance, E|Y-q|, and seeded pseudo-random samples. Immutable after
/// construction; copies share empirical data.
class DistributionModel {
 public:
  static DistributionModel normal(double location, double scale) {
    return DistributionModel(DistKind::Normal, location, scale);
  }
  static DistributionModel laplace(double location, double scale) {
    return DistributionModel(DistKind::Laplace, location, scale);
  }
  static DistributionModel empirical(Sample sample) {
    DistributionModel m(DistKind::Empirical, 0.0, 1.0);
    m.data_ = std::make_shared<const Sample>(std::move(sample));
    return m;
  }

  DistKind kind() const { return kind_; }
  bool analytic() const { return kind_ != DistKind::Empirical; }

  double location() const {
    require_analytic("location");
    return location_;
  }
  double scale() const {
    require_analytic("scale");
    return scale_;
  }
  const Sample& data() const {
    if (analytic()) throw UnsupportedOperation("analytic model carries no sample");
    return *data_;
  }

  double cdf(double x) const {
    switch (kind_) {
      case DistKind::Normal: return detail::std_normal_cdf(standardize(x));
      case DistKind::Laplace: return detail::std_laplace_cdf(standardize(x));
      case DistKind::Empirical: return data_->ecdf(x);
    }
    return 0.0;
  }

  double pdf(double x) const {
    switch (kind_) {
      case DistKind::Normal: return detail::std_normal_pdf(standardize(x)) / scale_;
      case DistKind::Laplace: return detail::std_laplace_pdf(standardize(x)) / scale_;
      case DistKind::Empirical:
        throw UnsupportedOperation("density of an empirical model is not defined");
    }
    return 0.0;
  }

  double quantile(double tau) const {
    switch (kind_) {
      case DistKind::Normal: return location_ + scale_ * detail::std_normal_quantile(tau);
      case DistKind::Laplace: return location_ + scale_ * detail::std_laplace_quantile(tau);
      case DistKind::Empirical: return data_->quantile(tau);
    }
    return 0.0;
  }

  double mean() const {
    switch (kind_) {
      case DistKind::Normal:
      case DistKind::Laplace: return location_;
      case DistKind::Empirical: return data_->mean();
    }
    return 0.0;
  }

  double variance() const {
    switch (kind_) {
      case DistKind::Normal: return scale_ * scale_;
      case DistKind::Laplace: return 2.0 * scale_ * scale_;
      case DistKind::Empirical: return data_->variance();
    }
    return 0.0;
  }

  /// E|Y - q|; closed form for analytic kinds, sample average otherwise.
  double mean_abs_dev(double q) const {
    switch (kind_) {
      case DistKind::Normal: return scale_ * detail::std_normal_mean_abs_dev(standardize(q));
      case DistKind::Laplace: return scale_ * detail::std_laplace_mean_abs_dev(standardize(q));
      case DistKind::Empirical: {
        long double acc = 0.0L;
        for (double v : data_->values()) acc += std::abs(v - q);
        return static_cast<double>(acc / static_cast<long double>(data_->size()));
      }
    }
    return 0.0;
  }

  /// Deterministic sample of size n for the given seed. Normal variates via
  /// Box-Muller, Laplace via inverse-CDF of uniforms.
  Sample sample(std::size_t n, std::uint64_t seed) const {
    if (n < 1) throw std::invalid_argument("sample size must be positive");
    if (!analytic()) throw UnsupportedOperation("resampling an empirical model is not supported");
    RandomStream stream(seed);
    std::vector<double> values;
    values.reserve(n);
    if (kind_ == DistKind::Normal) {
      while (values.size() < n) {
        const double u1 = stream.uniform01();
        const double u2 = stream.uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        values.push_back(location_ + scale_ * (r * std::cos(theta)));
        if (values.size() < n) values.push_back(location_ + scale_ * (r * std::sin(theta)));
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const double u = stream.uniform01();
        const double std_draw =
            u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
        values.push_back(location_ + scale_ * std_draw);
      }
    }
    return Sample(std::move(values));
  }

  /// Spec-string form, e.g. "normal:0,1" or "empirical(n=123)".
  std::string name() const {
    auto fmt = [](double v) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%g", v);
      return std::string(buf);
    };
    switch (kind_) {
      case DistKind::Normal: return "normal:" + fmt(location_) + "," + fmt(scale_);
      case DistKind::Laplace: return "laplace:" + fmt(location_) + "," + fmt(scale_);
      case DistKind::Empirical: return "empirical(n=" + std::to_string(data_->size()) + ")";
    }
    return {};
  }

 private:
  DistributionModel(DistKind kind, double location, double scale)
      : kind_(kind), location_(location), scale_(scale) {
    if (kind != DistKind::Empirical) {
      if (!std::isfinite(location) || !std::isfinite(scale))
        throw std::invalid_argument("location and scale must be finite");
      if (!(scale > 0.0)) throw std::invalid_argument("scale must be positive");
    }
  }

  void require_analytic(const char* what) const {
    if (!analytic()) throw UnsupportedOperation(std::string(what) + " requires an analytic model");
  }

  double standardize(double x) const { return (x - location_) / scale_; }

  DistKind kind_;
  double location_;
  double scale_;
  std::shared_ptr<const Sample> data_;
};

}  // namespace smoothq
