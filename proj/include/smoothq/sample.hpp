#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "smoothq/errors.hpp"

namespace smoothq {

/// Immutable observation vector with a cached ascending copy and first two
/// moments. Safe to share read-only across threads.
class Sample {
 public:
  explicit Sample(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw EmptySampleError("sample must hold at least one observation");
    for (double v : values_) {
      if (!std::isfinite(v)) throw std::invalid_argument("sample values must be finite");
    }
    sorted_ = values_;
    std::sort(sorted_.begin(), sorted_.end());
    long double acc = 0.0L;
    for (double v : values_) acc += v;
    mean_ = static_cast<double>(acc / static_cast<long double>(values_.size()));
  }

  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& sorted() const { return sorted_; }
  double min() const { return sorted_.front(); }
  double max() const { return sorted_.back(); }
  double mean() const { return mean_; }

  /// Unbiased sample variance; needs n >= 2.
  double variance() const {
    if (size() < 2) throw Error("variance needs at least two observations");
    long double acc = 0.0L;
    for (double v : values_) {
      const long double d = static_cast<long double>(v) - mean_;
      acc += d * d;
    }
    return static_cast<double>(acc / static_cast<long double>(size() - 1));
  }

  double stddev() const { return std::sqrt(variance()); }

  /// Right-continuous empirical CDF: #{values <= x} / n.
  double ecdf(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(size());
  }

  /// Left-continuous inverse of the empirical CDF: inf{y : F(y) >= tau},
  /// i.e. the order statistic of rank ceil(n*tau).
  double quantile(double tau) const {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("quantile level must lie in (0,1)");
    const double t = static_cast<double>(size()) * tau;
    // n*tau can land an ulp above an integer rank; tolerate that noise.
    auto rank = static_cast<std::size_t>(std::ceil(t - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, size());
    return sorted_[rank - 1];
  }

 private:
  std::vector<double> values_;
  std::vector<double> sorted_;
  double mean_;
};

}  // namespace smoothq
