#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "smoothq/distributions.hpp"
#include "support/oracles.hpp"

using namespace smoothq;
using Catch::Approx;

namespace {
const DistributionModel kNormal = DistributionModel::normal(0.0, 1.0);
const DistributionModel kLaplace = DistributionModel::laplace(0.0, 1.0);

double normal_density(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
}  // namespace

TEST_CASE("cdf: symmetry and reference values", "[distributions]") {
  CHECK(kNormal.cdf(0.0) == Approx(0.5).margin(1e-15));
  CHECK(kLaplace.cdf(0.0) == Approx(0.5).margin(1e-15));

  // Quadrature of the density as an independent oracle.
  const double oracle = 0.5 + oracles::integrate(normal_density, 0.0, 1.96);
  CHECK(oracle == Approx(0.9750021048517795).margin(1e-10));
  CHECK(kNormal.cdf(1.96) == Approx(oracle).margin(1e-10));

  const DistributionModel shifted = DistributionModel::normal(2.0, 3.0);
  CHECK(shifted.cdf(2.0) == Approx(0.5).margin(1e-15));
  CHECK(shifted.cdf(2.0 + 3.0 * 1.96) == Approx(0.9750021048517795).margin(1e-12));
}

TEST_CASE("empirical cdf equals (k+1)/n at order statistics", "[distributions]") {
  const Sample s({5.0, 1.0, 3.0, 3.0, 2.0});
  const DistributionModel model = DistributionModel::empirical(s);
  const auto& sorted = s.sorted();
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const double expected = s.ecdf(sorted[k]);
    CHECK(model.cdf(sorted[k]) == expected);
    if (k + 1 < sorted.size() && sorted[k] != sorted[k + 1])
      CHECK(model.cdf(sorted[k]) == static_cast<double>(k + 1) / 5.0);
  }
  CHECK(model.cdf(0.0) == 0.0);
  CHECK(model.cdf(10.0) == 1.0);
}

TEST_CASE("pdf: closed forms and finite-difference agreement", "[distributions]") {
  CHECK(kNormal.pdf(0.0) == Approx(0.3989422804014327).margin(1e-14));
  CHECK(kLaplace.pdf(0.0) == Approx(0.5).margin(1e-15));
  CHECK_THROWS_AS(DistributionModel::empirical(Sample({1.0, 2.0})).pdf(0.5),
                  UnsupportedOperation);

  // Central finite difference of the CDF on a grid.
  for (const auto& model : {kNormal, kLaplace, DistributionModel::laplace(1.0, 2.0)}) {
    for (double x : {-2.5, -1.0, -0.3, 0.4, 1.2, 3.0}) {
      const double eps = 1e-6;
      const double fd = (model.cdf(x + eps) - model.cdf(x - eps)) / (2.0 * eps);
      CHECK(model.pdf(x) == Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("quantile: closed forms and inverse consistency", "[distributions]") {
  CHECK(kNormal.quantile(0.5) == 0.0);
  CHECK(kLaplace.quantile(0.25) == Approx(std::log(0.5)).margin(1e-15));
  CHECK(kLaplace.cdf(kLaplace.quantile(0.25)) == Approx(0.25).margin(1e-14));

  // inf-definition for empirical data.
  const DistributionModel emp = DistributionModel::empirical(Sample({1.0, 2.0, 3.0}));
  CHECK(emp.quantile(0.5) == 2.0);
  CHECK(emp.quantile(0.34) == 2.0);
  CHECK(emp.quantile(1.0 / 3.0) == 1.0);

  CHECK_THROWS_AS(kNormal.quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(kNormal.quantile(1.0), std::invalid_argument);

  SECTION("roundtrip |cdf(quantile(tau)) - tau| <= 1e-10 on a grid") {
    for (const auto& model : {kNormal, kLaplace, DistributionModel::normal(-1.0, 0.5),
                              DistributionModel::laplace(2.0, 3.0)}) {
      for (double tau = 0.001; tau < 0.9995; tau += 0.007)
        CHECK(model.cdf(model.quantile(tau)) == Approx(tau).margin(1e-10));
    }
  }
}

TEST_CASE("normal quantile accuracy at reference points", "[distributions]") {
  CHECK(kNormal.quantile(0.975) == Approx(1.959963984540054).margin(1e-12));
  CHECK(kNormal.quantile(0.995) == Approx(2.575829303548901).margin(1e-12));
  CHECK(kNormal.quantile(0.0005) == Approx(-3.290526731491926).margin(1e-11));
  CHECK(kNormal.quantile(0.25) == Approx(-0.6744897501960817).margin(1e-13));

  // Extreme tails stay finite and ordered (no overflow in the refinement).
  const double far = kNormal.quantile(1e-300);
  CHECK(std::isfinite(far));
  CHECK(far < -37.0);
  CHECK(kNormal.quantile(1.0 - 1e-16) > 8.0);
  CHECK(std::isfinite(kNormal.quantile(1.0 - 1e-16)));
}

TEST_CASE("mean_abs_dev: quadrature oracle, Jensen bound, far-tail limit",
          "[distributions]") {
  // E|Y| for the standard normal is sqrt(2/pi).
  const double normal_e_abs =
      oracles::integrate([](double y) { return std::abs(y) * normal_density(y); }, -14.0, 14.0);
  CHECK(normal_e_abs == Approx(0.7978845608028654).margin(1e-10));
  CHECK(kNormal.mean_abs_dev(0.0) == Approx(normal_e_abs).epsilon(1e-8));

  const double laplace_e_abs_1 = oracles::integrate(
      [](double y) { return std::abs(y - 1.0) * 0.5 * std::exp(-std::abs(y)); }, -40.0, 42.0);
  CHECK(laplace_e_abs_1 == Approx(1.0 + std::exp(-1.0)).margin(1e-9));
  CHECK(kLaplace.mean_abs_dev(1.0) == Approx(laplace_e_abs_1).epsilon(1e-8));

  SECTION("matches quadrature within 1e-8 relative on a grid") {
    for (double q : {-3.0, -0.7, 0.0, 0.3, 1.1, 2.6}) {
      const double n_oracle = oracles::integrate(
          [&](double y) { return std::abs(y - q) * normal_density(y); }, q - 16.0, q + 16.0);
      CHECK(kNormal.mean_abs_dev(q) == Approx(n_oracle).epsilon(1e-8));
      const double l_oracle = oracles::integrate(
          [&](double y) { return std::abs(y - q) * 0.5 * std::exp(-std::abs(y)); }, -45.0, 45.0);
      CHECK(kLaplace.mean_abs_dev(q) == Approx(l_oracle).epsilon(1e-8));
    }
  }

  SECTION("Jensen: E|Y-q| >= |mean - q|") {
    const DistributionModel emp = DistributionModel::empirical(Sample({-2.0, 0.5, 3.0, 3.0}));
    for (const auto& model : {kNormal, kLaplace, DistributionModel::normal(1.5, 2.0), emp}) {
      for (double q = -6.0; q <= 6.0; q += 0.37)
        CHECK(model.mean_abs_dev(q) >= std::abs(model.mean() - q) - 1e-12);
    }
  }

  SECTION("far tail: E|Y-q| ~ |q - mean|") {
    const double q = 1e6;
    for (const auto& model : {kNormal, kLaplace, DistributionModel::laplace(3.0, 2.0)}) {
      CHECK(model.mean_abs_dev(q) == Approx(q - model.mean()).epsilon(1e-3));
      CHECK(model.mean_abs_dev(-q) == Approx(q + model.mean()).epsilon(1e-3));
    }
  }

  SECTION("empirical models average |Y_i - q|") {
    const DistributionModel emp = DistributionModel::empirical(Sample({0.0, 1.0, 5.0}));
    CHECK(emp.mean_abs_dev(1.0) == Approx((1.0 + 0.0 + 4.0) / 3.0).margin(1e-15));
  }
}

TEST_CASE("mean and variance", "[distributions]") {
  CHECK(kLaplace.mean() == 0.0);
  CHECK(kLaplace.variance() == 2.0);
  CHECK(kNormal.mean() == 0.0);
  CHECK(kNormal.variance() == 1.0);
  CHECK(DistributionModel::normal(3.0, 2.0).variance() == 4.0);
  CHECK(DistributionModel::laplace(1.0, 3.0).variance() == 18.0);

  const DistributionModel emp = DistributionModel::empirical(Sample({0.0, 1.0}));
  CHECK(emp.mean() == 0.5);
  CHECK(emp.variance() == 0.5);
  CHECK_THROWS(DistributionModel::empirical(Sample({4.0})).variance());
}

TEST_CASE("model construction validates parameters", "[distributions]") {
  CHECK_THROWS_AS(DistributionModel::normal(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(DistributionModel::laplace(0.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(Sample(std::vector<double>{}), EmptySampleError);
}

TEST_CASE("sampling: determinism and moment checks", "[distributions][sampling]") {
  const Sample a = kNormal.sample(1000, 987654321u);
  const Sample b = kNormal.sample(1000, 987654321u);
  CHECK(a.values() == b.values());
  const Sample c = kNormal.sample(1000, 987654322u);
  CHECK(a.values() != c.values());

  CHECK_THROWS_AS(DistributionModel::empirical(Sample({1.0, 2.0})).sample(5, 1),
                  UnsupportedOperation);

  const std::size_t n = 1'000'000;
  const Sample big_n = kNormal.sample(n, 20240601u);
  CHECK(std::abs(big_n.mean()) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(big_n.variance() == Approx(1.0).epsilon(0.05));

  const Sample big_l = kLaplace.sample(n, 20240602u);
  CHECK(big_l.variance() == Approx(2.0).epsilon(0.05));
  CHECK(std::abs(big_l.mean()) < 4.0 * std::sqrt(2.0 / static_cast<double>(n)));

  const Sample scaled = DistributionModel::normal(5.0, 0.5).sample(100000, 7u);
  CHECK(scaled.mean() == Approx(5.0).margin(0.02));
  CHECK(scaled.variance() == Approx(0.25).epsilon(0.05));
}

TEST_CASE("sample type caches sorted copy and moments", "[distributions]") {
  const Sample s({3.0, 1.0, 2.0});
  CHECK(s.sorted() == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(s.mean() == Approx(2.0).margin(1e-15));
  CHECK(s.variance() == Approx(1.0).margin(1e-15));
  CHECK(s.min() == 1.0);
  CHECK(s.max() == 3.0);
}
