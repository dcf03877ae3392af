#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "smoothq/asymptotics.hpp"
#include "smoothq/rng.hpp"
#include "support/oracles.hpp"

using namespace smoothq;
using Catch::Approx;

namespace {
const DistributionModel kNormal = DistributionModel::normal(0.0, 1.0);
const DistributionModel kLaplace = DistributionModel::laplace(0.0, 1.0);
constexpr double kSqrt2OverPi = 0.7978845608028654;
}  // namespace

TEST_CASE("score_variance: closed-form values", "[asymptotics]") {
  // h = 0: only the indicator term contributes.
  for (double z : {-0.5, 0.0, 0.5}) {
    const double tau = solve_population(kNormal, {z, 0.0}).tau;
    CHECK(score_variance(kNormal, {z, 0.0}) == Approx(4.0 * tau * (1.0 - tau)).margin(1e-12));
  }
  CHECK(score_variance(kNormal, {0.0, 1.0}) ==
        Approx(1.0 + 2.0 * kSqrt2OverPi + 1.0).margin(1e-12));
  CHECK(score_variance(kLaplace, {0.0, 1.0}) == Approx(5.0).margin(1e-12));
}

TEST_CASE("score_variance matches the Monte Carlo variance of the score",
          "[asymptotics][slow]") {
  struct Case {
    DistributionModel model;
    double z, h;
  };
  const std::vector<Case> cases = {{kNormal, 0.0, 1.0}, {kLaplace, -0.5, 2.0},
                                   {kNormal, 0.5, 0.5}};
  for (const auto& c : cases) {
    const double q = solve_population(c.model, {c.z, c.h}).q;
    const Sample draws = c.model.sample(1'000'000, 0xB0A710ADu + static_cast<int>(10 * c.h));
    std::vector<double> scores;
    scores.reserve(draws.size());
    for (double y : draws.values()) {
      const double t = q - y;
      scores.push_back((t > 0.0 ? 1.0 : -1.0) + c.h * t + c.z);
    }
    const double mc = Sample(scores).variance();
    CHECK(score_variance(c.model, {c.z, c.h}) == Approx(mc).epsilon(0.01));
  }
}

TEST_CASE("asym_variance: reductions and hand values", "[asymptotics]") {
  SECTION("h = 0 reduces to the classical quantile variance") {
    for (const auto& model : {kNormal, kLaplace}) {
      for (double z : {-0.5, 0.1, 0.6}) {
        const VarianceReport rep = asym_variance(model, {z, 0.0});
        CHECK(rep.asym_var == Approx(rep.classical_var).margin(1e-10));
        CHECK(rep.ratio == Approx(1.0).margin(1e-10));
        CHECK(rep.asym_var ==
              Approx(plugin_variance(model, 0.5 * (1.0 - z))).margin(1e-10));
      }
    }
  }

  SECTION("normal z=0 h=1") {
    const VarianceReport rep = asym_variance(kNormal, {0.0, 1.0});
    const double phi0 = kNormal.pdf(0.0);
    CHECK(rep.asym_var == Approx(3.5957691216057308 / ((2 * phi0 + 1) * (2 * phi0 + 1)))
                              .margin(1e-10));
    CHECK(rep.asym_var == Approx(1.1124).margin(5e-5));
    CHECK(rep.classical_var == Approx(M_PI / 2.0).margin(1e-12));
    CHECK(rep.ratio == Approx(0.708).margin(5e-4));
  }

  SECTION("laplace z=0 h=1") {
    const VarianceReport rep = asym_variance(kLaplace, {0.0, 1.0});
    CHECK(rep.asym_var == Approx(1.25).margin(1e-12));
    CHECK(rep.classical_var == Approx(1.0).margin(1e-12));
    CHECK(rep.ratio == Approx(1.25).margin(1e-12));
  }

  SECTION("report is internally consistent") {
    for (double h : {0.0, 0.5, 2.0}) {
      const VarianceReport rep = asym_variance(kLaplace, {-0.3, h});
      CHECK(rep.asym_var * rep.slope * rep.slope == Approx(rep.score_var).epsilon(1e-10));
      CHECK(rep.asym_var > 0.0);
      CHECK(rep.classical_var > 0.0);
    }
  }
}

TEST_CASE("line_variance: values, limits, and consistency with asym_variance",
          "[asymptotics]") {
  for (const auto& model : {kNormal, kLaplace}) {
    for (double tau : {0.3, 0.5, 0.7}) {
      CHECK(line_variance(model, tau, 0.0) ==
            Approx(plugin_variance(model, tau)).margin(1e-12));
    }
  }
  CHECK(line_variance(kLaplace, 0.5, 1.0) == Approx(1.25).margin(1e-12));
  for (const auto& model : {kNormal, kLaplace})
    CHECK(line_variance(model, 0.4, 1e4) == Approx(model.variance()).epsilon(1e-3));

  SECTION("equals asym_variance along the admissible part of the line") {
    for (const auto& model : {kNormal, kLaplace}) {
      for (double tau : {0.4, 0.5, 0.55}) {
        for (double h : {0.0, 0.2, 0.6, 1.5}) {
          double z;
          try {
            z = line_z(model, tau, h);
          } catch (const OutOfRangeError&) {
            continue;
          }
          CHECK(line_variance(model, tau, h) ==
                Approx(asym_variance(model, {z, h}).asym_var).epsilon(1e-8));
        }
      }
    }
  }
}

TEST_CASE("line coefficients hand values for laplace tau=0.25", "[asymptotics]") {
  const LineCoefficients k = line_coefficients(kLaplace, 0.25);
  CHECK(k.a == Approx(0.75).margin(1e-14));
  // b = 2 [E|Y - ln(1/2)| - (0 - ln(1/2)) (1 - 1/2)] = 1 + ln 2.
  CHECK(k.b == Approx(1.0 + std::log(2.0)).margin(1e-12));
  CHECK(k.c == Approx(2.0).margin(1e-14));
  CHECK(k.d == Approx(0.5).margin(1e-12));
}

TEST_CASE("classify_hstar: the three regimes", "[asymptotics]") {
  SECTION("laplace tau=0.25: finite interior minimum") {
    const HStarRegime regime = classify_hstar(kLaplace, 0.25);
    REQUIRE(regime.trend == VarianceTrend::InteriorMinimum);
    REQUIRE(regime.h_star.has_value());
    CHECK(*regime.h_star == Approx(2.129445676635465).margin(1e-9));
    CHECK(line_variance(kLaplace, 0.25, *regime.h_star) < line_variance(kLaplace, 0.25, 0.0));

    // Direct grid/golden minimization of v as an oracle for the argmin.
    const double argmin = oracles::golden_section(
        [&](double h) { return line_variance(kLaplace, 0.25, h); }, 0.0, 10.0 * *regime.h_star,
        1e-9);
    CHECK(argmin == Approx(*regime.h_star).margin(1e-4));
  }

  SECTION("laplace tau=0.5: nondecreasing, boundary case") {
    const HStarRegime regime = classify_hstar(kLaplace, 0.5);
    CHECK(regime.trend == VarianceTrend::MinAtZero);
    CHECK(regime.boundary_flag);
    CHECK_FALSE(regime.h_star.has_value());
    double prev = line_variance(kLaplace, 0.5, 0.0);
    for (double h = 0.25; h <= 20.0; h += 0.25) {
      const double v = line_variance(kLaplace, 0.5, h);
      CHECK(v >= prev - 1e-14);
      prev = v;
    }
  }

  SECTION("normal tau=0.5: strictly decreasing, minimum at infinity") {
    const HStarRegime regime = classify_hstar(kNormal, 0.5);
    CHECK(regime.trend == VarianceTrend::MinAtInfinity);
    CHECK_FALSE(regime.h_star.has_value());
    double prev = line_variance(kNormal, 0.5, 0.0);
    for (double h = 0.25; h <= 20.0; h += 0.25) {
      const double v = line_variance(kNormal, 0.5, h);
      CHECK(v < prev);
      prev = v;
    }
  }
}

TEST_CASE("line coefficient bounds and interior-minimum invariant", "[asymptotics]") {
  for (const auto& model : {kNormal, kLaplace, DistributionModel::laplace(1.0, 0.5),
                            DistributionModel::normal(-2.0, 3.0)}) {
    for (double tau = 0.05; tau < 0.99; tau += 0.05) {
      const LineCoefficients k = line_coefficients(model, tau);
      CHECK(k.a > 0.0);
      CHECK(k.a <= 1.0);
      CHECK(k.b >= 0.0);
      CHECK(k.c > 0.0);
      CHECK(k.d > 0.0);
      const HStarRegime regime = classify_hstar(model, tau);
      if (regime.trend == VarianceTrend::InteriorMinimum) {
        REQUIRE(regime.h_star.has_value());
        CHECK(*regime.h_star > 0.0);
        CHECK(line_variance(model, tau, *regime.h_star) < line_variance(model, tau, 0.0));
      }
    }
  }
}

TEST_CASE("plugin and mean-family variances", "[asymptotics]") {
  CHECK(plugin_variance(kNormal, 0.5) == Approx(M_PI / 2.0).margin(1e-12));
  CHECK(plugin_variance(kLaplace, 0.5) == Approx(1.0).margin(1e-12));
  CHECK(plugin_variance(kNormal, 0.25) == Approx(1.8567674691102698).margin(1e-10));
  CHECK(mean_family_variance(kNormal) == 1.0);
  CHECK(mean_family_variance(kLaplace) == 2.0);
  CHECK(mean_family_variance(DistributionModel::normal(3.0, 2.5)) == 6.25);
}

TEST_CASE("influence function: tail values, cancellation, moments", "[asymptotics]") {
  SECTION("indicator limits") {
    for (double tau : {0.2, 0.5, 0.8}) {
      const double f_q = kNormal.pdf(kNormal.quantile(tau));
      CHECK(influence_plugin(kNormal, tau, 50.0) == Approx(-tau / f_q).margin(1e-12));
      CHECK(influence_plugin(kNormal, tau, -50.0) == Approx((1.0 - tau) / f_q).margin(1e-12));
    }
  }

  SECTION("simplified and unsimplified forms agree for all (y, h)") {
    RandomStream stream(0x1FFu);
    for (const auto& model : {kNormal, kLaplace}) {
      for (double tau : {0.1, 0.5, 0.9}) {
        const double q = model.quantile(tau);
        double worst = 0.0;
        for (int i = 0; i < 10'000; ++i) {
          const double y = -8.0 + 16.0 * stream.uniform01();
          const double h = 10.0 * stream.uniform01();
          worst = std::max(worst, std::abs(influence_plugin(model, tau, y) -
                                           influence_plugin_unsimplified(model, tau, y, h)));
        }
        // Boundary case y = q(tau) exactly, h = 3 as in the worked example.
        worst = std::max(worst, std::abs(influence_plugin(model, tau, q) -
                                         influence_plugin_unsimplified(model, tau, q, 3.0)));
        CHECK(worst <= 1e-10);
      }
    }
  }

  SECTION("normal tau=0.5, y=1, h=3 worked example") {
    CHECK(influence_plugin(kNormal, 0.5, 1.0) ==
          Approx(influence_plugin_unsimplified(kNormal, 0.5, 1.0, 3.0)).margin(1e-10));
  }

  SECTION("mean zero and variance tau(1-tau)/f^2 by quadrature") {
    for (double tau : {0.25, 0.5, 0.8}) {
      const double q = kNormal.quantile(tau);
      auto gamma_density = [&](double y) {
        return influence_plugin(kNormal, tau, y) * kNormal.pdf(y);
      };
      const double mean =
          oracles::integrate(gamma_density, -14.0, q) + oracles::integrate(gamma_density, q, 14.0);
      CHECK(mean == Approx(0.0).margin(1e-8));
      auto gamma_sq_density = [&](double y) {
        const double g = influence_plugin(kNormal, tau, y);
        return g * g * kNormal.pdf(y);
      };
      const double second = oracles::integrate(gamma_sq_density, -14.0, q) +
                            oracles::integrate(gamma_sq_density, q, 14.0);
      CHECK(second == Approx(plugin_variance(kNormal, tau)).epsilon(1e-8));
    }
  }
}

TEST_CASE("knight_gap vanishes identically", "[asymptotics]") {
  CHECK(knight_gap(5.0, 0.0, 1.0) == 0.0);
  CHECK(knight_gap(0.5, 0.0, 1.0) == Approx(0.0).margin(1e-15));
  CHECK(knight_gap(0.0, 0.0, 0.0) == 0.0);
  CHECK(knight_gap(1.0, 1.0, 0.5) == Approx(0.0).margin(1e-15));
  CHECK(knight_gap(1.0, 1.0, -0.5) == Approx(0.0).margin(1e-15));

  RandomStream stream(0xC4A7u);
  double worst = 0.0;
  for (int i = 0; i < 100'000; ++i) {
    const double y = -10.0 + 20.0 * stream.uniform01();
    const double q = -10.0 + 20.0 * stream.uniform01();
    const double delta = -5.0 + 10.0 * stream.uniform01();
    worst = std::max(worst, std::abs(knight_gap(y, q, delta)));
  }
  CHECK(worst <= 1e-12);
}
