#include <doctest.h>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "fsoacq/optical_channel.hpp"

using namespace fsoacq;

namespace {

FadingParams lognormal(double sx) {
  FadingParams p;
  p.model = FadingModel::LogNormal;
  p.log_amp_std = sx;
  return p;
}

FadingParams gamma_gamma(double a, double b) {
  FadingParams p;
  p.model = FadingModel::GammaGamma;
  p.alpha = a;
  p.beta = b;
  return p;
}

// h = X Y with unit-mean gamma factors: P[h < c] = E_X[P(beta, beta c / X)]
double gamma_product_cdf(double a, double b, double c) {
  const boost::math::gamma_distribution<double> x_dist(a, 1.0 / a);
  auto g = [&](double x) {
    return x <= 0 ? 0.0 : boost::math::pdf(x_dist, x) * boost::math::gamma_p(b, b * c / x);
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      g, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-13);
}

}  // namespace

TEST_SUITE("optical_channel") {
  TEST_CASE("Kim attenuation across visibility bands") {
    CHECK(kim_attenuation_coefficient(10000, 1550e-9) == doctest::Approx(1.0167567075211316e-4).epsilon(1e-12));
    CHECK(kim_attenuation_coefficient(3000, 1550e-9) == doctest::Approx(5.572895706475437e-4).epsilon(1e-12));
    CHECK(kim_attenuation_coefficient(800, 1550e-9) == doctest::Approx(3.581756583313077e-3).epsilon(1e-12));
    CHECK(kim_attenuation_coefficient(400, 1550e-9) == doctest::Approx(9.775e-3).epsilon(1e-12));
    CHECK(kim_attenuation_coefficient(60000, 1550e-9) == doctest::Approx(1.2418670181727338e-5).epsilon(1e-12));
    CHECK(kim_attenuation_coefficient(1000, 550e-9) == doctest::Approx(3.91e-3).epsilon(1e-14));
  }

  TEST_CASE("Beer-Lambert gain") {
    const auto p = AttenuationParams::from_visibility(10000, 1550e-9, 2000);
    CHECK(attenuation_gain(p) == doctest::Approx(std::exp(-2000 * 1.0167567075211316e-4)));
    CHECK(attenuation_gain({0.0, 5000}) == 1.0);
  }

  TEST_CASE("log-normal fading has unit mean and the analytic cdf") {
    for (double sx : {0.1, 0.3, 0.5}) {
      const auto p = lognormal(sx);
      const double mean = integrate([&](double h) { return h <= 0 ? 0.0 : h * fading_pdf(p, h); }, 0.0,
                                    std::numeric_limits<double>::infinity());
      CHECK(mean == doctest::Approx(1.0).epsilon(1e-8));
      for (double h : {0.2, 0.9, 1.0, 1.7, 4.0}) {
        const double z = (std::log(h) + 2 * sx * sx) / (2 * sx);
        CHECK(fading_cdf(p, h) == doctest::Approx(normal_cdf(z)).epsilon(1e-13));
        CHECK(fading_ccdf(p, h) == doctest::Approx(normal_cdf(-z)).epsilon(1e-13));
        const double q = integrate([&](double x) { return fading_pdf(p, x); }, 0.0, h, 1e-12);
        CHECK(q == doctest::Approx(fading_cdf(p, h)).epsilon(1e-8));
      }
    }
  }

  TEST_CASE("gamma-gamma cdf matches a gamma mixture") {
    const auto p = gamma_gamma(8.05, 1.03);
    CHECK(fading_cdf(p, 0.5) == doctest::Approx(0.41655290466736244).epsilon(1e-7));
    CHECK(fading_ccdf(p, 3.0) == doctest::Approx(0.05650381900774264).epsilon(1e-7));
    for (auto [a, b] : {std::pair{8.05, 1.03}, std::pair{4.2, 1.4}, std::pair{2.5, 2.0}}) {
      const auto q = gamma_gamma(a, b);
      for (double c : {0.05, 0.3, 1.0, 2.0, 5.0}) {
        const double ref = gamma_product_cdf(a, b, c);
        CHECK(fading_cdf(q, c) == doctest::Approx(ref).epsilon(1e-7));
        CHECK(fading_ccdf(q, c) == doctest::Approx(1.0 - ref).epsilon(1e-7));
      }
    }
  }

  TEST_CASE("gamma-gamma pdf survives extreme arguments") {
    const auto p = gamma_gamma(8.05, 1.03);
    CHECK(std::isfinite(fading_pdf(p, 1e-200)));
    CHECK(fading_pdf(p, 1e3) >= 0.0);
    CHECK(fading_cdf(p, 1e-300) >= 0.0);
    CHECK(fading_ccdf(p, 1e6) <= 1e-100);
  }

  TEST_CASE("fading cdf is monotone") {
    for (const auto& p : {lognormal(0.3), gamma_gamma(8.05, 1.03)}) {
      double prev = 0.0;
      for (double h = 0.01; h < 10; h *= 1.3) {
        const double c = fading_cdf(p, h);
        CHECK(c >= prev);
        prev = c;
      }
    }
  }

  TEST_CASE("fading samples have unit mean") {
    for (const auto& p : {lognormal(0.3), gamma_gamma(8.05, 1.03)}) {
      Rng rng{11};
      double s = 0;
      const int n = 200000;
      for (int i = 0; i < n; ++i) s += fading_sample(p, rng);
      CHECK(s / n == doctest::Approx(1.0).epsilon(0.01));
    }
    FadingParams none;
    none.model = FadingModel::None;
    Rng rng{1};
    CHECK(fading_sample(none, rng) == 1.0);
    CHECK(fading_cdf(none, 0.99) == 0.0);
    CHECK(fading_cdf(none, 1.01) == 1.0);
  }

  TEST_CASE("pointing geometry") {
    CHECK(center_gain(0.1, 10.0) == doctest::Approx(1.9997905758415928e-4).epsilon(1e-12));
    CHECK(center_gain(10.0, 0.01) == doctest::Approx(1.0));
    PointingParams p;
    p.estimation_std = 4e-3;
    p.jitter_std = 3e-3;
    p.link_distance = 2000;
    CHECK(p.displacement_std() == doctest::Approx(10.0));
    CHECK(pointing_gain(p, 0.0) == doctest::Approx(p.center_gain()));
    const double w = p.beamwidth();
    CHECK(pointing_gain(p, w) == doctest::Approx(p.center_gain() * std::exp(-2.0)));
  }

  TEST_CASE("displacement is Rayleigh") {
    PointingParams p;
    p.estimation_std = 4e-3;
    p.jitter_std = 3e-3;
    Rng rng{5};
    const int n = 200000;
    double s2 = 0;
    int beyond = 0;
    const double sd = p.displacement_std();
    for (int i = 0; i < n; ++i) {
      const double r = displacement_sample(p, rng);
      s2 += r * r;
      beyond += r > 2 * sd;
    }
    CHECK(s2 / n == doctest::Approx(2 * sd * sd).epsilon(0.01));
    CHECK(double(beyond) / n == doctest::Approx(std::exp(-2.0)).epsilon(0.03));
  }

  TEST_CASE("received power") {
    LinkBudget b{2.0, 1e-6, 0.5};
    CHECK(received_power(b, 0.5, 0.8, 0.1) == doctest::Approx(0.04));
  }
}
