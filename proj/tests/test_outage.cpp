#include <doctest.h>

#include <cmath>

#include "fsoacq/outage.hpp"

using namespace fsoacq;

namespace {

OpticalChannel channel(FadingModel model = FadingModel::LogNormal) {
  OpticalChannel ch;
  ch.attenuation = AttenuationParams::from_visibility(10000, 1550e-9, 1000);
  ch.fading.model = model;
  ch.pointing.beam_divergence = 10e-3;
  ch.pointing.link_distance = 1000;
  ch.pointing.estimation_std = 2e-3;
  ch.pointing.jitter_std = 3e-3;
  ch.pointing.receiver_radius = 0.1;
  return ch;
}

}  // namespace

TEST_SUITE("outage") {
  TEST_CASE("no fading gives a closed-form outage") {
    auto ch = channel(FadingModel::None);
    const double h_l = attenuation_gain(ch.attenuation);
    const double need = ch.budget.threshold_power / (h_l * ch.budget.responsivity * ch.budget.tx_power);
    const double w = ch.pointing.beamwidth();
    const double r_th = std::sqrt(0.5 * w * w * std::log(ch.pointing.center_gain() / need));
    const double sd = ch.pointing.displacement_std();
    const double expected = std::exp(-r_th * r_th / (2 * sd * sd));
    CHECK(outage_probability(ch, Quadrature{}).probability == doctest::Approx(expected).epsilon(1e-6));
    CHECK(conditional_outage(ch, 0.99 * r_th) == 0.0);
    CHECK(conditional_outage(ch, 1.01 * r_th) == 1.0);
  }

  TEST_CASE("conditional outage and success are complementary") {
    for (auto m : {FadingModel::LogNormal, FadingModel::GammaGamma}) {
      const auto ch = channel(m);
      double prev = 0.0;
      for (double r = 0; r < 40; r += 2.5) {
        const double f = conditional_outage(ch, r);
        CHECK(f + conditional_success(ch, r) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(f >= prev);
        prev = f;
      }
    }
  }

  TEST_CASE("quadrature agrees with Monte Carlo") {
    for (auto m : {FadingModel::LogNormal, FadingModel::GammaGamma}) {
      auto ch = channel(m).with_divergence(6e-3);
      const double q = outage_probability(ch, Quadrature{}).probability;
      const auto mc = outage_probability(ch, MonteCarlo{400000, 17, 4});
      CHECK(q > 1e-3);
      CHECK(std::abs(q - mc.probability) < 4 * mc.std_error);
    }
  }

  TEST_CASE("quadrature matches a plain radial integral") {
    const auto ch = channel();
    const double sd = ch.pointing.displacement_std();
    // midpoint rule on r, independent of the u substitution
    const int n = 200000;
    const double r_max = 12 * sd, dr = r_max / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = (i + 0.5) * dr;
      s += r / (sd * sd) * std::exp(-r * r / (2 * sd * sd)) * conditional_outage(ch, r) * dr;
    }
    CHECK(outage_probability(ch, Quadrature{}).probability == doctest::Approx(s).epsilon(1e-6));
  }

  TEST_CASE("Monte Carlo does not depend on worker count") {
    const auto ch = channel();
    const auto a = outage_probability(ch, MonteCarlo{50000, 3, 1});
    const auto b = outage_probability(ch, MonteCarlo{50000, 3, 7});
    CHECK(a.probability == b.probability);
  }

  TEST_CASE("outage grows with pointing error") {
    double prev = 0.0;
    for (double est : {0.0, 1e-3, 3e-3, 1e-2, 3e-2}) {
      auto ch = channel();
      ch.pointing.estimation_std = est;
      const double p = outage_probability(ch, Quadrature{}).probability;
      CHECK(p >= prev);
      prev = p;
    }
  }

  TEST_CASE("without attenuation only the geometry ratio matters") {
    auto ch = channel();
    ch.attenuation.attenuation_coeff = 0.0;
    const double p1 = outage_probability(ch, Quadrature{}).probability;
    auto far = ch.at_distance(4000);
    far.pointing.receiver_radius = 4 * ch.pointing.receiver_radius;
    CHECK(outage_probability(far, Quadrature{}).probability == doctest::Approx(p1).epsilon(1e-7));
  }

  TEST_CASE("divergence sweep finds an interior minimum") {
    const auto ch = channel();
    const auto grid = geomspace(2e-4, 5e-2, 40);
    const auto curve = divergence_sweep(ch, grid, Quadrature{});
    CHECK(curve.argmin_index > 0);
    CHECK(curve.argmin_index + 1 < grid.size());
    CHECK(curve.min_outage == curve.outage[curve.argmin_index]);
    for (double p : curve.outage) CHECK(p >= curve.min_outage);
    CHECK(curve.argmin_divergence == grid[curve.argmin_index]);
  }

  TEST_CASE("sigma sources") {
    CHECK(SigmaEstSource::fixed(1e-3).at(5000) == 1e-3);
    CHECK(SigmaEstSource::gps(5.0).at(1000) == doctest::Approx(5e-3));
    const auto t = SigmaEstSource::table({1000, 3000}, {1e-4, 3e-4});
    CHECK(t.at(2000) == doctest::Approx(2e-4));
    CHECK(t.at(500) == doctest::Approx(1e-4));
    CHECK(t.at(9000) == doctest::Approx(3e-4));
  }

  TEST_CASE("better pointing reduces the minimum outage") {
    const auto ch = channel();
    const auto grid = geomspace(2e-4, 5e-2, 40);
    const double ds[] = {1000, 2000};
    const auto rows = distance_sweep(ch, ds, grid, Quadrature{}, SigmaEstSource::fixed(5e-5),
                                     SigmaEstSource::gps(5.0));
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
      CHECK(r.min_outage_proposed < r.min_outage_gps);
      CHECK(r.reduction_factor == doctest::Approx(r.min_outage_gps / r.min_outage_proposed));
    }
  }

  TEST_CASE("invalid channels are rejected") {
    auto ch = channel();
    ch.pointing.beam_divergence = -1;
    CHECK_THROWS(outage_probability(ch, Quadrature{}));
    const double bad[] = {1e-3, 1e-3};
    CHECK_THROWS(divergence_sweep(channel(), bad, Quadrature{}));
  }
}
