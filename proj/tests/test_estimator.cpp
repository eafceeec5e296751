#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fsoacq/estimator.hpp"

using namespace fsoacq;

namespace {

RfObservation observe(const LensArrayConfig& c, double truth, double prior_angle, double prior_std,
                      double noise, int k, std::uint64_t seed, double gain = 3000.0) {
  SignalParams s{gain, 0.4, noise, truth};
  return simulate_observation(c, s, select_antennas(c, prior_angle, k), GpsPrior{prior_angle, prior_std}, seed);
}

}  // namespace

TEST_SUITE("estimator") {
  TEST_CASE("noiseless truth at the prior gives zero correction") {
    LensArrayConfig c;
    for (double a : {-0.2, 0.0, 0.15}) {
      const auto est = map_estimate(c, observe(c, a, a, 0.005, 0.0, 4, 1));
      CHECK(std::abs(est.correction) < 1e-12);
      CHECK(std::abs(map_numerator(c, observe(c, a, a, 0.005, 0.0, 4, 1)).imag()) < 1e-9);
    }
  }

  TEST_CASE("noiseless offset is recovered to second order") {
    LensArrayConfig c;
    for (double delta : {1e-4, 3e-4, 1e-3}) {
      const auto est = map_estimate(c, observe(c, 0.1 + delta, 0.1, INFINITY, 0.0, 4, 1));
      CHECK(std::abs(est.angle - (0.1 + delta)) < 50.0 * delta * delta);
    }
  }

  TEST_CASE("closed form is a stationary point of the linearised posterior") {
    LensArrayConfig c;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto obs = observe(c, 0.05 + 1e-3 * double(seed % 5), 0.05, 2e-3, 30.0, 4, seed, 300.0);
      const double est = map_estimate(c, obs).angle;
      const double scale = std::abs(linearized_posterior_slope(c, obs, est + 1e-4));
      CHECK(std::abs(linearized_posterior_slope(c, obs, est)) < 1e-9 * std::max(scale, 1.0));
    }
  }

  TEST_CASE("closed form matches the grid oracle") {
    LensArrayConfig c;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto obs = observe(c, -0.08 + 2e-3 * double(seed % 3), -0.08, 3e-3, 50.0, 5, seed, 500.0);
      const double est = map_estimate(c, obs).angle;
      const double grid = grid_search_oracle(c, obs, 0.01, 20001, true);
      CHECK(std::abs(est - grid) <= 1e-6);
    }
  }

  TEST_CASE("tight prior pins the estimate to GPS") {
    LensArrayConfig c;
    const auto obs = observe(c, 0.11, 0.1, 1e-9, 1.0, 4, 5, 1.0);
    CHECK(std::abs(map_estimate(c, obs).correction) < 1e-6);
  }

  TEST_CASE("degenerate window throws") {
    LensArrayConfig c;
    // centre antenna at broadside: A'(0) = 0 on a one-chain window
    const auto obs = observe(c, 0.0, 0.0, INFINITY, 0.0, 1, 1);
    CHECK_THROWS_AS(map_estimate(c, obs), std::domain_error);
  }

  TEST_CASE("log posterior requires noise") {
    LensArrayConfig c;
    const auto obs = observe(c, 0.0, 0.0, 0.01, 0.0, 4, 1);
    CHECK_THROWS_AS(log_posterior(c, obs, 0.0, true), std::invalid_argument);
  }

  TEST_CASE("std sweep beats GPS and is reproducible") {
    LensArrayConfig c;
    RfLinkModel rf;
    StdSweepOptions opt;
    opt.trials = 2000;
    const double ds[] = {1000, 4000};
    const int ks[] = {4, 17};
    const auto a = estimation_std_sweep(c, rf, ds, ks, opt);
    opt.workers = 3;
    const auto b = estimation_std_sweep(c, rf, ds, ks, opt);
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].std_proposed_rad < a[i].std_gps_rad);
      CHECK(a[i].std_proposed_rad == b[i].std_proposed_rad);
      CHECK(a[i].std_gps_m == doctest::Approx(5.0));
    }
    CHECK(a[0].distance_m == 1000);
    CHECK(a[1].chain_count == 17);
  }

  TEST_CASE("rf gain falls as 1/D") {
    RfLinkModel rf;
    CHECK(rf.gain_at(1000) == doctest::Approx(3000));
    CHECK(rf.gain_at(2000) == doctest::Approx(1500));
  }
}
