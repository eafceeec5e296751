#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsoacq/acquisition.hpp"
#include "fsoacq/estimator.hpp"
#include "fsoacq/outage.hpp"
#include "fsoacq/policy.hpp"

namespace fsoacq {

/// Parse or validation failure in a scenario file. what() names the file,
/// line and dotted key when known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RfSection {
  RfLinkModel link;
  int chain_count = 4;
  std::vector<int> chain_counts{4, 17};
  double sector_halfwidth = 0.2618;  // rad
};

struct OpticalSection {
  double wavelength = 1550e-9;  // m
  double visibility = 10000.0;  // m
  FadingParams fading;
  double jitter_std = 3e-3;
  double receiver_radius = 0.1;
  LinkBudget budget;
  double link_distance = 1000.0;
  std::vector<double> divergence_grid;  // rad, increasing
};

struct PolicySection {
  double structure_constant = 1e-14;
  double transverse_wind = 5.0;
  double link_distance = 2000.0;
  double visibility = 10000.0;
  double rotate_time = 20e-3;
  std::optional<double> coherence_time;  // overrides the turbulence formula
  std::optional<double> divergence;      // nullopt = auto
  std::vector<double> t_grid;            // s
};

struct RunSection {
  std::int64_t trials = 10000;
  std::int64_t outage_trials = 100000;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::vector<double> estimator_distances;  // m
  std::vector<double> outage_distances;     // m
};

struct ScenarioConfig {
  LensArrayConfig array;
  RfSection rf;
  double gps_position_std = 5.0;
  OpticalSection optical;
  PolicySection policy;
  RunSection run;

  void validate() const;

  /// Optical channel at the configured link distance; divergence set to the
  /// first grid point and estimation_std to zero.
  OpticalChannel channel() const;
  OpticalChannel channel_at(double distance, double visibility) const;
  /// Coherence time: the override when present, else rho_0 / v_perp.
  double coherence_time() const;
  AcquisitionScenario acquisition(double distance, double visibility) const;
};

/// Reads a scenario file. Every key must be known; required keys must be
/// present. Throws ConfigError.
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& text, const std::string& source = "<string>");

}  // namespace fsoacq
