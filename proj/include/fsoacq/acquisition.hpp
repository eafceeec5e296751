#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fsoacq/estimator.hpp"
#include "fsoacq/outage.hpp"
#include "fsoacq/policy.hpp"

namespace fsoacq {

enum class PointingMode { Proposed, GpsOnly };

std::string pointing_mode_name(PointingMode m);

/// Inputs of the coarse-pointing loop. The channel carries the link distance.
struct AcquisitionScenario {
  LensArrayConfig array;
  RfLinkModel rf;
  int chain_count = 4;
  double gps_position_std = 5.0;     // m
  double sector_halfwidth = 0.2618;  // rad; true angles ~ U(-w, w) per axis
  OpticalChannel channel;
  /// nullopt picks the outage-minimising divergence from divergence_grid.
  std::optional<double> divergence;
  std::vector<double> divergence_grid;
  std::int64_t pilot_trials = 4000;  // estimator trials behind the auto divergence
  double coherence_time = 1e-3;      // s
  double rotate_time = 20e-3;        // s
  std::int64_t max_attempts = 100000;

  double distance() const { return channel.pointing.link_distance; }
  void validate() const;
};

struct AttemptTrace {
  std::int64_t attempt = 0;
  double displacement = 0.0;  // m
  double fading = 1.0;        // h_a
  double received_power = 0.0;  // W
  bool connected = false;
};

struct TrialOutcome {
  double time = 0.0;  // s; for censored trials, time spent up to the cap
  std::int64_t attempts = 0;
  bool censored = false;
};

struct AcquisitionRun {
  PointingMode mode = PointingMode::Proposed;
  Policy policy = Policy::ReEstimate;
  double divergence = 0.0;
  std::vector<TrialOutcome> outcomes;
  std::vector<std::vector<AttemptTrace>> traces;  // first trace_trials trials
  std::int64_t censored = 0;
  double first_failure_rate = 0.0;
  double first_failure_se = 0.0;
  SampleMoments time;  // over all trials, censored ones at their capped time
};

/// Outage-minimising divergence for this scenario and pointing mode.
double auto_divergence(const AcquisitionScenario& sc, PointingMode mode, std::uint64_t seed);

/// Event simulation of the coarse-pointing loop. Each trial draws the true
/// azimuth and elevation, reads a GPS fix, estimates both axes (or trusts the
/// GPS), adds jitter, points the beam and transmits until P_R >= P_th.
/// ReEstimate repeats the whole procedure per attempt at cost t0 + t_rot;
/// SingleEstimate rotates once, then waits t0 per fresh fading draw.
AcquisitionRun simulate_algorithm1(const AcquisitionScenario& sc, PointingMode mode, Policy policy,
                                   std::int64_t trials, std::uint64_t seed,
                                   std::int64_t trace_trials = 0);

/// Empirical P[t_acq > t] on a time grid.
std::vector<TailPoint> empirical_tail(const AcquisitionRun& run, std::span<const double> t_grid);

}  // namespace fsoacq
