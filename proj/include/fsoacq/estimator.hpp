#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fsoacq/lens_array.hpp"

namespace fsoacq {

struct AngleEstimate {
  double angle = 0.0;        // phi_est
  double prior_angle = 0.0;  // phi_gps
  double correction = 0.0;   // phi_est - phi_gps
};

/// Closed-form MAP angle estimate: the GPS angle plus the stationary point of
/// the posterior after linearising A(phi) about phi_gps.
///
///   dphi = (e^{jb} (y/g)^H A' s + e^{-jb} s^H A' (y/g) - 2 s^H A A' s)
///          / (2 s^H A'^2 s + 2 sigma_n^2 / (g^2 sigma_gps^2))
///
/// with A, A' the selected rows of H(phi_gps), H'(phi_gps) and s the matching
/// steering entries. The noise model is i.i.d. complex Gaussian whose real and
/// imaginary parts each have std sigma_n, which makes this expression the exact
/// argmax of the linearised posterior. An infinite sigma_gps drops the prior term.
///
/// Throws std::domain_error when the denominator vanishes (sigma_n = 0 and
/// A'(phi_gps) s = 0 on the window).
AngleEstimate map_estimate(const LensArrayConfig& cfg, const RfObservation& obs);

/// Complex numerator of the correction before the real part is taken. Its
/// imaginary part is round-off only.
cplx map_numerator(const LensArrayConfig& cfg, const RfObservation& obs);

/// Log-posterior log f_lens(y|phi) + log f_gps(phi), dropping phi-independent
/// constants. With linearized set, A(phi) is replaced by its first-order
/// expansion about the prior mean.
double log_posterior(const LensArrayConfig& cfg, const RfObservation& obs, double angle,
                     bool linearized);

/// d/dphi of the linearised log-posterior. Zero at the closed-form estimate.
double linearized_posterior_slope(const LensArrayConfig& cfg, const RfObservation& obs,
                                  double angle);

/// Argmax of log_posterior over grid_points evenly spaced angles in
/// phi_gps +/- grid_halfwidth.
double grid_search_oracle(const LensArrayConfig& cfg, const RfObservation& obs,
                          double grid_halfwidth, int grid_points, bool linearized);

/// RF amplitude falls off as 1/D from a reference distance (free space).
struct RfLinkModel {
  double reference_gain = 3000.0;
  double reference_distance = 1000.0;  // m
  double noise_std = 1.0;

  double gain_at(double distance) const { return reference_gain * reference_distance / distance; }
  void validate() const;
};

struct StdSweepRow {
  double distance_m = 0.0;
  int chain_count = 0;
  double std_proposed_rad = 0.0;
  double std_proposed_m = 0.0;
  double std_gps_rad = 0.0;
  double std_gps_m = 0.0;
  std::int64_t trials = 0;
};

struct StdSweepOptions {
  double gps_position_std = 5.0;    // m
  std::int64_t trials = 10000;
  std::uint64_t seed = 1;
  double sector_halfwidth = 0.2618;  // rad; phi_gps ~ U(-w, w)
  unsigned workers = 1;
};

/// Monte Carlo accuracy of the estimator versus link distance. Per trial:
/// phi_gps ~ U(sector), true phi ~ N(phi_gps, sigma_gps) with
/// sigma_gps = gps_position_std / D, gain from the RF link model, antennas
/// selected around phi_gps. Rows are ordered (distance, chain_count).
std::vector<StdSweepRow> estimation_std_sweep(const LensArrayConfig& cfg, const RfLinkModel& rf,
                                              std::span<const double> distances,
                                              std::span<const int> chain_counts,
                                              const StdSweepOptions& opt);

/// One estimation trial: returns phi_est - phi for a fresh draw.
double estimation_error_trial(const LensArrayConfig& cfg, const RfLinkModel& rf, double distance,
                              int chain_count, double gps_angle_std, double sector_halfwidth,
                              Rng& rng);

}  // namespace fsoacq
