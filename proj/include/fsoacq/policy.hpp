#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fsoacq/outage.hpp"

namespace fsoacq {

/// Turbulence inputs of the channel coherence time. The wavenumber and path
/// length here are optical quantities, unrelated to the RF chain count and
/// lens diameter of the array.
struct CoherenceParams {
  double optical_wavenumber = 0.0;  // k = 2 pi / lambda_opt, 1/m
  double structure_constant = 1e-14;  // C_n^2, m^{-2/3}
  double path_length = 2000.0;      // m
  double transverse_wind = 5.0;     // m/s

  static CoherenceParams from_wavelength(double wavelength, double structure_constant,
                                         double path_length, double transverse_wind);
  void validate() const;
};

/// rho_0 = (2.91 k^2 C_n^2 L)^{-3/5}
double correlation_length(const CoherenceParams& p);

/// t_0 = rho_0 / v_perp
double coherence_time(const CoherenceParams& p);

enum class Policy { ReEstimate, SingleEstimate };

std::string policy_name(Policy p);

/// (t0 + t_rot) / (1 - P_out). Throws std::domain_error when P_out >= 1: the
/// link is never acquired.
double mean_time_re(double p_out, double t0, double t_rot);

/// Samples whose conditional outage is within this of 1 are flagged.
inline constexpr double kNearCertainOutage = 1e-12;
/// Flagged probability mass above which E[t0 / (1 - F(r))] is reported divergent.
inline constexpr double kDivergentMassCap = 1e-6;

struct SingleEstimateMean {
  double mean = 0.0;  // seconds; +inf when divergent
  double std_error = 0.0;
  bool divergent = false;
  std::int64_t flagged = 0;
  std::int64_t samples = 0;
  double p_out = 0.0;  // mean of F over the same draws
  double flagged_mass = 0.0;  // P[F(r) > 1 - eps]; quadrature only
};

/// E_r[t0 / (1 - F(r))] + t_rot over supplied conditional-outage samples.
SingleEstimateMean mean_time_single_from(std::span<const double> f_samples, double t0,
                                         double t_rot);

/// F(r_i) for r_i ~ Rayleigh(sigma_d), deterministic in seed.
std::vector<double> conditional_outage_samples(const OpticalChannel& ch, std::int64_t trials,
                                               std::uint64_t seed, unsigned workers = 1);

SingleEstimateMean mean_time_single(const OpticalChannel& ch, double t0, double t_rot,
                                    std::int64_t trials, std::uint64_t seed);

/// E_r[t0 / max(1 - F(r), eps)] + t_rot by quadrature, eps = kNearCertainOutage.
/// Divergent when P[F(r) > 1 - eps] exceeds kDivergentMassCap. p_out is the
/// quadrature outage probability.
SingleEstimateMean mean_time_single_quadrature(const OpticalChannel& ch, double t0, double t_rot);

/// Beacon attempts completed by time t under a policy. Re-estimation pays
/// t0 + t_rot per attempt; single estimation pays t_rot once, then t0 per wait.
std::int64_t attempts_by(Policy p, double t, double t0, double t_rot);

struct TailPoint {
  double t = 0.0;
  double p_not_connected = 1.0;
  double std_error = 0.0;
};

/// P_out^{floor(t / (t0 + t_rot))}
std::vector<TailPoint> re_estimate_tail(double p_out, double t0, double t_rot,
                                        std::span<const double> t_grid);

/// Re-estimation simulated attempt by attempt: fresh displacement and fading
/// each time, until P_R >= P_th (or max_attempts).
std::vector<TailPoint> simulate_re_estimate_tail(const OpticalChannel& ch, double t0, double t_rot,
                                                 std::span<const double> t_grid,
                                                 std::int64_t trials, std::uint64_t seed,
                                                 std::int64_t max_attempts = 100000);

/// E_r[F(r)^{m(t)}] over the supplied samples.
std::vector<TailPoint> single_estimate_tail(std::span<const double> f_samples, double t0,
                                            double t_rot, std::span<const double> t_grid);

/// E_r[F(r)^{m(t)}] by composite Simpson in u = r^2 / (2 sigma_d^2) on
/// [0, 50] with F tabulated once.
std::vector<TailPoint> single_estimate_tail_quadrature(const OpticalChannel& ch, double t0,
                                                       double t_rot, std::span<const double> t_grid);

/// Tail of the acquisition time. ReEstimate uses the closed form with a
/// quadrature P_out; SingleEstimate averages over trials displacement draws.
std::vector<TailPoint> acquisition_tail(const OpticalChannel& ch, Policy policy, double t0,
                                        double t_rot, std::span<const double> t_grid,
                                        std::int64_t trials, std::uint64_t seed);

struct PolicyReport {
  double coherence_time = 0.0;
  double rotate_time = 0.0;
  double p_out = 0.0;  // quadrature
  double mean_time_re = 0.0;
  SingleEstimateMean single;              // quadrature; drives the recommendation
  SingleEstimateMean single_monte_carlo;  // same expectation over sampled r
  Policy recommended = Policy::ReEstimate;
  std::vector<TailPoint> tail_re;
  std::vector<TailPoint> tail_re_simulated;
  std::vector<TailPoint> tail_single;
  std::vector<TailPoint> tail_single_quadrature;
};

PolicyReport policy_report(const OpticalChannel& ch, double t0, double t_rot,
                           std::span<const double> t_grid, std::int64_t trials,
                           std::uint64_t seed);

}  // namespace fsoacq
