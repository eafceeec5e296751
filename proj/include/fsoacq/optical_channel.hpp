#pragma once

#include "fsoacq/numeric.hpp"

namespace fsoacq {

/// Kim-model extinction coefficient (1/m) for visibility V (m) at wavelength
/// lambda (m), sigma = (3.91/V) (lambda / 550 nm)^(-q(V)).
double kim_attenuation_coefficient(double visibility, double wavelength);

struct AttenuationParams {
  double attenuation_coeff = 0.0;  // 1/m
  double link_distance = 1000.0;   // m

  static AttenuationParams from_visibility(double visibility, double wavelength,
                                           double link_distance);
  void validate() const;
};

/// Beer-Lambert transmittance exp(-sigma z).
double attenuation_gain(const AttenuationParams& p);

enum class FadingModel { None, LogNormal, GammaGamma };

struct FadingParams {
  FadingModel model = FadingModel::LogNormal;
  double log_amp_std = 0.3;  // sigma_X, log-normal
  double alpha = 8.05;       // gamma-gamma large-scale
  double beta = 1.03;        // gamma-gamma small-scale

  void validate() const;
};

/// Unit-mean irradiance fading density. Log-normal: ln h ~ N(-2 sx^2, 4 sx^2).
/// Gamma-gamma uses a log-domain Bessel K so large arguments do not underflow.
/// Throws for h <= 0 (and for the degenerate None model, which has no density).
double fading_pdf(const FadingParams& p, double h);

/// P[h_a < h]. Closed form for log-normal; adaptive quadrature of the pdf for
/// gamma-gamma (relative tolerance 1e-8).
double fading_cdf(const FadingParams& p, double h);

/// P[h_a >= h], computed directly rather than as 1 - cdf.
double fading_ccdf(const FadingParams& p, double h);

double fading_sample(const FadingParams& p, Rng& rng);

struct PointingParams {
  double beam_divergence = 10e-3;  // theta_div, rad
  double link_distance = 1000.0;   // z, m
  double jitter_std = 3e-3;        // sigma_jit, rad
  double estimation_std = 5e-3;    // sigma_est, rad
  double receiver_radius = 0.1;    // a, m

  double beamwidth() const { return link_distance * beam_divergence; }
  /// sigma_d = z sqrt(sigma_est^2 + sigma_jit^2)
  double displacement_std() const;
  double center_gain() const;
  void validate() const;
};

/// Fraction of a Gaussian beam of width w collected by a circular aperture of
/// radius a on boresight: [erf(sqrt(pi/2) a / w)]^2.
double center_gain(double receiver_radius, double beamwidth);

/// Rayleigh-distributed radial miss distance with scale sigma_d.
double displacement_sample(const PointingParams& p, Rng& rng);

/// A_0 exp(-2 r^2 / w_z^2).
double pointing_gain(const PointingParams& p, double r);

struct LinkBudget {
  double tx_power = 1.0;          // W
  double threshold_power = 1e-6;  // W
  double responsivity = 0.5;

  void validate() const;
};

/// P_R = h_l h_a h_p R P_T
double received_power(const LinkBudget& b, double h_l, double h_a, double h_p);

}  // namespace fsoacq
