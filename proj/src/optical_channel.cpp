#include "fsoacq/optical_channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>

namespace fsoacq {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

double bessel_k_log(double order, double x) {
  static const bool handler_off = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)handler_off;
  gsl_sf_result r;
  if (gsl_sf_bessel_lnKnu_e(std::abs(order), x, &r) != GSL_SUCCESS)
    throw std::runtime_error("log Bessel K evaluation failed");
  return r.val;
}

double gamma_gamma_log_pdf(double alpha, double beta, double h) {
  const double m = 0.5 * (alpha + beta);
  return std::log(2.0) + m * std::log(alpha * beta) - std::lgamma(alpha) - std::lgamma(beta) +
         (m - 1.0) * std::log(h) + bessel_k_log(alpha - beta, 2.0 * std::sqrt(alpha * beta * h));
}

// P[h_a < c] (upper = false) or P[h_a >= c] (upper = true) by integrating the
// density in x = ln h. Each side is taken from whichever tail is smaller so
// neither loses relative accuracy.
double gamma_gamma_tail(double alpha, double beta, double c, bool upper) {
  constexpr double kTol = 1e-8;
  constexpr double kLogRange = 700.0;  // h = e^x stays finite and nonzero
  const double lc = std::log(c);
  auto integrand = [&](double x) {
    if (std::abs(x) > kLogRange) return 0.0;
    const double v = gamma_gamma_log_pdf(alpha, beta, std::exp(x)) + x;
    return v < -745.0 ? 0.0 : std::exp(v);
  };
  const double inf = std::numeric_limits<double>::infinity();
  // integrate the side that does not contain the bulk of the mass
  const bool lower_side = c <= 1.0;
  const double part = lower_side ? integrate(integrand, -inf, lc, kTol) : integrate(integrand, lc, inf, kTol);
  const double wanted = (upper != lower_side) ? part : 1.0 - part;
  return std::clamp(wanted, 0.0, 1.0);
}

}  // namespace

double kim_attenuation_coefficient(double visibility, double wavelength) {
  require(visibility > 0, "visibility must be positive");
  require(wavelength > 0, "wavelength must be positive");
  const double v_km = visibility / 1000.0;
  double q;
  if (v_km > 50.0)
    q = 1.6;
  else if (v_km > 6.0)
    q = 1.3;
  else if (v_km > 1.0)
    q = 0.16 * v_km + 0.34;
  else if (v_km > 0.5)
    q = v_km - 0.5;
  else
    q = 0.0;
  const double per_km = 3.91 / v_km * std::pow(wavelength / 550e-9, -q);
  return per_km / 1000.0;
}

AttenuationParams AttenuationParams::from_visibility(double visibility, double wavelength,
                                                     double link_distance) {
  return {kim_attenuation_coefficient(visibility, wavelength), link_distance};
}

void AttenuationParams::validate() const {
  require(attenuation_coeff >= 0 && std::isfinite(attenuation_coeff),
          "attenuation coefficient must be non-negative");
  require(link_distance >= 0 && std::isfinite(link_distance), "link distance must be non-negative");
}

double attenuation_gain(const AttenuationParams& p) {
  p.validate();
  return std::exp(-p.attenuation_coeff * p.link_distance);
}

void FadingParams::validate() const {
  switch (model) {
    case FadingModel::None:
      return;
    case FadingModel::LogNormal:
      require(log_amp_std > 0, "log_amp_std must be positive");
      return;
    case FadingModel::GammaGamma:
      require(alpha > 0 && beta > 0, "gamma-gamma alpha and beta must be positive");
      return;
  }
}

double fading_pdf(const FadingParams& p, double h) {
  p.validate();
  if (!(h > 0)) throw std::invalid_argument("fading_pdf: h_a must be positive");
  switch (p.model) {
    case FadingModel::LogNormal: {
      const double s2 = p.log_amp_std * p.log_amp_std;
      const double u = std::log(h) + 2.0 * s2;
      return std::exp(-u * u / (8.0 * s2)) / (2.0 * h * std::sqrt(2.0 * std::numbers::pi * s2));
    }
    case FadingModel::GammaGamma: {
      const double v = gamma_gamma_log_pdf(p.alpha, p.beta, h);
      return v < -745.0 ? 0.0 : std::exp(v);
    }
    case FadingModel::None:
      break;
  }
  throw std::invalid_argument("fading_pdf: the no-fading model has no density");
}

double fading_cdf(const FadingParams& p, double h) {
  p.validate();
  if (!(h > 0)) return 0.0;
  if (std::isinf(h)) return 1.0;
  switch (p.model) {
    case FadingModel::None:
      return h > 1.0 ? 1.0 : 0.0;
    case FadingModel::LogNormal:
      return normal_cdf((std::log(h) + 2.0 * p.log_amp_std * p.log_amp_std) /
                        (2.0 * p.log_amp_std));
    case FadingModel::GammaGamma:
      return gamma_gamma_tail(p.alpha, p.beta, h, false);
  }
  return 0.0;
}

double fading_ccdf(const FadingParams& p, double h) {
  p.validate();
  if (!(h > 0)) return 1.0;
  if (std::isinf(h)) return 0.0;
  switch (p.model) {
    case FadingModel::None:
      return h > 1.0 ? 0.0 : 1.0;
    case FadingModel::LogNormal:
      return normal_cdf(-(std::log(h) + 2.0 * p.log_amp_std * p.log_amp_std) / (2.0 * p.log_amp_std));
    case FadingModel::GammaGamma:
      return gamma_gamma_tail(p.alpha, p.beta, h, true);
  }
  return 0.0;
}

double fading_sample(const FadingParams& p, Rng& rng) {
  switch (p.model) {
    case FadingModel::None:
      return 1.0;
    case FadingModel::LogNormal: {
      const double s2 = p.log_amp_std * p.log_amp_std;
      return std::exp(std::normal_distribution<double>(-2.0 * s2, 2.0 * p.log_amp_std)(rng));
    }
    case FadingModel::GammaGamma: {
      std::gamma_distribution<double> large(p.alpha, 1.0 / p.alpha);
      std::gamma_distribution<double> small(p.beta, 1.0 / p.beta);
      const double x = large(rng);
      return x * small(rng);
    }
  }
  return 1.0;
}

double PointingParams::displacement_std() const {
  return link_distance * std::hypot(estimation_std, jitter_std);
}

double PointingParams::center_gain() const { return fsoacq::center_gain(receiver_radius, beamwidth()); }

void PointingParams::validate() const {
  require(beam_divergence > 0, "beam divergence must be positive");
  require(link_distance > 0, "link distance must be positive");
  require(jitter_std >= 0 && estimation_std >= 0, "pointing error stds must be non-negative");
  require(receiver_radius > 0, "receiver radius must be positive");
}

double center_gain(double receiver_radius, double beamwidth) {
  require(receiver_radius > 0 && beamwidth > 0, "center_gain needs positive radius and beamwidth");
  const double v = std::sqrt(std::numbers::pi / 2.0) * receiver_radius / beamwidth;
  const double e = std::erf(v);
  return e * e;
}

double displacement_sample(const PointingParams& p, Rng& rng) {
  const double sd = p.displacement_std();
  require(sd > 0, "displacement std must be positive");
  // inverse CDF on (0, 1]
  const double u = 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return sd * std::sqrt(-2.0 * std::log(u));
}

double pointing_gain(const PointingParams& p, double r) {
  require(r >= 0, "displacement must be non-negative");
  const double w = p.beamwidth();
  return p.center_gain() * std::exp(-2.0 * r * r / (w * w));
}

void LinkBudget::validate() const {
  require(tx_power > 0 && threshold_power > 0 && responsivity > 0,
          "link budget entries must be positive");
}

double received_power(const LinkBudget& b, double h_l, double h_a, double h_p) {
  require(h_l >= 0 && h_a >= 0 && h_p >= 0, "channel gains must be non-negative");
  return h_l * h_a * h_p * b.responsivity * b.tx_power;
}

}  // namespace fsoacq
