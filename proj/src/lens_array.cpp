#include "fsoacq/lens_array.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fsoacq {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void check_aoa(double aoa) {
  require(std::isfinite(aoa), "angle of arrival must be finite");
  require(std::abs(aoa) < std::numbers::pi / 2, "angle of arrival must lie in (-pi/2, pi/2)");
}

// Normalised focal offset phi_1 = (L/lambda)(d n / z - sin phi) for one antenna.
double focal_offset(const LensArrayConfig& cfg, int p, double sin_aoa) {
  const double z = cfg.lens_distance(p);
  return cfg.lens_diameter / cfg.wavelength *
         (cfg.antenna_spacing * cfg.index(p) / z - sin_aoa);
}

}  // namespace

void LensArrayConfig::validate() const {
  require(n_antennas >= 1, "n_antennas must be >= 1");
  require(lens_diameter > 0 && std::isfinite(lens_diameter), "lens_diameter must be positive");
  require(antenna_spacing > 0 && std::isfinite(antenna_spacing), "antenna_spacing must be positive");
  require(wavelength > 0 && std::isfinite(wavelength), "wavelength must be positive");
  require(focal_length > 0 && std::isfinite(focal_length), "focal_length must be positive");
}

double LensArrayConfig::lens_distance(int position) const {
  if (shape == ArrayShape::Arc) return focal_length;
  const double dn = antenna_spacing * index(position);
  return std::sqrt(dn * dn + focal_length * focal_length);
}

void SignalParams::validate() const {
  require(gain > 0 && std::isfinite(gain), "signal gain must be positive");
  require(noise_std >= 0 && std::isfinite(noise_std), "noise_std must be non-negative");
  require(std::isfinite(phase), "signal phase must be finite");
  check_aoa(aoa);
}

void GpsPrior::validate() const {
  require(angle_std > 0, "GPS angle std must be positive");
  check_aoa(mean_angle);
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

std::vector<double> amplitude_matrix(const LensArrayConfig& cfg, double aoa) {
  check_aoa(aoa);
  const double s = std::sin(aoa);
  std::vector<double> h(cfg.n_antennas);
  for (int p = 0; p < cfg.n_antennas; ++p)
    h[p] = cfg.lens_diameter / std::sqrt(cfg.lens_distance(p)) * sinc(focal_offset(cfg, p, s));
  return h;
}

std::vector<double> amplitude_matrix_derivative(const LensArrayConfig& cfg, double aoa) {
  check_aoa(aoa);
  const double s = std::sin(aoa);
  const double c = std::cos(aoa);
  std::vector<double> dh(cfg.n_antennas);
  for (int p = 0; p < cfg.n_antennas; ++p) {
    const double x = focal_offset(cfg, p, s);
    // (sin x - x cos x) / x^2, with its series near the peak
    double shape;
    if (std::abs(x) < 1e-3)
      shape = x / 3.0 - x * x * x / 30.0;
    else
      shape = (std::sin(x) - x * std::cos(x)) / (x * x);
    const double l = cfg.lens_diameter;
    dh[p] = l * l * c / (cfg.wavelength * std::sqrt(cfg.lens_distance(p))) * shape;
  }
  return dh;
}

std::vector<cplx> steering_vector(const LensArrayConfig& cfg) {
  const double k = 2.0 * std::numbers::pi / cfg.wavelength;
  std::vector<cplx> r(cfg.n_antennas);
  for (int p = 0; p < cfg.n_antennas; ++p) r[p] = std::polar(1.0, -k * cfg.lens_distance(p));
  return r;
}

AntennaSelection select_antennas(const LensArrayConfig& cfg, double aoa_prior, int chain_count) {
  cfg.validate();
  check_aoa(aoa_prior);
  if (chain_count < 1 || chain_count > cfg.n_antennas)
    throw std::invalid_argument("chain_count must be in [1, " + std::to_string(cfg.n_antennas) +
                                "], got " + std::to_string(chain_count));

  const double even = (cfg.n_antennas % 2 == 0) ? 0.5 : 0.0;  // (1 + (-1)^N) / 4
  const double odd = 0.5 - even;                              // (1 - (-1)^N) / 4
  const double focal = cfg.focal_length / cfg.antenna_spacing * std::sin(aoa_prior);
  // std::round is half-away-from-zero
  const double lo_index = std::round(focal - 0.5 * chain_count + odd) + even;

  int first = static_cast<int>(std::lround(lo_index + 0.5 * (cfg.n_antennas - 1)));
  first = std::clamp(first, 0, cfg.n_antennas - chain_count);
  return {first, first + chain_count - 1};
}

RfObservation simulate_observation(const LensArrayConfig& cfg, const SignalParams& sig,
                                   const AntennaSelection& sel, const GpsPrior& prior, Rng& rng) {
  sig.validate();
  if (sel.first < 0 || sel.last >= cfg.n_antennas || sel.first > sel.last)
    throw std::invalid_argument("antenna selection outside the array");

  const auto h = amplitude_matrix(cfg, sig.aoa);
  const auto r = steering_vector(cfg);
  const cplx rot = std::polar(sig.gain, sig.phase);

  RfObservation obs;
  obs.selection = sel;
  obs.signal = sig;
  obs.prior = prior;
  obs.samples.reserve(sel.chain_count());
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int p = sel.first; p <= sel.last; ++p) {
    cplx y = rot * h[p] * r[p];
    if (sig.noise_std > 0) {
      const double re = noise(rng);
      const double im = noise(rng);
      y += sig.noise_std * cplx(re, im);
    }
    obs.samples.push_back(y);
  }
  return obs;
}

RfObservation simulate_observation(const LensArrayConfig& cfg, const SignalParams& sig,
                                   const AntennaSelection& sel, const GpsPrior& prior,
                                   std::uint64_t seed) {
  Rng rng{seed};
  return simulate_observation(cfg, sig, sel, prior, rng);
}

}  // namespace fsoacq
