#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "fsoacq/numeric.hpp"

namespace fsoacq {

using cplx = std::complex<double>;

enum class ArrayShape { Linear, Arc };

/// Geometry and RF parameters of a lens antenna array. Antennas sit on the
/// focal arc (or line) behind a lens of diameter L; antenna index n runs over
/// -(N-1)/2 ... (N-1)/2, half-integers when N is even.
struct LensArrayConfig {
  int n_antennas = 17;
  double lens_diameter = 0.3;      // m
  double antenna_spacing = 0.019;  // m
  double wavelength = 0.0107;      // m
  double focal_length = 0.25;      // m
  ArrayShape shape = ArrayShape::Arc;

  void validate() const;

  /// Signed antenna index of 0-based array position p.
  double index(int position) const { return position - 0.5 * (n_antennas - 1); }

  /// Lens-centre-to-antenna distance z for array position p.
  double lens_distance(int position) const;
};

struct SignalParams {
  double gain = 1.0;       // g > 0
  double phase = 0.0;      // b, rad
  double noise_std = 0.0;  // sigma_n >= 0, std of each real component
  double aoa = 0.0;        // phi, rad in (-pi/2, pi/2)

  void validate() const;
};

/// Contiguous window of active antennas, stored as inclusive 0-based positions.
struct AntennaSelection {
  int first = 0;
  int last = 0;

  int chain_count() const { return last - first + 1; }
  double lo_index(const LensArrayConfig& cfg) const { return cfg.index(first); }
  double hi_index(const LensArrayConfig& cfg) const { return cfg.index(last); }

  static AntennaSelection whole(const LensArrayConfig& cfg) { return {0, cfg.n_antennas - 1}; }
};

/// GPS side information converted to an angle.
struct GpsPrior {
  double mean_angle = 0.0;  // phi_gps, rad
  double angle_std = std::numeric_limits<double>::infinity();  // sigma_gps, rad; inf = no GPS

  void validate() const;
};

/// One received snapshot on the selected chains plus the known side
/// information the estimator needs.
struct RfObservation {
  std::vector<cplx> samples;  // y, length = selection.chain_count()
  AntennaSelection selection;
  SignalParams signal;        // aoa is the truth; the estimator never reads it
  GpsPrior prior;
};

/// Unnormalised sinc, sin(x)/x with sinc(0) = 1.
double sinc(double x);

/// Diagonal of H(phi), one entry per antenna.
std::vector<double> amplitude_matrix(const LensArrayConfig& cfg, double aoa);

/// Diagonal of dH/dphi.
std::vector<double> amplitude_matrix_derivative(const LensArrayConfig& cfg, double aoa);

/// Array response r with unit source symbol; unit-modulus entries.
std::vector<cplx> steering_vector(const LensArrayConfig& cfg);

/// The chain_count antennas nearest the focal point predicted by aoa_prior,
/// clamped to the array.
AntennaSelection select_antennas(const LensArrayConfig& cfg, double aoa_prior, int chain_count);

/// y = g A(phi) s e^{jb} + n on the selected window.
RfObservation simulate_observation(const LensArrayConfig& cfg, const SignalParams& sig,
                                   const AntennaSelection& sel, const GpsPrior& prior, Rng& rng);

RfObservation simulate_observation(const LensArrayConfig& cfg, const SignalParams& sig,
                                   const AntennaSelection& sel, const GpsPrior& prior,
                                   std::uint64_t seed);

}  // namespace fsoacq
