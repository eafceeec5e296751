#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fsoacq/optical_channel.hpp"

namespace fsoacq {

/// Everything that sets the received optical power of one link.
struct OpticalChannel {
  AttenuationParams attenuation;
  FadingParams fading;
  PointingParams pointing;
  LinkBudget budget;

  /// Moves both the attenuation path and the pointing geometry to distance d.
  OpticalChannel at_distance(double d) const;
  OpticalChannel with_divergence(double theta) const;
  void validate() const;
};

struct MonteCarlo {
  std::int64_t trials = 1000000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

struct Quadrature {
  double rel_tol = 1e-8;
};

using OutageMethod = std::variant<MonteCarlo, Quadrature>;

std::string method_name(const OutageMethod& m);

struct OutageResult {
  double probability = 0.0;
  double std_error = 0.0;  // binomial; zero for quadrature
};

/// F(r) = P[h_a < P_th / (h_l h_p(r) R P_T)].
double conditional_outage(const OpticalChannel& ch, double r);

/// 1 - F(r), evaluated from the upper fading tail without cancellation.
double conditional_success(const OpticalChannel& ch, double r);

/// E[g(r)] for r ~ Rayleigh(sigma_d), integrated in u = r^2 / (2 sigma_d^2)
/// over [0, u_max] in unit-length panels. g must be finite on the range.
double rayleigh_expectation(const OpticalChannel& ch, const std::function<double(double)>& g,
                            double u_max, double rel_tol = 1e-10);

/// P_out = integral of f_dis(r) F(r) dr, by Monte Carlo or by quadrature.
OutageResult outage_probability(const OpticalChannel& ch, const OutageMethod& method);

/// Where the pointing-error std comes from when a sweep moves the link.
class SigmaEstSource {
 public:
  static SigmaEstSource fixed(double radians);
  /// GPS-only pointing: gps_position_std / D.
  static SigmaEstSource gps(double position_std);
  /// Per-distance lookup (e.g. from an estimator sweep), linear in distance,
  /// clamped at the ends.
  static SigmaEstSource table(std::vector<double> distances, std::vector<double> stds);

  double at(double distance) const;
  const std::string& label() const { return label_; }

 private:
  enum class Kind { Fixed, Gps, Table } kind_ = Kind::Fixed;
  double value_ = 0.0;
  std::vector<double> distances_, stds_;
  std::string label_;
};

struct OutageCurve {
  std::vector<double> divergence_grid;
  std::vector<double> outage;
  std::vector<double> std_error;
  double argmin_divergence = 0.0;
  double min_outage = 1.0;
  std::size_t argmin_index = 0;
  std::string method;
};

/// Evaluates the outage over a strictly increasing divergence grid; A_0 follows
/// the beamwidth at every point. Monte Carlo points get their own seeds.
OutageCurve divergence_sweep(const OpticalChannel& ch, std::span<const double> grid,
                             const OutageMethod& method);

struct DistanceRow {
  double distance_m = 0.0;
  double sigma_est_proposed = 0.0;
  double sigma_est_gps = 0.0;
  double min_outage_proposed = 0.0;
  double min_outage_gps = 0.0;
  double argmin_proposed = 0.0;
  double argmin_gps = 0.0;
  double reduction_factor = 0.0;  // gps min / proposed min
};

DistanceRow distance_point(const OpticalChannel& tmpl, double distance,
                           std::span<const double> grid, const OutageMethod& method,
                           const SigmaEstSource& proposed, const SigmaEstSource& gps,
                           OutageCurve* proposed_curve = nullptr,
                           OutageCurve* gps_curve = nullptr);

std::vector<DistanceRow> distance_sweep(const OpticalChannel& tmpl,
                                        std::span<const double> distances,
                                        std::span<const double> grid, const OutageMethod& method,
                                        const SigmaEstSource& proposed, const SigmaEstSource& gps);

}  // namespace fsoacq
