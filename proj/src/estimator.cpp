#include "fsoacq/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fsoacq {

namespace {

struct Window {
  std::vector<double> a;   // A(phi_gps)
  std::vector<double> da;  // A'(phi_gps)
  std::vector<cplx> s;
};

Window window_at(const LensArrayConfig& cfg, const AntennaSelection& sel, double angle) {
  const auto h = amplitude_matrix(cfg, angle);
  const auto dh = amplitude_matrix_derivative(cfg, angle);
  const auto r = steering_vector(cfg);
  Window w;
  for (int p = sel.first; p <= sel.last; ++p) {
    w.a.push_back(h[p]);
    w.da.push_back(dh[p]);
    w.s.push_back(r[p]);
  }
  return w;
}

void check_observation(const LensArrayConfig& cfg, const RfObservation& obs) {
  if (static_cast<int>(obs.samples.size()) != obs.selection.chain_count())
    throw std::invalid_argument("observation length does not match the antenna selection");
  if (obs.selection.first < 0 || obs.selection.last >= cfg.n_antennas)
    throw std::invalid_argument("antenna selection outside the array");
  if (!(obs.signal.gain > 0)) throw std::invalid_argument("signal gain must be positive");
  obs.prior.validate();
}

double prior_weight(const RfObservation& obs) {
  // sigma_n^2 / (g^2 sigma_gps^2); zero without GPS
  if (std::isinf(obs.prior.angle_std)) return 0.0;
  const double ratio = obs.signal.noise_std / (obs.signal.gain * obs.prior.angle_std);
  return ratio * ratio;
}

}  // namespace

void RfLinkModel::validate() const {
  if (!(reference_gain > 0) || !(reference_distance > 0) || !(noise_std >= 0))
    throw std::invalid_argument("RF link model needs positive gain/distance and non-negative noise");
}

cplx map_numerator(const LensArrayConfig& cfg, const RfObservation& obs) {
  check_observation(cfg, obs);
  const auto w = window_at(cfg, obs.selection, obs.prior.mean_angle);
  const double g = obs.signal.gain;
  const cplx ejb = std::polar(1.0, obs.signal.phase);
  cplx forward{0.0, 0.0}, backward{0.0, 0.0}, self{0.0, 0.0};
  for (std::size_t i = 0; i < w.a.size(); ++i) {
    const cplx y = obs.samples[i] / g;
    forward += ejb * std::conj(y) * w.da[i] * w.s[i];
    backward += std::conj(ejb) * std::conj(w.s[i]) * w.da[i] * y;
    self += std::conj(w.s[i]) * w.a[i] * w.da[i] * w.s[i];
  }
  return forward + backward - 2.0 * self;
}

AngleEstimate map_estimate(const LensArrayConfig& cfg, const RfObservation& obs) {
  const cplx numerator = map_numerator(cfg, obs);
  const auto w = window_at(cfg, obs.selection, obs.prior.mean_angle);
  double curvature = 0.0;
  for (std::size_t i = 0; i < w.a.size(); ++i) curvature += w.da[i] * w.da[i] * std::norm(w.s[i]);
  const double denominator = 2.0 * curvature + 2.0 * prior_weight(obs);
  if (!(denominator > 0.0))
    throw std::domain_error("degenerate observation: A'(phi_gps)s = 0 and no noise/prior term");

  AngleEstimate est;
  est.prior_angle = obs.prior.mean_angle;
  est.correction = numerator.real() / denominator;
  est.angle = est.prior_angle + est.correction;
  return est;
}

double log_posterior(const LensArrayConfig& cfg, const RfObservation& obs, double angle,
                     bool linearized) {
  check_observation(cfg, obs);
  if (!(obs.signal.noise_std > 0)) throw std::invalid_argument("log_posterior needs noise_std > 0");
  const double delta = angle - obs.prior.mean_angle;
  const cplx rot = std::polar(obs.signal.gain, obs.signal.phase);
  const auto r = steering_vector(cfg);

  std::vector<double> a;
  if (linearized) {
    const auto h = amplitude_matrix(cfg, obs.prior.mean_angle);
    const auto dh = amplitude_matrix_derivative(cfg, obs.prior.mean_angle);
    for (int p = obs.selection.first; p <= obs.selection.last; ++p) a.push_back(h[p] + dh[p] * delta);
  } else {
    const auto h = amplitude_matrix(cfg, angle);
    a.assign(h.begin() + obs.selection.first, h.begin() + obs.selection.last + 1);
  }

  double residual = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    residual += std::norm(obs.samples[i] - rot * a[i] * r[obs.selection.first + i]);

  const double sn = obs.signal.noise_std;
  double lp = -residual / (2.0 * sn * sn);
  if (!std::isinf(obs.prior.angle_std))
    lp -= delta * delta / (2.0 * obs.prior.angle_std * obs.prior.angle_std);
  return lp;
}

double linearized_posterior_slope(const LensArrayConfig& cfg, const RfObservation& obs,
                                  double angle) {
  check_observation(cfg, obs);
  const double delta = angle - obs.prior.mean_angle;
  const auto w = window_at(cfg, obs.selection, obs.prior.mean_angle);
  const double g = obs.signal.gain;
  const cplx rot = std::polar(g, obs.signal.phase);
  double data = 0.0;
  for (std::size_t i = 0; i < w.a.size(); ++i) {
    const cplx model = rot * (w.a[i] + w.da[i] * delta) * w.s[i];
    data += std::real(std::conj(obs.samples[i] - model) * rot * w.da[i] * w.s[i]);
  }
  // Scaled by sigma_n^2 / g^2 so the slope stays finite when sigma_n = 0.
  return data / (g * g) - prior_weight(obs) * delta;
}

double grid_search_oracle(const LensArrayConfig& cfg, const RfObservation& obs,
                          double grid_halfwidth, int grid_points, bool linearized) {
  if (grid_points < 3) throw std::invalid_argument("grid_points must be >= 3");
  if (!(grid_halfwidth > 0)) throw std::invalid_argument("grid_halfwidth must be positive");
  const double lo = obs.prior.mean_angle - grid_halfwidth;
  const double step = 2.0 * grid_halfwidth / (grid_points - 1);
  double best_angle = lo;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    const double angle = lo + step * i;
    const double v = log_posterior(cfg, obs, angle, linearized);
    if (v > best) {
      best = v;
      best_angle = angle;
    }
  }
  return best_angle;
}

double estimation_error_trial(const LensArrayConfig& cfg, const RfLinkModel& rf, double distance,
                              int chain_count, double gps_angle_std, double sector_halfwidth,
                              Rng& rng) {
  std::uniform_real_distribution<double> sector(-sector_halfwidth, sector_halfwidth);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double gps_angle = sector(rng);
  double truth = gps_angle + gps_angle_std * unit(rng);
  truth = std::clamp(truth, -1.5, 1.5);

  SignalParams sig;
  sig.gain = rf.gain_at(distance);
  sig.phase = std::uniform_real_distribution<double>(-std::numbers::pi, std::numbers::pi)(rng);
  sig.noise_std = rf.noise_std;
  sig.aoa = truth;

  const GpsPrior prior{gps_angle, gps_angle_std};
  const auto sel = select_antennas(cfg, gps_angle, chain_count);
  const auto obs = simulate_observation(cfg, sig, sel, prior, rng);
  return map_estimate(cfg, obs).angle - truth;
}

std::vector<StdSweepRow> estimation_std_sweep(const LensArrayConfig& cfg, const RfLinkModel& rf,
                                              std::span<const double> distances,
                                              std::span<const int> chain_counts,
                                              const StdSweepOptions& opt) {
  cfg.validate();
  rf.validate();
  if (opt.trials < 1) throw std::invalid_argument("trials must be >= 1");
  for (double d : distances)
    if (!(d > 0)) throw std::invalid_argument("distances must be positive");

  std::vector<StdSweepRow> rows;
  const auto blocks = static_cast<std::size_t>((opt.trials + kTrialBlock - 1) / kTrialBlock);
  for (std::size_t di = 0; di < distances.size(); ++di) {
    const double distance = distances[di];
    const double gps_angle_std = opt.gps_position_std / distance;
    // Same draws for every chain count at a given distance.
    const std::uint64_t distance_seed = substream_seed(opt.seed, di);
    for (int k : chain_counts) {
      std::vector<double> errors(static_cast<std::size_t>(opt.trials));
      parallel_for(blocks, opt.workers, [&](std::size_t b) {
        Rng rng = make_stream(distance_seed, b);
        const std::int64_t begin = std::int64_t(b) * kTrialBlock;
        const std::int64_t end = std::min(opt.trials, begin + kTrialBlock);
        for (std::int64_t t = begin; t < end; ++t)
          errors[t] = estimation_error_trial(cfg, rf, distance, k, gps_angle_std,
                                             opt.sector_halfwidth, rng);
      });
      const auto m = moments(errors);
      StdSweepRow row;
      row.distance_m = distance;
      row.chain_count = k;
      row.std_proposed_rad = m.std_dev;
      row.std_proposed_m = m.std_dev * distance;
      row.std_gps_rad = gps_angle_std;
      row.std_gps_m = opt.gps_position_std;
      row.trials = opt.trials;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace fsoacq
