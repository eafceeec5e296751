#include "fsoacq/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fsoacq {

std::string pointing_mode_name(PointingMode m) {
  return m == PointingMode::Proposed ? "proposed" : "gps";
}

void AcquisitionScenario::validate() const {
  array.validate();
  rf.validate();
  channel.validate();
  if (chain_count < 1 || chain_count > array.n_antennas)
    throw std::invalid_argument("chain_count must be in [1, n_antennas]");
  if (!(gps_position_std > 0)) throw std::invalid_argument("gps_position_std must be positive");
  if (!(sector_halfwidth >= 0 && sector_halfwidth < 1.4))
    throw std::invalid_argument("sector half-width must be in [0, 1.4) rad");
  if (divergence && !(*divergence > 0)) throw std::invalid_argument("divergence must be positive");
  if (!divergence && divergence_grid.empty())
    throw std::invalid_argument("automatic divergence needs a divergence grid");
  if (!(coherence_time > 0)) throw std::invalid_argument("coherence time must be positive");
  if (!(rotate_time >= 0)) throw std::invalid_argument("rotate time must be non-negative");
  if (max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
}

double auto_divergence(const AcquisitionScenario& sc, PointingMode mode, std::uint64_t seed) {
  OpticalChannel ch = sc.channel;
  const double d = sc.distance();
  if (mode == PointingMode::GpsOnly) {
    ch.pointing.estimation_std = sc.gps_position_std / d;
  } else {
    StdSweepOptions opt;
    opt.gps_position_std = sc.gps_position_std;
    opt.trials = sc.pilot_trials;
    opt.seed = seed;
    opt.sector_halfwidth = sc.sector_halfwidth;
    opt.workers = default_workers();
    const double dist[] = {d};
    const int chains[] = {sc.chain_count};
    ch.pointing.estimation_std = estimation_std_sweep(sc.array, sc.rf, dist, chains, opt)[0].std_proposed_rad;
  }
  return divergence_sweep(ch, sc.divergence_grid, Quadrature{}).argmin_divergence;
}

namespace {

// Pointing error on one axis, in radians, before jitter.
double axis_error(const AcquisitionScenario& sc, PointingMode mode, double truth, Rng& rng) {
  const double d = sc.distance();
  const double gps_std = sc.gps_position_std / d;
  std::normal_distribution<double> unit(0.0, 1.0);
  const double gps_angle = std::clamp(truth + gps_std * unit(rng), -1.5, 1.5);
  if (mode == PointingMode::GpsOnly) return gps_angle - truth;

  SignalParams sig;
  sig.gain = sc.rf.gain_at(d);
  sig.phase = std::uniform_real_distribution<double>(-std::numbers::pi, std::numbers::pi)(rng);
  sig.noise_std = sc.rf.noise_std;
  sig.aoa = truth;
  const GpsPrior prior{gps_angle, gps_std};
  const auto obs = simulate_observation(sc.array, sig, select_antennas(sc.array, gps_angle, sc.chain_count),
                                        prior, rng);
  try {
    return map_estimate(sc.array, obs).angle - truth;
  } catch (const std::domain_error&) {
    // no usable RF power on the window; point with the GPS fix
    return gps_angle - truth;
  }
}

double beam_displacement(const AcquisitionScenario& sc, PointingMode mode, double az, double el,
                         Rng& rng) {
  std::normal_distribution<double> jitter(0.0, sc.channel.pointing.jitter_std);
  const double ex = axis_error(sc, mode, az, rng) + jitter(rng);
  const double ey = axis_error(sc, mode, el, rng) + jitter(rng);
  return sc.distance() * std::hypot(ex, ey);
}

}  // namespace

AcquisitionRun simulate_algorithm1(const AcquisitionScenario& sc, PointingMode mode, Policy policy,
                                   std::int64_t trials, std::uint64_t seed,
                                   std::int64_t trace_trials) {
  sc.validate();
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");

  AcquisitionRun run;
  run.mode = mode;
  run.policy = policy;
  run.divergence = sc.divergence ? *sc.divergence : auto_divergence(sc, mode, substream_seed(seed, 0));

  OpticalChannel ch = sc.channel.with_divergence(run.divergence);
  const double h_l = attenuation_gain(ch.attenuation);
  const double t0 = sc.coherence_time;
  const double t_rot = sc.rotate_time;

  run.outcomes.resize(static_cast<std::size_t>(trials));
  run.traces.resize(static_cast<std::size_t>(std::clamp<std::int64_t>(trace_trials, 0, trials)));
  std::vector<char> first_failed(static_cast<std::size_t>(trials), 0);
  const std::uint64_t trial_seed = substream_seed(seed, 1);
  const auto blocks = static_cast<std::size_t>((trials + kTrialBlock - 1) / kTrialBlock);

  parallel_for(blocks, default_workers(), [&](std::size_t b) {
    Rng rng = make_stream(trial_seed, b);
    std::uniform_real_distribution<double> sector(-sc.sector_halfwidth, sc.sector_halfwidth);
    const std::int64_t begin = std::int64_t(b) * kTrialBlock;
    const std::int64_t end = std::min(trials, begin + kTrialBlock);
    for (std::int64_t t = begin; t < end; ++t) {
      const double az = sector(rng);
      const double el = sector(rng);
      auto* trace = std::size_t(t) < run.traces.size() ? &run.traces[t] : nullptr;

      TrialOutcome out;
      double r = beam_displacement(sc, mode, az, el, rng);
      double elapsed = (policy == Policy::ReEstimate) ? 0.0 : t_rot;
      bool connected = false;
      while (!connected && out.attempts < sc.max_attempts) {
        ++out.attempts;
        if (policy == Policy::ReEstimate && out.attempts > 1) r = beam_displacement(sc, mode, az, el, rng);
        elapsed += (policy == Policy::ReEstimate) ? t0 + t_rot : t0;
        const double h_a = fading_sample(ch.fading, rng);
        const double p_r = received_power(ch.budget, h_l, h_a, pointing_gain(ch.pointing, r));
        connected = p_r >= ch.budget.threshold_power;
        if (out.attempts == 1 && !connected) first_failed[t] = 1;
        if (trace) trace->push_back({out.attempts, r, h_a, p_r, connected});
      }
      out.time = elapsed;
      out.censored = !connected;
      run.outcomes[t] = out;
    }
  });

  std::vector<double> times;
  times.reserve(run.outcomes.size());
  std::int64_t fails = 0;
  for (std::size_t i = 0; i < run.outcomes.size(); ++i) {
    times.push_back(run.outcomes[i].time);
    run.censored += run.outcomes[i].censored ? 1 : 0;
    fails += first_failed[i];
  }
  const double n = double(trials);
  run.first_failure_rate = double(fails) / n;
  run.first_failure_se = std::sqrt(run.first_failure_rate * (1.0 - run.first_failure_rate) / n);
  run.time = moments(times);
  return run;
}

std::vector<TailPoint> empirical_tail(const AcquisitionRun& run, std::span<const double> t_grid) {
  std::vector<TailPoint> tail;
  const double n = double(run.outcomes.size());
  if (run.outcomes.empty()) throw std::invalid_argument("empty acquisition run");
  for (double t : t_grid) {
    const auto later = std::count_if(run.outcomes.begin(), run.outcomes.end(), [t](const TrialOutcome& o) {
      return o.censored || o.time > t * (1.0 + 1e-12);
    });
    const double p = double(later) / n;
    tail.push_back({t, p, std::sqrt(p * (1.0 - p) / n)});
  }
  return tail;
}

}  // namespace fsoacq
