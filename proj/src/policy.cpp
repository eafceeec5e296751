#include "fsoacq/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace fsoacq {

CoherenceParams CoherenceParams::from_wavelength(double wavelength, double structure_constant,
                                                 double path_length, double transverse_wind) {
  if (!(wavelength > 0)) throw std::invalid_argument("optical wavelength must be positive");
  return {2.0 * std::numbers::pi / wavelength, structure_constant, path_length, transverse_wind};
}

void CoherenceParams::validate() const {
  if (!(optical_wavenumber > 0 && structure_constant > 0 && path_length > 0 && transverse_wind > 0))
    throw std::invalid_argument("coherence parameters must all be positive");
}

double correlation_length(const CoherenceParams& p) {
  p.validate();
  const double k = p.optical_wavenumber;
  return std::pow(1.0 / (2.91 * k * k * p.structure_constant * p.path_length), 0.6);
}

double coherence_time(const CoherenceParams& p) { return correlation_length(p) / p.transverse_wind; }

std::string policy_name(Policy p) {
  return p == Policy::ReEstimate ? "re-estimate" : "single-estimate";
}

double mean_time_re(double p_out, double t0, double t_rot) {
  if (!(p_out >= 0)) throw std::invalid_argument("P_out must be non-negative");
  if (p_out >= 1.0) throw std::domain_error("P_out = 1: the link is never acquired");
  return (t0 + t_rot) / (1.0 - p_out);
}

SingleEstimateMean mean_time_single_from(std::span<const double> f_samples, double t0,
                                         double t_rot) {
  SingleEstimateMean out;
  out.samples = std::int64_t(f_samples.size());
  if (f_samples.empty()) throw std::invalid_argument("no displacement samples");
  std::vector<double> waits;
  waits.reserve(f_samples.size());
  double f_sum = 0.0;
  for (double f : f_samples) {
    f_sum += f;
    const double gap = 1.0 - f;
    if (gap <= kNearCertainOutage) ++out.flagged;
    waits.push_back(t0 / std::max(gap, kNearCertainOutage));
  }
  out.p_out = f_sum / double(f_samples.size());
  if (double(out.flagged) / double(out.samples) > kDivergentMassCap) {
    out.divergent = true;
    out.mean = std::numeric_limits<double>::infinity();
    out.std_error = std::numeric_limits<double>::infinity();
    return out;
  }
  const auto m = moments(waits);
  out.mean = m.mean + t_rot;
  out.std_error = m.std_error();
  return out;
}

std::vector<double> conditional_outage_samples(const OpticalChannel& ch, std::int64_t trials,
                                               std::uint64_t seed, unsigned workers) {
  ch.validate();
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  std::vector<double> f(static_cast<std::size_t>(trials));
  const auto blocks = static_cast<std::size_t>((trials + kTrialBlock - 1) / kTrialBlock);
  parallel_for(blocks, workers, [&](std::size_t b) {
    Rng rng = make_stream(seed, b);
    const std::int64_t begin = std::int64_t(b) * kTrialBlock;
    const std::int64_t end = std::min(trials, begin + kTrialBlock);
    for (std::int64_t t = begin; t < end; ++t)
      f[t] = conditional_outage(ch, displacement_sample(ch.pointing, rng));
  });
  return f;
}

SingleEstimateMean mean_time_single(const OpticalChannel& ch, double t0, double t_rot,
                                    std::int64_t trials, std::uint64_t seed) {
  const auto f = conditional_outage_samples(ch, trials, seed, default_workers());
  return mean_time_single_from(f, t0, t_rot);
}

SingleEstimateMean mean_time_single_quadrature(const OpticalChannel& ch, double t0, double t_rot) {
  ch.validate();
  if (!(t0 > 0) || !(t_rot >= 0)) throw std::invalid_argument("need t0 > 0 and t_rot >= 0");
  constexpr double kRelTol = 1e-10;
  const double eps = kNearCertainOutage;
  // beyond u_cap the capped integrand e^{-u}/eps contributes below kRelTol/10
  const double u_cap = std::log(10.0 / (kRelTol * eps));
  const double sd = ch.pointing.displacement_std();
  auto gap_at = [&](double u) { return conditional_success(ch, sd * std::sqrt(2.0 * u)); };

  // 1 - F is nonincreasing in u: bracket and bisect the point where it hits eps
  double u_star = std::numeric_limits<double>::infinity();
  if (gap_at(0.0) <= eps) {
    u_star = 0.0;
  } else if (gap_at(u_cap) <= eps) {
    double lo = 0.0, hi = u_cap;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (gap_at(mid) <= eps ? hi : lo) = mid;
    }
    u_star = hi;
  }

  SingleEstimateMean out;
  out.flagged_mass = std::isinf(u_star) ? 0.0 : std::exp(-u_star);
  out.p_out = outage_probability(ch, Quadrature{}).probability;
  if (out.flagged_mass > kDivergentMassCap) {
    out.divergent = true;
    out.mean = out.std_error = std::numeric_limits<double>::infinity();
    return out;
  }
  const double upper = std::min(u_star, u_cap);
  double e = rayleigh_expectation(
      ch, [&](double r) { return 1.0 / std::max(conditional_success(ch, r), eps); }, upper, kRelTol);
  if (!std::isinf(u_star)) e += out.flagged_mass / eps;
  out.mean = t0 * e + t_rot;
  return out;
}

std::int64_t attempts_by(Policy p, double t, double t0, double t_rot) {
  // Attempt boundaries are compared with a relative slack so grids built from
  // multiples of the period land on the right side.
  constexpr double kSlack = 1e-9;
  if (p == Policy::ReEstimate) {
    const double period = t0 + t_rot;
    return std::max<std::int64_t>(0, std::int64_t(std::floor(t / period + kSlack)));
  }
  if (t < t_rot) return 0;
  return std::max<std::int64_t>(0, std::int64_t(std::floor((t - t_rot) / t0 + kSlack)));
}

std::vector<TailPoint> re_estimate_tail(double p_out, double t0, double t_rot,
                                        std::span<const double> t_grid) {
  std::vector<TailPoint> tail;
  for (double t : t_grid) {
    const auto k = attempts_by(Policy::ReEstimate, t, t0, t_rot);
    tail.push_back({t, std::pow(p_out, double(k)), 0.0});
  }
  return tail;
}

std::vector<TailPoint> simulate_re_estimate_tail(const OpticalChannel& ch, double t0, double t_rot,
                                                 std::span<const double> t_grid,
                                                 std::int64_t trials, std::uint64_t seed,
                                                 std::int64_t max_attempts) {
  ch.validate();
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const double h_l = attenuation_gain(ch.attenuation);
  std::vector<std::int64_t> attempts(static_cast<std::size_t>(trials));
  const auto blocks = static_cast<std::size_t>((trials + kTrialBlock - 1) / kTrialBlock);
  parallel_for(blocks, default_workers(), [&](std::size_t b) {
    Rng rng = make_stream(seed, b);
    const std::int64_t begin = std::int64_t(b) * kTrialBlock;
    const std::int64_t end = std::min(trials, begin + kTrialBlock);
    for (std::int64_t t = begin; t < end; ++t) {
      std::int64_t m = 0;
      bool connected = false;
      while (!connected && m < max_attempts) {
        ++m;
        const double r = displacement_sample(ch.pointing, rng);
        const double h_a = fading_sample(ch.fading, rng);
        connected = received_power(ch.budget, h_l, h_a, pointing_gain(ch.pointing, r)) >=
                    ch.budget.threshold_power;
      }
      attempts[t] = connected ? m : max_attempts + 1;  // censored counts as never
    }
  });

  std::vector<TailPoint> tail;
  const double n = double(trials);
  for (double t : t_grid) {
    const auto k = attempts_by(Policy::ReEstimate, t, t0, t_rot);
    const auto still = std::count_if(attempts.begin(), attempts.end(),
                                     [k](std::int64_t a) { return a > k; });
    const double p = double(still) / n;
    tail.push_back({t, p, std::sqrt(p * (1.0 - p) / n)});
  }
  return tail;
}

std::vector<TailPoint> single_estimate_tail(std::span<const double> f_samples, double t0,
                                            double t_rot, std::span<const double> t_grid) {
  if (f_samples.empty()) throw std::invalid_argument("no displacement samples");
  std::vector<TailPoint> tail;
  std::vector<double> powers(f_samples.size());
  for (double t : t_grid) {
    const auto m = attempts_by(Policy::SingleEstimate, t, t0, t_rot);
    for (std::size_t i = 0; i < f_samples.size(); ++i) powers[i] = std::pow(f_samples[i], double(m));
    const auto mom = moments(powers);
    tail.push_back({t, mom.mean, mom.std_error()});
  }
  return tail;
}

std::vector<TailPoint> single_estimate_tail_quadrature(const OpticalChannel& ch, double t0,
                                                       double t_rot, std::span<const double> t_grid) {
  ch.validate();
  constexpr double kUMax = 50.0;
  constexpr int kPanels = 4000;  // even
  const double h = kUMax / kPanels;
  const double sd = ch.pointing.displacement_std();
  std::vector<double> weight(kPanels + 1), f(kPanels + 1);
  for (int i = 0; i <= kPanels; ++i) {
    const double u = i * h;
    const double simpson = (i == 0 || i == kPanels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    weight[i] = simpson * h / 3.0 * std::exp(-u);
    f[i] = conditional_outage(ch, sd * std::sqrt(2.0 * u));
  }
  std::vector<TailPoint> tail;
  for (double t : t_grid) {
    const auto m = double(attempts_by(Policy::SingleEstimate, t, t0, t_rot));
    double sum = 0.0;
    for (int i = 0; i <= kPanels; ++i) sum += weight[i] * std::pow(f[i], m);
    tail.push_back({t, std::clamp(sum, 0.0, 1.0), 0.0});
  }
  return tail;
}

std::vector<TailPoint> acquisition_tail(const OpticalChannel& ch, Policy policy, double t0,
                                        double t_rot, std::span<const double> t_grid,
                                        std::int64_t trials, std::uint64_t seed) {
  if (policy == Policy::ReEstimate)
    return re_estimate_tail(outage_probability(ch, Quadrature{}).probability, t0, t_rot, t_grid);
  const auto f = conditional_outage_samples(ch, trials, seed, default_workers());
  return single_estimate_tail(f, t0, t_rot, t_grid);
}

PolicyReport policy_report(const OpticalChannel& ch, double t0, double t_rot,
                           std::span<const double> t_grid, std::int64_t trials,
                           std::uint64_t seed) {
  if (!(t0 > 0) || !(t_rot >= 0)) throw std::invalid_argument("need t0 > 0 and t_rot >= 0");
  PolicyReport rep;
  rep.coherence_time = t0;
  rep.rotate_time = t_rot;
  rep.p_out = outage_probability(ch, Quadrature{}).probability;
  rep.mean_time_re = rep.p_out < 1.0 ? mean_time_re(rep.p_out, t0, t_rot)
                                     : std::numeric_limits<double>::infinity();
  rep.single = mean_time_single_quadrature(ch, t0, t_rot);
  const auto f = conditional_outage_samples(ch, trials, seed, default_workers());
  rep.single_monte_carlo = mean_time_single_from(f, t0, t_rot);
  rep.recommended = (!rep.single.divergent && rep.single.mean < rep.mean_time_re)
                        ? Policy::SingleEstimate
                        : Policy::ReEstimate;
  rep.tail_re = re_estimate_tail(rep.p_out, t0, t_rot, t_grid);
  rep.tail_re_simulated =
      simulate_re_estimate_tail(ch, t0, t_rot, t_grid, trials, substream_seed(seed, 1));
  rep.tail_single = single_estimate_tail(f, t0, t_rot, t_grid);
  rep.tail_single_quadrature = single_estimate_tail_quadrature(ch, t0, t_rot, t_grid);
  return rep;
}

}  // namespace fsoacq
