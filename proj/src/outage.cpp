#include "fsoacq/outage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fsoacq {

OpticalChannel OpticalChannel::at_distance(double d) const {
  OpticalChannel out = *this;
  out.attenuation.link_distance = d;
  out.pointing.link_distance = d;
  return out;
}

OpticalChannel OpticalChannel::with_divergence(double theta) const {
  OpticalChannel out = *this;
  out.pointing.beam_divergence = theta;
  return out;
}

void OpticalChannel::validate() const {
  attenuation.validate();
  fading.validate();
  pointing.validate();
  budget.validate();
}

std::string method_name(const OutageMethod& m) {
  return std::holds_alternative<MonteCarlo>(m) ? "montecarlo" : "quadrature";
}

double conditional_outage(const OpticalChannel& ch, double r) {
  if (r < 0) throw std::invalid_argument("displacement must be non-negative");
  const double deliverable = received_power(ch.budget, attenuation_gain(ch.attenuation), 1.0,
                                            pointing_gain(ch.pointing, r));
  if (!(deliverable > 0)) return 1.0;
  return fading_cdf(ch.fading, ch.budget.threshold_power / deliverable);
}

double conditional_success(const OpticalChannel& ch, double r) {
  if (r < 0) throw std::invalid_argument("displacement must be non-negative");
  const double deliverable = received_power(ch.budget, attenuation_gain(ch.attenuation), 1.0,
                                            pointing_gain(ch.pointing, r));
  if (!(deliverable > 0)) return 0.0;
  return fading_ccdf(ch.fading, ch.budget.threshold_power / deliverable);
}

double rayleigh_expectation(const OpticalChannel& ch, const std::function<double(double)>& g,
                            double u_max, double rel_tol) {
  const double sd = ch.pointing.displacement_std();
  if (!(sd > 0)) return g(0.0);
  if (!(u_max > 0)) return 0.0;
  auto integrand = [&](double u) { return std::exp(-u) * g(sd * std::sqrt(2.0 * u)); };
  double sum = 0.0;
  for (double lo = 0.0; lo < u_max; lo += 1.0) sum += integrate(integrand, lo, std::min(lo + 1.0, u_max), rel_tol);
  return sum;
}

namespace {

OutageResult outage_monte_carlo(const OpticalChannel& ch, const MonteCarlo& mc) {
  if (mc.trials < 1) throw std::invalid_argument("Monte Carlo trials must be >= 1");
  const double h_l = attenuation_gain(ch.attenuation);
  const auto blocks = static_cast<std::size_t>((mc.trials + kTrialBlock - 1) / kTrialBlock);
  std::vector<std::int64_t> failures(blocks, 0);
  parallel_for(blocks, mc.workers, [&](std::size_t b) {
    Rng rng = make_stream(mc.seed, b);
    const std::int64_t begin = std::int64_t(b) * kTrialBlock;
    const std::int64_t end = std::min(mc.trials, begin + kTrialBlock);
    std::int64_t fails = 0;
    for (std::int64_t t = begin; t < end; ++t) {
      const double r = displacement_sample(ch.pointing, rng);
      const double h_a = fading_sample(ch.fading, rng);
      const double p_r = received_power(ch.budget, h_l, h_a, pointing_gain(ch.pointing, r));
      if (p_r < ch.budget.threshold_power) ++fails;
    }
    failures[b] = fails;
  });
  std::int64_t total = 0;
  for (auto f : failures) total += f;
  const double n = double(mc.trials);
  const double p = double(total) / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

OutageResult outage_quadrature(const OpticalChannel& ch, const Quadrature& q) {
  if (!(q.rel_tol > 0 && q.rel_tol < 1)) throw std::invalid_argument("rel_tol must be in (0, 1)");
  const double sd = ch.pointing.displacement_std();
  if (!(sd > 0)) return {conditional_outage(ch, 0.0), 0.0};
  // r = sd sqrt(2u) turns the Rayleigh density into e^{-u}.
  auto integrand = [&](double u) { return std::exp(-u) * conditional_outage(ch, sd * std::sqrt(2.0 * u)); };
  double u_max = std::log(10.0 / q.rel_tol);
  double p = integrate(integrand, 0.0, u_max, q.rel_tol);
  // Keep the truncated tail below rel_tol/10 of the result itself.
  for (int pass = 0; pass < 4 && p > 0 && std::exp(-u_max) > 0.1 * q.rel_tol * p; ++pass) {
    u_max = std::min(740.0, std::log(10.0 / (q.rel_tol * p)));
    p = integrate(integrand, 0.0, u_max, q.rel_tol);
  }
  return {std::clamp(p, 0.0, 1.0), 0.0};
}

}  // namespace

OutageResult outage_probability(const OpticalChannel& ch, const OutageMethod& method) {
  ch.validate();
  if (const auto* mc = std::get_if<MonteCarlo>(&method)) return outage_monte_carlo(ch, *mc);
  return outage_quadrature(ch, std::get<Quadrature>(method));
}

SigmaEstSource SigmaEstSource::fixed(double radians) {
  if (!(radians >= 0)) throw std::invalid_argument("fixed sigma_est must be non-negative");
  SigmaEstSource s;
  s.kind_ = Kind::Fixed;
  s.value_ = radians;
  s.label_ = "fixed";
  return s;
}

SigmaEstSource SigmaEstSource::gps(double position_std) {
  if (!(position_std > 0)) throw std::invalid_argument("GPS position std must be positive");
  SigmaEstSource s;
  s.kind_ = Kind::Gps;
  s.value_ = position_std;
  s.label_ = "gps";
  return s;
}

SigmaEstSource SigmaEstSource::table(std::vector<double> distances, std::vector<double> stds) {
  if (distances.empty() || distances.size() != stds.size())
    throw std::invalid_argument("sigma_est table needs matching, non-empty columns");
  if (!std::is_sorted(distances.begin(), distances.end()))
    throw std::invalid_argument("sigma_est table distances must be increasing");
  SigmaEstSource s;
  s.kind_ = Kind::Table;
  s.distances_ = std::move(distances);
  s.stds_ = std::move(stds);
  s.label_ = "proposed";
  return s;
}

double SigmaEstSource::at(double distance) const {
  switch (kind_) {
    case Kind::Fixed:
      return value_;
    case Kind::Gps:
      return value_ / distance;
    case Kind::Table: {
      if (distance <= distances_.front()) return stds_.front();
      if (distance >= distances_.back()) return stds_.back();
      const auto it = std::upper_bound(distances_.begin(), distances_.end(), distance);
      const auto i = std::size_t(it - distances_.begin());
      const double w = (distance - distances_[i - 1]) / (distances_[i] - distances_[i - 1]);
      return stds_[i - 1] + w * (stds_[i] - stds_[i - 1]);
    }
  }
  return value_;
}

OutageCurve divergence_sweep(const OpticalChannel& ch, std::span<const double> grid,
                             const OutageMethod& method) {
  if (grid.empty()) throw std::invalid_argument("divergence grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("divergence grid must be increasing");

  OutageCurve curve;
  curve.method = method_name(method);
  curve.divergence_grid.assign(grid.begin(), grid.end());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    OutageMethod point_method = method;
    if (auto* mc = std::get_if<MonteCarlo>(&point_method)) mc->seed = substream_seed(mc->seed, i);
    const auto res = outage_probability(ch.with_divergence(grid[i]), point_method);
    curve.outage.push_back(res.probability);
    curve.std_error.push_back(res.std_error);
    if (i == 0 || res.probability < curve.min_outage) {
      curve.min_outage = res.probability;
      curve.argmin_divergence = grid[i];
      curve.argmin_index = i;
    }
  }
  return curve;
}

DistanceRow distance_point(const OpticalChannel& tmpl, double distance,
                           std::span<const double> grid, const OutageMethod& method,
                           const SigmaEstSource& proposed, const SigmaEstSource& gps,
                           OutageCurve* proposed_curve, OutageCurve* gps_curve) {
  if (!(distance > 0)) throw std::invalid_argument("distances must be positive");
  DistanceRow row;
  row.distance_m = distance;
  row.sigma_est_proposed = proposed.at(distance);
  row.sigma_est_gps = gps.at(distance);

  OpticalChannel ch = tmpl.at_distance(distance);
  ch.pointing.estimation_std = row.sigma_est_proposed;
  const auto cp = divergence_sweep(ch, grid, method);
  ch.pointing.estimation_std = row.sigma_est_gps;
  const auto cg = divergence_sweep(ch, grid, method);

  row.min_outage_proposed = cp.min_outage;
  row.min_outage_gps = cg.min_outage;
  row.argmin_proposed = cp.argmin_divergence;
  row.argmin_gps = cg.argmin_divergence;
  row.reduction_factor = cp.min_outage > 0 ? cg.min_outage / cp.min_outage
                                           : std::numeric_limits<double>::infinity();
  if (proposed_curve) *proposed_curve = cp;
  if (gps_curve) *gps_curve = cg;
  return row;
}

std::vector<DistanceRow> distance_sweep(const OpticalChannel& tmpl,
                                        std::span<const double> distances,
                                        std::span<const double> grid, const OutageMethod& method,
                                        const SigmaEstSource& proposed, const SigmaEstSource& gps) {
  for (std::size_t i = 1; i < distances.size(); ++i)
    if (!(distances[i] > distances[i - 1]))
      throw std::invalid_argument("distances must be increasing");
  std::vector<DistanceRow> rows;
  for (double d : distances) rows.push_back(distance_point(tmpl, d, grid, method, proposed, gps));
  return rows;
}

}  // namespace fsoacq
