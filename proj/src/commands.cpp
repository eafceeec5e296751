#include "fsoacq/commands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fsoacq/acquisition.hpp"
#include "fsoacq/report.hpp"
#include "fsoacq/scenario.hpp"

namespace fsoacq {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

double parse_number_with_unit(std::string text, const std::map<std::string, double>& units,
                              const std::string& what, double bare_scale) {
  text.erase(std::remove_if(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }),
             text.end());
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse " + what + " '" + text + "'");
  }
  const std::string unit = text.substr(used);
  if (unit.empty()) return v * bare_scale;
  const auto it = units.find(unit);
  if (it == units.end()) throw std::invalid_argument("unknown unit '" + unit + "' in " + what + " '" + text + "'");
  return v * it->second;
}

const std::map<std::string, double> kTimeUnits{{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}};
const std::map<std::string, double> kDistanceUnits{{"m", 1.0}, {"km", 1e3}};

struct Loaded {
  ScenarioConfig cfg;
  std::string text;
  std::string path;
  fs::path out_dir;
  std::uint64_t seed = 1;
  std::int64_t trials = 0;
};

Loaded load(const CommonOptions& opt) {
  Loaded l;
  l.path = opt.config;
  l.text = read_text(opt.config);
  l.cfg = parse_scenario(l.text, opt.config);
  if (opt.trials) {
    if (*opt.trials < 1) throw std::invalid_argument("--trials must be >= 1");
    l.cfg.run.trials = *opt.trials;
    l.cfg.run.outage_trials = *opt.trials;
  }
  if (opt.seed) l.cfg.run.seed = *opt.seed;
  l.out_dir = opt.output_dir ? fs::path(*opt.output_dir) : fs::path(l.cfg.run.output_dir);
  l.seed = l.cfg.run.seed;
  l.trials = l.cfg.run.trials;
  return l;
}

std::string fading_name(FadingModel m) {
  switch (m) {
    case FadingModel::None: return "none";
    case FadingModel::LogNormal: return "lognormal";
    case FadingModel::GammaGamma: return "gammagamma";
  }
  return "?";
}

ordered_json config_json(const ScenarioConfig& c) {
  ordered_json j;
  j["array"] = {{"n_antennas", c.array.n_antennas},
                {"lens_diameter", c.array.lens_diameter},
                {"antenna_spacing", c.array.antenna_spacing},
                {"wavelength", c.array.wavelength},
                {"focal_length", c.array.focal_length},
                {"shape", c.array.shape == ArrayShape::Arc ? "arc" : "linear"}};
  j["rf"] = {{"reference_gain", c.rf.link.reference_gain},
             {"reference_distance", c.rf.link.reference_distance},
             {"noise_std", c.rf.link.noise_std},
             {"chain_count", c.rf.chain_count},
             {"chain_counts", c.rf.chain_counts},
             {"sector_halfwidth_rad", c.rf.sector_halfwidth}};
  j["prior"] = {{"gps_position_std", c.gps_position_std}};
  j["optical"] = {{"wavelength", c.optical.wavelength},
                  {"visibility", c.optical.visibility},
                  {"fading",
                   {{"model", fading_name(c.optical.fading.model)},
                    {"log_amp_std", c.optical.fading.log_amp_std},
                    {"alpha", c.optical.fading.alpha},
                    {"beta", c.optical.fading.beta}}},
                  {"jitter_std", c.optical.jitter_std},
                  {"receiver_radius", c.optical.receiver_radius},
                  {"tx_power", c.optical.budget.tx_power},
                  {"threshold_power", c.optical.budget.threshold_power},
                  {"responsivity", c.optical.budget.responsivity},
                  {"link_distance", c.optical.link_distance},
                  {"divergence_grid", c.optical.divergence_grid}};
  ordered_json p = {{"structure_constant", c.policy.structure_constant},
                    {"transverse_wind", c.policy.transverse_wind},
                    {"link_distance", c.policy.link_distance},
                    {"visibility", c.policy.visibility},
                    {"rotate_time", c.policy.rotate_time}};
  p["coherence_time"] = c.policy.coherence_time ? ordered_json(*c.policy.coherence_time) : ordered_json(nullptr);
  p["divergence"] = c.policy.divergence ? ordered_json(*c.policy.divergence) : ordered_json("auto");
  p["time_grid_points"] = c.policy.t_grid.size();
  j["policy"] = p;
  j["run"] = {{"trials", c.run.trials},
              {"outage_trials", c.run.outage_trials},
              {"seed", c.run.seed},
              {"output_dir", c.run.output_dir},
              {"estimator_distances", c.run.estimator_distances},
              {"outage_distances", c.run.outage_distances}};
  return j;
}

// Collects written files and finally the manifest.
class Outputs {
 public:
  Outputs(const Loaded& l, const std::string& command) : dir_(l.out_dir), command_(command) {
    manifest_ = make_manifest(command, l.path, l.text, l.seed);
    manifest_["config"] = config_json(l.cfg);
    manifest_["rf_budget"] = {{"reference_gain", l.cfg.rf.link.reference_gain},
                              {"reference_distance_m", l.cfg.rf.link.reference_distance},
                              {"noise_std", l.cfg.rf.link.noise_std},
                              {"chain_count", l.cfg.rf.chain_count}};
    manifest_["outputs"] = ordered_json::array();
  }

  ordered_json& manifest() { return manifest_; }

  void csv(const std::string& name, const Table& t) { write(name, to_csv(t)); }

  // The plot is rendered from the CSV text as written, not from in-memory values.
  void plot(const std::string& csv_name, const std::string& svg_name, const PlotSpec& spec) {
    write(svg_name, render_svg(parse_csv(read_text(dir_ / csv_name)), spec));
  }

  void json(const std::string& name, const ordered_json& j) { write(name, j.dump(2) + "\n"); }

  void finish(std::ostream& out) {
    const std::string name = "manifest_" + command_ + ".json";
    write_text(dir_ / name, manifest_.dump(2) + "\n");
    out << "wrote " << manifest_["outputs"].size() << " files and " << (dir_ / name).string() << "\n";
  }

 private:
  void write(const std::string& name, const std::string& text) {
    write_text(dir_ / name, text);
    manifest_["outputs"].push_back((dir_ / name).string());
  }

  fs::path dir_;
  std::string command_;
  ordered_json manifest_;
};

std::string num(double v) { return format_number(v); }

SigmaEstSource proposed_source(const ScenarioConfig& cfg, std::span<const double> distances,
                               std::int64_t trials, std::uint64_t seed) {
  StdSweepOptions opt;
  opt.gps_position_std = cfg.gps_position_std;
  opt.trials = trials;
  opt.seed = seed;
  opt.sector_halfwidth = cfg.rf.sector_halfwidth;
  opt.workers = default_workers();
  const int chains[] = {cfg.rf.chain_count};
  const auto rows = estimation_std_sweep(cfg.array, cfg.rf.link, distances, chains, opt);
  std::vector<double> ds, ss;
  for (const auto& r : rows) {
    ds.push_back(r.distance_m);
    ss.push_back(r.std_proposed_rad);
  }
  return SigmaEstSource::table(ds, ss);
}

std::vector<FadingModel> fading_models(const std::string& flag, FadingModel config_default) {
  if (flag.empty()) return {config_default};
  if (flag == "both") return {FadingModel::LogNormal, FadingModel::GammaGamma};
  if (flag == "lognormal") return {FadingModel::LogNormal};
  if (flag == "gammagamma") return {FadingModel::GammaGamma};
  if (flag == "none") return {FadingModel::None};
  throw std::invalid_argument("--fading-model must be lognormal, gammagamma, none or both");
}

}  // namespace

double parse_time(const std::string& text) {
  const double t = parse_number_with_unit(text, kTimeUnits, "time", 1.0);
  if (!(t >= 0) || !std::isfinite(t)) throw std::invalid_argument("time must be non-negative: '" + text + "'");
  return t;
}

std::vector<double> parse_distances(const std::vector<std::string>& tokens) {
  std::vector<std::string> parts = tokens;
  double scale = 1.0;
  if (parts.size() >= 2 && kDistanceUnits.count(parts.back())) {
    scale = kDistanceUnits.at(parts.back());
    parts.pop_back();
  }
  auto bare = [](const std::string& s) {
    return !s.empty() && (std::isdigit(static_cast<unsigned char>(s.back())) || s.back() == '.');
  };
  std::vector<double> out;
  for (const auto& p : parts) {
    std::vector<std::string> items;
    std::stringstream ss(p);
    for (std::string item; std::getline(ss, item, ',');) items.push_back(item);
    // "1,2,4,8km": a unit on the last item applies to the bare ones too
    double part_scale = scale;
    if (items.size() > 1 && !bare(items.back()) && std::all_of(items.begin(), items.end() - 1, bare)) {
      for (const auto& [unit, factor] : kDistanceUnits)
        if (items.back().ends_with(unit) && bare(items.back().substr(0, items.back().size() - unit.size())))
          part_scale = factor;
    }
    for (const auto& it : items) {
      if (it.empty()) throw std::invalid_argument("empty distance in '" + p + "'");
      const double d = parse_number_with_unit(it, kDistanceUnits, "distance", part_scale);
      if (!(d > 0) || !std::isfinite(d)) throw std::invalid_argument("distances must be positive: '" + it + "'");
      out.push_back(d);
    }
  }
  if (out.empty()) throw std::invalid_argument("no distances given");
  for (std::size_t i = 1; i < out.size(); ++i)
    if (!(out[i] > out[i - 1])) throw std::invalid_argument("distances must be increasing");
  return out;
}

void cmd_validate_config(const std::string& config, std::ostream& out) {
  const auto text = read_text(config);
  const auto cfg = parse_scenario(text, config);
  out << config << ": ok (sha1 " << git_blob_sha1(text) << ")\n";
  out << "  coherence time " << num(cfg.coherence_time()) << " s, "
      << cfg.optical.divergence_grid.size() << " divergence points, "
      << cfg.policy.t_grid.size() << " time points\n";
}

void cmd_estimator_sweep(const CommonOptions& opt, std::ostream& out) {
  const Loaded l = load(opt);
  const auto& cfg = l.cfg;
  StdSweepOptions so;
  so.gps_position_std = cfg.gps_position_std;
  so.trials = l.trials;
  so.seed = l.seed;
  so.sector_halfwidth = cfg.rf.sector_halfwidth;
  so.workers = default_workers();
  const auto rows = estimation_std_sweep(cfg.array, cfg.rf.link, cfg.run.estimator_distances,
                                         cfg.rf.chain_counts, so);

  Table t{{"distance_m", "variant", "chain_count", "std_rad", "std_m", "stderr_rad", "trials"}, {}};
  const double se_scale = 1.0 / std::sqrt(2.0 * double(std::max<std::int64_t>(l.trials - 1, 1)));
  double last_distance = -1;
  for (const auto& r : rows) {
    if (r.distance_m != last_distance) {
      t.add_row({num(r.distance_m), "gps", "0", num(r.std_gps_rad), num(r.std_gps_m), "0",
                 std::to_string(r.trials)});
      last_distance = r.distance_m;
    }
    t.add_row({num(r.distance_m), "proposed_k" + std::to_string(r.chain_count), std::to_string(r.chain_count),
               num(r.std_proposed_rad), num(r.std_proposed_m), num(r.std_proposed_rad * se_scale),
               std::to_string(r.trials)});
  }

  Outputs o(l, "estimator-sweep");
  o.csv("estimator_std.csv", t);
  o.plot("estimator_std.csv", "estimator_std.svg",
         {"Pointing-angle error versus distance", "distance_m", "std_rad", "variant", "distance (m)",
          "angle error std (rad)", true, true});
  o.finish(out);

  for (const auto& r : rows)
    out << "D=" << num(r.distance_m) << " m  k=" << r.chain_count << "  proposed " << num(r.std_proposed_rad)
        << " rad  gps " << num(r.std_gps_rad) << " rad\n";
}

void cmd_outage_sweep(const OutageSweepOptions& opt, std::ostream& out) {
  Loaded l = load(opt.common);
  const auto& cfg = l.cfg;
  const std::vector<double> distances =
      opt.distance.empty() ? cfg.run.outage_distances : parse_distances(opt.distance);
  const double visibility = opt.visibility ? *opt.visibility : cfg.optical.visibility;
  if (!(visibility > 0)) throw std::invalid_argument("--visibility must be positive");

  OutageMethod method;
  if (opt.method == "quadrature")
    method = Quadrature{};
  else if (opt.method == "montecarlo")
    method = MonteCarlo{cfg.run.outage_trials, substream_seed(l.seed, 1), default_workers()};
  else
    throw std::invalid_argument("--method must be quadrature or montecarlo");

  const auto models = fading_models(opt.fading_model, cfg.optical.fading.model);
  std::vector<std::pair<std::string, SigmaEstSource>> sources;
  const bool want_gps = opt.sigma_est == "gps" || opt.sigma_est == "both";
  const bool want_proposed = opt.sigma_est == "proposed" || opt.sigma_est == "both";
  if (want_proposed) sources.emplace_back("proposed", proposed_source(cfg, distances, l.trials, l.seed));
  if (want_gps) sources.emplace_back("gps", SigmaEstSource::gps(cfg.gps_position_std));
  if (sources.empty()) {
    std::size_t used = 0;
    double v = -1;
    try {
      v = std::stod(opt.sigma_est, &used);
    } catch (const std::exception&) {
    }
    if (used != opt.sigma_est.size() || !(v >= 0))
      throw std::invalid_argument("--sigma-est must be gps, proposed, both or a non-negative value in rad");
    sources.emplace_back("fixed", SigmaEstSource::fixed(v));
  }

  Table curves{{"curve", "model", "sigma_source", "distance_m", "sigma_est_rad", "theta_div_rad", "p_out",
                "stderr", "method"},
               {}};
  Table table{{"model", "distance_m", "sigma_est_proposed_rad", "sigma_est_gps_rad", "min_outage_proposed",
               "min_outage_gps", "argmin_proposed_rad", "argmin_gps_rad", "reduction_factor"},
              {}};
  ordered_json summary = ordered_json::array();

  for (FadingModel model : models) {
    OpticalChannel tmpl = cfg.channel_at(cfg.optical.link_distance, visibility);
    tmpl.fading.model = model;
    for (double d : distances) {
      std::map<std::string, OutageCurve> by_source;
      if (want_gps && want_proposed) {
        OutageCurve cp, cg;
        const auto row = distance_point(tmpl, d, cfg.optical.divergence_grid, method, sources[0].second,
                                        sources[1].second, &cp, &cg);
        by_source["proposed"] = cp;
        by_source["gps"] = cg;
        table.add_row({fading_name(model), num(d), num(row.sigma_est_proposed), num(row.sigma_est_gps),
                       num(row.min_outage_proposed), num(row.min_outage_gps), num(row.argmin_proposed),
                       num(row.argmin_gps), num(row.reduction_factor)});
      } else {
        OpticalChannel ch = tmpl.at_distance(d);
        ch.pointing.estimation_std = sources[0].second.at(d);
        by_source[sources[0].first] = divergence_sweep(ch, cfg.optical.divergence_grid, method);
      }
      for (const auto& [name, src] : sources) {
        const auto& c = by_source.at(name);
        const std::string label = fading_name(model) + "/" + name + "/" + num(d) + "m";
        for (std::size_t i = 0; i < c.divergence_grid.size(); ++i)
          curves.add_row({label, fading_name(model), name, num(d), num(src.at(d)), num(c.divergence_grid[i]),
                          num(c.outage[i]), num(c.std_error[i]), c.method});
        summary.push_back({{"curve", label},
                           {"argmin_divergence_rad", c.argmin_divergence},
                           {"min_outage", c.min_outage},
                           {"interior_minimum", c.argmin_index > 0 && c.argmin_index + 1 < c.divergence_grid.size()}});
        out << label << ": min P_out " << num(c.min_outage) << " at " << num(c.argmin_divergence) << " rad\n";
      }
    }
  }

  Outputs o(l, "outage-sweep");
  o.manifest()["visibility_m"] = visibility;
  o.csv("outage_curves.csv", curves);
  o.plot("outage_curves.csv", "outage_curves.svg",
         {"Outage probability versus beam divergence", "theta_div_rad", "p_out", "curve",
          "beam divergence (rad)", "outage probability", true, true});
  if (!table.rows.empty()) {
    o.csv("outage_distance.csv", table);
    o.plot("outage_distance.csv", "outage_distance.svg",
           {"Minimum-outage reduction versus distance", "distance_m", "reduction_factor", "model",
            "distance (m)", "GPS-only / proposed minimum outage", true, true});
    for (const auto& r : table.rows)
      out << r[0] << " D=" << r[1] << " m reduction factor " << r[8] << "\n";
  }
  o.json("outage_summary.json", summary);
  o.finish(out);
}

void cmd_policy(const PolicyOptions& opt, std::ostream& out) {
  Loaded l = load(opt.common);
  const auto& cfg = l.cfg;
  const double t0 = opt.t0 ? parse_time(*opt.t0) : cfg.coherence_time();
  const double t_rot = opt.trot ? parse_time(*opt.trot) : cfg.policy.rotate_time;
  if (!(t0 > 0)) throw std::invalid_argument("--t0 must be positive");

  const double d = cfg.policy.link_distance;
  const double ds[] = {d};
  OpticalChannel ch = cfg.channel_at(d, cfg.policy.visibility);
  ch.pointing.estimation_std = proposed_source(cfg, ds, l.trials, l.seed).at(d);
  const double divergence = cfg.policy.divergence
                                ? *cfg.policy.divergence
                                : divergence_sweep(ch, cfg.optical.divergence_grid, Quadrature{}).argmin_divergence;
  ch = ch.with_divergence(divergence);

  const auto rep = policy_report(ch, t0, t_rot, cfg.policy.t_grid, cfg.run.outage_trials, substream_seed(l.seed, 2));

  Table t{{"policy", "method", "t_s", "p_not_connected", "stderr"}, {}};
  auto add = [&](const std::string& policy, const std::string& method, const std::vector<TailPoint>& tail) {
    for (const auto& p : tail) t.add_row({policy, method, num(p.t), num(p.p_not_connected), num(p.std_error)});
  };
  add("re-estimate", "closed-form", rep.tail_re);
  add("re-estimate", "simulated", rep.tail_re_simulated);
  add("single-estimate", "montecarlo", rep.tail_single);
  add("single-estimate", "quadrature", rep.tail_single_quadrature);

  ordered_json s;
  s["coherence_time_s"] = rep.coherence_time;
  s["rotate_time_s"] = rep.rotate_time;
  s["link_distance_m"] = d;
  s["divergence_rad"] = divergence;
  s["sigma_est_rad"] = ch.pointing.estimation_std;
  s["p_out"] = rep.p_out;
  s["mean_time_re_s"] = rep.mean_time_re;
  s["mean_time_single_s"] = rep.single.divergent ? ordered_json("divergent") : ordered_json(rep.single.mean);
  s["single_flagged_mass"] = rep.single.flagged_mass;
  const auto& mc = rep.single_monte_carlo;
  s["mean_time_single_montecarlo_s"] = mc.divergent ? ordered_json("divergent") : ordered_json(mc.mean);
  s["mean_time_single_montecarlo_stderr_s"] = mc.divergent ? ordered_json(nullptr) : ordered_json(mc.std_error);
  s["single_flagged_samples"] = mc.flagged;
  s["recommended_policy"] = policy_name(rep.recommended);

  Outputs o(l, "policy");
  o.csv("policy_tail.csv", t);
  o.plot("policy_tail.csv", "policy_tail.svg",
         {"Probability the link is not yet connected", "t_s", "p_not_connected", "method", "time (s)",
          "P[t_acq > t]", false, true});
  o.json("policy_summary.json", s);
  o.finish(out);

  out << "t0 = " << num(t0) << " s, t_rot = " << num(t_rot) << " s, P_out = " << num(rep.p_out) << "\n";
  out << "mean time re-estimate    " << num(rep.mean_time_re) << " s\n";
  if (rep.single.divergent)
    out << "mean time single-estimate divergent (flagged mass " << num(rep.single.flagged_mass) << ")\n";
  else
    out << "mean time single-estimate " << num(rep.single.mean) << " s (Monte Carlo "
        << num(rep.single_monte_carlo.mean) << " +/- " << num(rep.single_monte_carlo.std_error) << ")\n";
  out << "recommended policy: " << policy_name(rep.recommended) << "\n";
}

void cmd_acquire(const AcquireOptions& opt, std::ostream& out) {
  Loaded l = load(opt.common);
  const auto& cfg = l.cfg;
  AcquisitionScenario sc = cfg.acquisition(cfg.optical.link_distance, cfg.optical.visibility);
  if (opt.t0) sc.coherence_time = parse_time(*opt.t0);
  if (opt.trot) sc.rotate_time = parse_time(*opt.trot);
  if (opt.traces < 0) throw std::invalid_argument("--traces must be non-negative");

  std::vector<PointingMode> modes;
  if (opt.mode == "proposed" || opt.mode == "both") modes.push_back(PointingMode::Proposed);
  if (opt.mode == "gps" || opt.mode == "both") modes.push_back(PointingMode::GpsOnly);
  if (modes.empty()) throw std::invalid_argument("--mode must be proposed, gps or both");
  std::vector<Policy> policies;
  if (opt.policy == "re-estimate" || opt.policy == "both") policies.push_back(Policy::ReEstimate);
  if (opt.policy == "single-estimate" || opt.policy == "both") policies.push_back(Policy::SingleEstimate);
  if (policies.empty()) throw std::invalid_argument("--policy must be re-estimate, single-estimate or both");

  Table hist{{"series", "mode", "policy", "time_s", "attempts", "count", "censored"}, {}};
  Table summary{{"mode", "policy", "divergence_rad", "trials", "mean_time_s", "stderr_s", "censored",
                 "first_failure_rate", "first_failure_stderr"},
                {}};
  Table traces{{"mode", "policy", "trial", "attempt", "displacement_m", "fading", "received_power_w", "connected"},
               {}};

  std::uint64_t index = 0;
  for (PointingMode mode : modes) {
    for (Policy policy : policies) {
      const auto run = simulate_algorithm1(sc, mode, policy, l.trials, substream_seed(l.seed, index++), opt.traces);
      std::map<std::pair<std::int64_t, bool>, std::pair<double, std::int64_t>> bins;
      for (const auto& oc : run.outcomes) {
        auto& b = bins[{oc.attempts, oc.censored}];
        b.first = oc.time;
        ++b.second;
      }
      const std::string m = pointing_mode_name(mode), p = policy_name(policy);
      for (const auto& [key, val] : bins)
        hist.add_row({m + "/" + p, m, p, num(val.first), std::to_string(key.first), std::to_string(val.second),
                      key.second ? "1" : "0"});
      summary.add_row({m, p, num(run.divergence), std::to_string(l.trials), num(run.time.mean),
                       num(run.time.std_error()), std::to_string(run.censored), num(run.first_failure_rate),
                       num(run.first_failure_se)});
      for (std::size_t i = 0; i < run.traces.size(); ++i)
        for (const auto& a : run.traces[i])
          traces.add_row({m, p, std::to_string(i), std::to_string(a.attempt), num(a.displacement), num(a.fading),
                          num(a.received_power), a.connected ? "1" : "0"});
      out << m << "/" << p << ": mean " << num(run.time.mean) << " s (+/- " << num(run.time.std_error())
          << "), first-attempt failure " << num(run.first_failure_rate) << ", censored " << run.censored << "\n";
    }
  }

  Outputs o(l, "acquire");
  o.manifest()["coherence_time_s"] = sc.coherence_time;
  o.manifest()["rotate_time_s"] = sc.rotate_time;
  o.csv("acquisition_hist.csv", hist);
  o.plot("acquisition_hist.csv", "acquisition_hist.svg",
         {"Acquisition-time histogram", "time_s", "count", "series", "acquisition time (s)", "trials", false, true});
  o.csv("acquisition_summary.csv", summary);
  if (opt.traces > 0) o.csv("acquisition_traces.csv", traces);
  o.finish(out);
}

}  // namespace fsoacq
