#include "fsoacq/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace fsoacq {

namespace {

std::string where(const std::string& source, const YAML::Node& n) {
  const auto mark = n.Mark();
  if (mark.is_null()) return source;
  return source + ":" + std::to_string(mark.line + 1);
}

// One mapping in the file. Tracks the keys read so leftovers can be rejected.
class Section {
 public:
  Section(YAML::Node node, std::string path, const std::string& source)
      : node_(std::move(node)), path_(std::move(path)), source_(source) {
    if (!node_.IsMap()) fail(node_, "expected a mapping");
  }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    throw ConfigError(where(source_, at) + ": " + (path_.empty() ? "" : "'" + path_ + "': ") + msg);
  }

  YAML::Node require(const std::string& key) {
    used_.insert(key);
    YAML::Node v = node_[key];
    if (!v) throw ConfigError(where(source_, node_) + ": missing required key '" + key_path(key) + "'");
    return v;
  }

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const { return bool(node_[key]); }

  template <class T>
  T get(const std::string& key) {
    const YAML::Node v = require(key);
    try {
      return v.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(where(source_, v) + ": key '" + key_path(key) + "' has the wrong type");
    }
  }

  template <class T>
  std::optional<T> optional(const std::string& key) {
    if (!has(key)) {
      used_.insert(key);
      return std::nullopt;
    }
    return get<T>(key);
  }

  template <class T>
  std::vector<T> list(const std::string& key) {
    const YAML::Node v = require(key);
    if (!v.IsSequence() || v.size() == 0)
      throw ConfigError(where(source_, v) + ": key '" + key_path(key) + "' must be a non-empty list");
    return get<std::vector<T>>(key);
  }

  Section child(const std::string& key) { return Section(require(key), key_path(key), source_); }

  YAML::Node node(const std::string& key) { return require(key); }

  void finish() const {
    for (const auto& kv : node_) {
      const auto k = kv.first.as<std::string>();
      if (!used_.count(k))
        throw ConfigError(where(source_, kv.first) + ": unknown key '" + key_path(k) + "'");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  const std::string& source_;
  std::set<std::string> used_;
};

std::vector<double> read_grid(Section s) {
  const double start = s.get<double>("start");
  const double stop = s.get<double>("stop");
  const int points = s.get<int>("points");
  const auto spacing = s.get<std::string>("spacing");
  s.finish();
  if (points < 2 || !(start > 0) || !(stop > start))
    throw ConfigError("'" + s.path() + "' needs 0 < start < stop and points >= 2");
  if (spacing == "log") return geomspace(start, stop, points);
  if (spacing == "linear") return linspace(start, stop, points);
  throw ConfigError("grid spacing must be 'log' or 'linear', got '" + spacing + "'");
}

FadingParams read_fading(Section s) {
  FadingParams f;
  const auto model = s.get<std::string>("model");
  if (model == "lognormal")
    f.model = FadingModel::LogNormal;
  else if (model == "gammagamma")
    f.model = FadingModel::GammaGamma;
  else if (model == "none")
    f.model = FadingModel::None;
  else
    throw ConfigError("optical.fading.model must be lognormal, gammagamma or none, got '" + model + "'");
  f.log_amp_std = s.get<double>("log_amp_std");
  f.alpha = s.get<double>("alpha");
  f.beta = s.get<double>("beta");
  s.finish();
  return f;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root || root.IsNull()) throw ConfigError(source + ": empty scenario file");

  ScenarioConfig cfg;
  try {
    Section top(root, "", source);

    Section a = top.child("array");
    cfg.array.n_antennas = a.get<int>("n_antennas");
    cfg.array.lens_diameter = a.get<double>("lens_diameter");
    cfg.array.antenna_spacing = a.get<double>("antenna_spacing");
    cfg.array.wavelength = a.get<double>("wavelength");
    cfg.array.focal_length = a.get<double>("focal_length");
    const auto shape = a.get<std::string>("shape");
    if (shape == "arc")
      cfg.array.shape = ArrayShape::Arc;
    else if (shape == "linear")
      cfg.array.shape = ArrayShape::Linear;
    else
      throw ConfigError("array.shape must be arc or linear, got '" + shape + "'");
    a.finish();

    Section rf = top.child("rf");
    cfg.rf.link.reference_gain = rf.get<double>("reference_gain");
    cfg.rf.link.reference_distance = rf.get<double>("reference_distance");
    cfg.rf.link.noise_std = rf.get<double>("noise_std");
    cfg.rf.chain_count = rf.get<int>("chain_count");
    cfg.rf.chain_counts = rf.list<int>("chain_counts");
    cfg.rf.sector_halfwidth = rf.get<double>("sector_halfwidth_deg") * std::numbers::pi / 180.0;
    rf.finish();

    Section prior = top.child("prior");
    cfg.gps_position_std = prior.get<double>("gps_position_std");
    prior.finish();

    Section o = top.child("optical");
    cfg.optical.wavelength = o.get<double>("wavelength");
    cfg.optical.visibility = o.get<double>("visibility");
    cfg.optical.fading = read_fading(o.child("fading"));
    cfg.optical.jitter_std = o.get<double>("jitter_std");
    cfg.optical.receiver_radius = o.get<double>("receiver_radius");
    cfg.optical.budget.tx_power = o.get<double>("tx_power");
    cfg.optical.budget.threshold_power = o.get<double>("threshold_power");
    cfg.optical.budget.responsivity = o.get<double>("responsivity");
    cfg.optical.link_distance = o.get<double>("link_distance");
    cfg.optical.divergence_grid = read_grid(o.child("divergence_grid"));
    o.finish();

    Section p = top.child("policy");
    cfg.policy.structure_constant = p.get<double>("structure_constant");
    cfg.policy.transverse_wind = p.get<double>("transverse_wind");
    cfg.policy.link_distance = p.get<double>("link_distance");
    cfg.policy.visibility = p.get<double>("visibility");
    cfg.policy.rotate_time = p.get<double>("rotate_time");
    cfg.policy.coherence_time = p.optional<double>("coherence_time");
    const YAML::Node div = p.node("divergence");
    if (div.IsScalar() && div.Scalar() == "auto") {
      cfg.policy.divergence.reset();
    } else {
      cfg.policy.divergence = p.get<double>("divergence");
    }
    {
      Section tg = p.child("time_grid");
      const double stop = tg.get<double>("stop");
      const double step = tg.get<double>("step");
      tg.finish();
      if (!(step > 0) || !(stop > step)) throw ConfigError("policy.time_grid needs 0 < step < stop");
      const auto n = static_cast<std::size_t>(std::floor(stop / step + 1e-9));
      for (std::size_t i = 0; i <= n; ++i) cfg.policy.t_grid.push_back(double(i) * step);
    }
    p.finish();

    Section r = top.child("run");
    cfg.run.trials = r.get<std::int64_t>("trials");
    cfg.run.outage_trials = r.get<std::int64_t>("outage_trials");
    cfg.run.seed = r.get<std::uint64_t>("seed");
    cfg.run.output_dir = r.get<std::string>("output_dir");
    cfg.run.estimator_distances = r.list<double>("estimator_distances");
    cfg.run.outage_distances = r.list<double>("outage_distances");
    r.finish();

    top.finish();
  } catch (const YAML::Exception& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }

  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

void ScenarioConfig::validate() const {
  array.validate();
  rf.link.validate();
  for (int k : rf.chain_counts)
    if (k < 1 || k > array.n_antennas) throw std::invalid_argument("rf.chain_counts entries must be in [1, n_antennas]");
  if (rf.chain_count < 1 || rf.chain_count > array.n_antennas)
    throw std::invalid_argument("rf.chain_count must be in [1, n_antennas]");
  if (!(rf.sector_halfwidth >= 0 && rf.sector_halfwidth < 1.4))
    throw std::invalid_argument("rf.sector_halfwidth_deg must be in [0, 80]");
  if (!(gps_position_std > 0)) throw std::invalid_argument("prior.gps_position_std must be positive");
  if (!(optical.wavelength > 0) || !(optical.visibility > 0))
    throw std::invalid_argument("optical wavelength and visibility must be positive");
  channel().validate();
  CoherenceParams::from_wavelength(optical.wavelength, policy.structure_constant, policy.link_distance,
                                   policy.transverse_wind)
      .validate();
  if (!(policy.rotate_time >= 0)) throw std::invalid_argument("policy.rotate_time must be non-negative");
  if (!(policy.visibility > 0)) throw std::invalid_argument("policy.visibility must be positive");
  if (policy.coherence_time && !(*policy.coherence_time > 0))
    throw std::invalid_argument("policy.coherence_time must be positive");
  if (policy.divergence && !(*policy.divergence > 0))
    throw std::invalid_argument("policy.divergence must be positive or 'auto'");
  if (run.trials < 1 || run.outage_trials < 1) throw std::invalid_argument("run trials must be >= 1");
  for (const auto* ds : {&run.estimator_distances, &run.outage_distances})
    for (std::size_t i = 0; i < ds->size(); ++i)
      if (!((*ds)[i] > 0) || (i > 0 && !((*ds)[i] > (*ds)[i - 1])))
        throw std::invalid_argument("run distances must be positive and increasing");
}

OpticalChannel ScenarioConfig::channel_at(double distance, double visibility) const {
  OpticalChannel ch;
  ch.attenuation = AttenuationParams::from_visibility(visibility, optical.wavelength, distance);
  ch.fading = optical.fading;
  ch.pointing.beam_divergence = optical.divergence_grid.front();
  ch.pointing.link_distance = distance;
  ch.pointing.jitter_std = optical.jitter_std;
  ch.pointing.estimation_std = 0.0;
  ch.pointing.receiver_radius = optical.receiver_radius;
  ch.budget = optical.budget;
  return ch;
}

OpticalChannel ScenarioConfig::channel() const {
  return channel_at(optical.link_distance, optical.visibility);
}

double ScenarioConfig::coherence_time() const {
  if (policy.coherence_time) return *policy.coherence_time;
  return fsoacq::coherence_time(CoherenceParams::from_wavelength(
      optical.wavelength, policy.structure_constant, policy.link_distance, policy.transverse_wind));
}

AcquisitionScenario ScenarioConfig::acquisition(double distance, double visibility) const {
  AcquisitionScenario sc;
  sc.array = array;
  sc.rf = rf.link;
  sc.chain_count = rf.chain_count;
  sc.gps_position_std = gps_position_std;
  sc.sector_halfwidth = rf.sector_halfwidth;
  sc.channel = channel_at(distance, visibility);
  sc.divergence = policy.divergence;
  sc.divergence_grid = optical.divergence_grid;
  sc.coherence_time = coherence_time();
  sc.rotate_time = policy.rotate_time;
  return sc;
}

}  // namespace fsoacq
