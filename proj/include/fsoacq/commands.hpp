#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fsoacq {

/// Parses "20ms", "0.02 s", "150us" or a bare number of seconds.
double parse_time(const std::string& text);

/// Parses distance tokens such as {"1,2,4,8", "km"}, {"1km,2000m"} or
/// {"500,1000"} (bare numbers are meters). A trailing unit token applies to
/// every bare number before it.
std::vector<double> parse_distances(const std::vector<std::string>& tokens);

struct CommonOptions {
  std::string config;
  std::optional<std::string> output_dir;
  std::optional<std::int64_t> trials;
  std::optional<std::uint64_t> seed;
};

struct OutageSweepOptions {
  CommonOptions common;
  std::vector<std::string> distance;  // raw tokens; empty = run.outage_distances
  std::string fading_model;           // "", lognormal, gammagamma, none, both
  std::string sigma_est = "both";     // gps, proposed, both or a value in rad
  std::optional<double> visibility;   // m
  std::string method = "quadrature";  // or montecarlo
};

struct PolicyOptions {
  CommonOptions common;
  std::optional<std::string> t0;
  std::optional<std::string> trot;
};

struct AcquireOptions {
  CommonOptions common;
  std::string mode = "both";    // proposed, gps, both
  std::string policy = "both";  // re-estimate, single-estimate, both
  std::optional<std::string> t0;
  std::optional<std::string> trot;
  std::int64_t traces = 0;
};

/// Each command writes CSV, SVG and a manifest into the output directory and a
/// short report to out. Errors are thrown; the CLI maps them to exit status 1.
void cmd_estimator_sweep(const CommonOptions& opt, std::ostream& out);
void cmd_outage_sweep(const OutageSweepOptions& opt, std::ostream& out);
void cmd_policy(const PolicyOptions& opt, std::ostream& out);
void cmd_acquire(const AcquireOptions& opt, std::ostream& out);
void cmd_validate_config(const std::string& config, std::ostream& out);

}  // namespace fsoacq
