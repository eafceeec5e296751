#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "fsoacq/commands.hpp"
#include "fsoacq/report.hpp"

namespace {

void add_common(CLI::App* cmd, fsoacq::CommonOptions& c) {
  cmd->add_option("config", c.config, "scenario file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", c.output_dir, "output directory (overrides run.output_dir)");
  cmd->add_option("--trials", c.trials, "Monte Carlo trials (overrides run.trials and run.outage_trials)");
  cmd->add_option("--seed", c.seed, "master seed (overrides run.seed)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coarse-pointing simulator for hybrid RF/FSO UAV links"};
  app.set_version_flag("--version", fsoacq::kToolVersion);
  app.require_subcommand(1);

  fsoacq::CommonOptions est;
  auto* est_cmd = app.add_subcommand("estimator-sweep", "angle-estimation accuracy versus distance");
  add_common(est_cmd, est);

  fsoacq::OutageSweepOptions outage;
  auto* out_cmd = app.add_subcommand("outage-sweep", "outage probability versus beam divergence and distance");
  add_common(out_cmd, outage.common);
  out_cmd->add_option("--distance", outage.distance, "distances, e.g. 1,2,4,8 km")->expected(1, 2);
  out_cmd->add_option("--fading-model", outage.fading_model, "lognormal, gammagamma, none or both");
  out_cmd->add_option("--sigma-est", outage.sigma_est, "gps, proposed, both or a value in rad");
  out_cmd->add_option("--visibility", outage.visibility, "visibility in m (overrides optical.visibility)");
  out_cmd->add_option("--method", outage.method, "quadrature or montecarlo");

  fsoacq::PolicyOptions policy;
  auto* pol_cmd = app.add_subcommand("policy", "re-estimation versus single-estimation acquisition time");
  add_common(pol_cmd, policy.common);
  pol_cmd->add_option("--t0", policy.t0, "coherence time, e.g. 1ms");
  pol_cmd->add_option("--trot", policy.trot, "beam rotation time, e.g. 20ms");

  fsoacq::AcquireOptions acq;
  auto* acq_cmd = app.add_subcommand("acquire", "end-to-end coarse-pointing simulation");
  add_common(acq_cmd, acq.common);
  acq_cmd->add_option("--mode", acq.mode, "proposed, gps or both");
  acq_cmd->add_option("--policy", acq.policy, "re-estimate, single-estimate or both");
  acq_cmd->add_option("--t0", acq.t0, "coherence time, e.g. 1ms");
  acq_cmd->add_option("--trot", acq.trot, "beam rotation time, e.g. 20ms");
  acq_cmd->add_option("--traces", acq.traces, "write per-attempt traces for the first N trials");

  std::string validate_path;
  auto* val_cmd = app.add_subcommand("validate-config", "parse and check a scenario file");
  val_cmd->add_option("config", validate_path, "scenario file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*est_cmd) fsoacq::cmd_estimator_sweep(est, std::cout);
    if (*out_cmd) fsoacq::cmd_outage_sweep(outage, std::cout);
    if (*pol_cmd) fsoacq::cmd_policy(policy, std::cout);
    if (*acq_cmd) fsoacq::cmd_acquire(acq, std::cout);
    if (*val_cmd) fsoacq::cmd_validate_config(validate_path, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
