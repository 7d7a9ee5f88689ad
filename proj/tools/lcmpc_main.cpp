// Command-line front end: scenario simulation, phase portraits, validation
// suites, and THD analysis of logged signals.  Exit codes: 0 success,
// 1 check failure, 2 usage/config error.

#include "lcmpc/app.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Limit-cycle MPC harmonic compensation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", LCMPC_VERSION);

  lcmpc::SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run the configured scenario and emit logs, spectra, and a summary");
  simulate->add_option("--config", sim.config_path, "Scenario config file")->required();
  simulate->add_option("--out", sim.out_dir, "Output directory (default: out)");
  simulate->add_option("--mode", sim.mode, "Run only one mode")
      ->check(CLI::IsMember({"compensated", "uncompensated"}));
  simulate->add_option("--bootstrap", sim.bootstrap,
                       "Override first-period disturbance bootstrap")
      ->check(CLI::IsMember({"oracle", "zero"}));

  lcmpc::PortraitOptions por;
  CLI::App* portrait = app.add_subcommand(
      "phase-portrait", "Emit normal-form trajectories (or replay a simulation log)");
  portrait->add_option("--out", por.out_dir, "Output directory (default: out)");
  portrait->add_option("--kind", por.kind, "map (discrete) or hopf (continuous)")
      ->check(CLI::IsMember({"map", "hopf"}));
  portrait->add_option("--mu", por.mu, "Growth rate (map) / squared radius (hopf)");
  portrait->add_option("--alpha", por.alpha,
                       "Saturation (map, < 0) / intensifier (hopf, > 0)");
  portrait->add_option("--f-hz", por.f, "Cycle frequency in Hz (default 50)");
  portrait->add_option("--tau", por.tau, "Step/integration interval (default 2e-4)");
  portrait->add_option("--steps", por.steps, "Steps per trajectory (default 400)");
  portrait->add_option("--log", por.log_path,
                       "Replay (xt1, xt2) from a simulation log CSV");

  lcmpc::ValidateOptions val;
  CLI::App* validate =
      app.add_subcommand("validate", "Run self-check suites; exit 0 iff all pass");
  validate
      ->add_option("--suite", val.suite, "kernel|plant|optimizer|oracle-thd|all")
      ->check(CLI::IsMember({"kernel", "plant", "optimizer", "oracle-thd", "all"}));
  validate->add_option("--seed", val.seed, "Seed for randomized property checks");

  lcmpc::ThdOptions thd;
  CLI::App* thd_cmd =
      app.add_subcommand("thd", "Harmonic analysis of a logged signal CSV");
  thd_cmd->add_option("csv", thd.csv_path, "Log CSV with a t column")->required();
  thd_cmd->add_option("--signal", thd.signals,
                      "Signal column(s) to analyze (default: v_c i_l)");
  thd_cmd->add_option("--f-hz", thd.f, "Fundamental frequency in Hz (default 50)");
  double limit_value = 0.0;
  CLI::Option* limit_opt =
      thd_cmd->add_option("--limit", limit_value, "THD limit in percent; exceeding it fails");
  thd_cmd->add_option("--out", thd.out_dir, "Optional directory for thd_report.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lcmpc::kExitUsage;
  }

  if (limit_opt->count() > 0) thd.limit_percent = limit_value;

  try {
    if (simulate->parsed()) return lcmpc::cmd_simulate(sim, std::cout, std::cerr);
    if (portrait->parsed()) return lcmpc::cmd_phase_portrait(por, std::cout, std::cerr);
    if (validate->parsed()) return lcmpc::cmd_validate(val, std::cout, std::cerr);
    if (thd_cmd->parsed()) return lcmpc::cmd_thd(thd, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lcmpc::kExitUsage;
  }
  return lcmpc::kExitUsage;
}
