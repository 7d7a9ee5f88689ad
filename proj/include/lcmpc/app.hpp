#pragma once

// Command implementations behind the CLI front end.  Each command is a
// plain function over an options struct, returning the process exit code
// (0 success, 1 check failure, 2 usage/config error), so tests can drive
// them without spawning processes.  Every directory of emitted files gets
// a manifest.json naming the command, inputs, library version, and wall
// timings.

#include "csv_io.hpp"
#include "scenario.hpp"
#include "validate.hpp"

#include "json.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>

#ifndef LCMPC_VERSION
#define LCMPC_VERSION "0.0.0-unversioned"
#endif

namespace lcmpc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

class WallTimer {
 public:
  WallTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline void write_manifest(const std::string& out_dir, const std::string& command,
                           const nlohmann::json& inputs,
                           const nlohmann::json& timings_s) {
  nlohmann::json j;
  j["command"] = command;
  j["version"] = LCMPC_VERSION;
  j["out_dir"] = out_dir;
  j["inputs"] = inputs;
  j["timings_s"] = timings_s;
  write_file(out_dir + "/manifest.json", j.dump(2) + "\n");
}

inline std::string csv_text(const std::function<void(std::ostream&)>& body) {
  std::ostringstream s;
  body(s);
  return s.str();
}

}  // namespace detail

// ===== simulate ============================================================

struct SimulateOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::string mode;       ///< "", "compensated", "uncompensated" ("" = both)
  std::string bootstrap;  ///< "", "oracle", "zero"
};

inline int cmd_simulate(const SimulateOptions& opt, std::ostream& out,
                        std::ostream& err) {
  SimulationConfig base = [&] {
    try {
      return load_config_file(opt.config_path);
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string(e.what()) +
                               "\nusage: lcmpc simulate --config <file> [--out DIR]"
                               " [--mode compensated|uncompensated]"
                               " [--bootstrap oracle|zero]");
    }
  }();
  if (!opt.bootstrap.empty()) {
    if (opt.bootstrap == "oracle") base.bootstrap = BootstrapMode::Oracle;
    else if (opt.bootstrap == "zero") base.bootstrap = BootstrapMode::Zero;
    else throw std::runtime_error("--bootstrap must be oracle|zero");
  }
  const bool run_uncomp = opt.mode.empty() || opt.mode == "uncompensated";
  const bool run_comp = opt.mode.empty() || opt.mode == "compensated";
  if (!run_uncomp && !run_comp)
    throw std::runtime_error("--mode must be compensated|uncompensated");

  std::filesystem::create_directories(opt.out_dir);
  const auto path = [&](const char* name) { return opt.out_dir + "/" + name; };

  const OracleHarmonics oracle = phasor_oracle_harmonics(base.grid, base.disturbance);
  constexpr int kMaxOrder = 25;
  ThdReport report;
  nlohmann::json timings;
  bool solver_clean = true;

  struct ThdPair {
    double v_c = 0.0, i_l = 0.0;
    bool present = false;
  };
  ThdPair uncomp_thd, comp_thd;

  const auto analyze_log = [&](const SimulationLog& log, const SimulationConfig& cfg,
                               const std::string& prefix) {
    ThdPair pair;
    const auto one = [&](const char* sig, double SampleRecord::* field) {
      const std::vector<double> window = final_period_window(log, cfg, field);
      report.entries.push_back(
          analyze_signal(prefix + "_" + sig, window, cfg.grid.f, cfg.tau, kMaxOrder));
      return report.entries.back().thd_percent;
    };
    pair.v_c = one("v_c", &SampleRecord::v_c);
    pair.i_l = one("i_l", &SampleRecord::i_l);
    pair.present = true;
    return pair;
  };

  if (run_uncomp) {
    SimulationConfig cfg = base;
    cfg.mode = RunMode::Uncompensated;
    detail::WallTimer timer;
    const SimulationLog log = run_closed_loop(cfg);
    timings["uncompensated"] = timer.seconds();
    write_file(path("uncompensated_log.csv"),
               detail::csv_text([&](std::ostream& s) { write_sample_log_csv(s, log); }));
    uncomp_thd = analyze_log(log, cfg, "uncompensated");
  }

  if (run_comp) {
    SimulationConfig cfg = base;
    cfg.mode = RunMode::Compensated;
    detail::WallTimer timer;
    const SimulationLog log = run_closed_loop(cfg);
    timings["compensated"] = timer.seconds();
    write_file(path("compensated_log.csv"),
               detail::csv_text([&](std::ostream& s) { write_sample_log_csv(s, log); }));
    write_file(path("compensated_periods.csv"),
               detail::csv_text([&](std::ostream& s) { write_period_log_csv(s, log); }));
    comp_thd = analyze_log(log, cfg, "compensated");
    for (const PeriodRecord& p : log.periods) solver_clean = solver_clean && p.solver_ok;
  }

  write_file(path("thd_report.csv"), detail::csv_text([&](std::ostream& s) {
               write_thd_report_csv(s, report, kMaxOrder);
             }));
  write_file(path("effective_config.cfg"), serialize_config(base));

  std::ostringstream summary;
  summary << std::fixed << std::setprecision(2);
  summary << "signal        phasor oracle";
  if (run_uncomp) summary << "  uncompensated";
  if (run_comp) summary << "  compensated";
  summary << "\n";
  const auto row = [&](const char* name, double oracle_thd, double u, double c) {
    summary << std::left << std::setw(14) << name << std::right << std::setw(12)
            << oracle_thd << "%";
    if (run_uncomp) summary << std::setw(14) << u << "%";
    if (run_comp) summary << std::setw(12) << c << "%";
    summary << "\n";
  };
  row("THD(v_c)", oracle.thd_v, uncomp_thd.v_c, comp_thd.v_c);
  row("THD(i_l)", oracle.thd_i, uncomp_thd.i_l, comp_thd.i_l);
  if (!solver_clean) summary << "warning: solver fell back in at least one period\n";
  write_file(path("summary.txt"), summary.str());
  out << summary.str();

  nlohmann::json inputs;
  inputs["config"] = opt.config_path;
  inputs["mode"] = opt.mode.empty() ? "both" : opt.mode;
  inputs["bootstrap"] = base.bootstrap == BootstrapMode::Oracle ? "oracle" : "zero";
  detail::write_manifest(opt.out_dir, "simulate", inputs, timings);

  if (!solver_clean) {
    err << "solver fell back in at least one period\n";
    return kExitCheckFailure;
  }
  return kExitOk;
}

// ===== phase-portrait ======================================================

struct PortraitOptions {
  std::string out_dir = "out";
  std::string kind = "map";  ///< "map" | "hopf"
  double mu = 0.05;          ///< map: growth rate; hopf: squared cycle radius
  double alpha = -0.05;      ///< saturating cubic coefficient, negative for both kinds
  double f = 50.0;
  double tau = 2e-4;
  int steps = 400;
  std::string log_path;  ///< replay (xt1, xt2) from a simulation log instead
};

inline int cmd_phase_portrait(const PortraitOptions& opt, std::ostream& out,
                              std::ostream& err) {
  (void)err;
  std::filesystem::create_directories(opt.out_dir);
  std::vector<MapTrajectory> trajectories;
  nlohmann::json inputs;
  detail::WallTimer timer;

  if (!opt.log_path.empty()) {
    const CsvTable table = read_csv_file(opt.log_path);
    const std::vector<double>& x1 = table.column("xt1");
    const std::vector<double>& x2 = table.column("xt2");
    MapTrajectory traj;
    traj.states.reserve(x1.size());
    for (std::size_t i = 0; i < x1.size(); ++i) traj.states.emplace_back(x1[i], x2[i]);
    trajectories.push_back(std::move(traj));
    inputs["log"] = opt.log_path;
  } else if (opt.kind == "map") {
    const LimitCycleParams p(opt.mu, opt.alpha, 2.0 * M_PI * opt.f, opt.tau);
    for (const Vec2& seed : portrait_seeds(limit_cycle_radius(p)))
      trajectories.push_back(iterate_trajectory(seed, p, opt.steps));
    inputs["mu"] = opt.mu;
    inputs["alpha"] = opt.alpha;
  } else if (opt.kind == "hopf") {
    // --alpha keeps the saturating-negative convention at the CLI surface;
    // the continuous normal form takes the cubic coefficient's magnitude.
    const HopfParams p(-opt.alpha, opt.mu, 2.0 * M_PI * opt.f);
    for (const Vec2& seed : portrait_seeds(p.cycle_radius())) {
      MapTrajectory traj;
      traj.states = integrate_hopf(seed, p, opt.tau, opt.steps);
      trajectories.push_back(std::move(traj));
    }
    inputs["mu_c"] = opt.mu;
    inputs["alpha_c"] = -opt.alpha;
  } else {
    throw std::runtime_error("--kind must be map|hopf");
  }

  const std::string path = opt.out_dir + "/portrait.csv";
  write_file(path, detail::csv_text([&](std::ostream& s) {
               write_portrait_csv(s, trajectories);
             }));
  inputs["kind"] = opt.log_path.empty() ? opt.kind : "log-replay";
  inputs["steps"] = opt.steps;
  nlohmann::json timings;
  timings["total"] = timer.seconds();
  detail::write_manifest(opt.out_dir, "phase-portrait", inputs, timings);
  out << "wrote " << trajectories.size() << " trajectories to " << path << "\n";
  return kExitOk;
}

// ===== validate ============================================================

struct ValidateOptions {
  std::string suite = "all";
  unsigned seed = 20260822u;
};

inline int cmd_validate(const ValidateOptions& opt, std::ostream& out,
                        std::ostream& err) {
  (void)err;
  const std::vector<CheckResult> checks = run_validation_suite(opt.suite, opt.seed);
  bool all = true;
  for (const CheckResult& c : checks) {
    out << (c.pass ? "PASS" : "FAIL") << "  " << c.name;
    if (!c.detail.empty()) out << "  (" << c.detail << ")";
    out << "\n";
    all = all && c.pass;
  }
  out << (all ? "all checks passed" : "checks FAILED") << " (" << checks.size()
      << " run, suite " << opt.suite << ", seed " << opt.seed << ")\n";
  return all ? kExitOk : kExitCheckFailure;
}

// ===== thd =================================================================

struct ThdOptions {
  std::string csv_path;
  std::vector<std::string> signals;  ///< empty = {v_c, i_l}
  double f = 50.0;
  std::optional<double> limit_percent;
  std::string out_dir;  ///< optional; when set, writes thd_report.csv there
};

inline int cmd_thd(const ThdOptions& opt, std::ostream& out, std::ostream& err) {
  (void)err;
  const CsvTable table = read_csv_file(opt.csv_path);
  const std::vector<double>& t = table.column("t");
  if (t.size() < 2) throw std::runtime_error("CSV has fewer than 2 rows");
  const double tau = t[1] - t[0];
  if (!(tau > 0.0)) throw std::runtime_error("time column is not increasing");
  const double per_period = 1.0 / (opt.f * tau);
  if (std::abs(per_period - std::round(per_period)) > 1e-6)
    throw std::runtime_error("sample interval does not divide the fundamental period");
  const int spp = static_cast<int>(std::lround(per_period));

  // Logs carry a closing sample at the same phase as the period start; when
  // the trailing row index is a whole number of periods, analyze the last
  // full period before it so the window matches the simulator's convention.
  const std::size_t rows = table.rows();
  std::size_t end = rows;
  if (table.has_column("k")) {
    const long last_k = std::lround(table.column("k").back());
    if (last_k % spp == 0 && rows > static_cast<std::size_t>(spp)) end = rows - 1;
  }
  if (end < static_cast<std::size_t>(spp))
    throw std::runtime_error("CSV shorter than one fundamental period");
  const std::size_t start = end - static_cast<std::size_t>(spp);

  std::vector<std::string> signals = opt.signals;
  if (signals.empty()) signals = {"v_c", "i_l"};

  const int max_order = std::max(1, static_cast<int>(std::floor(0.5 / (opt.f * tau))) - 1);
  const int report_order = std::min(25, max_order);
  ThdReport report;
  for (const std::string& name : signals) {
    const std::vector<double>& col = table.column(name);
    const std::vector<double> window(col.begin() + static_cast<std::ptrdiff_t>(start),
                                     col.begin() + static_cast<std::ptrdiff_t>(end));
    report.entries.push_back(analyze_signal(name, window, opt.f, tau, report_order,
                                            opt.limit_percent,
                                            static_cast<int>(start)));
  }

  for (const SignalThd& e : report.entries) {
    out << e.signal << ": THD " << format_g17(e.thd_percent) << "%";
    if (e.limit_percent)
      out << " (limit " << format_g17(*e.limit_percent) << "%: "
          << (e.pass() ? "PASS" : "FAIL") << ")";
    out << "\n  a1.." << report_order << ":";
    for (int n = 1; n <= report_order; ++n)
      out << ' ' << format_g17(e.spectrum.amplitude[static_cast<std::size_t>(n)]);
    out << "\n";
  }

  if (!opt.out_dir.empty()) {
    std::filesystem::create_directories(opt.out_dir);
    write_file(opt.out_dir + "/thd_report.csv", detail::csv_text([&](std::ostream& s) {
                 write_thd_report_csv(s, report, report_order);
               }));
    nlohmann::json inputs;
    inputs["csv"] = opt.csv_path;
    inputs["f_Hz"] = opt.f;
    if (opt.limit_percent) inputs["limit_percent"] = *opt.limit_percent;
    detail::write_manifest(opt.out_dir, "thd", inputs, nlohmann::json::object());
  }

  return report.all_pass() ? kExitOk : kExitCheckFailure;
}

}  // namespace lcmpc
