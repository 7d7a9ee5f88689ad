#pragma once

// Deterministic closed-loop driver.  Builds the grid model, transforms it
// to normal-form coordinates, discretizes by ZOH, and steps the discrete
// plant sample by sample.  In compensated mode the controller re-plans at
// every fundamental-period boundary from the measured state and the
// measured previous period's disturbance (period 1 uses the configured
// bootstrap); the resulting one-period plan is applied open-loop.
//
// The log carries every sample in both physical outputs (v_c, i_l) and
// normal-form coordinates, plus per-period optimizer diagnostics.  All
// signal content is deterministic; only the per-period wall-clock timing
// field varies between runs.

#include "controller.hpp"
#include "grid_model.hpp"

#include <chrono>
#include <optional>

namespace lcmpc {

enum class RunMode { Compensated, Uncompensated };
enum class BootstrapMode { Oracle, Zero };
enum class InitialStateMode { SteadyState, Zero };

struct SimulationConfig {
  GridCircuitParams grid;
  std::vector<HarmonicComponent> disturbance;
  LimitCycleParams lc;
  int hp;
  int h;
  double tau;
  double total_time;
  RunMode mode;
  BootstrapMode bootstrap;
  InitialStateMode initial_state;
  OptimizerSettings optimizer;

  SimulationConfig(GridCircuitParams grid_, std::vector<HarmonicComponent> disturbance_,
                   double mu, double alpha, int hp_, int h_, double tau_,
                   double total_time_, RunMode mode_ = RunMode::Compensated,
                   BootstrapMode bootstrap_ = BootstrapMode::Oracle,
                   InitialStateMode initial_state_ = InitialStateMode::SteadyState,
                   OptimizerSettings optimizer_ = OptimizerSettings{})
      : grid(grid_), disturbance(std::move(disturbance_)),
        lc(mu, alpha, grid_.omega(), tau_), hp(hp_), h(h_), tau(tau_),
        total_time(total_time_), mode(mode_), bootstrap(bootstrap_),
        initial_state(initial_state_), optimizer(optimizer_) {
    grid.validate();
    for (const HarmonicComponent& c : disturbance) c.validate();
    const double samples = total_time / tau;
    if (!(total_time > 0.0) || std::abs(samples - std::round(samples)) > 1e-9)
      throw std::invalid_argument("SimulationConfig: total_time must be a multiple of tau");
    const double per_period = 1.0 / (grid.f * tau);
    if (std::abs(per_period - std::round(per_period)) > 1e-9)
      throw std::invalid_argument(
          "SimulationConfig: a fundamental period must span an integer sample count");
    if (total_samples() < 2 * samples_per_period())
      throw std::invalid_argument(
          "SimulationConfig: total_time must cover at least 2 fundamental periods");
    if (mode == RunMode::Compensated && hp % samples_per_period() != 0)
      throw std::invalid_argument(
          "SimulationConfig: Hp must be an integer multiple of the period length");
  }

  int samples_per_period() const {
    return static_cast<int>(std::lround(1.0 / (grid.f * tau)));
  }
  long total_samples() const { return std::lround(total_time / tau); }
};

struct SampleRecord {
  long k = 0;
  double t = 0.0;
  double v_c = 0.0;
  double i_l = 0.0;
  double i_c = 0.0;
  double i_d = 0.0;
  double v_s = 0.0;
  double xt1 = 0.0;
  double xt2 = 0.0;
};

struct PeriodRecord {
  int period = 0;  ///< 1-based fundamental period index
  double objective = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
  bool solver_ok = true;
};

struct SimulationLog {
  std::vector<SampleRecord> samples;  ///< total_samples + 1 records
  std::vector<PeriodRecord> periods;  ///< one per solve (compensated runs)
};

namespace detail {

/// Everything derived from the circuit: transformed continuous and
/// discrete models plus the scaling.
struct TransformedPlant {
  NormalFormScaling scaling;
  ContinuousStateSpace continuous;
  DiscreteStateSpace discrete;
};

inline TransformedPlant make_transformed_plant(const SimulationConfig& cfg) {
  const ContinuousStateSpace css = build_grid_state_space(cfg.grid);
  const NormalFormScaling scaling = compute_normal_form_scaling(cfg.grid);
  ContinuousStateSpace tcss = transform_to_normal_form(css, scaling);
  DiscreteStateSpace dss = zoh_discretize(tcss, cfg.tau);
  return TransformedPlant{scaling, std::move(tcss), std::move(dss)};
}

inline Vec2 initial_normal_form_state(const SimulationConfig& cfg,
                                      const NormalFormScaling& scaling) {
  if (cfg.initial_state == InitialStateMode::Zero) return Vec2::Zero();
  return scaling.M.inverse() * undisturbed_steady_state(cfg.grid);
}

inline SampleRecord make_record(const SimulationConfig& cfg,
                                const DiscreteStateSpace& plant, long k,
                                const Vec2& x, double u) {
  const DisturbanceSample dist =
      synthesize_disturbance(cfg.disturbance, cfg.grid.vs_amplitude, cfg.grid.f, k, cfg.tau);
  const VecX y = plant.C * x;
  SampleRecord rec;
  rec.k = k;
  rec.t = k * cfg.tau;
  rec.v_c = y(0);
  rec.i_l = y(1);
  rec.i_c = u;
  rec.i_d = dist.i_d;
  rec.v_s = dist.v_s;
  rec.xt1 = x(0);
  rec.xt2 = x(1);
  return rec;
}

}  // namespace detail

/// Closed-loop (or open-loop reference) simulation on the ZOH-discretized
/// transformed plant.
inline SimulationLog run_closed_loop(const SimulationConfig& cfg) {
  const detail::TransformedPlant plant = detail::make_transformed_plant(cfg);
  const long n = cfg.total_samples();
  const int spp = cfg.samples_per_period();
  const bool compensated = cfg.mode == RunMode::Compensated;

  std::optional<LcmpcController> controller;
  if (compensated)
    controller.emplace(LcmpcConfig(cfg.lc, cfg.hp, cfg.h, plant.discrete, spp),
                       cfg.optimizer);

  SimulationLog log;
  log.samples.reserve(static_cast<std::size_t>(n) + 1);

  Vec2 x = detail::initial_normal_form_state(cfg, plant.scaling);
  VecX u_plan = VecX::Zero(spp);
  VecX warm;
  bool have_warm = false;

  for (long k = 0; k < n; ++k) {
    if (compensated && k % spp == 0) {
      VecX v_pred;
      if (k == 0) {
        v_pred = VecX::Zero(2 * cfg.hp);
        if (cfg.bootstrap == BootstrapMode::Oracle) {
          for (int i = 0; i < cfg.hp; ++i) {
            const DisturbanceSample d = synthesize_disturbance(
                cfg.disturbance, cfg.grid.vs_amplitude, cfg.grid.f, k + i, cfg.tau);
            v_pred(2 * i) = d.i_d;
            v_pred(2 * i + 1) = d.v_s;
          }
        }
      } else {
        VecX prev(2 * spp);
        for (int i = 0; i < spp; ++i) {
          const SampleRecord& rec = log.samples[static_cast<std::size_t>(k - spp + i)];
          prev(2 * i) = rec.i_d;
          prev(2 * i + 1) = rec.v_s;
        }
        v_pred = predict_disturbance(prev, 2, cfg.hp, spp);
      }

      const auto t0 = std::chrono::steady_clock::now();
      const ControlPlan plan =
          controller->solve_period(x, v_pred, have_warm ? &warm : nullptr);
      const auto t1 = std::chrono::steady_clock::now();

      PeriodRecord pr;
      pr.period = static_cast<int>(k / spp) + 1;
      pr.objective = plan.cost_trace.f_star;
      pr.iterations = plan.cost_trace.iterations;
      pr.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      pr.solver_ok = !plan.fell_back;
      log.periods.push_back(pr);

      u_plan = plan.u_star;
      if (!plan.fell_back) {
        warm = plan.p_star;
        have_warm = true;
      }
    }

    const double u = compensated ? u_plan(k % spp) : 0.0;
    log.samples.push_back(detail::make_record(cfg, plant.discrete, k, x, u));

    const SampleRecord& rec = log.samples.back();
    x = plant.discrete.A * x + plant.discrete.B * VecX::Constant(1, u) +
        plant.discrete.F * Vec2(rec.i_d, rec.v_s);
  }

  // Closing record: state after the last step, inputs by periodic continuation.
  const double u_n = compensated ? u_plan(n % spp) : 0.0;
  log.samples.push_back(detail::make_record(cfg, plant.discrete, n, x, u_n));
  return log;
}

/// Continuous-time cross-check: integrates the transformed continuous model
/// with RK4 at tau/substeps, inputs held ZOH (replayed from `applied` when
/// given, otherwise zero as in uncompensated mode).  Samples on the tau grid.
inline SimulationLog run_reference_integration(const SimulationConfig& cfg, int substeps,
                                               const std::vector<double>& applied) {
  if (substeps < 10)
    throw std::invalid_argument("run_reference_integration: substeps must be >= 10");
  const detail::TransformedPlant plant = detail::make_transformed_plant(cfg);
  const long n = cfg.total_samples();
  if (!applied.empty() && static_cast<long>(applied.size()) < n)
    throw std::invalid_argument("run_reference_integration: input sequence too short");

  SimulationLog log;
  log.samples.reserve(static_cast<std::size_t>(n) + 1);
  Vec2 x = detail::initial_normal_form_state(cfg, plant.scaling);

  for (long k = 0; k < n; ++k) {
    const double u = applied.empty() ? 0.0 : applied[static_cast<std::size_t>(k)];
    log.samples.push_back(detail::make_record(cfg, plant.discrete, k, x, u));
    const SampleRecord& rec = log.samples.back();
    x = rk4_zoh_sample(plant.continuous, x, VecX::Constant(1, u),
                       Vec2(rec.i_d, rec.v_s), cfg.tau, substeps);
  }
  const double u_n = applied.empty() ? 0.0 : applied[static_cast<std::size_t>(n - 1)];
  log.samples.push_back(detail::make_record(cfg, plant.discrete, n, x, u_n));
  return log;
}

/// Reference integration of the uncompensated scenario (i_c = 0); for a
/// compensated config, runs the closed loop first and replays its inputs.
inline SimulationLog run_reference_integration(const SimulationConfig& cfg,
                                               int substeps) {
  std::vector<double> applied;
  if (cfg.mode == RunMode::Compensated) {
    const SimulationLog closed = run_closed_loop(cfg);
    applied.reserve(closed.samples.size());
    for (const SampleRecord& rec : closed.samples) applied.push_back(rec.i_c);
  }
  return run_reference_integration(cfg, substeps, applied);
}

/// Samples of one logged column over the final full fundamental period,
/// [N - samples_per_period, N - 1].
inline std::vector<double> final_period_window(const SimulationLog& log,
                                               const SimulationConfig& cfg,
                                               double SampleRecord::* field) {
  const int spp = cfg.samples_per_period();
  const long n = cfg.total_samples();
  if (static_cast<long>(log.samples.size()) != n + 1)
    throw std::invalid_argument("final_period_window: log/config sample count mismatch");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(spp));
  for (long k = n - spp; k < n; ++k)
    out.push_back(log.samples[static_cast<std::size_t>(k)].*field);
  return out;
}

}  // namespace lcmpc
