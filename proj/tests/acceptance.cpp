// Acceptance gate: ten checks covering the full delivery, one verdict line
// each.  Exit code 0 iff every check passes.  Each check owns its random
// seed so the gate is deterministic run to run.

#include <lcmpc/lcmpc.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace {

using namespace lcmpc;

constexpr unsigned kSeed = 20260822u;

struct Result {
  bool pass = false;
  std::string detail;
};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

LimitCycleParams bench_lc() {
  return LimitCycleParams(1e-2, -1e-2, 2.0 * M_PI * 50.0, 2e-4);
}

double final_thd(const SimulationLog& log, const SimulationConfig& cfg,
                 double SampleRecord::* field) {
  return thd(harmonic_spectrum(final_period_window(log, cfg, field), cfg.grid.f,
                               cfg.tau, 25));
}

// The compensated benchmark run is shared between checks 2 and 3.
std::optional<SimulationLog> g_compensated_log;
std::optional<double> g_compensated_wall;

const SimulationLog& compensated_log() {
  if (!g_compensated_log) {
    const auto t0 = std::chrono::steady_clock::now();
    g_compensated_log = run_closed_loop(default_scenario(RunMode::Compensated));
    g_compensated_wall = seconds_since(t0);
  }
  return *g_compensated_log;
}

// ===== 1: uncompensated distortion reproduction ============================

Result check_uncompensated_thd() {
  const SimulationConfig cfg = default_scenario(RunMode::Uncompensated);
  const auto t0 = std::chrono::steady_clock::now();
  const SimulationLog log = run_closed_loop(cfg);
  const double thd_i = final_thd(log, cfg, &SampleRecord::i_l);
  const double thd_v = final_thd(log, cfg, &SampleRecord::v_c);
  const double wall = seconds_since(t0);
  const OracleHarmonics oracle = phasor_oracle_harmonics(cfg.grid, cfg.disturbance);

  Result r;
  r.pass = std::abs(thd_i - 59.8) <= 1.0 && std::abs(thd_v - 15.8) <= 1.0 &&
           std::abs(thd_i - oracle.thd_i) <= 0.5 &&
           std::abs(thd_v - oracle.thd_v) <= 0.5 && wall < 5.0;
  r.detail = fmt("i_l %.2f%% (reference 59.8, oracle %.2f), v_c %.2f%% "
                 "(reference 15.8, oracle %.2f), %.2f s",
                 thd_i, oracle.thd_i, thd_v, oracle.thd_v, wall);
  return r;
}

// ===== 2: compensated distortion under one percent =========================

Result check_compensated_thd() {
  const SimulationConfig cfg = default_scenario(RunMode::Compensated);
  const SimulationLog& log = compensated_log();
  const double thd_i = final_thd(log, cfg, &SampleRecord::i_l);
  const double thd_v = final_thd(log, cfg, &SampleRecord::v_c);
  const double per_period = *g_compensated_wall / static_cast<double>(log.periods.size());
  bool solver_ok = true;
  for (const PeriodRecord& p : log.periods) solver_ok = solver_ok && p.solver_ok;

  Result r;
  r.pass = thd_i < 1.0 && thd_v < 1.0 && per_period < 60.0 && solver_ok;
  r.detail = fmt("i_l %.3f%%, v_c %.3f%% (both < 1%%), %.2f s/period", thd_i, thd_v,
                 per_period);
  return r;
}

// ===== 3: unit-cycle amplitude and frequency ===============================

Result check_amplitude_frequency() {
  const SimulationConfig cfg = default_scenario(RunMode::Compensated);
  const SimulationLog& log = compensated_log();
  const AmplitudeFrequency a1 = amplitude_frequency_check(
      final_period_window(log, cfg, &SampleRecord::xt1), cfg.grid.f, cfg.tau);
  const AmplitudeFrequency a2 = amplitude_frequency_check(
      final_period_window(log, cfg, &SampleRecord::xt2), cfg.grid.f, cfg.tau);

  Result r;
  r.pass = std::abs(a1.amplitude - 1.0) <= 0.05 && a1.dominant_freq == 50.0 &&
           std::abs(a2.amplitude - 1.0) <= 0.05 && a2.dominant_freq == 50.0;
  r.detail = fmt("amplitudes %.4f / %.4f (1.00 +- 0.05), dominant %g / %g Hz",
                 a1.amplitude, a2.amplitude, a1.dominant_freq, a2.dominant_freq);
  return r;
}

// ===== 4: normal-form scaling amplitudes ===================================

Result check_scaling() {
  const NormalFormScaling s = compute_normal_form_scaling(GridCircuitParams{});
  Result r;
  r.pass = s.rho_v >= 1.10 && s.rho_v <= 1.12 && s.rho_i >= 3.48 && s.rho_i <= 3.50;
  r.detail = fmt("rho_v %.5f in [1.10, 1.12], rho_i %.5f in [3.48, 3.50]", s.rho_v,
                 s.rho_i);
  return r;
}

// ===== 5: kernel cost oracle equivalence ===================================

Result check_cost_oracle() {
  const LimitCycleParams lc = bench_lc();
  std::mt19937_64 rng(kSeed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  for (const int hp : {2, 3, 5, 17, 200}) {
    const KernelCostMatrices m = build_cost_matrices(lc, hp);
    for (int rep = 0; rep < 100; ++rep) {
      VecX x(2 * hp);
      for (int i = 0; i < x.size(); ++i) x(i) = gauss(rng);
      const double direct = cost_direct(x, lc).total;
      const double vectorized = cost_vectorized(x, m, lc).total;
      worst = std::max(worst,
                       std::abs(vectorized - direct) / std::max(1.0, std::abs(direct)));
    }
  }
  Result r;
  r.pass = worst <= 1e-10;
  r.detail = fmt("worst relative gap %.2e (tol 1e-10, Hp in {2,3,5,17,200} x 100)",
                 worst);
  return r;
}

// ===== 6: zero-cost certificate ============================================

Result check_zero_cost() {
  const LimitCycleParams lc = bench_lc();
  const double rho = limit_cycle_radius(lc);
  double worst_clean = 0.0;
  double min_perturbed = std::numeric_limits<double>::infinity();
  bool pass = true;
  for (const int hp : {2, 5, 50, 200}) {
    for (int a = 0; a < 8; ++a) {
      const double theta = 2.0 * M_PI * a / 8.0;
      VecX x(2 * hp);
      Vec2 state(rho * std::cos(theta), rho * std::sin(theta));
      x.segment(0, 2) = state;
      for (int j = 1; j < hp; ++j) {
        state = ns_map_step(state, lc);
        x.segment(2 * j, 2) = state;
      }
      const double clean = cost_direct(x, lc).total;
      worst_clean = std::max(worst_clean, clean / hp);
      pass = pass && clean < 1e-18 * hp;

      VecX xp = x;
      xp(3) += 1e-3;
      const double perturbed = cost_direct(xp, lc).total;
      min_perturbed = std::min(min_perturbed, perturbed);
      pass = pass && perturbed > 0.0;
    }
  }
  Result r;
  r.pass = pass;
  r.detail = fmt("max on-cycle cost %.2e * Hp (tol 1e-18 * Hp), min perturbed %.2e",
                 worst_clean, min_perturbed);
  return r;
}

// ===== 7: analytic gradient consistency ====================================

Result check_gradient() {
  const LimitCycleParams lc = bench_lc();
  std::mt19937_64 rng(kSeed + 7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  for (const int hp : {4, 20}) {
    for (int rep = 0; rep < 100; ++rep) {
      VecX x(2 * hp);
      for (int i = 0; i < x.size(); ++i) x(i) = gauss(rng);
      const VecX ga = cost_gradient(x, lc, GradientMode::Analytic);
      const VecX gf = cost_gradient(x, lc, GradientMode::FiniteDifference);
      const double scale = std::max(1.0, gf.lpNorm<Eigen::Infinity>());
      worst = std::max(worst, (ga - gf).lpNorm<Eigen::Infinity>() / scale);
    }
  }
  Result r;
  r.pass = worst <= 1e-5;
  r.detail = fmt("worst relative inf-norm gap %.2e (tol 1e-5, Hp in {4,20} x 100)",
                 worst);
  return r;
}

// ===== 8: discretization fidelity ==========================================

Result check_discretization() {
  // Eigenvalue mapping on the benchmark circuit.
  const ContinuousStateSpace css = build_grid_state_space(GridCircuitParams{});
  const DiscreteStateSpace dss = zoh_discretize(css, 2e-4);
  Eigen::ComplexEigenSolver<MatX> ec(css.Ac), ed(dss.A);
  std::vector<std::complex<double>> mapped, direct;
  for (int i = 0; i < 2; ++i) {
    mapped.push_back(std::exp(ec.eigenvalues()(i) * 2e-4));
    direct.push_back(ed.eigenvalues()(i));
  }
  const auto by_value = [](const std::complex<double>& a, const std::complex<double>& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  };
  std::sort(mapped.begin(), mapped.end(), by_value);
  std::sort(direct.begin(), direct.end(), by_value);
  double eig_err = 0.0;
  for (int i = 0; i < 2; ++i)
    eig_err = std::max(eig_err, std::abs(direct[i] - mapped[i]) / std::abs(mapped[i]));

  // Lifted prediction vs per-sample recursion over 200 random stable systems.
  std::mt19937_64 rng(kSeed + 8);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int horizons[] = {1, 2, 7, 50};
  double lift_err = 0.0;
  for (int inst = 0; inst < 200; ++inst) {
    const int n = 1 + inst % 3;
    const int m = 1 + inst % 2;
    const int hp = horizons[inst % 4];
    MatX ac(n, n), bc(n, m), fc(n, 1);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) ac(i, j) = gauss(rng);
      for (int j = 0; j < m; ++j) bc(i, j) = gauss(rng);
      fc(i, 0) = gauss(rng);
    }
    for (int i = 0; i < n; ++i) ac(i, i) -= ac.row(i).cwiseAbs().sum() + 0.5;
    const DiscreteStateSpace inst_dss =
        zoh_discretize(ContinuousStateSpace(ac, bc, fc, MatX::Identity(n, n)), 0.05);
    const PredictionOperator op = build_prediction_operator(inst_dss, hp);
    VecX x0(n), u(m * hp), v(hp);
    for (int i = 0; i < n; ++i) x0(i) = gauss(rng);
    for (int i = 0; i < u.size(); ++i) u(i) = gauss(rng);
    for (int i = 0; i < v.size(); ++i) v(i) = gauss(rng);
    const VecX lifted = predict_states(op, x0, u, v);
    VecX x = x0;
    for (int j = 0; j < hp; ++j) {
      x = inst_dss.step(x, u.segment(j * m, m), v.segment(j, 1));
      const double scale = std::max(1.0, x.lpNorm<Eigen::Infinity>());
      lift_err = std::max(lift_err,
                          (lifted.segment(j * n, n) - x).lpNorm<Eigen::Infinity>() / scale);
    }
  }

  // Discrete benchmark trajectory vs tau/100 integration.
  const SimulationConfig cfg = default_scenario(RunMode::Uncompensated);
  const SimulationLog a = run_closed_loop(cfg);
  const SimulationLog b = run_reference_integration(cfg, 100);
  double zoh_err = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const double scale =
        std::max({1.0, std::abs(a.samples[i].xt1), std::abs(a.samples[i].xt2)});
    zoh_err = std::max(zoh_err, std::abs(a.samples[i].xt1 - b.samples[i].xt1) / scale);
    zoh_err = std::max(zoh_err, std::abs(a.samples[i].xt2 - b.samples[i].xt2) / scale);
  }

  Result r;
  r.pass = eig_err <= 1e-10 && lift_err <= 1e-12 && zoh_err <= 1e-6;
  r.detail = fmt("eig map %.2e (tol 1e-10), lifted %.2e (tol 1e-12, 200 systems), "
                 "vs tau/100 integration %.2e (tol 1e-6)",
                 eig_err, lift_err, zoh_err);
  return r;
}

// ===== 9: invariant-circle map properties ==================================

Result check_map_properties() {
  const LimitCycleParams p = bench_lc();
  const double rho = limit_cycle_radius(p);
  const CriticalRadii cr = critical_radii(p);

  const bool fixed_points = ns_radius_step(0.0, p) == 0.0 &&
                            std::abs(ns_radius_step(rho, p) - rho) <= 1e-13 * rho;
  const double at_rho0 = std::abs(ns_radius_step(cr.rho0, p));
  const bool rho0_to_origin =
      at_rho0 <= 1e-13 * cr.rho0 &&
      classify_initial_radius(cr.rho0, p) == RadiusClassification::MapsToOrigin;
  const MapTrajectory runaway = iterate_trajectory(Vec2(cr.rho_inf + 0.5, 0.0), p, 200);
  const bool divergent_flagged =
      runaway.overflow &&
      classify_initial_radius(cr.rho_inf + 0.5, p) == RadiusClassification::Divergent;

  std::mt19937_64 rng(kSeed + 9);
  std::uniform_real_distribution<double> radius(0.0, 0.99 * cr.rho0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  double norm_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double r0 = radius(rng);
    const double th = angle(rng);
    const Vec2 x(r0 * std::cos(th), r0 * std::sin(th));
    const double mapped = ns_map_step(x, p).norm();
    const double radial = std::abs(ns_radius_step(x.norm(), p));
    norm_err = std::max(norm_err,
                        std::abs(mapped - radial) / (1.0 + r0 * r0 * r0));
  }

  Result r;
  r.pass = fixed_points && rho0_to_origin && divergent_flagged && norm_err <= 1e-12;
  r.detail = fmt("fixed points ok=%d, |step(rho0)| %.1e, divergent flagged=%d, "
                 "norm consistency %.2e (tol 1e-12, 1000 states)",
                 fixed_points, at_rho0, divergent_flagged, norm_err);
  return r;
}

// ===== 10: optimizer convergence sanity ====================================

Result check_optimizer() {
  const Objective rosen = [](const VecX& p) {
    const double a = 1.0 - p(0);
    const double b = p(1) - p(0) * p(0);
    return a * a + 100.0 * b * b;
  };
  const GradientFn rosen_grad = [](const VecX& p) {
    VecX g(2);
    const double b = p(1) - p(0) * p(0);
    g(0) = -2.0 * (1.0 - p(0)) - 400.0 * p(0) * b;
    g(1) = 200.0 * b;
    return g;
  };
  OptimizerSettings rs;
  rs.optimality_tol = 1e-9;
  rs.step_tol = 1e-10;
  rs.max_iters = 200;
  VecX start(2);
  start << -1.2, 1.0;
  const OptimizerResult rosen_res = minimize(rosen, rosen_grad, start, rs);
  const double rosen_dist =
      std::max(std::abs(rosen_res.p_star(0) - 1.0), std::abs(rosen_res.p_star(1) - 1.0));
  const bool rosen_ok = rosen_res.ok() && rosen_dist <= 1e-4 && rosen_res.iterations <= 200;

  std::mt19937_64 rng(kSeed + 10);
  std::normal_distribution<double> gauss(0.0, 1.0);
  bool quad_ok = true;
  int worst_iters = 0;
  double worst_grad = 0.0;
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + trial % 9;
    MatX m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = gauss(rng);
    const MatX u = Eigen::HouseholderQR<MatX>(m).householderQ();
    VecX d(n);
    for (int i = 0; i < n; ++i)
      d(i) = std::pow(10.0, 3.0 * i / std::max(1, n - 1));  // condition <= 1e3
    const MatX q = u.transpose() * d.asDiagonal() * u;
    VecX b(n), p0(n);
    for (int i = 0; i < n; ++i) {
      b(i) = gauss(rng);
      p0(i) = gauss(rng);
    }
    const Objective f = [&q, &b](const VecX& p) {
      return 0.5 * p.dot(q * p) - b.dot(p);
    };
    const GradientFn g = [&q, &b](const VecX& p) { return VecX(q * p - b); };
    OptimizerSettings qs;
    qs.optimality_tol = 1e-8;
    qs.step_tol = 1e-12;  // the gradient goal must govern termination
    qs.max_iters = 200;
    const OptimizerResult res = minimize(f, g, p0, qs);
    const double gnorm = (q * res.p_star - b).lpNorm<Eigen::Infinity>();
    quad_ok = quad_ok && res.ok() && gnorm < 1e-8 && res.iterations <= 3 * n;
    worst_iters = std::max(worst_iters, res.iterations);
    worst_grad = std::max(worst_grad, gnorm);
  }

  Result r;
  r.pass = rosen_ok && quad_ok;
  r.detail = fmt("Rosenbrock |p-(1,1)| %.1e in %d iters; quadratics grad %.1e, "
                 "max iters %d (cap 3n)",
                 rosen_dist, rosen_res.iterations, worst_grad, worst_iters);
  return r;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Result()> run;
  };
  const std::vector<Criterion> criteria = {
      {"uncompensated-distortion-reproduction", check_uncompensated_thd},
      {"compensated-distortion-under-one-percent", check_compensated_thd},
      {"unit-cycle-amplitude-and-frequency", check_amplitude_frequency},
      {"normal-form-scaling-amplitudes", check_scaling},
      {"kernel-cost-oracle-equivalence", check_cost_oracle},
      {"zero-cost-certificate", check_zero_cost},
      {"analytic-gradient-consistency", check_gradient},
      {"discretization-fidelity", check_discretization},
      {"invariant-circle-map-properties", check_map_properties},
      {"optimizer-convergence-sanity", check_optimizer},
  };

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r;
    try {
      r = criteria[i].run();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    all = all && r.pass;
    std::printf("%s  %2zu  %s", r.pass ? "PASS" : "FAIL", i + 1, criteria[i].name);
    if (!r.detail.empty()) std::printf("  (%s)", r.detail.c_str());
    std::printf("\n");
    std::fflush(stdout);
  }
  std::printf("%s\n", all ? "acceptance: all 10 criteria pass"
                          : "acceptance: FAILURES above");
  return all ? 0 : 1;
}
