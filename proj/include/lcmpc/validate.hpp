#pragma once

// Self-check suites behind the `validate` CLI command: named pass/fail
// checks over the cost-kernel oracle pair, the discretization stack, the
// optimizer on reference problems, and phasor-vs-simulation THD agreement.
// Randomized checks draw from a caller-seeded generator so runs are
// reproducible by default and steerable with --seed.

#include "analysis.hpp"
#include "kernel_cost.hpp"
#include "linear_plant.hpp"
#include "optimizer.hpp"
#include "simulator.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace lcmpc {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// The bundled experiment: fifth-order current injection against the
/// default grid circuit, five fundamental periods at 5 kHz sampling.
inline SimulationConfig default_scenario(RunMode mode = RunMode::Compensated) {
  std::vector<HarmonicComponent> disturbance{
      {3, 2.0, std::atan(4.0 / 3.0)},
      {5, 3.0, std::atan(3.0 / 4.0) + M_PI / 2.0},
  };
  return SimulationConfig(GridCircuitParams{}, std::move(disturbance), 1e-2, -1e-2,
                          200, 5, 2e-4, 0.1, mode);
}

// ===== Phasor oracle =======================================================

/// Steady-state harmonic content predicted directly from the circuit
/// phasor solution: per-order amplitudes of i_l and v_c and the THD both
/// imply.  Contributions landing on the same order add as complex phasors.
struct OracleHarmonics {
  std::map<int, double> i_l_amplitude;
  std::map<int, double> v_c_amplitude;
  double thd_i = 0.0;
  double thd_v = 0.0;
};

inline OracleHarmonics phasor_oracle_harmonics(
    const GridCircuitParams& grid, const std::vector<HarmonicComponent>& disturbance) {
  std::map<int, PhasorPair> by_order;
  by_order[1] = supply_fundamental_phasor(grid);
  for (const HarmonicComponent& c : disturbance) {
    const std::complex<double> phasor =
        c.amplitude * std::exp(std::complex<double>(0.0, c.phase));
    const PhasorPair p =
        steady_state_phasor(grid, c.order, PhasorSource::DisturbanceCurrent, phasor);
    PhasorPair& acc = by_order[c.order];
    acc.i_l += p.i_l;
    acc.v_c += p.v_c;
  }

  OracleHarmonics out;
  double num_i = 0.0, num_v = 0.0;
  for (const auto& [order, pair] : by_order) {
    out.i_l_amplitude[order] = std::abs(pair.i_l);
    out.v_c_amplitude[order] = std::abs(pair.v_c);
    if (order != 1) {
      num_i += std::norm(pair.i_l);
      num_v += std::norm(pair.v_c);
    }
  }
  out.thd_i = 100.0 * std::sqrt(num_i) / out.i_l_amplitude.at(1);
  out.thd_v = 100.0 * std::sqrt(num_v) / out.v_c_amplitude.at(1);
  return out;
}

// ===== Suites ==============================================================

namespace detail {

inline CheckResult make_check(const std::string& name, bool pass, std::string detail) {
  return CheckResult{name, pass, std::move(detail)};
}

inline std::string worst_str(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

}  // namespace detail

inline std::vector<CheckResult> run_kernel_suite(unsigned seed) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const LimitCycleParams p(1e-2, -1e-2, 2.0 * M_PI * 50.0, 2e-4);

  {  // Vectorized form matches the accumulated per-pair form.
    double worst = 0.0;
    for (int hp : {2, 3, 5, 17, 200}) {
      const KernelCostMatrices m = build_cost_matrices(p, hp);
      for (int draw = 0; draw < 100; ++draw) {
        VecX x(2 * hp);
        for (int i = 0; i < x.size(); ++i) x(i) = gauss(rng);
        const double direct = cost_direct(x, p).total;
        const double vectorized = cost_vectorized(x, m, p).total;
        const double rel = std::abs(vectorized - direct) / (1.0 + std::abs(direct));
        worst = std::max(worst, rel);
      }
    }
    out.push_back(detail::make_check("kernel/oracle-equivalence", worst < 1e-10,
                                     "worst rel dev " + detail::worst_str(worst)));
  }

  {  // Map trajectories from the invariant circle cost nothing.
    const double rho = limit_cycle_radius(p);
    double worst = 0.0;
    bool perturbed_positive = true;
    for (int hp : {4, 50, 200}) {
      VecX x(2 * hp);
      Vec2 s(rho, 0.0);
      for (int j = 0; j < hp; ++j) {
        s = ns_map_step(s, p);
        x.segment<2>(2 * j) = s;
      }
      worst = std::max(worst, cost_direct(x, p).total / hp);
      VecX y = x;
      y(3) += 1e-3;
      perturbed_positive = perturbed_positive && cost_direct(y, p).total > 0.0;
    }
    out.push_back(detail::make_check("kernel/zero-cost-certificate",
                                     worst < 1e-18 && perturbed_positive,
                                     "worst cost/Hp " + detail::worst_str(worst)));
  }

  {  // Analytic gradient against central differences.
    double worst = 0.0;
    for (int draw = 0; draw < 50; ++draw) {
      const int hp = 4 + 2 * (draw % 4);
      VecX x(2 * hp);
      for (int i = 0; i < x.size(); ++i) x(i) = gauss(rng);
      const VecX ga = cost_gradient(x, p, GradientMode::Analytic);
      const VecX gf = cost_gradient(x, p, GradientMode::FiniteDifference);
      const double rel = (ga - gf).cwiseAbs().maxCoeff() /
                         std::max(1.0, gf.cwiseAbs().maxCoeff());
      worst = std::max(worst, rel);
    }
    out.push_back(detail::make_check("kernel/gradient-consistency", worst < 1e-5,
                                     "worst rel dev " + detail::worst_str(worst)));
  }
  return out;
}

inline std::vector<CheckResult> run_plant_suite(unsigned seed) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  {  // Continuous eigenvalues map through the exponential.
    const ContinuousStateSpace css = build_grid_state_space(GridCircuitParams{});
    const double tau = 2e-4;
    const DiscreteStateSpace dss = zoh_discretize(css, tau);
    Eigen::ComplexEigenSolver<MatX> cs(css.Ac), ds(dss.A);
    std::vector<std::complex<double>> expected, got;
    for (int i = 0; i < 2; ++i) {
      expected.push_back(std::exp(cs.eigenvalues()(i) * tau));
      got.push_back(ds.eigenvalues()(i));
    }
    auto key = [](const std::complex<double>& z) {
      return std::make_pair(z.real(), z.imag());
    };
    std::sort(expected.begin(), expected.end(),
              [&](auto a, auto b) { return key(a) < key(b); });
    std::sort(got.begin(), got.end(), [&](auto a, auto b) { return key(a) < key(b); });
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) worst = std::max(worst, std::abs(expected[i] - got[i]));
    out.push_back(detail::make_check("plant/eigenvalue-mapping", worst < 1e-10,
                                     "worst dev " + detail::worst_str(worst)));
  }

  {  // Stacked prediction equals step-by-step recursion.
    double worst = 0.0;
    for (int inst = 0; inst < 25; ++inst) {
      const int n = 2 + static_cast<int>(rng() % 3);
      const int m = 1 + static_cast<int>(rng() % 2);
      const int d = 1 + static_cast<int>(rng() % 2);
      MatX ac(n, n), bc(n, m), fc(n, d);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ac(i, j) = gauss(rng);
      ac -= (ac.cwiseAbs().rowwise().sum().maxCoeff() + 0.5) * MatX::Identity(n, n);
      for (int i = 0; i < bc.size(); ++i) bc(i) = gauss(rng);
      for (int i = 0; i < fc.size(); ++i) fc(i) = gauss(rng);
      const ContinuousStateSpace css(ac, bc, fc, MatX::Identity(n, n));
      const DiscreteStateSpace dss = zoh_discretize(css, 0.01);
      const int hp = 12;
      const PredictionOperator op = build_prediction_operator(dss, hp);
      VecX x0(n), u(hp * m), v(hp * d);
      for (int i = 0; i < n; ++i) x0(i) = gauss(rng);
      for (int i = 0; i < u.size(); ++i) u(i) = gauss(rng);
      for (int i = 0; i < v.size(); ++i) v(i) = gauss(rng);
      const VecX stacked = predict_states(op, x0, u, v);
      VecX x = x0;
      for (int k = 0; k < hp; ++k) {
        x = dss.step(x, u.segment(k * m, m), v.segment(k * d, d));
        worst = std::max(
            worst, (stacked.segment(k * n, n) - x).cwiseAbs().maxCoeff());
      }
    }
    out.push_back(detail::make_check("plant/lifted-vs-recursive", worst < 1e-12,
                                     "worst dev " + detail::worst_str(worst)));
  }

  {  // One exact discrete step against fine-grained integration.
    const ContinuousStateSpace css = build_grid_state_space(GridCircuitParams{});
    const DiscreteStateSpace dss = zoh_discretize(css, 2e-4);
    double worst = 0.0;
    for (int draw = 0; draw < 20; ++draw) {
      VecX x(2), u(1), v(2);
      x << gauss(rng), gauss(rng);
      u << gauss(rng);
      v << gauss(rng), gauss(rng);
      const VecX exact = dss.step(x, u, v);
      const VecX integrated = rk4_zoh_sample(css, x, u, v, 2e-4, 100);
      worst = std::max(worst, (exact - integrated).cwiseAbs().maxCoeff());
    }
    out.push_back(detail::make_check("plant/zoh-vs-integration", worst < 1e-6,
                                     "worst dev " + detail::worst_str(worst)));
  }
  return out;
}

inline std::vector<CheckResult> run_optimizer_suite(unsigned seed) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  {  // Rosenbrock valley from the classic start.
    auto f = [](const VecX& p) {
      const double a = 1.0 - p(0);
      const double b = p(1) - p(0) * p(0);
      return a * a + 100.0 * b * b;
    };
    auto g = [](const VecX& p) {
      VecX grad(2);
      const double b = p(1) - p(0) * p(0);
      grad(0) = -2.0 * (1.0 - p(0)) - 400.0 * p(0) * b;
      grad(1) = 200.0 * b;
      return grad;
    };
    VecX p0(2);
    p0 << -1.2, 1.0;
    OptimizerSettings st;
    st.optimality_tol = 1e-9;
    st.step_tol = 1e-10;
    st.max_iters = 200;
    const OptimizerResult r = minimize(f, g, p0, st);
    const double dist = std::max(std::abs(r.p_star(0) - 1.0), std::abs(r.p_star(1) - 1.0));
    out.push_back(detail::make_check(
        "optimizer/rosenbrock", r.ok() && dist < 1e-4 && r.iterations <= 200,
        "dist " + detail::worst_str(dist) + ", iters " + std::to_string(r.iterations)));
  }

  {  // Convex quadratics terminate within 3n iterations.
    bool all = true;
    std::string worst_case;
    for (int trial = 0; trial < 12; ++trial) {
      const int n = 2 + static_cast<int>(rng() % 9);
      MatX m(n, n);
      for (int i = 0; i < m.size(); ++i) m(i) = gauss(rng);
      const MatX q = m.transpose() * m + MatX::Identity(n, n) * 1e-2;
      VecX b(n);
      for (int i = 0; i < n; ++i) b(i) = gauss(rng);
      auto f = [&](const VecX& p) { return 0.5 * p.dot(q * p) - b.dot(p); };
      auto g = [&](const VecX& p) { return VecX(q * p - b); };
      VecX p0 = VecX::Zero(n);
      OptimizerSettings st;
      st.optimality_tol = 1e-9;
      st.step_tol = 1e-12;  // the gradient goal must govern termination
      const OptimizerResult r = minimize(f, g, p0, st);
      const double gnorm = g(r.p_star).cwiseAbs().maxCoeff();
      if (!(gnorm < 1e-8 && r.iterations <= 3 * n)) {
        all = false;
        worst_case = "n=" + std::to_string(n) + " gnorm " + detail::worst_str(gnorm) +
                     " iters " + std::to_string(r.iterations);
      }
    }
    out.push_back(detail::make_check("optimizer/quadratic-termination", all,
                                     all ? "12 instances" : worst_case));
  }
  return out;
}

inline std::vector<CheckResult> run_oracle_thd_suite() {
  std::vector<CheckResult> out;
  const SimulationConfig cfg = default_scenario(RunMode::Uncompensated);
  const SimulationLog log = run_closed_loop(cfg);
  const OracleHarmonics oracle = phasor_oracle_harmonics(cfg.grid, cfg.disturbance);

  const auto check_signal = [&](const char* name, double SampleRecord::* field,
                                double oracle_thd) {
    const std::vector<double> window = final_period_window(log, cfg, field);
    const HarmonicSpectrum s = harmonic_spectrum(window, cfg.grid.f, cfg.tau, 25);
    const double measured = thd(s);
    const double dev = std::abs(measured - oracle_thd);
    out.push_back(detail::make_check(
        std::string("oracle-thd/") + name, dev < 1.0,
        "simulated " + detail::worst_str(measured) + "%, phasor " +
            detail::worst_str(oracle_thd) + "%"));
  };
  check_signal("v_c", &SampleRecord::v_c, oracle.thd_v);
  check_signal("i_l", &SampleRecord::i_l, oracle.thd_i);
  return out;
}

/// Dispatches one named suite; "all" concatenates every suite.
inline std::vector<CheckResult> run_validation_suite(const std::string& suite,
                                                     unsigned seed) {
  std::vector<CheckResult> out;
  const auto append = [&](std::vector<CheckResult> v) {
    for (auto& c : v) out.push_back(std::move(c));
  };
  if (suite == "kernel") append(run_kernel_suite(seed));
  else if (suite == "plant") append(run_plant_suite(seed));
  else if (suite == "optimizer") append(run_optimizer_suite(seed));
  else if (suite == "oracle-thd") append(run_oracle_thd_suite());
  else if (suite == "all") {
    append(run_kernel_suite(seed));
    append(run_plant_suite(seed));
    append(run_optimizer_suite(seed));
    append(run_oracle_thd_suite());
  } else {
    throw std::invalid_argument("unknown validation suite: " + suite);
  }
  return out;
}

}  // namespace lcmpc
