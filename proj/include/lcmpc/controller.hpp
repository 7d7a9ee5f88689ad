#pragma once

// Limit-cycle MPC orchestration.  Once per fundamental period the
// controller minimizes the kernel shape cost of the parameterized
// prediction
//
//     J(P) = cost( Psi x_k + Theta (M kron I_m) P + Gamma V )
//
// over the Fourier coefficients P, then applies the first period of the
// expanded optimum open-loop (periodic receding horizon).  Solves are
// warm-started from the previous period's optimum; re-optimization is
// synchronized to fundamental-period boundaries, which keeps the
// relative-time Fourier basis phase-consistent across periods.
//
// The predicted disturbance V is the measured previous period tiled over
// the horizon (the disturbance is periodic in steady state).

#include "fourier_param.hpp"
#include "kernel_cost.hpp"
#include "optimizer.hpp"

namespace lcmpc {

struct LcmpcConfig {
  LimitCycleParams lc;
  int hp;
  int h;
  DiscreteStateSpace plant;  ///< normal-form-transformed model
  int samples_per_period;

  LcmpcConfig(LimitCycleParams lc_, int hp_, int h_, DiscreteStateSpace plant_,
              int samples_per_period_)
      : lc(lc_), hp(hp_), h(h_), plant(std::move(plant_)),
        samples_per_period(samples_per_period_) {
    if (hp < 2) throw std::invalid_argument("LcmpcConfig: Hp must be >= 2");
    if (h < 1) throw std::invalid_argument("LcmpcConfig: h must be >= 1");
    if (samples_per_period < 1 || hp % samples_per_period != 0)
      throw std::invalid_argument(
          "LcmpcConfig: Hp must be an integer multiple of samples_per_period");
    if (std::abs(samples_per_period * lc.tau * lc.omega - 2.0 * M_PI) > 1e-9)
      throw std::invalid_argument(
          "LcmpcConfig: samples_per_period * tau * omega must equal 2*pi");
    if (plant.n != 2)
      throw std::invalid_argument("LcmpcConfig: the shape cost needs a planar plant");
    if (std::abs(plant.tau - lc.tau) > 1e-12 * lc.tau)
      throw std::invalid_argument("LcmpcConfig: plant and limit-cycle sampling differ");
  }
};

/// One period's control decision.  `u_star` is the first
/// m * samples_per_period samples of the expanded optimum, applied
/// open-loop until the next period boundary.
struct ControlPlan {
  VecX u_star;
  VecX p_star;
  OptimizerResult cost_trace;
  bool fell_back = false;  ///< optimizer failed; plan rebuilt from the warm start
};

/// Shape cost of the parameterized prediction (definitional composition).
inline double lcmpc_objective(const VecX& p, const VecX& x_k, const VecX& v,
                              const PredictionOperator& op, const FourierBasis& basis,
                              const LimitCycleParams& lc) {
  return cost_direct(predict_states_param(op, basis, x_k, p, v), lc).total;
}

class LcmpcController {
 public:
  explicit LcmpcController(LcmpcConfig cfg,
                           OptimizerSettings opt = OptimizerSettings{})
      : cfg_(std::move(cfg)), opt_(opt),
        op_(build_prediction_operator(cfg_.plant, cfg_.hp)),
        basis_(build_fourier_basis(cfg_.lc.omega, cfg_.lc.tau, cfg_.hp, cfg_.h)),
        w_(input_parameter_map(op_, basis_)) {}

  const LcmpcConfig& config() const { return cfg_; }
  const PredictionOperator& prediction_operator() const { return op_; }
  const FourierBasis& basis() const { return basis_; }

  int parameter_count() const { return 2 * op_.m * cfg_.h; }

  /// J(P) for measured state x_k and predicted disturbance V.
  double objective(const VecX& p, const VecX& x_k, const VecX& v) const {
    return cost_direct(free_response(x_k, v) + w_ * p, cfg_.lc).total;
  }

  /// dJ/dP, chained through the precomputed parameter-to-states map.
  VecX objective_gradient(const VecX& p, const VecX& x_k, const VecX& v) const {
    const VecX x = free_response(x_k, v) + w_ * p;
    return w_.transpose() * cost_gradient(x, cfg_.lc, GradientMode::Analytic);
  }

  /// Solves one period from `warm_start` (zeros when absent: no
  /// compensation).  If the optimizer fails or returns a non-finite cost,
  /// the plan falls back to the warm start and flags it.
  ControlPlan solve_period(const VecX& x_k, const VecX& v,
                           const VecX* warm_start = nullptr) const {
    if (x_k.size() != op_.n || v.size() != op_.d * cfg_.hp)
      throw std::invalid_argument("solve_period: dimension mismatch");
    if (warm_start && warm_start->size() != parameter_count())
      throw std::invalid_argument("solve_period: warm start has the wrong length");
    const VecX p0 =
        warm_start ? *warm_start : VecX(VecX::Zero(parameter_count()));
    const VecX base = free_response(x_k, v);
    const auto f = [&](const VecX& p) {
      return cost_direct(base + w_ * p, cfg_.lc).total;
    };
    const auto g = [&](const VecX& p) {
      return VecX(w_.transpose() *
                  cost_gradient(base + w_ * p, cfg_.lc, GradientMode::Analytic));
    };

    ControlPlan plan;
    plan.cost_trace = minimize(f, g, p0, opt_);
    plan.fell_back = !plan.cost_trace.ok() || !std::isfinite(plan.cost_trace.f_star);
    plan.p_star = plan.fell_back ? p0 : plan.cost_trace.p_star;
    const VecX u_full = expand_inputs(basis_, plan.p_star, op_.m);
    plan.u_star = u_full.head(op_.m * cfg_.samples_per_period);
    return plan;
  }

 private:
  VecX free_response(const VecX& x_k, const VecX& v) const {
    return op_.Psi * x_k + op_.Gamma * v;
  }

  LcmpcConfig cfg_;
  OptimizerSettings opt_;
  PredictionOperator op_;
  FourierBasis basis_;
  MatX w_;  // Theta (M kron I_m)
};

/// Horizon disturbance prediction: the fully observed previous period
/// (d-vector samples stacked, length d * samples_per_period) tiled
/// Hp / samples_per_period times.
inline VecX predict_disturbance(const VecX& previous_period, int d, int hp,
                                int samples_per_period) {
  if (d < 1 || samples_per_period < 1 || hp < 1 || hp % samples_per_period != 0)
    throw std::invalid_argument("predict_disturbance: invalid dimensions");
  if (previous_period.size() != d * samples_per_period)
    throw std::invalid_argument(
        "predict_disturbance: need exactly one full period of samples");
  VecX v(d * hp);
  for (int i = 0; i < hp; ++i)
    v.segment(i * d, d) = previous_period.segment((i % samples_per_period) * d, d);
  return v;
}

}  // namespace lcmpc
