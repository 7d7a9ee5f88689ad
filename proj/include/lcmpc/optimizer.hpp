#pragma once

// Unconstrained quasi-Newton minimization: BFGS on the inverse Hessian
// (rescaled seed, curvature-guarded updates) with an Armijo line search.
// The unit trial is refined once through the quadratic model fitted to
// f(0), f'(0), f(1); on a quadratic objective that model is the objective
// itself, so the accepted step is the exact 1-D minimizer and BFGS keeps
// its finite-termination behavior there.  Rejected trials shrink by the
// same interpolation with a plain factor fallback for non-finite values.

#include "normal_forms.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lcmpc {

struct OptimizerSettings {
  double optimality_tol = 1e-6;  ///< gradient infinity-norm threshold
  double step_tol = 1e-6;        ///< parameter-step infinity-norm threshold
  int max_iters = 500;
  double armijo_c1 = 1e-4;
  double backtrack_factor = 0.5;
  double fd_step_floor = 1e-6;   ///< FD fallback: h = max(floor, scale*||p||_inf)
  double fd_step_scale = 1e-8;
};

enum class StopReason { GradientTol, StepTol, MaxIters, Failed };

struct OptimizerResult {
  VecX p_star;
  double f_star = 0.0;
  int iterations = 0;
  StopReason reason = StopReason::Failed;
  int f_evals = 0;
  int g_evals = 0;
  std::string message;
  std::vector<double> f_trace;  ///< accepted objective values, f(p0) first

  bool ok() const { return reason != StopReason::Failed; }
};

using Objective = std::function<double(const VecX&)>;
using GradientFn = std::function<VecX(const VecX&)>;

/// Minimizes `f` from `p0`.  Pass an empty `grad` to fall back to central
/// finite differences.  Terminates on gradient tolerance, step tolerance,
/// or the iteration cap; a non-finite objective at p0 or a search direction
/// along which every trial is non-finite yields a Failed result.
inline OptimizerResult minimize(const Objective& f, const GradientFn& grad,
                                const VecX& p0,
                                const OptimizerSettings& s = OptimizerSettings{}) {
  if (!(s.optimality_tol > 0.0) || !(s.step_tol > 0.0) || !(s.armijo_c1 > 0.0) ||
      !(s.backtrack_factor > 0.0 && s.backtrack_factor < 1.0) ||
      !(s.fd_step_floor > 0.0) || !(s.fd_step_scale > 0.0) || s.max_iters < 1)
    throw std::invalid_argument("minimize: invalid settings");

  const int n = static_cast<int>(p0.size());
  OptimizerResult res;
  res.p_star = p0;

  const GradientFn g_eval = grad ? grad : GradientFn([&](const VecX& p) {
    const double h = std::max(s.fd_step_floor, s.fd_step_scale * p.lpNorm<Eigen::Infinity>());
    VecX g(p.size()), probe = p;
    for (int i = 0; i < p.size(); ++i) {
      probe(i) = p(i) + h;
      const double up = f(probe);
      probe(i) = p(i) - h;
      const double dn = f(probe);
      probe(i) = p(i);
      g(i) = (up - dn) / (2.0 * h);
    }
    res.f_evals += 2 * static_cast<int>(p.size());
    return g;
  });

  VecX p = p0;
  double fp = f(p);
  ++res.f_evals;
  if (!std::isfinite(fp)) {
    res.message = "objective not finite at the initial point";
    return res;
  }
  res.f_trace.push_back(fp);

  VecX g = g_eval(p);
  ++res.g_evals;
  MatX h_inv = MatX::Identity(n, n);
  bool scaled_seed = false;

  while (true) {
    if (g.lpNorm<Eigen::Infinity>() < s.optimality_tol) {
      res.reason = StopReason::GradientTol;
      break;
    }
    if (res.iterations >= s.max_iters) {
      res.reason = StopReason::MaxIters;
      break;
    }

    VecX d = -(h_inv * g);
    if (!d.allFinite() || d.dot(g) >= 0.0) {
      h_inv.setIdentity();
      scaled_seed = false;
      d = -g;
    }
    const double slope = d.dot(g);

    double alpha = 1.0;
    double f_new = f(p + alpha * d);
    ++res.f_evals;
    bool any_finite = std::isfinite(f_new);

    // Refine the unit trial through the quadratic model once; the model
    // minimizer is kept only when it actually improves on the trial, and
    // is clamped to a trust bracket so a wildly non-quadratic sample
    // cannot collapse or explode the step.
    if (any_finite) {
      const double denom = 2.0 * (f_new - fp - slope);
      if (denom > 0.0) {
        const double a_q = std::min(std::max(-slope / denom, 0.05), 20.0);
        const double f_q = f(p + a_q * d);
        ++res.f_evals;
        if (std::isfinite(f_q) && f_q < f_new) {
          alpha = a_q;
          f_new = f_q;
        }
      }
    }
    bool accepted =
        any_finite && f_new <= fp + s.armijo_c1 * alpha * slope;

    // Backtracking Armijo with quadratic interpolation of the shrink.
    for (int bt = 0; bt < 60 && !accepted; ++bt) {
      if (std::isfinite(f_new)) {
        const double denom = 2.0 * (f_new - fp - slope * alpha);
        double next = denom > 0.0 ? -slope * alpha * alpha / denom
                                  : s.backtrack_factor * alpha;
        alpha = std::min(std::max(next, 0.05 * alpha), 0.95 * alpha);
      } else {
        alpha *= s.backtrack_factor;
      }
      f_new = f(p + alpha * d);
      ++res.f_evals;
      if (std::isfinite(f_new)) {
        any_finite = true;
        accepted = f_new <= fp + s.armijo_c1 * alpha * slope;
      }
    }
    if (!accepted) {
      if (!any_finite) {
        res.reason = StopReason::Failed;
        res.message = "objective non-finite along the search direction";
      } else {
        // Finite but no acceptable decrease: flat to machine precision.
        res.reason = StopReason::StepTol;
      }
      break;
    }

    const VecX step = alpha * d;
    p += step;
    fp = f_new;
    ++res.iterations;
    res.f_trace.push_back(fp);

    const VecX g_new = g_eval(p);
    ++res.g_evals;
    const VecX y = g_new - g;
    const double ys = y.dot(step);

    if (!scaled_seed && ys > 0.0 && y.squaredNorm() > 0.0) {
      h_inv *= ys / y.squaredNorm();  // well-scaled seed before the first update
      scaled_seed = true;
    }
    if (ys > 1e-12 * y.norm() * step.norm()) {
      const double rho = 1.0 / ys;
      const VecX hy = h_inv * y;
      h_inv += (rho * rho * y.dot(hy) + rho) * (step * step.transpose());
      h_inv -= rho * (hy * step.transpose() + step * hy.transpose());
    }
    g = g_new;

    // A terminating step that lands on the optimum reports GradientTol
    // (checked at the top), not the step size that got it there.
    if (step.lpNorm<Eigen::Infinity>() < s.step_tol &&
        g.lpNorm<Eigen::Infinity>() >= s.optimality_tol) {
      res.reason = StopReason::StepTol;
      break;
    }
  }

  res.p_star = p;
  res.f_star = fp;
  return res;
}

}  // namespace lcmpc
