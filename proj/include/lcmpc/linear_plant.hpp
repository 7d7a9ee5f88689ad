#pragma once

// Linear plant models and their horizon-lifted prediction form.
//
// Continuous dx/dt = Ac x + Bc u + Fc v, y = Cc x is discretized by zero-
// order hold into x[k+1] = A x[k] + B u[k] + F v[k], y = C x (+ w, an output
// disturbance carried by the simulator but zero throughout the application).
// Stacking Hp steps gives X = Psi x_k + Theta U + Gamma V with block
// lower-triangular Toeplitz Theta/Gamma, the form the parameterized
// optimization consumes.

#include "normal_forms.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <stdexcept>

namespace lcmpc {

struct ContinuousStateSpace {
  MatX Ac;
  MatX Bc;
  MatX Fc;
  MatX Cc;
  int n = 0;  ///< states
  int m = 0;  ///< inputs
  int d = 0;  ///< disturbances
  int r = 0;  ///< outputs

  ContinuousStateSpace(MatX ac, MatX bc, MatX fc, MatX cc)
      : Ac(std::move(ac)), Bc(std::move(bc)), Fc(std::move(fc)), Cc(std::move(cc)) {
    n = static_cast<int>(Ac.rows());
    m = static_cast<int>(Bc.cols());
    d = static_cast<int>(Fc.cols());
    r = static_cast<int>(Cc.rows());
    if (Ac.cols() != n || Bc.rows() != n || Fc.rows() != n || Cc.cols() != n)
      throw std::invalid_argument("ContinuousStateSpace: inconsistent dimensions");
    if (!Ac.allFinite() || !Bc.allFinite() || !Fc.allFinite() || !Cc.allFinite())
      throw std::invalid_argument("ContinuousStateSpace: non-finite entries");
  }
};

struct DiscreteStateSpace {
  MatX A;
  MatX B;
  MatX F;
  MatX C;
  double tau = 0.0;
  int n = 0;
  int m = 0;
  int d = 0;
  int r = 0;

  DiscreteStateSpace(MatX a, MatX b, MatX f, MatX c, double tau_)
      : A(std::move(a)), B(std::move(b)), F(std::move(f)), C(std::move(c)), tau(tau_) {
    n = static_cast<int>(A.rows());
    m = static_cast<int>(B.cols());
    d = static_cast<int>(F.cols());
    r = static_cast<int>(C.rows());
    if (A.cols() != n || B.rows() != n || F.rows() != n || C.cols() != n)
      throw std::invalid_argument("DiscreteStateSpace: inconsistent dimensions");
    if (!(tau > 0.0))
      throw std::invalid_argument("DiscreteStateSpace: tau must be > 0");
  }

  /// One plant step: state update driven by held input and disturbance.
  VecX step(const VecX& x, const VecX& u, const VecX& v) const {
    return A * x + B * u + F * v;
  }
};

/// ZOH discretization: A = exp(Ac tau), [B F] = (int_0^tau exp(Ac s) ds) [Bc Fc],
/// obtained from the top-right block of the augmented matrix exponential
/// exp([[Ac, Bc Fc], [0, 0]] tau).  C passes through unchanged.
inline DiscreteStateSpace zoh_discretize(const ContinuousStateSpace& css, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("zoh_discretize: tau must be > 0");
  const int n = css.n;
  const int q = css.m + css.d;
  MatX aug = MatX::Zero(n + q, n + q);
  aug.topLeftCorner(n, n) = css.Ac;
  aug.block(0, n, n, css.m) = css.Bc;
  aug.block(0, n + css.m, n, css.d) = css.Fc;
  const MatX e = (aug * tau).exp();
  if (!e.allFinite())
    throw std::runtime_error("zoh_discretize: matrix exponential is not finite");
  return DiscreteStateSpace(e.topLeftCorner(n, n), e.block(0, n, n, css.m),
                            e.block(0, n + css.m, n, css.d), css.Cc, tau);
}

/// Horizon-lifted prediction matrices.  Block row i (1-based) holds
/// Psi_i = A^i, Theta_(i,j) = A^(i-j) B for i >= j, Gamma likewise with F.
/// Immutable; built once per model/horizon and shared by every prediction.
struct PredictionOperator {
  MatX Psi;
  MatX Theta;
  MatX Gamma;
  int hp = 0;
  int n = 0;
  int m = 0;
  int d = 0;
};

inline PredictionOperator build_prediction_operator(const DiscreteStateSpace& dss,
                                                    int hp) {
  if (hp < 1) throw std::invalid_argument("build_prediction_operator: Hp must be >= 1");
  const int n = dss.n;
  PredictionOperator op;
  op.hp = hp;
  op.n = n;
  op.m = dss.m;
  op.d = dss.d;
  op.Psi = MatX::Zero(n * hp, n);
  op.Theta = MatX::Zero(n * hp, dss.m * hp);
  op.Gamma = MatX::Zero(n * hp, dss.d * hp);

  // Row i needs A^1..A^i; accumulate powers once.
  std::vector<MatX> pow(static_cast<std::size_t>(hp) + 1);
  pow[0] = MatX::Identity(n, n);
  for (int i = 1; i <= hp; ++i) pow[i] = dss.A * pow[i - 1];

  for (int i = 1; i <= hp; ++i) {
    op.Psi.block((i - 1) * n, 0, n, n) = pow[i];
    for (int j = 1; j <= i; ++j) {
      op.Theta.block((i - 1) * n, (j - 1) * dss.m, n, dss.m) = pow[i - j] * dss.B;
      op.Gamma.block((i - 1) * n, (j - 1) * dss.d, n, dss.d) = pow[i - j] * dss.F;
    }
  }
  return op;
}

/// Stacked prediction X = Psi x_k + Theta U + Gamma V.
inline VecX predict_states(const PredictionOperator& op, const VecX& x_k,
                           const VecX& u, const VecX& v) {
  if (x_k.size() != op.n || u.size() != op.m * op.hp || v.size() != op.d * op.hp)
    throw std::invalid_argument("predict_states: dimension mismatch");
  return op.Psi * x_k + op.Theta * u + op.Gamma * v;
}

/// One ZOH sample advanced by RK4 at tau/substeps: the continuous-time
/// cross-check for the discrete recursion (u, v held constant).
inline VecX rk4_zoh_sample(const ContinuousStateSpace& css, const VecX& x0,
                           const VecX& u, const VecX& v, double tau, int substeps) {
  if (substeps < 1) throw std::invalid_argument("rk4_zoh_sample: substeps must be >= 1");
  const VecX drive = css.Bc * u + css.Fc * v;
  const double h = tau / substeps;
  VecX x = x0;
  for (int s = 0; s < substeps; ++s) {
    const VecX k1 = css.Ac * x + drive;
    const VecX k2 = css.Ac * (x + 0.5 * h * k1) + drive;
    const VecX k3 = css.Ac * (x + 0.5 * h * k2) + drive;
    const VecX k4 = css.Ac * (x + h * k3) + drive;
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

}  // namespace lcmpc
