#pragma once

// Harmonic input parameterization.  The future input sequence over the
// horizon is restricted to sin/cos combinations of the first h harmonics,
//
//     u_i = sum_{n=1}^{h} f_n sin(n w tau i) + g_n cos(n w tau i),
//
// written U(P) = (M kron I_m) P with M in R^{Hp x 2h} and the decision
// vector P = (f_1..f_h | g_1..g_h) of m-vectors.  Index i is relative to
// the optimization instant (row 0 uses angle 0); phase alignment with grid
// time comes from the controller re-optimizing at fundamental-period
// boundaries.  No DC column: compensation currents are zero-mean.

#include "linear_plant.hpp"

namespace lcmpc {

struct FourierBasis {
  MatX M;  ///< row i: [sin(n w tau i)]_{n=1..h} then [cos(n w tau i)]_{n=1..h}
  double omega = 0.0;
  double tau = 0.0;
  int hp = 0;
  int h = 0;
};

/// Samples the basis matrix.  Requires h*omega*tau < pi (Nyquist guard for
/// the highest parameterized harmonic).
inline FourierBasis build_fourier_basis(double omega, double tau, int hp, int h) {
  if (!(omega > 0.0) || !(tau > 0.0))
    throw std::invalid_argument("build_fourier_basis: omega and tau must be > 0");
  if (hp < 1 || h < 1)
    throw std::invalid_argument("build_fourier_basis: Hp and h must be >= 1");
  if (!(h * omega * tau < M_PI))
    throw std::invalid_argument(
        "build_fourier_basis: harmonic h violates the Nyquist bound h*omega*tau < pi");
  FourierBasis b;
  b.omega = omega;
  b.tau = tau;
  b.hp = hp;
  b.h = h;
  b.M.resize(hp, 2 * h);
  for (int i = 0; i < hp; ++i) {
    for (int n = 1; n <= h; ++n) {
      const double angle = n * omega * tau * i;
      b.M(i, n - 1) = std::sin(angle);
      b.M(i, h + n - 1) = std::cos(angle);
    }
  }
  return b;
}

/// U(P) = (M kron I_m) P: sample i of input channel a sums the basis row
/// against the per-harmonic m-vectors stacked in P.
inline VecX expand_inputs(const FourierBasis& b, const VecX& p, int m) {
  if (m < 1) throw std::invalid_argument("expand_inputs: m must be >= 1");
  if (p.size() != 2 * m * b.h)
    throw std::invalid_argument("expand_inputs: P must have length 2*m*h");
  VecX u = VecX::Zero(m * b.hp);
  for (int i = 0; i < b.hp; ++i)
    for (int c = 0; c < 2 * b.h; ++c)
      u.segment(i * m, m) += b.M(i, c) * p.segment(c * m, m);
  return u;
}

/// Parameterized prediction X(P) = Psi x_k + Theta (M kron I_m) P + Gamma V,
/// evaluated as the composition with expand_inputs (the definitional path).
inline VecX predict_states_param(const PredictionOperator& op, const FourierBasis& b,
                                 const VecX& x_k, const VecX& p, const VecX& v) {
  if (b.hp != op.hp)
    throw std::invalid_argument("predict_states_param: basis/operator horizon mismatch");
  return predict_states(op, x_k, expand_inputs(b, p, op.m), v);
}

/// Theta (M kron I_m): the dense map from P to stacked states' input share.
/// Precomputed by the controller so each objective evaluation is one
/// (nHp x 2mh) product instead of the full expansion chain.
inline MatX input_parameter_map(const PredictionOperator& op, const FourierBasis& b) {
  if (b.hp != op.hp)
    throw std::invalid_argument("input_parameter_map: basis/operator horizon mismatch");
  const int m = op.m;
  MatX kron(m * b.hp, 2 * m * b.h);
  for (int i = 0; i < b.hp; ++i)
    for (int c = 0; c < 2 * b.h; ++c)
      kron.block(i * m, c * m, m, m) = b.M(i, c) * MatX::Identity(m, m);
  return op.Theta * kron;
}

}  // namespace lcmpc
